#include "anchorlink/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include "anchorlink/error.hpp"

namespace anchorlink {

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState s;
  for (const auto& w : params.layer_weights) {
    s.m_weights.push_back(Mat::Zero(w.rows(), w.cols()));
    s.v_weights.push_back(Mat::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : params.layer_bias) {
    s.m_bias.push_back(Vec::Zero(b.size()));
    s.v_bias.push_back(Vec::Zero(b.size()));
  }
  s.m_head = Vec::Zero(params.head_weights.size());
  s.v_head = Vec::Zero(params.head_weights.size());
  return s;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw UsageError("learning rate must be positive");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (epochs < 0) throw UsageError("epoch count must be >= 0");
  if (neg_ratio <= 0.0) throw UsageError("negative ratio must be positive");
  if (embedding_dim < 1) throw UsageError("embedding dimension must be >= 1");
  sampling.validate();
}

BackwardResult backward(const Batch& batch, const ModelParams& params,
                        const MatchingGraphView& view, std::span<const int> labels) {
  const auto targets = batch.targets();
  if (labels.size() != targets.size()) {
    throw DataError("label count does not match batch targets");
  }
  ForwardTrace trace = forward_traced(batch, params, view);
  const int hops = batch.hops();
  const auto n = static_cast<double>(targets.size());

  BackwardResult result;
  std::vector<double> probs(trace.probabilities.data(),
                            trace.probabilities.data() + trace.probabilities.size());
  std::vector<int> label_vec(labels.begin(), labels.end());
  result.loss = loss(probs, label_vec);
  result.gradients = params.zeros_like();
  ModelParams& g = result.gradients;

  // head: dL/dlogit = (p - y)/n when the loss clamp is inactive, 0 otherwise
  const Eigen::Index nt = trace.probabilities.size();
  Vec g_logit(nt);
  for (Eigen::Index i = 0; i < nt; ++i) {
    const double p = trace.probabilities[i];
    g_logit[i] =
        (p < kProbClamp || p > 1.0 - kProbClamp) ? 0.0 : (p - label_vec[i]) / n;
  }
  const Mat& z = trace.H[hops];
  g.head_weights = z.topRows(nt).transpose() * g_logit;
  g.head_bias = g_logit.sum();

  // grad wrt h^K rows, then walk the layers down
  Mat grad_h = Mat::Zero(trace.H[hops].rows(), trace.H[hops].cols());
  grad_h.topRows(nt) = g_logit * params.head_weights.transpose();

  for (int k = hops; k >= 1; --k) {
    const Mat& w = params.layer_weights[k - 1];
    const Mat& s_mat = trace.S[k - 1];
    const Mat& h_mat = trace.H[k];
    const Mat& prev = trace.H[k - 1];
    const Mat& nbr = trace.NbrMean[k - 1];
    const int d_prev = static_cast<int>(prev.cols());
    Mat grad_prev = Mat::Zero(prev.rows(), prev.cols());

    for (Eigen::Index r = 0; r < h_mat.rows(); ++r) {
      const double norm = s_mat.row(r).norm();
      if (norm == 0.0) continue;  // zero-vector convention: flat region
      const Vec g_h = grad_h.row(r);
      if (g_h.isZero(0.0)) continue;
      const Vec h = h_mat.row(r);
      const Vec s = s_mat.row(r);
      // d(s/|s|) pullback, then sigmoid
      Vec g_s = (g_h - h * h.dot(g_h)) / norm;
      Vec g_a = g_s.array() * s.array() * (1.0 - s.array());

      Vec cat(2 * d_prev);
      cat << prev.row(r).transpose(), nbr.row(r).transpose();
      g.layer_weights[k - 1].noalias() += g_a * cat.transpose();
      g.layer_bias[k - 1] += g_a;

      Vec g_cat = w.transpose() * g_a;
      grad_prev.row(r) += g_cat.head(d_prev);
      const auto rec = batch.sampled_rows(static_cast<int>(r));
      if (!rec.empty()) {
        const Vec share = g_cat.tail(d_prev) / static_cast<double>(rec.size());
        for (int rr : rec) grad_prev.row(rr) += share;
      }
    }
    grad_h = std::move(grad_prev);
  }

  for (const auto& gw : g.layer_weights) {
    if (!gw.allFinite()) {
      throw NumericError("non-finite gradient in layer_weights");
    }
  }
  if (!g.head_weights.allFinite() || !std::isfinite(g.head_bias)) {
    throw NumericError("non-finite gradient in head");
  }
  return result;
}

namespace {

inline void adam_update(Eigen::Map<Eigen::ArrayXd> p, Eigen::Map<const Eigen::ArrayXd> g,
                        Eigen::Map<Eigen::ArrayXd> m, Eigen::Map<Eigen::ArrayXd> v,
                        double lr, double bc1, double bc2) {
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
  v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * g.square();
  p -= lr * (m / bc1) / ((v / bc2).sqrt() + kAdamEpsilon);
}

}  // namespace

void adam_step(ModelParams& params, const ModelParams& gradients, AdamState& state,
               double learning_rate) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  auto map = [](auto& t) {
    return Eigen::Map<Eigen::ArrayXd>(t.data(), t.size());
  };
  auto cmap = [](const auto& t) {
    return Eigen::Map<const Eigen::ArrayXd>(t.data(), t.size());
  };

  for (std::size_t k = 0; k < params.layer_weights.size(); ++k) {
    adam_update(map(params.layer_weights[k]), cmap(gradients.layer_weights[k]),
                map(state.m_weights[k]), map(state.v_weights[k]), learning_rate, bc1,
                bc2);
    if (params.use_bias) {
      adam_update(map(params.layer_bias[k]), cmap(gradients.layer_bias[k]),
                  map(state.m_bias[k]), map(state.v_bias[k]), learning_rate, bc1, bc2);
    }
  }
  adam_update(map(params.head_weights), cmap(gradients.head_weights),
              map(state.m_head), map(state.v_head), learning_rate, bc1, bc2);

  const double g = gradients.head_bias;
  state.m_head_bias = kAdamBeta1 * state.m_head_bias + (1.0 - kAdamBeta1) * g;
  state.v_head_bias = kAdamBeta2 * state.v_head_bias + (1.0 - kAdamBeta2) * g * g;
  params.head_bias -= learning_rate * (state.m_head_bias / bc1) /
                      (std::sqrt(state.v_head_bias / bc2) + kAdamEpsilon);
}

std::vector<MatchingNode> sample_negatives(const AnchorSet& train_anchors,
                                           const Network& source,
                                           const Network& target, double ratio,
                                           RandomEngine& rng) {
  if (train_anchors.pairs.empty()) throw DataError("no anchors to sample negatives for");
  if (ratio <= 0.0) throw UsageError("negative ratio must be positive");
  if (target.node_count() <= static_cast<int>(train_anchors.pairs.size())) {
    throw DataError("target network has no unanchored nodes to draw negatives from");
  }
  (void)source;

  std::unordered_map<int, int> anchor_of;
  for (const auto& [s, t] : train_anchors.pairs) anchor_of.emplace(s, t);

  const auto n_anchors = train_anchors.pairs.size();
  const auto count =
      static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n_anchors)));
  std::vector<MatchingNode> out;
  out.reserve(count);
  std::unordered_set<std::uint64_t> drawn;
  std::unordered_map<int, int> drawn_per_source;

  for (std::size_t i = 0; i < count; ++i) {
    const int s = train_anchors.pairs[i % n_anchors].first;
    // every target except s's own anchor is admissible once
    if (drawn_per_source[s] >= target.node_count() - 1) {
      std::cerr << "[anchorlink] warning: no negative candidates left for source "
                << s << ", skipping\n";
      continue;
    }
    for (;;) {
      const int t = static_cast<int>(rng.uniform_below(target.node_count()));
      if (t == anchor_of[s]) continue;
      const MatchingNode m{s, t};
      if (!drawn.insert(m.key()).second) continue;
      out.push_back(m);
      drawn_per_source[s] += 1;
      break;
    }
  }
  return out;
}

TrainResult train(const Network& source, const Network& target,
                  const AnchorSet& train_anchors, ThetaKind theta_kind,
                  const TrainConfig& cfg, const TrainResult* resume) {
  cfg.validate();
  validate_anchors(train_anchors, source, target);
  if (train_anchors.pairs.empty()) throw DataError("empty training anchor set");

  const MatchingGraphView view(source, target, theta_kind);
  RandomEngine rng(cfg.seed);
  const std::uint64_t init_seed = rng.next_u64();

  TrainResult result;
  if (resume) {
    result.params = resume->params;
    result.adam = resume->adam;
    result.loss_history = resume->loss_history;
  } else {
    std::vector<int> dims(cfg.sampling.hops, cfg.embedding_dim);
    result.params = init_params(view.feature_dim(), dims, cfg.use_bias, init_seed);
    result.adam = AdamState::zeros_like(result.params);
  }

  struct Labeled {
    MatchingNode node;
    int label;
  };

  double best_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improved = 0;
  for (const double past : result.loss_history) {
    best_loss = std::min(best_loss, past);
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto negatives = sample_negatives(train_anchors, source, target, cfg.neg_ratio, rng);
    std::vector<Labeled> examples;
    examples.reserve(train_anchors.pairs.size() + negatives.size());
    for (const auto& [s, t] : train_anchors.pairs) {
      examples.push_back({{s, t}, 1});
    }
    for (const auto& m : negatives) examples.push_back({m, 0});
    rng.shuffle(examples);

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < examples.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(examples.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      std::vector<MatchingNode> targets_slice;
      std::vector<int> labels;
      targets_slice.reserve(end - begin);
      labels.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        targets_slice.push_back(examples[i].node);
        labels.push_back(examples[i].label);
      }
      Batch batch = build_batch(targets_slice, view, cfg.sampling, rng);
      BackwardResult step = backward(batch, result.params, view, labels);
      adam_step(result.params, step.gradients, result.adam, cfg.learning_rate);
      epoch_loss += step.loss * static_cast<double>(end - begin);
      seen += end - begin;
    }
    epoch_loss /= static_cast<double>(seen);
    result.loss_history.push_back(epoch_loss);

    if (epoch_loss < best_loss - cfg.early_stop_min_delta) {
      best_loss = epoch_loss;
      epochs_since_improved = 0;
    } else {
      epochs_since_improved += 1;
    }
    if (cfg.early_stop && epochs_since_improved >= cfg.early_stop_patience) break;
  }
  return result;
}

}  // namespace anchorlink
