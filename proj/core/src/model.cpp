#include "anchorlink/model.hpp"

#include <cmath>

#include "anchorlink/error.hpp"

namespace anchorlink {

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.use_bias = use_bias;
  z.layer_weights.reserve(layer_weights.size());
  z.layer_bias.reserve(layer_bias.size());
  for (const auto& w : layer_weights) z.layer_weights.push_back(Mat::Zero(w.rows(), w.cols()));
  for (const auto& b : layer_bias) z.layer_bias.push_back(Vec::Zero(b.size()));
  z.head_weights = Vec::Zero(head_weights.size());
  z.head_bias = 0.0;
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : layer_weights) n += w.size();
  for (const auto& b : layer_bias) n += b.size();
  return n + head_weights.size() + 1;
}

double* ModelParams::flat_at(std::size_t index) {
  for (auto& w : layer_weights) {
    if (index < static_cast<std::size_t>(w.size())) return w.data() + index;
    index -= w.size();
  }
  for (auto& b : layer_bias) {
    if (index < static_cast<std::size_t>(b.size())) return b.data() + index;
    index -= b.size();
  }
  if (index < static_cast<std::size_t>(head_weights.size())) {
    return head_weights.data() + index;
  }
  index -= head_weights.size();
  if (index == 0) return &head_bias;
  throw UsageError("flat parameter index out of range");
}

std::string ModelParams::parameter_name(std::size_t index) const {
  for (std::size_t k = 0; k < layer_weights.size(); ++k) {
    if (index < static_cast<std::size_t>(layer_weights[k].size())) {
      return "layer_weights[" + std::to_string(k) + "]";
    }
    index -= layer_weights[k].size();
  }
  for (std::size_t k = 0; k < layer_bias.size(); ++k) {
    if (index < static_cast<std::size_t>(layer_bias[k].size())) {
      return "layer_bias[" + std::to_string(k) + "]";
    }
    index -= layer_bias[k].size();
  }
  if (index < static_cast<std::size_t>(head_weights.size())) return "head_weights";
  return "head_bias";
}

ModelParams init_params(int input_dim, std::span<const int> layer_dims, bool use_bias,
                        std::uint64_t seed) {
  if (input_dim < 1) throw UsageError("model input dimension must be >= 1");
  if (layer_dims.empty()) throw UsageError("at least one layer dimension required");
  RandomEngine rng(seed);
  ModelParams p;
  p.use_bias = use_bias;
  int prev = input_dim;
  for (int d : layer_dims) {
    if (d < 1) throw UsageError("layer dimensions must be >= 1");
    const int fan_in = 2 * prev;
    const double bound = std::sqrt(6.0 / (fan_in + d));
    Mat w(d, fan_in);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
    }
    p.layer_weights.push_back(std::move(w));
    p.layer_bias.push_back(Vec::Zero(d));
    prev = d;
  }
  const double head_bound = std::sqrt(6.0 / (prev + 1));
  p.head_weights = Vec(prev);
  for (Eigen::Index i = 0; i < p.head_weights.size(); ++i) {
    p.head_weights[i] = (2.0 * rng.uniform() - 1.0) * head_bound;
  }
  p.head_bias = 0.0;
  return p;
}

Vec aggregate_mean(std::span<const Vec> neighbor_vectors, int dim) {
  Vec out = Vec::Zero(dim);
  if (neighbor_vectors.empty()) return out;
  for (const auto& v : neighbor_vectors) {
    if (v.size() != dim) throw DataError("aggregate_mean dimension mismatch");
    out += v;
  }
  return out / static_cast<double>(neighbor_vectors.size());
}

namespace {

inline void sigmoid_inplace(Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = 1.0 / (1.0 + std::exp(-x[i]));
  }
}

inline void check_finite(const Vec& x, const char* where) {
  if (!x.allFinite()) {
    throw NumericError(std::string("non-finite value in ") + where);
  }
}

}  // namespace

Vec layer_forward(const Vec& h_self, const Vec& h_nbr, const Mat& weights,
                  const Vec& bias) {
  if (h_self.size() != h_nbr.size()) {
    throw DataError("layer_forward: self and neighbor dimensions differ");
  }
  if (weights.cols() != 2 * h_self.size()) {
    throw DataError("layer_forward: weight width does not match concat input");
  }
  Vec cat(2 * h_self.size());
  cat << h_self, h_nbr;
  Vec a = weights * cat + bias;
  check_finite(a, "layer pre-activation");
  sigmoid_inplace(a);
  const double n = a.norm();
  if (n > 0.0) a /= n;
  return a;
}

double loss(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.empty()) throw UsageError("loss over an empty batch");
  if (probabilities.size() != labels.size()) {
    throw DataError("loss: probability and label counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p =
        std::min(1.0 - kProbClamp, std::max(kProbClamp, probabilities[i]));
    total += labels[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(probabilities.size());
}

ForwardTrace forward_traced(const Batch& batch, const ModelParams& params,
                            const MatchingGraphView& view) {
  const int hops = batch.hops();
  if (hops != params.hops()) {
    throw DataError("batch built with " + std::to_string(hops) + " hops but params have " +
                    std::to_string(params.hops()));
  }
  if (params.input_dim() != view.feature_dim()) {
    throw DataError("theta feature dimension " + std::to_string(view.feature_dim()) +
                    " does not match model input dimension " +
                    std::to_string(params.input_dim()));
  }

  ForwardTrace trace;
  trace.H.resize(hops + 1);
  trace.S.resize(hops);
  trace.NbrMean.resize(hops);

  const auto b0 = batch.layer(0);
  const int d0 = view.feature_dim();
  Mat h0(static_cast<Eigen::Index>(b0.size()), d0);
  for (std::size_t r = 0; r < b0.size(); ++r) {
    h0.row(static_cast<Eigen::Index>(r)) = view.features(b0[r]).transpose();
  }
  trace.H[0] = std::move(h0);

  for (int k = 1; k <= hops; ++k) {
    const auto bk = batch.layer(k);
    const Mat& prev = trace.H[k - 1];
    const int d_prev = static_cast<int>(prev.cols());
    const Mat& w = params.layer_weights[k - 1];
    const Vec& bias = params.layer_bias[k - 1];
    const int d_out = static_cast<int>(w.rows());

    Mat nbr(static_cast<Eigen::Index>(bk.size()), d_prev);
    Mat cat(static_cast<Eigen::Index>(bk.size()), 2 * d_prev);
    for (std::size_t r = 0; r < bk.size(); ++r) {
      const auto rec = batch.sampled_rows(static_cast<int>(r));
      Vec m = Vec::Zero(d_prev);
      for (int rr : rec) m += prev.row(rr);
      if (!rec.empty()) m /= static_cast<double>(rec.size());
      nbr.row(static_cast<Eigen::Index>(r)) = m.transpose();
      cat.row(static_cast<Eigen::Index>(r)) << prev.row(static_cast<Eigen::Index>(r)),
          m.transpose();
    }

    Mat a = cat * w.transpose();
    a.rowwise() += bias.transpose();
    if (!a.allFinite()) throw NumericError("non-finite pre-activation at layer " + std::to_string(k));
    Mat s = (1.0 + (-a).array().exp()).inverse().matrix();
    Mat h(s.rows(), d_out);
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const double n = s.row(r).norm();
      h.row(r) = n > 0.0 ? (s.row(r) / n).eval() : s.row(r);
    }
    trace.NbrMean[k - 1] = std::move(nbr);
    trace.S[k - 1] = std::move(s);
    trace.H[k] = std::move(h);
  }

  const auto targets = batch.targets();
  const Eigen::Index nt = static_cast<Eigen::Index>(targets.size());
  trace.logits = trace.H[hops].topRows(nt) * params.head_weights;
  trace.logits.array() += params.head_bias;
  trace.probabilities = (1.0 + (-trace.logits).array().exp()).inverse().matrix();
  if (!trace.probabilities.allFinite()) throw NumericError("non-finite head output");
  return trace;
}

ForwardResult forward(const Batch& batch, const ModelParams& params,
                      const MatchingGraphView& view) {
  ForwardTrace trace = forward_traced(batch, params, view);
  ForwardResult out;
  const Eigen::Index nt = static_cast<Eigen::Index>(batch.targets().size());
  out.embeddings = trace.H[batch.hops()].topRows(nt);
  out.probabilities = std::move(trace.probabilities);
  return out;
}

}  // namespace anchorlink
