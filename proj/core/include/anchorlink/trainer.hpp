#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anchorlink/model.hpp"
#include "anchorlink/network.hpp"

namespace anchorlink {

/// Adam accumulators shaped like ModelParams, plus the step counter.
struct AdamState {
  std::vector<Mat> m_weights, v_weights;
  std::vector<Vec> m_bias, v_bias;
  Vec m_head, v_head;
  double m_head_bias = 0.0, v_head_bias = 0.0;
  long step = 0;

  static AdamState zeros_like(const ModelParams& params);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 128;
  int epochs = 100;
  double neg_ratio = 1.0;
  SamplingConfig sampling;
  std::uint64_t seed = 42;

  int embedding_dim = 128;  // d_k for every layer
  bool use_bias = true;
  bool early_stop = true;
  int early_stop_patience = 10;
  double early_stop_min_delta = 1e-5;

  void validate() const;
};

struct BackwardResult {
  double loss = 0.0;
  ModelParams gradients;  // same shapes as the params differentiated
};

/// Exact gradient of the batch loss with respect to every parameter,
/// differentiated through the head, L2 normalization, sigmoid, the linear
/// map, concatenation and mean aggregation over the recorded samples.
/// `labels` aligns with batch.targets(). Matches central finite differences
/// on a frozen batch.
BackwardResult backward(const Batch& batch, const ModelParams& params,
                        const MatchingGraphView& view, std::span<const int> labels);

/// One Adam update (beta1=0.9, beta2=0.999, eps=1e-8, bias-corrected
/// moments), in place. Bias tensors are left untouched when
/// params.use_bias is false.
void adam_step(ModelParams& params, const ModelParams& gradients, AdamState& state,
               double learning_rate);

/// Negative pairs (s, t') with s an anchored source and t' uniform over
/// target nodes, rejecting the true anchor pair and duplicates within the
/// draw. Returns ceil(ratio * |anchors|) pairs unless a source exhausts its
/// candidates (skipped with a warning on stderr).
std::vector<MatchingNode> sample_negatives(const AnchorSet& train_anchors,
                                           const Network& source,
                                           const Network& target, double ratio,
                                           RandomEngine& rng);

struct TrainResult {
  ModelParams params;
  AdamState adam;
  std::vector<double> loss_history;  // mean loss per epoch
};

/// Mini-batch training: each epoch draws fresh negatives, shuffles the
/// labeled matching nodes, and runs build_batch / forward / backward /
/// adam_step over batch_size slices. Deterministic for a fixed config.
/// Pass `resume` to continue from a previous result's params and state.
TrainResult train(const Network& source, const Network& target,
                  const AnchorSet& train_anchors, ThetaKind theta_kind,
                  const TrainConfig& cfg, const TrainResult* resume = nullptr);

}  // namespace anchorlink
