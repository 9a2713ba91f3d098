#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anchorlink/matching_graph.hpp"
#include "anchorlink/sampler.hpp"

namespace anchorlink {

/// Weights of the convolution stack and the logistic prediction head.
///
/// Layer k maps concat(h_self, h_nbr) of width 2*d_{k-1} to d_k through
/// W^k, an optional bias, an element-wise sigmoid and L2 normalization.
/// The head scores an embedding z as sigmoid(head_weights . z + head_bias).
struct ModelParams {
  std::vector<Mat> layer_weights;  // W^k: d_k x 2*d_{k-1}
  std::vector<Vec> layer_bias;     // b^k: d_k (zeros when use_bias is false)
  Vec head_weights;                // d_K
  double head_bias = 0.0;
  bool use_bias = true;

  int hops() const { return static_cast<int>(layer_weights.size()); }
  int input_dim() const {
    return static_cast<int>(layer_weights.front().cols()) / 2;
  }
  int embedding_dim() const {
    return static_cast<int>(layer_weights.back().rows());
  }

  /// Same shapes, all entries zero. Used as a gradient container.
  ModelParams zeros_like() const;

  /// Flat traversal helpers, used by the optimizer and the gradient check.
  std::size_t parameter_count() const;
  double* flat_at(std::size_t index);
  /// Name of the tensor owning the flat index, e.g. "layer_weights[1]".
  std::string parameter_name(std::size_t index) const;
};

/// Seeded uniform init in +-sqrt(6 / (fan_in + fan_out)); biases start at 0.
/// layer_dims holds d_1..d_K; d_0 is the theta feature dimension.
ModelParams init_params(int input_dim, std::span<const int> layer_dims, bool use_bias,
                        std::uint64_t seed);

/// Element-wise mean; the zero vector of dimension `dim` when empty.
Vec aggregate_mean(std::span<const Vec> neighbor_vectors, int dim);

/// sigma(W . concat(h_self, h_nbr) + b), L2-normalized. A vector that is
/// exactly zero before normalization stays zero.
Vec layer_forward(const Vec& h_self, const Vec& h_nbr, const Mat& weights,
                  const Vec& bias);

/// Mean cross-entropy over probabilities clamped to [1e-7, 1 - 1e-7].
double loss(std::span<const double> probabilities, std::span<const int> labels);

inline constexpr double kProbClamp = 1e-7;

/// Per-layer activations kept by the instrumented forward pass so the
/// backward pass can replay the computation. H[k] holds h^k for the first
/// |B^k| master rows; S[k] the pre-normalization sigmoid outputs.
struct ForwardTrace {
  std::vector<Mat> H;     // k = 0..K, rows are master rows
  std::vector<Mat> S;     // k = 1..K (index k-1)
  std::vector<Mat> NbrMean;  // k = 1..K (index k-1): mean of sampled h^{k-1}
  Vec logits;             // head input per target row
  Vec probabilities;      // per target row, before loss clamping
};

struct ForwardResult {
  Mat embeddings;      // |B^K| x d_K, unit rows (or zero rows)
  Vec probabilities;   // |B^K|, each in (0, 1)
};

/// Algorithm: h^0 = theta features for B^0; for k = 1..K every node of B^k
/// gets layer_forward(self at k-1, mean of its sampled neighbors at k-1);
/// the head turns final embeddings into probabilities.
ForwardResult forward(const Batch& batch, const ModelParams& params,
                      const MatchingGraphView& view);

/// forward + retained activations (for the trainer's backward pass).
ForwardTrace forward_traced(const Batch& batch, const ModelParams& params,
                            const MatchingGraphView& view);

}  // namespace anchorlink
