#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "anchorlink/matching_graph.hpp"
#include "anchorlink/rng.hpp"

namespace anchorlink {

enum class SamplingStrategy {
  Random,             // uniform over N(s) x N(t)
  FeatureImportance,  // weighted by max(cos(x^s_k, x^t_l), epsilon)
};

/// Weight floor that keeps feature-importance sampling from starving
/// candidates whose attribute cosine is <= 0.
inline constexpr double kFeatureWeightFloor = 1e-6;

struct SamplingConfig {
  int hops = 2;                        // K, number of convolution layers
  std::vector<int> fanouts = {10, 5};  // q_1..q_K, innermost (layer 1) first
  SamplingStrategy strategy = SamplingStrategy::Random;
  std::uint64_t seed = 42;

  void validate() const;
};

/// A layered mini-batch B^K..B^0 with bootstrap-sampled neighborhoods.
///
/// Layers are nested prefixes of one master node list: B^K is the target
/// slice, and each expansion appends the newly sampled neighbors, so
/// B^0 ⊇ B^1 ⊇ ... ⊇ B^K holds with stable row indices across layers.
///
/// Every node carries one sampled-neighbor record, drawn with replacement
/// from its true matching neighborhood when the node first enters a layer;
/// the expansion that produces B^{k-1} samples with fanout q_k. Aggregation
/// at every layer reuses the node's record, which keeps the batch size
/// bounded by |targets| * (1 + q_K * (1 + q_{K-1} * (...))) regardless of
/// network size. Nodes with an empty true neighborhood get an empty record.
class Batch {
 public:
  int hops() const { return static_cast<int>(layer_len_.size()) - 1; }

  /// Nodes of layer k (k in [0, K]); layer K is the target list as given.
  std::span<const MatchingNode> layer(int k) const {
    return {nodes_.data(), static_cast<std::size_t>(layer_len_[k])};
  }

  std::span<const MatchingNode> targets() const { return layer(hops()); }

  std::size_t total_nodes() const { return nodes_.size(); }

  /// Sampled-neighbor record of the node at master row `row`, as master row
  /// indices (with multiplicity). Rows referenced here always lie inside
  /// every layer the node participates in aggregation at.
  std::span<const int> sampled_rows(int row) const {
    return {rec_[row].data(), rec_[row].size()};
  }

  /// Sampled-neighbor record as matching nodes.
  std::vector<MatchingNode> sampled_neighbors(MatchingNode m) const;

  MatchingNode node_at(int row) const { return nodes_[row]; }

  /// Row of the node in the master list, or -1 when absent.
  int row_of(MatchingNode m) const;

 private:
  friend Batch build_batch(std::span<const MatchingNode> targets,
                           const MatchingGraphView& view, const SamplingConfig& cfg,
                           RandomEngine& rng);

  std::vector<MatchingNode> nodes_;            // master list; B^0
  std::vector<int> layer_len_;                 // index k -> |B^k|
  std::vector<std::vector<int>> rec_;          // per master row
  std::unordered_map<std::uint64_t, int> row_index_;
};

/// q bootstrap draws (with replacement) from `candidates`: uniform when
/// `weights` is absent, proportional to `weights` otherwise (all-zero
/// weights fall back to uniform). Empty candidates produce an empty result,
/// which downstream aggregation treats as "no neighbors".
std::vector<MatchingNode> sample_neighbors(std::span<const MatchingNode> candidates,
                                           int q,
                                           std::optional<std::span<const double>> weights,
                                           RandomEngine& rng);

/// One expansion of Batch-sampling: every frontier node draws q neighbors
/// from its matching neighborhood under the given strategy.
struct LayerExpansion {
  std::vector<MatchingNode> next_layer;  // frontier ++ newly seen samples
  std::unordered_map<std::uint64_t, std::vector<MatchingNode>> sampled;
};

LayerExpansion batch_sampling(std::span<const MatchingNode> frontier,
                              const MatchingGraphView& view, int q,
                              SamplingStrategy strategy, RandomEngine& rng);

/// Builds the full layered batch for `targets` (= B^K).
Batch build_batch(std::span<const MatchingNode> targets, const MatchingGraphView& view,
                  const SamplingConfig& cfg, RandomEngine& rng);

}  // namespace anchorlink
