#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "anchorlink/network.hpp"

namespace anchorlink {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One node of the matching graph: a (source node, target node) pair.
struct MatchingNode {
  std::int32_t s = 0;
  std::int32_t t = 0;

  friend auto operator<=>(const MatchingNode&, const MatchingNode&) = default;

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
           static_cast<std::uint32_t>(t);
  }
};

/// Attribute combiner applied to a matching node's two attribute vectors.
enum class ThetaKind {
  CosineScalar,  // 1-dim: cosine similarity, 0 when either norm is 0
  Hadamard,      // element-wise product (equal dims required)
  Concat,        // concatenation
};

/// theta(xs, xt): the matching node's combined attribute vector.
Vec theta(std::span<const double> xs, std::span<const double> xt, ThetaKind kind);

/// Output dimension of theta for the given input dimensions.
int theta_dim(int source_dim, int target_dim, ThetaKind kind);

/// Lazy view of the matching graph over two networks.
///
/// Matching nodes, their features, and their neighborhoods are computed on
/// demand; neither the V^s x V^t node set nor the quadratic edge set is ever
/// stored. All member functions are pure and safe to call concurrently.
class MatchingGraphView {
 public:
  MatchingGraphView(const Network& source, const Network& target, ThetaKind kind);

  const Network& source() const { return *source_; }
  const Network& target() const { return *target_; }
  ThetaKind theta_kind() const { return kind_; }
  int feature_dim() const { return feature_dim_; }

  /// theta over m's attribute vectors.
  Vec features(MatchingNode m) const;

  /// The full neighborhood N(s) x N(t) in lexicographic order.
  /// Size is always deg(s) * deg(t).
  std::vector<MatchingNode> matching_neighbors(MatchingNode m) const;

  std::size_t matching_degree(MatchingNode m) const;

  /// True iff (a.s, b.s) is a source edge and (a.t, b.t) is a target edge.
  bool is_matching_edge(MatchingNode a, MatchingNode b) const;

  void check_node(MatchingNode m) const;

 private:
  const Network* source_;
  const Network* target_;
  ThetaKind kind_;
  int feature_dim_;
};

/// Explicit node and edge lists of the matching graph. Quadratic in both
/// directions; intended for test oracles and debugging dumps only.
struct MaterializedMatchingGraph {
  std::vector<MatchingNode> nodes;                     // all n^s * n^t, lexicographic
  std::vector<std::pair<MatchingNode, MatchingNode>> edges;  // a < b, lexicographic
};

/// Enumerates every matching node and every pair satisfying is_matching_edge.
/// Refuses to run when n^s * n^t exceeds `node_cap`.
MaterializedMatchingGraph materialize_matching_graph(const MatchingGraphView& view,
                                                     std::size_t node_cap = 10000);

/// GraphViz dump of a materialized matching graph.
void write_dot(const MaterializedMatchingGraph& graph, std::ostream& out);

}  // namespace anchorlink
