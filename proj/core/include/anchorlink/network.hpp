#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anchorlink/rng.hpp"

namespace anchorlink {

/// A single undirected attributed network.
///
/// Node ids are dense 0-based integers. Adjacency is stored CSR-style with
/// per-node sorted neighbor lists; attributes are a dense row-major
/// node_count x attr_dim matrix. Instances are immutable after construction
/// and safe for concurrent reads.
class Network {
 public:
  /// Builds from an undirected edge list. Edges are de-duplicated and
  /// symmetrized; self-loops and out-of-range endpoints are rejected.
  /// `attributes` must have exactly one row per node, all of equal
  /// dimension >= 1.
  Network(int node_count, std::span<const std::pair<int, int>> edges,
          std::vector<std::vector<double>> attributes);

  int node_count() const { return node_count_; }
  int attr_dim() const { return attr_dim_; }
  std::size_t edge_count() const { return neighbor_ids_.size() / 2; }

  /// Sorted neighbor list of v; empty for isolated nodes.
  std::span<const int> neighbors(int v) const;

  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  /// True iff {u, v} is an edge (binary search on the sorted list).
  bool has_edge(int u, int v) const;

  std::span<const double> attributes_of(int v) const;

  /// All edges as (u, v) with u < v, ascending.
  std::vector<std::pair<int, int>> edge_list() const;

 private:
  void check_node(int v) const;

  int node_count_ = 0;
  int attr_dim_ = 0;
  std::vector<std::size_t> offsets_;  // node_count_ + 1
  std::vector<int> neighbor_ids_;
  std::vector<double> attrs_;  // row-major node_count_ x attr_dim_
};

/// Cross-network ground-truth anchor pairs (source id, target id).
/// A partial 1-to-1 matching: no duplicate pairs, and no source or target
/// id appears twice.
struct AnchorSet {
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// Validates the 1-to-1 matching invariants against the two networks.
void validate_anchors(const AnchorSet& anchors, const Network& source,
                      const Network& target);

enum class AttrEncoding {
  Dense,        // one comma-separated real vector per node
  Categorical,  // one integer class id per node, one-hot encoded on load
};

/// Loads a network from an edge file ("u v" per line, ASCII integers) and an
/// attribute file (row i = node i). Node count is the number of attribute
/// rows. Parse and range errors are reported with 1-based line numbers.
Network load_network(const std::string& edge_path, const std::string& attr_path,
                     AttrEncoding encoding = AttrEncoding::Dense);

/// Writes the formats load_network reads (canonical form: edges "u v" with
/// u < v ascending, attributes with round-trip-exact decimal doubles).
void save_network(const Network& net, const std::string& edge_path,
                  const std::string& attr_path);

/// Loads anchor pairs ("s t" per line) and validates them against both sides.
AnchorSet load_anchors(const std::string& path, const Network& source,
                       const Network& target);

void save_anchors(const AnchorSet& anchors, const std::string& path);

/// Deterministic disjoint split. |train| = round-half-up(ratio * |pairs|);
/// a ratio that would leave either side empty is an error.
std::pair<AnchorSet, AnchorSet> split_anchors(const AnchorSet& anchors,
                                              double train_ratio,
                                              std::uint64_t seed);

}  // namespace anchorlink
