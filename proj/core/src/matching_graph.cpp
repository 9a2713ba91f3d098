#include "anchorlink/matching_graph.hpp"

#include <cmath>
#include <ostream>

#include "anchorlink/error.hpp"

namespace anchorlink {

Vec theta(std::span<const double> xs, std::span<const double> xt, ThetaKind kind) {
  Eigen::Map<const Vec> a(xs.data(), static_cast<Eigen::Index>(xs.size()));
  Eigen::Map<const Vec> b(xt.data(), static_cast<Eigen::Index>(xt.size()));
  switch (kind) {
    case ThetaKind::CosineScalar: {
      Vec out(1);
      const double na = a.norm();
      const double nb = b.norm();
      if (xs.size() != xt.size()) {
        throw DataError("cosine theta requires equal attribute dimensions");
      }
      out[0] = (na == 0.0 || nb == 0.0) ? 0.0 : a.dot(b) / (na * nb);
      return out;
    }
    case ThetaKind::Hadamard: {
      if (xs.size() != xt.size()) {
        throw DataError("hadamard theta requires equal attribute dimensions, got " +
                        std::to_string(xs.size()) + " and " + std::to_string(xt.size()));
      }
      return a.cwiseProduct(b);
    }
    case ThetaKind::Concat: {
      Vec out(a.size() + b.size());
      out << a, b;
      return out;
    }
  }
  throw UsageError("unknown theta kind");
}

int theta_dim(int source_dim, int target_dim, ThetaKind kind) {
  switch (kind) {
    case ThetaKind::CosineScalar:
      return 1;
    case ThetaKind::Hadamard:
      if (source_dim != target_dim) {
        throw DataError("hadamard theta requires equal attribute dimensions, got " +
                        std::to_string(source_dim) + " and " + std::to_string(target_dim));
      }
      return source_dim;
    case ThetaKind::Concat:
      return source_dim + target_dim;
  }
  throw UsageError("unknown theta kind");
}

MatchingGraphView::MatchingGraphView(const Network& source, const Network& target,
                                     ThetaKind kind)
    : source_(&source),
      target_(&target),
      kind_(kind),
      feature_dim_(theta_dim(source.attr_dim(), target.attr_dim(), kind)) {
  if (kind == ThetaKind::CosineScalar && source.attr_dim() != target.attr_dim()) {
    throw DataError("cosine theta requires equal attribute dimensions, got " +
                    std::to_string(source.attr_dim()) + " and " +
                    std::to_string(target.attr_dim()));
  }
}

void MatchingGraphView::check_node(MatchingNode m) const {
  if (m.s < 0 || m.s >= source_->node_count() || m.t < 0 ||
      m.t >= target_->node_count()) {
    throw DataError("matching node (" + std::to_string(m.s) + ", " +
                    std::to_string(m.t) + ") out of range");
  }
}

Vec MatchingGraphView::features(MatchingNode m) const {
  check_node(m);
  return theta(source_->attributes_of(m.s), target_->attributes_of(m.t), kind_);
}

std::vector<MatchingNode> MatchingGraphView::matching_neighbors(MatchingNode m) const {
  check_node(m);
  auto ns = source_->neighbors(m.s);
  auto nt = target_->neighbors(m.t);
  std::vector<MatchingNode> out;
  out.reserve(ns.size() * nt.size());
  for (int vs : ns) {
    for (int vt : nt) {
      out.push_back({vs, vt});
    }
  }
  return out;
}

std::size_t MatchingGraphView::matching_degree(MatchingNode m) const {
  check_node(m);
  return static_cast<std::size_t>(source_->degree(m.s)) *
         static_cast<std::size_t>(target_->degree(m.t));
}

bool MatchingGraphView::is_matching_edge(MatchingNode a, MatchingNode b) const {
  check_node(a);
  check_node(b);
  return source_->has_edge(a.s, b.s) && target_->has_edge(a.t, b.t);
}

MaterializedMatchingGraph materialize_matching_graph(const MatchingGraphView& view,
                                                     std::size_t node_cap) {
  const auto ns = static_cast<std::size_t>(view.source().node_count());
  const auto nt = static_cast<std::size_t>(view.target().node_count());
  if (ns * nt > node_cap) {
    throw DataError("matching graph has " + std::to_string(ns * nt) +
                    " nodes, above the materialization cap of " +
                    std::to_string(node_cap) + "; the materializer is an oracle, "
                    "use the lazy view instead");
  }
  MaterializedMatchingGraph out;
  out.nodes.reserve(ns * nt);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      out.nodes.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
    }
  }
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < out.nodes.size(); ++j) {
      if (view.is_matching_edge(out.nodes[i], out.nodes[j])) {
        out.edges.emplace_back(out.nodes[i], out.nodes[j]);
      }
    }
  }
  return out;
}

void write_dot(const MaterializedMatchingGraph& graph, std::ostream& out) {
  out << "graph matching {\n";
  for (const auto& n : graph.nodes) {
    out << "  \"" << n.s << "_" << n.t << "\";\n";
  }
  for (const auto& [a, b] : graph.edges) {
    out << "  \"" << a.s << "_" << a.t << "\" -- \"" << b.s << "_" << b.t << "\";\n";
  }
  out << "}\n";
}

}  // namespace anchorlink
