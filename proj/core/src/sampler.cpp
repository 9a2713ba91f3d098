#include "anchorlink/sampler.hpp"

#include <algorithm>

#include "anchorlink/error.hpp"

namespace anchorlink {

void SamplingConfig::validate() const {
  if (hops < 1) throw UsageError("sampling hops must be >= 1");
  if (static_cast<int>(fanouts.size()) != hops) {
    throw UsageError("expected " + std::to_string(hops) + " fanouts, got " +
                     std::to_string(fanouts.size()));
  }
  for (int q : fanouts) {
    if (q < 1) throw UsageError("fanouts must be >= 1");
  }
}

std::vector<MatchingNode> Batch::sampled_neighbors(MatchingNode m) const {
  const int row = row_of(m);
  if (row < 0) throw DataError("node not present in batch");
  std::vector<MatchingNode> out;
  out.reserve(rec_[row].size());
  for (int r : rec_[row]) out.push_back(nodes_[r]);
  return out;
}

int Batch::row_of(MatchingNode m) const {
  auto it = row_index_.find(m.key());
  return it == row_index_.end() ? -1 : it->second;
}

std::vector<MatchingNode> sample_neighbors(std::span<const MatchingNode> candidates,
                                           int q,
                                           std::optional<std::span<const double>> weights,
                                           RandomEngine& rng) {
  if (q < 1) throw UsageError("sample size q must be >= 1");
  if (candidates.empty()) return {};
  if (weights && weights->size() != candidates.size()) {
    throw DataError("weight count does not match candidate count");
  }
  std::vector<MatchingNode> out;
  out.reserve(q);
  for (int i = 0; i < q; ++i) {
    const std::size_t idx = weights ? rng.weighted_index(*weights)
                                    : rng.uniform_below(candidates.size());
    out.push_back(candidates[idx]);
  }
  return out;
}

namespace {

// Draws q neighbors of m with replacement without materializing the
// N(s) x N(t) cross product: a uniform index into the product splits into
// independent per-side picks. Feature-importance sampling has to enumerate
// the product to weight it.
std::vector<MatchingNode> draw_for_node(MatchingNode m, const MatchingGraphView& view,
                                        int q, SamplingStrategy strategy,
                                        RandomEngine& rng) {
  const auto ns = view.source().neighbors(m.s);
  const auto nt = view.target().neighbors(m.t);
  const std::size_t product = ns.size() * nt.size();
  if (product == 0) return {};

  std::vector<MatchingNode> out;
  out.reserve(q);
  if (strategy == SamplingStrategy::Random) {
    for (int i = 0; i < q; ++i) {
      const std::uint64_t r = rng.uniform_below(product);
      out.push_back({ns[r / nt.size()], nt[r % nt.size()]});
    }
    return out;
  }

  std::vector<MatchingNode> candidates;
  std::vector<double> weights;
  candidates.reserve(product);
  weights.reserve(product);
  for (int vs : ns) {
    const auto xs = view.source().attributes_of(vs);
    for (int vt : nt) {
      candidates.push_back({vs, vt});
      const double c = theta(xs, view.target().attributes_of(vt),
                             ThetaKind::CosineScalar)[0];
      weights.push_back(std::max(c, kFeatureWeightFloor));
    }
  }
  for (int i = 0; i < q; ++i) {
    out.push_back(candidates[rng.weighted_index(weights)]);
  }
  return out;
}

}  // namespace

LayerExpansion batch_sampling(std::span<const MatchingNode> frontier,
                              const MatchingGraphView& view, int q,
                              SamplingStrategy strategy, RandomEngine& rng) {
  if (frontier.empty()) throw UsageError("batch_sampling requires a non-empty frontier");
  if (q < 1) throw UsageError("sample size q must be >= 1");

  LayerExpansion out;
  out.next_layer.assign(frontier.begin(), frontier.end());
  std::unordered_map<std::uint64_t, int> seen;
  seen.reserve(frontier.size() * (q + 1));
  for (const auto& m : frontier) seen.emplace(m.key(), 1);

  for (const auto& m : frontier) {
    if (out.sampled.contains(m.key())) continue;  // duplicate frontier entry
    auto draws = draw_for_node(m, view, q, strategy, rng);
    for (const auto& d : draws) {
      if (seen.emplace(d.key(), 1).second) out.next_layer.push_back(d);
    }
    out.sampled.emplace(m.key(), std::move(draws));
  }
  return out;
}

Batch build_batch(std::span<const MatchingNode> targets, const MatchingGraphView& view,
                  const SamplingConfig& cfg, RandomEngine& rng) {
  if (targets.empty()) throw UsageError("build_batch requires a non-empty target list");
  cfg.validate();
  for (const auto& m : targets) view.check_node(m);

  const int hops = cfg.hops;
  Batch batch;
  batch.layer_len_.assign(hops + 1, 0);
  batch.nodes_.assign(targets.begin(), targets.end());
  batch.rec_.resize(targets.size());
  for (std::size_t r = 0; r < batch.nodes_.size(); ++r) {
    batch.row_index_.emplace(batch.nodes_[r].key(), static_cast<int>(r));
  }
  batch.layer_len_[hops] = static_cast<int>(batch.nodes_.size());

  // Expansion producing B^{k-1} samples with fanout q_k for the rows that
  // entered at layer k; earlier rows already carry their record.
  int expand_begin = 0;
  for (int k = hops; k >= 1; --k) {
    const int q = cfg.fanouts[k - 1];
    const int expand_end = static_cast<int>(batch.nodes_.size());
    for (int row = expand_begin; row < expand_end; ++row) {
      const MatchingNode m = batch.nodes_[row];
      const int canonical = batch.row_index_.at(m.key());
      if (canonical != row) {
        // duplicate target entry: share the canonical record
        batch.rec_[row] = batch.rec_[canonical];
        continue;
      }
      auto draws = draw_for_node(m, view, q, cfg.strategy, rng);
      std::vector<int> rec_rows;
      rec_rows.reserve(draws.size());
      for (const auto& d : draws) {
        auto [it, inserted] =
            batch.row_index_.emplace(d.key(), static_cast<int>(batch.nodes_.size()));
        if (inserted) {
          batch.nodes_.push_back(d);
          batch.rec_.emplace_back();
        }
        rec_rows.push_back(it->second);
      }
      batch.rec_[row] = std::move(rec_rows);
    }
    expand_begin = expand_end;
    batch.layer_len_[k - 1] = static_cast<int>(batch.nodes_.size());
  }
  return batch;
}

}  // namespace anchorlink
