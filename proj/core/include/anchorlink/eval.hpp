#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "anchorlink/model.hpp"
#include "anchorlink/network.hpp"

namespace anchorlink {

/// One ranking task: the true target hidden among sampled non-anchor
/// candidates of the target network.
struct RankingTask {
  int source_node = 0;
  std::vector<int> candidates;  // distinct target ids, truth included once
  int truth_index = 0;          // position of the true anchor in candidates
};

/// Samples n distinct non-anchor target nodes, adds the true target, and
/// shuffles. n = 20 gives the 21-candidate evaluation.
RankingTask build_candidates(std::pair<int, int> test_anchor, const Network& target,
                             int n, RandomEngine& rng);

/// Rank of the true anchor by model probability. Ties are broken against
/// the truth: r = 1 + |{c != truth : score(c) >= score(truth)}|.
int rank_candidates(const ModelParams& params, const MatchingGraphView& view,
                    const RankingTask& task, const SamplingConfig& cfg,
                    RandomEngine& rng);

double mrr(std::span<const int> ranks);

double hits_at(std::span<const int> ranks, int r_threshold);

/// Attribute-similarity baseline: candidates ranked by cosine between the
/// source node's attributes and each candidate's, pessimistic ties.
int ac_baseline_rank(const RankingTask& task, const Network& source,
                     const Network& target);

struct DatasetDiagnostics {
  double collision_rate = 0.0;    // anchored sources with a near-identical non-anchor target
  double hop1_consistency = 0.0;  // anchors with a neighboring anchor preserved on both sides
  double hop2_consistency = 0.0;  // same at graph distance exactly 2
};

inline constexpr double kDefaultCollisionThreshold = 0.999;

/// Collision rate: fraction of anchored sources with at least one
/// non-anchor target whose attribute cosine is >= threshold.
/// k-hop consistency: fraction of anchors (s, t) for which another anchor
/// (s', t') sits at graph distance exactly k from s and from t.
DatasetDiagnostics measure_dataset(const Network& source, const Network& target,
                                   const AnchorSet& anchors,
                                   double collision_threshold = kDefaultCollisionThreshold);

struct EvalReport {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits10 = 0.0;
  int num_tasks = 0;
  double wall_time_s = 0.0;
};

struct SplitEvaluation {
  EvalReport model;
  EvalReport ac_baseline;
  std::vector<int> model_ranks;
  std::vector<int> baseline_ranks;
};

struct EvalOptions {
  int candidates = 20;  // candidate count excluding the truth
  std::uint64_t seed = 42;
  int workers = 1;
};

/// Ranks every test anchor with the model and the AC baseline on the same
/// candidate sets. Tasks are independent; `workers` threads may be used,
/// with per-task seeding so results do not depend on scheduling.
SplitEvaluation evaluate_split(const ModelParams& params, const MatchingGraphView& view,
                               const AnchorSet& test_anchors, const SamplingConfig& cfg,
                               const EvalOptions& options);

}  // namespace anchorlink
