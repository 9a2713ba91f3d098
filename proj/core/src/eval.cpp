#include "anchorlink/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "anchorlink/error.hpp"

namespace anchorlink {

RankingTask build_candidates(std::pair<int, int> test_anchor, const Network& target,
                             int n, RandomEngine& rng) {
  const auto [s, t] = test_anchor;
  if (n < 0) throw UsageError("candidate count must be >= 0");
  if (target.node_count() <= n) {
    throw DataError("target network has " + std::to_string(target.node_count()) +
                    " nodes, cannot sample " + std::to_string(n) +
                    " distinct non-anchor candidates");
  }
  if (t < 0 || t >= target.node_count()) {
    throw DataError("anchor target id " + std::to_string(t) + " out of range");
  }

  RankingTask task;
  task.source_node = s;
  std::unordered_set<int> chosen{t};
  task.candidates.push_back(t);
  while (static_cast<int>(task.candidates.size()) < n + 1) {
    const int c = static_cast<int>(rng.uniform_below(target.node_count()));
    if (chosen.insert(c).second) task.candidates.push_back(c);
  }
  rng.shuffle(task.candidates);
  for (std::size_t i = 0; i < task.candidates.size(); ++i) {
    if (task.candidates[i] == t) {
      task.truth_index = static_cast<int>(i);
      break;
    }
  }
  return task;
}

namespace {

int pessimistic_rank(std::span<const double> scores, int truth_index) {
  const double truth = scores[truth_index];
  int rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (static_cast<int>(i) == truth_index) continue;
    if (scores[i] >= truth) ++rank;
  }
  return rank;
}

}  // namespace

int rank_candidates(const ModelParams& params, const MatchingGraphView& view,
                    const RankingTask& task, const SamplingConfig& cfg,
                    RandomEngine& rng) {
  // canonical candidate order, so the rank does not depend on how the task
  // happens to be shuffled
  std::vector<int> order(task.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return task.candidates[a] < task.candidates[b];
  });

  std::vector<MatchingNode> nodes;
  nodes.reserve(task.candidates.size());
  for (int idx : order) {
    nodes.push_back({task.source_node, task.candidates[idx]});
  }
  Batch batch = build_batch(nodes, view, cfg, rng);
  ForwardResult fwd = forward(batch, params, view);

  std::vector<double> scores(task.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    scores[order[i]] = fwd.probabilities[static_cast<Eigen::Index>(i)];
  }
  return pessimistic_rank(scores, task.truth_index);
}

double mrr(std::span<const int> ranks) {
  if (ranks.empty()) throw UsageError("mrr over an empty rank list");
  double total = 0.0;
  for (int r : ranks) {
    if (r < 1) throw DataError("ranks must be >= 1");
    total += 1.0 / static_cast<double>(r);
  }
  return total / static_cast<double>(ranks.size());
}

double hits_at(std::span<const int> ranks, int r_threshold) {
  if (ranks.empty()) throw UsageError("hits_at over an empty rank list");
  if (r_threshold < 1) throw UsageError("hits threshold must be >= 1");
  std::size_t hits = 0;
  for (int r : ranks) {
    if (r < 1) throw DataError("ranks must be >= 1");
    if (r <= r_threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

int ac_baseline_rank(const RankingTask& task, const Network& source,
                     const Network& target) {
  const auto xs = source.attributes_of(task.source_node);
  std::vector<double> scores;
  scores.reserve(task.candidates.size());
  for (int c : task.candidates) {
    scores.push_back(theta(xs, target.attributes_of(c), ThetaKind::CosineScalar)[0]);
  }
  return pessimistic_rank(scores, task.truth_index);
}

namespace {

// nodes at graph distance exactly 1 resp. 2 from v
void distance_rings(const Network& net, int v, std::unordered_set<int>& ring1,
                    std::unordered_set<int>& ring2) {
  ring1.clear();
  ring2.clear();
  for (int u : net.neighbors(v)) ring1.insert(u);
  for (int u : net.neighbors(v)) {
    for (int w : net.neighbors(u)) {
      if (w != v && !ring1.contains(w)) ring2.insert(w);
    }
  }
}

}  // namespace

DatasetDiagnostics measure_dataset(const Network& source, const Network& target,
                                   const AnchorSet& anchors,
                                   double collision_threshold) {
  DatasetDiagnostics diag;
  if (anchors.pairs.empty()) return diag;

  std::vector<char> anchored_target(target.node_count(), 0);
  std::unordered_map<int, int> target_of;
  for (const auto& [s, t] : anchors.pairs) {
    anchored_target[t] = 1;
    target_of.emplace(s, t);
  }

  std::size_t collisions = 0;
  for (const auto& [s, t] : anchors.pairs) {
    const auto xs = source.attributes_of(s);
    for (int c = 0; c < target.node_count(); ++c) {
      if (anchored_target[c]) continue;
      const double cos =
          theta(xs, target.attributes_of(c), ThetaKind::CosineScalar)[0];
      if (cos >= collision_threshold) {
        ++collisions;
        break;
      }
    }
  }
  diag.collision_rate =
      static_cast<double>(collisions) / static_cast<double>(anchors.pairs.size());

  std::size_t hop1 = 0, hop2 = 0;
  std::unordered_set<int> s_ring1, s_ring2, t_ring1, t_ring2;
  for (const auto& [s, t] : anchors.pairs) {
    distance_rings(source, s, s_ring1, s_ring2);
    distance_rings(target, t, t_ring1, t_ring2);
    bool found1 = false, found2 = false;
    for (int s2 : s_ring1) {
      auto it = target_of.find(s2);
      if (it != target_of.end() && t_ring1.contains(it->second)) {
        found1 = true;
        break;
      }
    }
    for (int s2 : s_ring2) {
      auto it = target_of.find(s2);
      if (it != target_of.end() && t_ring2.contains(it->second)) {
        found2 = true;
        break;
      }
    }
    hop1 += found1 ? 1 : 0;
    hop2 += found2 ? 1 : 0;
  }
  diag.hop1_consistency =
      static_cast<double>(hop1) / static_cast<double>(anchors.pairs.size());
  diag.hop2_consistency =
      static_cast<double>(hop2) / static_cast<double>(anchors.pairs.size());
  return diag;
}

SplitEvaluation evaluate_split(const ModelParams& params, const MatchingGraphView& view,
                               const AnchorSet& test_anchors, const SamplingConfig& cfg,
                               const EvalOptions& options) {
  if (test_anchors.pairs.empty()) throw DataError("no test anchors to evaluate");
  const int workers = std::max(1, options.workers);
  const std::size_t n_tasks = test_anchors.pairs.size();

  SplitEvaluation out;
  out.model_ranks.assign(n_tasks, 0);
  out.baseline_ranks.assign(n_tasks, 0);

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto run_tasks = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks || failed.load()) break;
      try {
        RandomEngine task_rng(RandomEngine::mix(options.seed) ^
                              RandomEngine::mix(i + 1));
        RankingTask task = build_candidates(test_anchors.pairs[i], view.target(),
                                            options.candidates, task_rng);
        out.model_ranks[i] = rank_candidates(params, view, task, cfg, task_rng);
        out.baseline_ranks[i] = ac_baseline_rank(task, view.source(), view.target());
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        failed.store(true);
        error_message = e.what();
      }
    }
  };

  if (workers == 1) {
    run_tasks();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_tasks);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw DataError("evaluation failed: " + error_message);

  const auto t1 = std::chrono::steady_clock::now();
  const double elapsed = std::chrono::duration<double>(t1 - t0).count();

  auto fill = [&](EvalReport& report, const std::vector<int>& ranks) {
    report.mrr = mrr(ranks);
    report.hits1 = hits_at(ranks, 1);
    report.hits10 = hits_at(ranks, 10);
    report.num_tasks = static_cast<int>(ranks.size());
    report.wall_time_s = elapsed;
  };
  fill(out.model, out.model_ranks);
  fill(out.ac_baseline, out.baseline_ranks);
  return out;
}

}  // namespace anchorlink
