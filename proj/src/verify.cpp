#include "mbrg/verify.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbrg {

namespace {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int thread_count(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// parallel-for over [0, count) with first-exception capture
template <typename Body>
void for_each_index(std::size_t count, int threads, const Body& body) {
  if (threads > 1 && count > 1) {
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical(mbrg_verify_failure)
#endif
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t i = 0; i < count; ++i) body(i);
  }
}

}  // namespace

std::shared_ptr<const std::vector<Marking>> ReachCache::get_or_compute(
    const PetriNet& net, const BasisPartition& pi, const Marking& from,
    const ExploreLimits& limits) {
  const std::string key = from.encode();
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto computed = std::make_shared<const std::vector<Marking>>(implicit_reach(net, pi, from, limits));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.try_emplace(key, std::move(computed));
  return it->second;
}

namespace {

// streaming variant of the reach test: stops at the first final marking
bool implicit_reach_hits_final(const PetriNet& net, const BasisPartition& pi, const Marking& from,
                               const FinalSpec& spec, const ExploreLimits& limits) {
  if (is_final(spec, from)) return true;
  std::vector<Marking> frontier{from};
  std::unordered_set<std::string> seen{from.encode()};
  while (!frontier.empty()) {
    Marking m = std::move(frontier.back());
    frontier.pop_back();
    for (std::size_t t : pi.implicit_transitions) {
      if (!is_enabled(net, m, t)) continue;
      Marking next = fire(net, m, t);
      if (!seen.insert(next.encode()).second) continue;
      if (seen.size() > limits.max_rows)
        throw BudgetExceeded("exploration budget exhausted while computing implicit reach");
      if (is_final(spec, next)) return true;
      frontier.push_back(std::move(next));
    }
  }
  return false;
}

}  // namespace

std::vector<std::size_t> i_coreachable_set(const BasisGraph& graph, const Plant& plant,
                                           const ExploreLimits& limits, int threads,
                                           ReachCache* cache) {
  std::vector<char> coreachable(graph.nodes.size(), 0);
  for_each_index(graph.nodes.size(), thread_count(threads), [&](std::size_t i) {
    const Marking& node = graph.nodes[i];
    if (!cache) {
      // node markings are pairwise distinct, so a per-call cache never hits
      coreachable[i] = implicit_reach_hits_final(plant.net, graph.partition, node,
                                                 plant.final_spec, limits);
      return;
    }
    if (is_final(plant.final_spec, node)) {  // the node reaches itself implicitly
      coreachable[i] = 1;
      return;
    }
    auto set = cache->get_or_compute(plant.net, graph.partition, node, limits);
    for (const Marking& m : *set)
      if (is_final(plant.final_spec, m)) {
        coreachable[i] = 1;
        return;
      }
  });

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    if (coreachable[i]) out.push_back(i);
  return out;
}

std::optional<std::size_t> find_obstruction(const BasisGraph& graph,
                                            const std::vector<std::size_t>& ico) {
  std::vector<std::vector<std::size_t>> rev(graph.nodes.size());
  for (const BasisEdge& e : graph.edges) rev[e.dst].push_back(e.src);

  std::vector<char> reaches_ico(graph.nodes.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i : ico) {
    if (i >= graph.nodes.size()) throw ContractViolation("i-coreachable index out of range");
    reaches_ico[i] = 1;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : rev[v])
      if (!reaches_ico[w]) {
        reaches_ico[w] = 1;
        queue.push_back(w);
      }
  }

  std::optional<std::size_t> witness;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (reaches_ico[i]) continue;
    if (!witness || graph.nodes[i] < graph.nodes[*witness]) witness = i;
  }
  return witness;
}

DeadlockScan nonfinal_deadlocks(const Plant& plant, const BasisPartition& pi,
                                const BasisGraph& graph, WitnessMode mode,
                                const ExploreLimits& limits, int threads) {
  struct Candidate {
    Marking marking;
    FiringVector vector;
    bool final = false;
  };

  auto scan_node = [&](const Marking& node) {
    std::vector<Candidate> found;
    ExplanationSet maxima = maximal_implicit_vectors(plant.net, pi, node, limits);
    for (const FiringVector& y : maxima.vectors) {
      auto reached = acyclic_state_equation_reach(plant.net, pi, node, y);
      // maximal vectors are realizable by construction
      Marking m = std::move(*reached);
      bool dead = true;
      for (std::size_t t : pi.explicit_transitions)
        if (is_enabled(plant.net, m, t)) {
          dead = false;
          break;
        }
      if (dead) {
        const bool final = is_final(plant.final_spec, m);
        found.push_back({std::move(m), y, final});
      }
    }
    return found;
  };

  DeadlockScan out;
  auto finish_dead = [&out] {
    std::sort(out.dead.begin(), out.dead.end());
    out.dead.erase(std::unique(out.dead.begin(), out.dead.end()), out.dead.end());
  };

  if (mode == WitnessMode::Fast) {
    for (const Marking& node : graph.nodes) {
      for (auto& c : scan_node(node)) {
        out.dead.push_back(c.marking);
        if (!c.final) {
          out.witness = c.marking;
          out.via = {node, c.vector};
          out.non_final_dead.push_back(std::move(c.marking));
          finish_dead();
          return out;
        }
      }
    }
    finish_dead();
    return out;
  }

  // Deterministic: full scan, then pick the lexicographically smallest
  // non-final dead marking; its first producer in node order becomes `via`.
  std::vector<std::vector<Candidate>> per_node(graph.nodes.size());
  for_each_index(graph.nodes.size(), thread_count(threads),
                 [&](std::size_t i) { per_node[i] = scan_node(graph.nodes[i]); });

  for (const auto& bucket : per_node)
    for (const auto& c : bucket) {
      out.dead.push_back(c.marking);
      if (!c.final) out.non_final_dead.push_back(c.marking);
    }
  finish_dead();
  std::sort(out.non_final_dead.begin(), out.non_final_dead.end());
  out.non_final_dead.erase(std::unique(out.non_final_dead.begin(), out.non_final_dead.end()),
                           out.non_final_dead.end());
  if (!out.non_final_dead.empty()) {
    out.witness = out.non_final_dead.front();
    for (std::size_t i = 0; i < per_node.size() && !out.via; ++i)
      for (const auto& c : per_node[i])
        if (!c.final && c.marking == *out.witness) {
          out.via = {graph.nodes[i], c.vector};
          break;
        }
  }
  return out;
}

std::string_view to_string(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::AllChecksPassed:
      return "ALL_CHECKS_PASSED";
    case VerdictReason::NonFinalDeadlock:
      return "NON_FINAL_DEADLOCK";
    case VerdictReason::Obstructed:
      return "OBSTRUCTED";
  }
  return "?";
}

Verdict verify_nonblocking(const Plant& plant, const BasisPartition& pi,
                           const VerifyOptions& opts) {
  Verdict verdict;
  verdict.stats.initial_marking_dead = is_dead(plant.net, plant.initial);

  Stopwatch build_timer;
  BasisGraph graph = build_minimax_brg(plant, pi, opts.build);
  verdict.stats.brg_ms = build_timer.ms();
  verdict.stats.minimax_nodes = graph.nodes.size();
  verdict.stats.minimax_edges = graph.edges.size();

  Stopwatch deadlock_timer;
  DeadlockScan scan =
      nonfinal_deadlocks(plant, pi, graph, opts.mode, opts.build.explore, opts.build.threads);
  verdict.stats.deadlock_ms = deadlock_timer.ms();
  verdict.stats.dead_found = scan.dead.size();
  verdict.all_deadlocks = scan.non_final_dead;

  if (scan.witness) {
    verdict.nonblocking = false;
    verdict.reason = VerdictReason::NonFinalDeadlock;
    verdict.witness = std::move(scan.witness);
    verdict.witness_via = std::move(scan.via);
    return verdict;
  }

  Stopwatch ico_timer;
  std::vector<std::size_t> ico =
      i_coreachable_set(graph, plant, opts.build.explore, opts.build.threads);
  verdict.stats.ico_ms = ico_timer.ms();
  verdict.stats.ico_count = ico.size();

  Stopwatch obstruction_timer;
  std::optional<std::size_t> obstructed = find_obstruction(graph, ico);
  verdict.stats.unobstructed_ms = obstruction_timer.ms();

  if (obstructed) {
    verdict.nonblocking = false;
    verdict.reason = VerdictReason::Obstructed;
    verdict.witness = graph.nodes[*obstructed];
    return verdict;
  }

  verdict.nonblocking = true;
  verdict.reason = VerdictReason::AllChecksPassed;
  return verdict;
}

}  // namespace mbrg
