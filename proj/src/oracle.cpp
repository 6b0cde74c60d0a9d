#include "mbrg/oracle.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <unordered_set>

namespace mbrg {

ReachabilityGraph build_reachability_graph(const PetriNet& net, const Marking& initial,
                                           std::size_t cap) {
  if (initial.size() != net.place_count()) throw InputError("initial marking dimension mismatch");
  ReachabilityGraph rg;
  rg.markings.push_back(initial);
  rg.index.emplace(initial.encode(), 0);
  for (std::size_t head = 0; head < rg.markings.size(); ++head) {
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      if (!is_enabled(net, rg.markings[head], t)) continue;
      Marking next = fire(net, rg.markings[head], t);
      auto [it, inserted] = rg.index.try_emplace(next.encode(), rg.markings.size());
      if (inserted) {
        if (rg.markings.size() + 1 > cap)
          throw BudgetExceeded("reachability cap exceeded (" + std::to_string(cap) +
                               "); net may be unbounded");
        rg.markings.push_back(std::move(next));
      }
      rg.edges.push_back({head, t, it->second});
    }
  }
  return rg;
}

ReachabilityGraph build_reachability_graph(const Plant& plant, std::size_t cap) {
  return build_reachability_graph(plant.net, plant.initial, cap);
}

BlockingClassification classify_blocking(const Plant& plant, const ReachabilityGraph& rg) {
  const std::size_t count = rg.markings.size();
  BlockingClassification out;

  std::vector<std::vector<std::size_t>> rev(count);
  std::vector<std::size_t> outdeg(count, 0);
  for (const auto& e : rg.edges) {
    rev[e.dst].push_back(e.src);
    ++outdeg[e.src];
  }

  std::vector<char> coreachable(count, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < count; ++i) {
    if (is_final(plant.final_spec, rg.markings[i])) {
      out.final_reachable.push_back(i);
      coreachable[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : rev[v])
      if (!coreachable[w]) {
        coreachable[w] = 1;
        queue.push_back(w);
      }
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!coreachable[i]) out.blocking.push_back(i);
    if (outdeg[i] == 0) out.dead.push_back(i);
  }
  out.is_nonblocking = out.blocking.empty();
  return out;
}

BlockingClassification oracle_blocking(const Plant& plant, std::size_t cap) {
  return classify_blocking(plant, build_reachability_graph(plant, cap));
}

namespace {

struct SequenceSearch {
  const PetriNet& net;
  const BasisPartition& pi;
  std::span<const std::int64_t> target_pre;
  std::size_t depth_cap;
  std::size_t state_cap;
  std::unordered_set<std::vector<std::int64_t>, CountsHash> visited;
  std::set<FiringVector> found;

  void expand(const Marking& m, const FiringVector& y, std::size_t depth) {
    bool enables = true;
    for (std::size_t p = 0; p < target_pre.size() && enables; ++p)
      if (m[p] < target_pre[p]) enables = false;
    if (enables) found.insert(y);

    for (std::size_t i = 0; i < pi.implicit_count(); ++i) {
      std::size_t t = pi.implicit_transitions[i];
      if (!is_enabled(net, m, t)) continue;
      FiringVector next_y = y;
      next_y.counts[i] += 1;
      if (!visited.insert(next_y.counts).second) continue;
      if (depth + 1 > depth_cap) throw BudgetExceeded("sequence search depth cap exceeded");
      if (visited.size() > state_cap) throw BudgetExceeded("sequence search state cap exceeded");
      expand(fire(net, m, t), next_y, depth + 1);
    }
  }
};

}  // namespace

ExplanationSet brute_force_explanations(const PetriNet& net, const BasisPartition& pi,
                                        const Marking& from, std::size_t t, std::size_t depth_cap,
                                        std::size_t state_cap) {
  SequenceSearch search{net, pi, net.pre_column(t), depth_cap, state_cap, {}, {}};
  FiringVector zero = FiringVector::zeros(pi.implicit_count());
  search.visited.insert(zero.counts);
  search.expand(from, zero, 0);
  ExplanationSet out;
  out.vectors.assign(search.found.begin(), search.found.end());
  return out;
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

std::optional<GeneratedPlant> gen_random_plant(const GenConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<std::size_t>(1 + rng.below(config.max_places));
  const auto n = static_cast<std::size_t>(1 + rng.below(config.max_transitions));

  std::vector<std::string> places, transitions;
  for (std::size_t p = 0; p < m; ++p) places.push_back("p" + std::to_string(p + 1));
  for (std::size_t t = 0; t < n; ++t) transitions.push_back("t" + std::to_string(t + 1));

  std::vector<Arc> pre_arcs, post_arcs;
  for (std::size_t t = 0; t < n; ++t) {
    const double roll = rng.unit();
    auto pick_places = [&]() {
      std::vector<std::size_t> idx(m);
      for (std::size_t p = 0; p < m; ++p) idx[p] = p;
      rng.shuffle(idx);
      idx.resize(1 + rng.below(std::min<std::uint64_t>(2, m)));
      return idx;
    };
    if (roll < 0.30) {
      // pure sink: consumes tokens and produces nothing
      for (std::size_t p : pick_places())
        pre_arcs.push_back({places[p], transitions[t], rng.range(1, config.max_arc_weight)});
    } else if (roll < 0.40) {
      // pure source: always enabled, so the instance gets rejected as
      // unbounded unless something else constrains it
      for (std::size_t p : pick_places())
        post_arcs.push_back({places[p], transitions[t], rng.range(1, config.max_arc_weight)});
    } else {
      bool any = false;
      for (std::size_t p = 0; p < m; ++p) {
        if (rng.unit() < 0.30) {
          pre_arcs.push_back({places[p], transitions[t], rng.range(1, config.max_arc_weight)});
          any = true;
        }
        if (rng.unit() < 0.30) {
          post_arcs.push_back({places[p], transitions[t], rng.range(1, config.max_arc_weight)});
          any = true;
        }
      }
      if (!any)  // no detached no-op transitions
        pre_arcs.push_back({places[rng.below(m)], transitions[t], 1});
    }
  }

  PetriNet net(places, transitions, pre_arcs, post_arcs);

  std::vector<std::int64_t> tokens(m);
  for (std::size_t p = 0; p < m; ++p) tokens[p] = rng.range(0, config.max_initial_tokens);
  Marking initial(std::move(tokens));

  ReachabilityGraph rg;
  try {
    rg = build_reachability_graph(net, initial, config.rg_cap);
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }

  // Greedily grow the implicit set in a seeded order while the induced
  // sub-net stays acyclic; everything else becomes explicit.
  std::vector<std::size_t> order(n);
  for (std::size_t t = 0; t < n; ++t) order[t] = t;
  rng.shuffle(order);
  std::vector<bool> implicit(n, false);
  for (std::size_t t : order) {
    implicit[t] = true;
    BasisPartition trial;
    for (std::size_t u = 0; u < n; ++u)
      (implicit[u] ? trial.implicit_transitions : trial.explicit_transitions).push_back(u);
    if (validate_partition(net, trial)) implicit[t] = false;
  }
  BasisPartition pi;
  for (std::size_t t = 0; t < n; ++t)
    (implicit[t] ? pi.implicit_transitions : pi.explicit_transitions).push_back(t);

  FinalSpec final_spec = FinalSpec::from_markings({initial});
  if (rng.unit() < 0.5) {
    static constexpr std::int64_t kWeightChoices[] = {-1, 0, 1, 2};
    std::vector<std::int64_t> weights(m);
    for (std::size_t p = 0; p < m; ++p) weights[p] = kWeightChoices[rng.below(4)];
    // pick the bound among the observed values so at least one reachable
    // marking is final
    std::set<std::int64_t> values;
    for (const Marking& mk : rg.markings) {
      std::int64_t acc = 0;
      for (std::size_t p = 0; p < m; ++p) acc = checked_add(acc, checked_mul(weights[p], mk[p]));
      values.insert(acc);
    }
    auto it = values.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng.below(values.size())));
    final_spec = FinalSpec::from_gmec({std::move(weights), *it});
  } else {
    const double prob = std::min(0.2, 8.0 / static_cast<double>(rg.markings.size()));
    std::vector<Marking> finals;
    for (const Marking& mk : rg.markings)
      if (rng.unit() < prob) finals.push_back(mk);
    if (finals.empty()) finals.push_back(rg.markings[rng.below(rg.markings.size())]);
    final_spec = FinalSpec::from_markings(std::move(finals));
  }

  GeneratedPlant out{seed, make_plant(std::move(net), std::move(initial), std::move(final_spec)),
                     std::move(pi), std::move(rg)};
  return out;
}

std::vector<GeneratedPlant> generate_corpus(const GenConfig& config, std::uint64_t first_seed,
                                            std::size_t count) {
  std::vector<GeneratedPlant> corpus;
  std::uint64_t seed = first_seed;
  std::uint64_t attempts = 0;
  while (corpus.size() < count) {
    if (++attempts > 1000 * (count + 1))
      throw BudgetExceeded("random plant rejection rate too high for requested corpus size");
    if (auto instance = gen_random_plant(config, seed)) corpus.push_back(std::move(*instance));
    ++seed;
  }
  return corpus;
}

}  // namespace mbrg
