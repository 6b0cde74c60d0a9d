#include "mbrg/verify.hpp"

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "mbrg/oracle.hpp"

using namespace mbrg;
using testutil::fv;
using testutil::mk;

namespace {

std::set<Marking> node_set(const BasisGraph& g, const std::vector<std::size_t>& idx) {
  std::set<Marking> out;
  for (std::size_t i : idx) out.insert(g.nodes[i]);
  return out;
}

}  // namespace

TEST_CASE("i-coreachable nodes of the fixtures") {
  Plant a = testutil::fix_plant(1);
  BasisGraph ga = build_minimax_brg(a, testutil::fix_partition(a.net));
  CHECK(node_set(ga, i_coreachable_set(ga, a)) == std::set<Marking>{mk({2, 0, 1})});

  Plant b = testutil::fix_plant(2);
  BasisGraph gb = build_minimax_brg(b, testutil::fix_partition(b.net));
  CHECK(node_set(gb, i_coreachable_set(gb, b)) == std::set<Marking>{mk({2, 0, 1})});

  Plant t = testutil::loop_plant();
  BasisGraph gt = build_minimax_brg(t, make_partition(t.net, {"t1"}));
  CHECK(node_set(gt, i_coreachable_set(gt, t)) == std::set<Marking>{mk({1})});
}

TEST_CASE("i-coreachability decides the linear-constraint variant as well") {
  // same fixture, final set given as a constraint: p1 >= 2 (i.e. -p1 <= -2)
  Plant a = make_plant(testutil::fix_net(1), mk({2, 0, 1}),
                       FinalSpec::from_gmec({{-1, 0, 0}, -2}));
  BasisGraph g = build_minimax_brg(a, testutil::fix_partition(a.net));
  CHECK(node_set(g, i_coreachable_set(g, a)) == std::set<Marking>{mk({2, 0, 1})});
}

TEST_CASE("obstruction search over reversed edges") {
  Plant a = testutil::fix_plant(1);
  BasisGraph ga = build_minimax_brg(a, testutil::fix_partition(a.net));
  auto ico = i_coreachable_set(ga, a);
  auto obstructed = find_obstruction(ga, ico);
  REQUIRE(obstructed.has_value());
  CHECK(ga.nodes[*obstructed] == mk({1, 0, 0}));

  Plant b = testutil::fix_plant(2);
  BasisGraph gb = build_minimax_brg(b, testutil::fix_partition(b.net));
  CHECK_FALSE(find_obstruction(gb, i_coreachable_set(gb, b)).has_value());

  std::vector<std::size_t> all(ga.nodes.size());
  std::iota(all.begin(), all.end(), 0);
  CHECK_FALSE(find_obstruction(ga, all).has_value());
}

TEST_CASE("non-final deadlock scan") {
  Plant b = testutil::fix_plant(2);
  BasisPartition pib = testutil::fix_partition(b.net);
  BasisGraph gb = build_minimax_brg(b, pib);

  DeadlockScan scan = nonfinal_deadlocks(b, pib, gb);
  REQUIRE(scan.witness.has_value());
  CHECK(*scan.witness == mk({0, 0, 0}));
  REQUIRE(scan.via.has_value());
  CHECK(scan.via->first == mk({2, 0, 1}));
  CHECK(scan.via->second == fv({2, 1}));
  CHECK(scan.non_final_dead == std::vector<Marking>{mk({0, 0, 0})});
  CHECK(scan.dead == std::vector<Marking>{mk({0, 0, 0})});

  DeadlockScan fast = nonfinal_deadlocks(b, pib, gb, WitnessMode::Fast);
  REQUIRE(fast.witness.has_value());
  CHECK(*fast.witness == mk({0, 0, 0}));

  Plant a = testutil::fix_plant(1);
  BasisPartition pia = testutil::fix_partition(a.net);
  BasisGraph ga = build_minimax_brg(a, pia);
  DeadlockScan none = nonfinal_deadlocks(a, pia, ga);
  CHECK_FALSE(none.witness.has_value());
  CHECK(none.dead.empty());

  Plant t = testutil::loop_plant();
  BasisPartition pit = make_partition(t.net, {"t1"});
  BasisGraph gt = build_minimax_brg(t, pit);
  CHECK_FALSE(nonfinal_deadlocks(t, pit, gt).witness.has_value());
}

TEST_CASE("verdicts for the fixture family") {
  Verdict a = verify_nonblocking(testutil::fix_plant(1), testutil::fix_partition(testutil::fix_net(1)));
  CHECK_FALSE(a.nonblocking);
  CHECK(a.reason == VerdictReason::Obstructed);
  CHECK(a.witness == mk({1, 0, 0}));
  CHECK(a.stats.minimax_nodes == 2);
  CHECK(a.stats.minimax_edges == 3);
  CHECK(a.stats.ico_count == 1);

  Verdict b = verify_nonblocking(testutil::fix_plant(2), testutil::fix_partition(testutil::fix_net(2)));
  CHECK_FALSE(b.nonblocking);
  CHECK(b.reason == VerdictReason::NonFinalDeadlock);
  CHECK(b.witness == mk({0, 0, 0}));
  REQUIRE(b.witness_via.has_value());
  CHECK(b.witness_via->first == mk({2, 0, 1}));

  Verdict ok = verify_nonblocking(
      testutil::fix_plant(1, {mk({2, 0, 1}), mk({1, 0, 0}), mk({0, 1, 0})}),
      testutil::fix_partition(testutil::fix_net(1)));
  CHECK(ok.nonblocking);
  CHECK(ok.reason == VerdictReason::AllChecksPassed);
  CHECK_FALSE(ok.witness.has_value());
  CHECK(oracle_blocking(testutil::fix_plant(1, {mk({2, 0, 1}), mk({1, 0, 0}), mk({0, 1, 0})}))
            .is_nonblocking);
}

TEST_CASE("a dead initial marking is handled literally and flagged") {
  PetriNet net({"p1"}, {"t1"}, {{"p1", "t1", 2}}, {});

  Plant fine = make_plant(net, mk({1}), FinalSpec::from_markings({mk({1})}));
  Verdict v1 = verify_nonblocking(fine, make_partition(net, {"t1"}));
  CHECK(v1.nonblocking);
  CHECK(v1.stats.initial_marking_dead);

  Plant stuck = make_plant(net, mk({1}), FinalSpec::from_markings({mk({0})}));
  Verdict v2 = verify_nonblocking(stuck, make_partition(net, {"t1"}));
  CHECK_FALSE(v2.nonblocking);
  CHECK(v2.reason == VerdictReason::NonFinalDeadlock);
  CHECK(v2.witness == mk({1}));  // reached from the node itself via y = 0
  CHECK(v2.witness_via->second == fv({}));
  CHECK(v2.stats.initial_marking_dead);
}

TEST_CASE("reach cache shares implicit reach sets") {
  PetriNet net = testutil::fix_net(1);
  BasisPartition pi = testutil::fix_partition(net);
  ReachCache cache;
  auto first = cache.get_or_compute(net, pi, mk({2, 0, 1}), {});
  auto second = cache.get_or_compute(net, pi, mk({2, 0, 1}), {});
  CHECK(first.get() == second.get());
  CHECK(first->size() == 5);
}

TEST_CASE("cached and streaming i-coreachability agree") {
  auto corpus = generate_corpus(GenConfig{}, 3600, 25);
  for (const auto& instance : corpus) {
    BasisGraph g = build_minimax_brg(instance.plant, instance.partition);
    ReachCache cache;
    CHECK(i_coreachable_set(g, instance.plant) ==
          i_coreachable_set(g, instance.plant, {}, 0, &cache));
  }
}

TEST_CASE("verdicts agree with the oracle on a random corpus") {
  auto corpus = generate_corpus(GenConfig{}, 1, 60);
  for (const auto& instance : corpus) {
    BlockingClassification truth = classify_blocking(instance.plant, instance.rg);
    Verdict verdict = verify_nonblocking(instance.plant, instance.partition);
    CHECK_MESSAGE(verdict.nonblocking == truth.is_nonblocking,
                  "disagreement on seed ", instance.seed);

    // witness validity
    if (verdict.reason == VerdictReason::NonFinalDeadlock) {
      CHECK(is_dead(instance.plant.net, *verdict.witness));
      CHECK_FALSE(is_final(instance.plant.final_spec, *verdict.witness));
    }
  }
}

TEST_CASE("unobstructedness matches the per-node blocking classification") {
  auto corpus = generate_corpus(GenConfig{}, 500, 40);
  for (const auto& instance : corpus) {
    BlockingClassification truth = classify_blocking(instance.plant, instance.rg);
    std::set<std::size_t> blocking(truth.blocking.begin(), truth.blocking.end());

    BasisGraph g = build_minimax_brg(instance.plant, instance.partition);
    auto ico = i_coreachable_set(g, instance.plant);
    auto obstructed = find_obstruction(g, ico);

    bool any_node_blocking = false;
    for (const Marking& node : g.nodes) {
      auto idx = instance.rg.find(node);
      REQUIRE(idx.has_value());
      if (blocking.count(*idx)) any_node_blocking = true;
    }
    CHECK(obstructed.has_value() == any_node_blocking);
    if (obstructed) {
      // the witness node really is blocking
      CHECK(blocking.count(*instance.rg.find(g.nodes[*obstructed])) == 1);
    }
  }
}

TEST_CASE("deadlock scan finds exactly the dead reachable markings") {
  auto corpus = generate_corpus(GenConfig{}, 1300, 40);
  for (const auto& instance : corpus) {
    BasisGraph g = build_minimax_brg(instance.plant, instance.partition);
    DeadlockScan scan = nonfinal_deadlocks(instance.plant, instance.partition, g);

    std::set<Marking> oracle_dead;
    BlockingClassification truth = classify_blocking(instance.plant, instance.rg);
    for (std::size_t i : truth.dead) oracle_dead.insert(instance.rg.markings[i]);

    CHECK(std::set<Marking>(scan.dead.begin(), scan.dead.end()) == oracle_dead);
    for (const Marking& m : scan.non_final_dead) {
      CHECK(oracle_dead.count(m) == 1);
      CHECK_FALSE(is_final(instance.plant.final_spec, m));
    }
  }
}

TEST_CASE("later explanations are implicitly reachable from earlier ones") {
  // for y, y' in Y(M,t) with y - y' = d >= 0, the marking reached via (y',t)
  // reaches the one via (y,t) by an implicit sequence with vector d
  auto corpus = generate_corpus(GenConfig{}, 1700, 40);
  std::size_t checked = 0;
  for (const auto& instance : corpus) {
    const PetriNet& net = instance.plant.net;
    const BasisPartition& pi = instance.partition;
    for (std::size_t t : pi.explicit_transitions) {
      ExplanationSet found = enumerate_explanations(net, pi, instance.plant.initial, t);
      if (found.size() > 50) continue;
      for (const FiringVector& big : found.vectors)
        for (const FiringVector& small : found.vectors) {
          if (!dominates(big, small)) continue;
          std::vector<std::int64_t> diff(big.size());
          for (std::size_t i = 0; i < big.size(); ++i) diff[i] = big[i] - small[i];
          auto via_small = acyclic_state_equation_reach(net, pi, instance.plant.initial, small);
          auto via_big = acyclic_state_equation_reach(net, pi, instance.plant.initial, big);
          REQUIRE(via_small.has_value());
          REQUIRE(via_big.has_value());
          Marking after_small = fire(net, *via_small, t);
          Marking after_big = fire(net, *via_big, t);
          auto hop = acyclic_state_equation_reach(net, pi, after_small, FiringVector(diff));
          REQUIRE(hop.has_value());
          CHECK(*hop == after_big);
          ++checked;
        }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("every reachable marking reaches a minimax node in deadlock-free plants") {
  auto corpus = generate_corpus(GenConfig{}, 2100, 40);
  for (const auto& instance : corpus) {
    BlockingClassification truth = classify_blocking(instance.plant, instance.rg);
    if (!truth.dead.empty()) continue;  // statement requires deadlock freedom

    BasisGraph g = build_minimax_brg(instance.plant, instance.partition);
    std::set<std::size_t> node_indices;
    for (const Marking& node : g.nodes) node_indices.insert(*instance.rg.find(node));

    std::vector<std::vector<std::size_t>> succ(instance.rg.markings.size());
    for (const auto& e : instance.rg.edges) succ[e.src].push_back(e.dst);

    for (std::size_t start = 0; start < instance.rg.markings.size(); start += 5) {
      std::vector<char> seen(instance.rg.markings.size(), 0);
      std::deque<std::size_t> queue{start};
      seen[start] = 1;
      bool hit = false;
      while (!queue.empty() && !hit) {
        std::size_t v = queue.front();
        queue.pop_front();
        if (node_indices.count(v)) hit = true;
        for (std::size_t w : succ[v])
          if (!seen[w]) {
            seen[w] = 1;
            queue.push_back(w);
          }
      }
      CHECK(hit);
    }
  }
}

TEST_CASE("verdicts are identical across thread counts") {
  auto corpus = generate_corpus(GenConfig{}, 2500, 12);
  for (const auto& instance : corpus) {
    VerifyOptions serial;
    serial.build.threads = 1;
    VerifyOptions parallel;
    parallel.build.threads = 4;
    Verdict a = verify_nonblocking(instance.plant, instance.partition, serial);
    Verdict b = verify_nonblocking(instance.plant, instance.partition, parallel);
    CHECK(a.nonblocking == b.nonblocking);
    CHECK(a.reason == b.reason);
    CHECK(a.witness == b.witness);
    CHECK(a.all_deadlocks == b.all_deadlocks);
  }
}
