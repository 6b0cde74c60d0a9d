#include "mbrg/oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "mbrg/io.hpp"

using namespace mbrg;
using testutil::fv;
using testutil::mk;

namespace {

std::set<Marking> marking_set(const ReachabilityGraph& rg) {
  return {rg.markings.begin(), rg.markings.end()};
}

std::set<Marking> pick(const ReachabilityGraph& rg, const std::vector<std::size_t>& idx) {
  std::set<Marking> out;
  for (std::size_t i : idx) out.insert(rg.markings[i]);
  return out;
}

}  // namespace

TEST_CASE("reachability graphs of the fixture family") {
  Plant a = testutil::fix_plant(1);
  ReachabilityGraph rga = build_reachability_graph(a);
  CHECK(rga.markings.size() == 5);
  CHECK(marking_set(rga) == std::set<Marking>{mk({2, 0, 1}), mk({1, 1, 1}), mk({0, 2, 1}),
                                              mk({1, 0, 0}), mk({0, 1, 0})});
  CHECK(rga.edges.size() == 8);

  Plant b = testutil::fix_plant(2);
  ReachabilityGraph rgb = build_reachability_graph(b);
  CHECK(rgb.markings.size() == 4);
  CHECK(marking_set(rgb) ==
        std::set<Marking>{mk({2, 0, 1}), mk({1, 1, 1}), mk({0, 2, 1}), mk({0, 0, 0})});

  CHECK(build_reachability_graph(testutil::loop_plant()).markings.size() == 1);

  CHECK_THROWS_AS(build_reachability_graph(a, 3), BudgetExceeded);
}

TEST_CASE("blocking classification against the fixtures") {
  Plant a = testutil::fix_plant(1);
  ReachabilityGraph rga = build_reachability_graph(a);
  BlockingClassification ca = classify_blocking(a, rga);
  CHECK_FALSE(ca.is_nonblocking);
  CHECK(pick(rga, ca.blocking) == std::set<Marking>{mk({1, 0, 0}), mk({0, 1, 0})});
  CHECK(ca.dead.empty());

  Plant b = testutil::fix_plant(2);
  ReachabilityGraph rgb = build_reachability_graph(b);
  BlockingClassification cb = classify_blocking(b, rgb);
  CHECK_FALSE(cb.is_nonblocking);
  CHECK(pick(rgb, cb.blocking) == std::set<Marking>{mk({0, 0, 0})});
  CHECK(pick(rgb, cb.dead) == std::set<Marking>{mk({0, 0, 0})});

  CHECK(oracle_blocking(testutil::loop_plant()).is_nonblocking);
}

TEST_CASE("a dead final marking is not blocking") {
  PetriNet net({"p1"}, {"t1"}, {{"p1", "t1", 1}}, {});
  Plant done = make_plant(net, mk({1}), FinalSpec::from_markings({mk({0})}));
  BlockingClassification c = oracle_blocking(done);
  CHECK(c.is_nonblocking);
  CHECK(c.dead.size() == 1);

  Plant stuck = make_plant(net, mk({1}), FinalSpec::from_markings({mk({1})}));
  BlockingClassification c2 = oracle_blocking(stuck);
  CHECK_FALSE(c2.is_nonblocking);
  CHECK(c2.blocking.size() == 1);
}

TEST_CASE("sequence search explanations") {
  PetriNet net = testutil::fix_net(1);
  BasisPartition pi = testutil::fix_partition(net);
  const std::size_t t2 = net.transition_index("t2");

  ExplanationSet found = brute_force_explanations(net, pi, mk({2, 0, 1}), t2);
  CHECK(found.vectors == std::vector<FiringVector>{fv({1, 0}), fv({2, 0}), fv({2, 1})});
  CHECK(brute_force_explanations(net, pi, mk({0, 1, 0}), t2).vectors ==
        std::vector<FiringVector>{fv({0, 0})});

  PetriNet loop = testutil::loop_net();
  BasisPartition piloop = make_partition(loop, {"t1"});
  CHECK(brute_force_explanations(loop, piloop, mk({1}), 0).vectors ==
        std::vector<FiringVector>{fv({})});

  CHECK_THROWS_AS(brute_force_explanations(net, pi, mk({2, 0, 1}), t2, 1), BudgetExceeded);
}

TEST_CASE("generator is deterministic and respects its contract") {
  GenConfig config;
  auto first = gen_random_plant(config, 1);
  auto second = gen_random_plant(config, 1);
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(first->plant == second->plant);
  CHECK(first->partition == second->partition);

  auto corpus = generate_corpus(config, 1, 25);
  CHECK(corpus.size() == 25);
  for (const auto& instance : corpus) {
    CHECK_FALSE(validate_partition(instance.plant.net, instance.partition).has_value());
    CHECK(instance.rg.markings.size() <= config.rg_cap);
    // at least one reachable marking is final, by construction
    CHECK(std::any_of(instance.rg.markings.begin(), instance.rg.markings.end(),
                      [&](const Marking& m) { return is_final(instance.plant.final_spec, m); }));
  }
}

TEST_CASE("reachability graphs are closed under firing") {
  auto corpus = generate_corpus(GenConfig{}, 42, 10);
  for (const auto& instance : corpus) {
    const ReachabilityGraph& rg = instance.rg;
    const PetriNet& net = instance.plant.net;
    for (const auto& e : rg.edges)
      CHECK(fire(net, rg.markings[e.src], e.transition) == rg.markings[e.dst]);
    for (std::size_t i = 0; i < rg.markings.size(); i += 3) {
      for (std::size_t t = 0; t < net.transition_count(); ++t) {
        if (!is_enabled(net, rg.markings[i], t)) continue;
        Marking next = fire(net, rg.markings[i], t);
        REQUIRE(rg.find(next).has_value());
        CHECK(std::count(rg.edges.begin(), rg.edges.end(),
                         ReachabilityGraph::Edge{i, t, *rg.find(next)}) == 1);
      }
    }
  }
}
