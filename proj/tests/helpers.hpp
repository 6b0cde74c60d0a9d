#pragma once

// Shared fixtures for the test suites. The fix-* family mirrors
// tests/fixtures/*.pnet; see the comments there for the intended behavior.

#include "mbrg/net.hpp"

#include <initializer_list>

namespace testutil {

inline mbrg::Marking mk(std::initializer_list<std::int64_t> counts) {
  return mbrg::Marking(std::vector<std::int64_t>(counts));
}

inline mbrg::FiringVector fv(std::initializer_list<std::int64_t> counts) {
  return mbrg::FiringVector(std::vector<std::int64_t>(counts));
}

// Producer/consumer loop with a drain transition whose p2 weight is alpha.
inline mbrg::PetriNet fix_net(std::int64_t alpha) {
  return mbrg::PetriNet({"p1", "p2", "p3"}, {"t1", "t2", "t3"},
                        {{"p1", "t1", 1}, {"p2", "t2", 1}, {"p2", "t3", alpha}, {"p3", "t3", 1}},
                        {{"p2", "t1", 1}, {"p1", "t2", 1}});
}

inline mbrg::BasisPartition fix_partition(const mbrg::PetriNet& net) {
  return mbrg::make_partition(net, {"t2"});
}

inline mbrg::Plant fix_plant(std::int64_t alpha,
                             std::vector<mbrg::Marking> finals = {mk({2, 0, 1})}) {
  return mbrg::make_plant(fix_net(alpha), mk({2, 0, 1}),
                          mbrg::FinalSpec::from_markings(std::move(finals)));
}

// Single place, single self-loop transition.
inline mbrg::PetriNet loop_net() {
  return mbrg::PetriNet({"p1"}, {"t1"}, {{"p1", "t1", 1}}, {{"p1", "t1", 1}});
}

inline mbrg::Plant loop_plant() {
  return mbrg::make_plant(loop_net(), mk({1}), mbrg::FinalSpec::from_markings({mk({1})}));
}

}  // namespace testutil
