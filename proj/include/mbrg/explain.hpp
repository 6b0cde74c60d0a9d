#pragma once

// Explanation-vector enumeration over the implicit sub-net: full explanation
// sets, minimal/maximal antichains, maximal implicit firing vectors, and
// implicit reaches.

#include "mbrg/net.hpp"

namespace mbrg {

struct ExploreLimits {
  // cap on admitted tableau rows (distinct count vectors) per enumeration
  std::size_t max_rows = 1'000'000;
};

// Deduplicated firing vectors in lexicographic order.
struct ExplanationSet {
  std::vector<FiringVector> vectors;

  bool contains(const FiringVector& y) const;
  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  bool operator==(const ExplanationSet&) const = default;
};

// All firing vectors realizable by implicit sequences at `from`, each paired
// with the marking it reaches: reached[i] = from + C_I * vectors[i].
struct RealizableSet {
  std::vector<FiringVector> vectors;  // lexicographic order
  std::vector<Marking> reached;
};

// Breadth-first fixed point over count vectors: a successor y+e_i is admitted
// iff the full marking from + C_I*(y+e_i) stays nonnegative, which on an
// acyclic implicit sub-net is equivalent to realizability by some implicit
// sequence. Throws BudgetExceeded ("exploration budget exhausted") past
// limits.max_rows.
RealizableSet realizable_implicit_vectors(const PetriNet&, const BasisPartition&,
                                          const Marking& from, const ExploreLimits& limits = {});

// Y(M,t): firing vectors of implicit sequences that fire at `from` and enable
// the explicit transition t.
ExplanationSet enumerate_explanations(const PetriNet&, const BasisPartition&, const Marking& from,
                                      std::size_t t, const ExploreLimits& limits = {});

// Antichain of minimal (resp. maximal) elements under componentwise order.
ExplanationSet minimal_elements(const ExplanationSet&);
ExplanationSet maximal_elements(const ExplanationSet&);

// Y_I,max: firing vectors of maximal implicit sequences at `from`. Equals the
// maximal explanations of a dummy always-enabled transition with empty pre
// and post columns.
ExplanationSet maximal_implicit_vectors(const PetriNet&, const BasisPartition&,
                                        const Marking& from, const ExploreLimits& limits = {});

// R_I: all markings reachable from `from` via implicit transitions only,
// sorted lexicographically.
std::vector<Marking> implicit_reach(const PetriNet&, const BasisPartition&, const Marking& from,
                                    const ExploreLimits& limits = {});

}  // namespace mbrg
