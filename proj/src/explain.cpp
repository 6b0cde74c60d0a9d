#include "mbrg/explain.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace mbrg {

bool ExplanationSet::contains(const FiringVector& y) const {
  return std::binary_search(vectors.begin(), vectors.end(), y);
}

RealizableSet realizable_implicit_vectors(const PetriNet& net, const BasisPartition& pi,
                                          const Marking& from, const ExploreLimits& limits) {
  if (from.size() != net.place_count()) throw InputError("marking dimension mismatch");
  const std::size_t ni = pi.implicit_count();

  struct Row {
    FiringVector vector;
    Marking marking;
  };
  std::vector<Row> rows;
  std::unordered_set<std::vector<std::int64_t>, CountsHash> seen;

  rows.push_back({FiringVector::zeros(ni), from});
  seen.insert(rows.front().vector.counts);

  for (std::size_t head = 0; head < rows.size(); ++head) {
    // rows grows while iterating; index-based worklist keeps FIFO order
    for (std::size_t i = 0; i < ni; ++i) {
      auto col = net.incidence_column(pi.implicit_transitions[i]);
      Marking next = rows[head].marking;
      bool nonneg = true;
      for (std::size_t p = 0; p < col.size(); ++p) {
        next.counts[p] = checked_add(next.counts[p], col[p]);
        if (next.counts[p] < 0) nonneg = false;
      }
      if (!nonneg) continue;
      FiringVector y = rows[head].vector;
      y.counts[i] = checked_add(y.counts[i], 1);
      if (!seen.insert(y.counts).second) continue;
      if (rows.size() + 1 > limits.max_rows)
        throw BudgetExceeded("exploration budget exhausted (" + std::to_string(limits.max_rows) +
                             " rows); implicit sub-net may admit unbounded firing");
      rows.push_back({std::move(y), std::move(next)});
    }
  }

  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.vector < b.vector; });
  RealizableSet out;
  out.vectors.reserve(rows.size());
  out.reached.reserve(rows.size());
  for (auto& row : rows) {
    out.vectors.push_back(std::move(row.vector));
    out.reached.push_back(std::move(row.marking));
  }
  return out;
}

namespace {

bool enables(const Marking& m, std::span<const std::int64_t> pre) {
  for (std::size_t p = 0; p < pre.size(); ++p)
    if (m[p] < pre[p]) return false;
  return true;
}

}  // namespace

ExplanationSet enumerate_explanations(const PetriNet& net, const BasisPartition& pi,
                                      const Marking& from, std::size_t t,
                                      const ExploreLimits& limits) {
  if (std::find(pi.explicit_transitions.begin(), pi.explicit_transitions.end(), t) ==
      pi.explicit_transitions.end())
    throw ContractViolation("explanations are defined for explicit transitions only");
  RealizableSet all = realizable_implicit_vectors(net, pi, from, limits);
  auto pre = net.pre_column(t);
  ExplanationSet out;
  for (std::size_t i = 0; i < all.vectors.size(); ++i)
    if (enables(all.reached[i], pre)) out.vectors.push_back(std::move(all.vectors[i]));
  return out;
}

namespace {

ExplanationSet extreme_elements(const ExplanationSet& s, bool maximal) {
  // naive pairwise dominance scan; explanation sets stay small in practice
  ExplanationSet out;
  for (std::size_t i = 0; i < s.vectors.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < s.vectors.size() && keep; ++j) {
      if (i == j) continue;
      const bool covered = maximal ? dominates(s.vectors[j], s.vectors[i])
                                   : dominates(s.vectors[i], s.vectors[j]);
      if (covered && s.vectors[i] != s.vectors[j]) keep = false;
    }
    if (keep) out.vectors.push_back(s.vectors[i]);
  }
  return out;
}

}  // namespace

ExplanationSet minimal_elements(const ExplanationSet& s) { return extreme_elements(s, false); }

ExplanationSet maximal_elements(const ExplanationSet& s) { return extreme_elements(s, true); }

ExplanationSet maximal_implicit_vectors(const PetriNet& net, const BasisPartition& pi,
                                        const Marking& from, const ExploreLimits& limits) {
  // dummy transition with zero pre column: every realizable vector explains it
  RealizableSet all = realizable_implicit_vectors(net, pi, from, limits);
  ExplanationSet y;
  y.vectors = std::move(all.vectors);
  return maximal_elements(y);
}

std::vector<Marking> implicit_reach(const PetriNet& net, const BasisPartition& pi,
                                    const Marking& from, const ExploreLimits& limits) {
  if (from.size() != net.place_count()) throw InputError("marking dimension mismatch");
  std::vector<Marking> frontier{from};
  std::unordered_set<std::string> seen{from.encode()};
  std::vector<Marking> out;
  while (!frontier.empty()) {
    Marking m = std::move(frontier.back());
    frontier.pop_back();
    for (std::size_t t : pi.implicit_transitions) {
      if (!is_enabled(net, m, t)) continue;
      Marking next = fire(net, m, t);
      if (!seen.insert(next.encode()).second) continue;
      if (seen.size() > limits.max_rows)
        throw BudgetExceeded("exploration budget exhausted while computing implicit reach");
      frontier.push_back(std::move(next));
    }
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mbrg
