#pragma once

// The semi-structural nonblockingness decision procedure: i-coreachable
// minimax basis markings, unobstructedness, non-final deadlock detection, and
// the top-level verdict.

#include "mbrg/brg.hpp"

#include <memory>
#include <mutex>

namespace mbrg {

// Grow-only cache of implicit reach sets keyed by canonical marking encoding.
// Insert-if-absent under a lock; concurrent duplicate computations keep the
// first inserted value.
class ReachCache {
 public:
  std::shared_ptr<const std::vector<Marking>> get_or_compute(const PetriNet&, const BasisPartition&,
                                                             const Marking&, const ExploreLimits&);

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const std::vector<Marking>>> cache_;
};

// Node indices (ascending) whose implicit reach contains a final marking.
// For a linear final constraint this decides feasibility of
//   M_b + C_I*y = M,  w.M <= bound,  y >= 0,  M >= 0
// by enumerating the finite implicit reach.
std::vector<std::size_t> i_coreachable_set(const BasisGraph&, const Plant&,
                                           const ExploreLimits& = {}, int threads = 0,
                                           ReachCache* cache = nullptr);

// nullopt when every node has a directed path to some i-coreachable node
// (backward search over reversed edges); otherwise the unreached node with
// the lexicographically smallest marking.
std::optional<std::size_t> find_obstruction(const BasisGraph&, const std::vector<std::size_t>& ico);

enum class WitnessMode {
  Deterministic,  // full scan, lexicographically smallest witness
  Fast            // stop at the first witness found
};

struct DeadlockScan {
  std::optional<Marking> witness;  // a non-final dead marking
  std::optional<std::pair<Marking, FiringVector>> via;  // node and vector producing the witness
  std::vector<Marking> non_final_dead;  // all of them in Deterministic mode, sorted
  std::vector<Marking> dead;            // every dead marking seen, final ones included
};

// Scans every node's maximal implicit firing vectors: M' = M_b + C_I*y is
// dead iff no explicit transition is enabled there (no implicit one can be,
// by maximality). A dead node itself is covered through y = 0.
DeadlockScan nonfinal_deadlocks(const Plant&, const BasisPartition&, const BasisGraph&,
                                WitnessMode mode = WitnessMode::Deterministic,
                                const ExploreLimits& = {}, int threads = 0);

enum class VerdictReason { AllChecksPassed, NonFinalDeadlock, Obstructed };

std::string_view to_string(VerdictReason);

struct VerifyStats {
  std::size_t minimax_nodes = 0;
  std::size_t minimax_edges = 0;
  std::size_t ico_count = 0;
  std::size_t dead_found = 0;
  double brg_ms = 0;
  double deadlock_ms = 0;
  double ico_ms = 0;
  double unobstructed_ms = 0;
  bool initial_marking_dead = false;  // degenerate plant, flagged in reports
};

struct Verdict {
  bool nonblocking = false;
  VerdictReason reason = VerdictReason::AllChecksPassed;
  std::optional<Marking> witness;
  std::optional<std::pair<Marking, FiringVector>> witness_via;  // deadlock witnesses only
  std::vector<Marking> all_deadlocks;  // full non-final dead set (Deterministic mode)
  VerifyStats stats;
};

struct VerifyOptions {
  BuildOptions build;
  WitnessMode mode = WitnessMode::Deterministic;
};

// Builds the minimax-BRG, scans for non-final deadlocks, then checks
// unobstructedness via the i-coreachable set. Sound and complete for bounded
// plants with a valid partition.
Verdict verify_nonblocking(const Plant&, const BasisPartition&, const VerifyOptions& = {});

}  // namespace mbrg
