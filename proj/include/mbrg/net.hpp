#pragma once

// Core place/transition net model: nets, markings, firing semantics, basis
// partitions and final-marking specifications.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace mbrg {

// Malformed user input: unknown ids, duplicate ids, dimension mismatches.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation was called outside its contract (e.g. firing a disabled
// transition).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// An exploration exceeded its configured budget. Usually means the net is
// unbounded, or the budget is too small for the instance.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checked 64-bit arithmetic would wrap.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

// Token counts per place, in the owning net's place order.
struct Marking {
  std::vector<std::int64_t> counts;

  Marking() = default;
  explicit Marking(std::vector<std::int64_t> c) : counts(std::move(c)) {}

  std::size_t size() const { return counts.size(); }
  std::int64_t operator[](std::size_t i) const { return counts[i]; }

  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;  // lexicographic

  // Fixed-width canonical encoding: 4 bytes little-endian per place.
  // Injective on the supported range [0, 2^32); larger counts are rejected.
  std::string encode() const;
  static Marking decode(std::string_view bytes);

  std::string to_string() const;  // "[2,0,1]"
};

// Occurrence counts per implicit transition, in basis-partition order.
struct FiringVector {
  std::vector<std::int64_t> counts;

  FiringVector() = default;
  explicit FiringVector(std::vector<std::int64_t> c) : counts(std::move(c)) {}
  static FiringVector zeros(std::size_t n) {
    return FiringVector(std::vector<std::int64_t>(n, 0));
  }

  std::size_t size() const { return counts.size(); }
  std::int64_t operator[](std::size_t i) const { return counts[i]; }

  bool operator==(const FiringVector&) const = default;
  auto operator<=>(const FiringVector&) const = default;

  std::string to_string() const;  // "(2,1)", zero-length is "()"
};

// a >= b componentwise
bool dominates(const FiringVector& a, const FiringVector& b);

struct CountsHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (v.size() + 1);
    for (std::int64_t x : v) {
      std::uint64_t u = static_cast<std::uint64_t>(x);
      u *= 0xff51afd7ed558ccdull;
      u ^= u >> 33;
      h = (h ^ u) * 0xc4ceb9fe1a85ec53ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept {
    return CountsHash{}(m.counts);
  }
};

struct FiringVectorHash {
  std::size_t operator()(const FiringVector& y) const noexcept {
    return CountsHash{}(y.counts);
  }
};

// Weighted arc, used when assembling nets.
struct Arc {
  std::string place;
  std::string transition;
  std::int64_t weight = 1;
};

class PetriNet {
 public:
  PetriNet(std::vector<std::string> places, std::vector<std::string> transitions,
           const std::vector<Arc>& pre_arcs, const std::vector<Arc>& post_arcs);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }
  const std::string& place_name(std::size_t p) const { return places_[p]; }
  const std::string& transition_name(std::size_t t) const { return transitions_[t]; }

  std::optional<std::size_t> find_place(std::string_view name) const;
  std::optional<std::size_t> find_transition(std::string_view name) const;
  std::size_t place_index(std::string_view name) const;       // throws InputError
  std::size_t transition_index(std::string_view name) const;  // throws InputError

  std::int64_t pre(std::size_t p, std::size_t t) const { return pre_[t * place_count() + p]; }
  std::int64_t post(std::size_t p, std::size_t t) const { return post_[t * place_count() + p]; }
  std::int64_t incidence(std::size_t p, std::size_t t) const { return inc_[t * place_count() + p]; }

  std::span<const std::int64_t> pre_column(std::size_t t) const;
  std::span<const std::int64_t> post_column(std::size_t t) const;
  std::span<const std::int64_t> incidence_column(std::size_t t) const;

  bool operator==(const PetriNet& other) const {
    return places_ == other.places_ && transitions_ == other.transitions_ &&
           pre_ == other.pre_ && post_ == other.post_;
  }

 private:
  std::vector<std::string> places_, transitions_;
  std::unordered_map<std::string, std::size_t> place_index_, transition_index_;
  // column-major m x n; entry (p,t) at t*m+p
  std::vector<std::int64_t> pre_, post_, inc_;
};

// Split of the transition set into explicit and implicit parts. The implicit
// order fixes the index layout of firing vectors.
struct BasisPartition {
  std::vector<std::size_t> explicit_transitions;  // ascending
  std::vector<std::size_t> implicit_transitions;  // ordered

  std::size_t implicit_count() const { return implicit_transitions.size(); }
  bool operator==(const BasisPartition&) const = default;
};

// A directed cycle through places and implicit transitions, as node names in
// order; the closing arc back to the first node is implied.
struct CycleWitness {
  std::vector<std::string> nodes;
  std::string to_string() const;  // "p1 -> t1 -> p2 -> t2 -> p1"
};

// Checks that the partition covers the net's transitions exactly (throws
// InputError otherwise) and that the implicit-induced sub-net is acyclic.
// Returns a cycle when it is not, nullopt when the partition is valid.
std::optional<CycleWitness> validate_partition(const PetriNet&, const BasisPartition&);

// Builds (T_E, T_I) from explicit transition names; the remainder becomes
// implicit in declaration order. Throws InputError on unknown names or a
// cyclic implicit sub-net.
BasisPartition make_partition(const PetriNet&, const std::vector<std::string>& explicit_names);

// Linear final-marking constraint: final iff weights . M <= bound.
struct Gmec {
  std::vector<std::int64_t> weights;
  std::int64_t bound = 0;
  bool operator==(const Gmec&) const = default;
};

// Final-marking set, either an explicit list or a single linear constraint.
class FinalSpec {
 public:
  static FinalSpec from_markings(std::vector<Marking> markings);  // sorts, dedups
  static FinalSpec from_gmec(Gmec gmec);

  bool is_gmec() const { return std::holds_alternative<Gmec>(spec_); }
  const Gmec& gmec() const { return std::get<Gmec>(spec_); }
  const std::vector<Marking>& markings() const { return std::get<std::vector<Marking>>(spec_); }

  // place count this spec constrains; nullopt for an empty explicit list
  std::optional<std::size_t> dimension() const;

  bool operator==(const FinalSpec&) const = default;

 private:
  FinalSpec() = default;
  std::variant<std::vector<Marking>, Gmec> spec_;
};

bool is_final(const FinalSpec&, const Marking&);

struct Plant {
  PetriNet net;
  Marking initial;
  FinalSpec final_spec;

  bool operator==(const Plant&) const = default;
};

// Validates dimensions (initial marking length, final-spec dimension).
Plant make_plant(PetriNet net, Marking initial, FinalSpec final_spec);

bool is_enabled(const PetriNet&, const Marking&, std::size_t t);
Marking fire(const PetriNet&, const Marking&, std::size_t t);  // ContractViolation if disabled
bool is_dead(const PetriNet&, const Marking&);

// State-equation reachability in the implicit sub-net: returns m + C_I*y when
// that vector is componentwise nonnegative (some implicit sequence with
// firing vector y then fires from m), nullopt otherwise. Only meaningful for
// a valid (acyclic) partition.
std::optional<Marking> acyclic_state_equation_reach(const PetriNet&, const BasisPartition&,
                                                    const Marking& m, const FiringVector& y);

}  // namespace mbrg
