#pragma once

// Text format for plants, DOT exports for graphs, JSON reports for verdicts.

#include "mbrg/brg.hpp"
#include "mbrg/oracle.hpp"
#include "mbrg/verify.hpp"

namespace mbrg {

struct ParseError : InputError {
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                   message),
        line(line),
        column(column) {}

  std::size_t line;
  std::size_t column;
};

struct PlantDocument {
  std::string name;
  std::vector<std::pair<std::string, std::int64_t>> params;  // metadata key=value pairs
  Plant plant;
  BasisPartition partition;

  bool operator==(const PlantDocument&) const = default;
};

// Line-oriented ".pnet" format; '#' starts a comment, one directive per line:
//
//   net fig1-alpha1
//   param alpha=1              # optional metadata
//   places p1 p2 p3
//   transitions t1 t2 t3
//   pre  t1 p1=1
//   post t1 p2=1
//   pre  t3 p2=1 p3=1
//   m0 p1=2 p3=1               # omitted places are 0
//   explicit t2                # remainder is implicit; omitted line = all explicit
//   final marking p1=2 p3=1    # repeatable; or: final gmec w1 w2 w3 <= k
//
// Throws ParseError with location for syntax problems, InputError for
// semantic ones that have no single location (e.g. a cyclic implicit sub-net).
PlantDocument parse_plant(std::string_view text);
PlantDocument load_plant_file(const std::string& path);

// Canonical serialization; parse(serialize(d)) == d.
std::string serialize_plant(const PlantDocument&);

// Deterministic DOT: nodes in lexicographic marking order, stable bytes.
std::string export_dot(const BasisGraph&, const PetriNet&);
std::string export_dot(const ReachabilityGraph&, const PetriNet&);

std::string export_graph_json(const BasisGraph&, const PetriNet&);

// Verdict report. `include_all_deadlocks` adds the collected non-final dead
// set; `zero_times` replaces phase timings with zeros for byte-stable output.
std::string export_report(const Verdict&, const PetriNet&, bool include_all_deadlocks = false,
                          bool zero_times = false);

}  // namespace mbrg
