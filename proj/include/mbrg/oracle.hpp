#pragma once

// Brute-force ground truth: full reachability graphs, direct blocking
// classification, explanation enumeration by sequence search, and a seeded
// random plant generator for property testing. Correctness only; the
// semi-structural pipeline is the fast path.

#include "mbrg/explain.hpp"

#include <cstdint>

namespace mbrg {

struct ReachabilityGraph {
  struct Edge {
    std::size_t src = 0;
    std::size_t transition = 0;
    std::size_t dst = 0;
    bool operator==(const Edge&) const = default;
  };

  std::vector<Marking> markings;  // BFS discovery order; index 0 = initial
  std::vector<Edge> edges;
  std::unordered_map<std::string, std::size_t> index;  // canonical encoding -> position

  std::optional<std::size_t> find(const Marking& m) const {
    auto it = index.find(m.encode());
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

ReachabilityGraph build_reachability_graph(const PetriNet&, const Marking& initial,
                                           std::size_t cap = 1'000'000);
ReachabilityGraph build_reachability_graph(const Plant&, std::size_t cap = 1'000'000);

struct BlockingClassification {
  std::vector<std::size_t> blocking;  // ascending indices into the graph
  std::vector<std::size_t> dead;
  std::vector<std::size_t> final_reachable;
  bool is_nonblocking = false;
};

// Backward search from the reachable final markings over reversed edges; a
// final marking is co-reachable from itself via the empty sequence, so final
// markings seed the search even when dead.
BlockingClassification classify_blocking(const Plant&, const ReachabilityGraph&);
BlockingClassification oracle_blocking(const Plant&, std::size_t cap = 1'000'000);

// Explanation vectors found by depth-first search over actual implicit
// firings. Uses firing-rule semantics only (no state equation); this is the
// independent route the fixed-point enumeration is checked against.
ExplanationSet brute_force_explanations(const PetriNet&, const BasisPartition&, const Marking& from,
                                        std::size_t t, std::size_t depth_cap = 4096,
                                        std::size_t state_cap = 1'000'000);

struct GenConfig {
  std::size_t max_places = 8;
  std::size_t max_transitions = 8;
  std::int64_t max_arc_weight = 2;
  std::int64_t max_initial_tokens = 3;
  std::size_t rg_cap = 5000;
};

struct GeneratedPlant {
  std::uint64_t seed = 0;
  Plant plant;
  BasisPartition partition;
  ReachabilityGraph rg;  // the graph that admitted the instance
};

// Deterministic in (config, seed). Returns nullopt when the instance is
// rejected because its reachability set exceeds config.rg_cap.
std::optional<GeneratedPlant> gen_random_plant(const GenConfig&, std::uint64_t seed);

// Accepted instances for seeds first_seed, first_seed+1, ... until `count`.
std::vector<GeneratedPlant> generate_corpus(const GenConfig&, std::uint64_t first_seed,
                                            std::size_t count);

}  // namespace mbrg
