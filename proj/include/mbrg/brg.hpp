#pragma once

// Worklist construction of the classical BRG and the minimax-BRG as
// deterministic automata over basis / minimax basis markings.

#include "mbrg/explain.hpp"

namespace mbrg {

enum class GraphKind { Classical, Minimax };

struct BasisEdge {
  std::size_t src = 0;
  std::size_t transition = 0;  // net transition index, member of T_E
  FiringVector vector;         // explanation vector used
  std::size_t dst = 0;

  bool operator==(const BasisEdge&) const = default;
};

struct BasisGraph {
  GraphKind kind = GraphKind::Minimax;
  BasisPartition partition;
  std::vector<Marking> nodes;   // discovery order; node 0 is the initial marking
  std::vector<BasisEdge> edges;  // grouped by src, then (transition, vector)
  std::unordered_map<std::string, std::size_t> node_index;  // canonical encoding -> index

  std::optional<std::size_t> find_node(const Marking& m) const {
    auto it = node_index.find(m.encode());
    if (it == node_index.end()) return std::nullopt;
    return it->second;
  }
};

enum class WorklistOrder { Fifo, Lifo };

struct BuildOptions {
  std::size_t node_budget = 1'000'000;
  ExploreLimits explore;
  int threads = 0;  // 0: runtime default, 1: serial
  // Honored by the serial builder only; the parallel builder always produces
  // the FIFO discovery order.
  WorklistOrder order = WorklistOrder::Fifo;
};

// Classical BRG: successors through minimal explanation vectors only.
BasisGraph build_brg(const Plant&, const BasisPartition&, const BuildOptions& = {});

// Minimax-BRG: successors through minimal and maximal explanation vectors.
BasisGraph build_minimax_brg(const Plant&, const BasisPartition&, const BuildOptions& = {});

// Discovery-order-independent fingerprint: sorted node encodings plus sorted
// (src-marking, transition, vector, dst-marking) edge tuples.
std::string canonical_graph_key(const BasisGraph&);

}  // namespace mbrg
