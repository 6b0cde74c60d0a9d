#include "mbrg/brg.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbrg {

namespace {

struct PendingEdge {
  std::size_t transition;
  FiringVector vector;
  Marking dst;
};

Marking add_column(const Marking& m, std::span<const std::int64_t> col) {
  Marking out = m;
  for (std::size_t p = 0; p < col.size(); ++p) out.counts[p] = checked_add(out.counts[p], col[p]);
  return out;
}

// Successor labels of one node: for every explicit transition, the selected
// explanation vectors (minimal, plus maximal for the minimax graph) with the
// marking each one leads to after the transition fires.
std::vector<PendingEdge> expand_node(const PetriNet& net, const BasisPartition& pi, GraphKind kind,
                                     const Marking& from, const ExploreLimits& limits) {
  RealizableSet all = realizable_implicit_vectors(net, pi, from, limits);
  std::vector<PendingEdge> out;
  for (std::size_t t : pi.explicit_transitions) {
    auto pre = net.pre_column(t);
    ExplanationSet explanations;
    std::vector<const Marking*> reached;  // parallel to explanations.vectors
    for (std::size_t i = 0; i < all.vectors.size(); ++i) {
      bool enables = true;
      for (std::size_t p = 0; p < pre.size() && enables; ++p)
        if (all.reached[i][p] < pre[p]) enables = false;
      if (enables) {
        explanations.vectors.push_back(all.vectors[i]);
        reached.push_back(&all.reached[i]);
      }
    }
    if (explanations.empty()) continue;

    ExplanationSet selected = minimal_elements(explanations);
    if (kind == GraphKind::Minimax) {
      ExplanationSet maxima = maximal_elements(explanations);
      ExplanationSet merged;
      std::set_union(selected.vectors.begin(), selected.vectors.end(), maxima.vectors.begin(),
                     maxima.vectors.end(), std::back_inserter(merged.vectors));
      selected = std::move(merged);
    }

    auto inc = net.incidence_column(t);
    for (const FiringVector& y : selected.vectors) {
      auto it = std::lower_bound(explanations.vectors.begin(), explanations.vectors.end(), y);
      const Marking& mid = *reached[static_cast<std::size_t>(it - explanations.vectors.begin())];
      out.push_back({t, y, add_column(mid, inc)});
    }
  }
  return out;
}

BasisGraph build_graph(const Plant& plant, const BasisPartition& pi, GraphKind kind,
                       const BuildOptions& opts) {
  if (auto cycle = validate_partition(plant.net, pi))
    throw InputError("invalid basis partition, implicit cycle: " + cycle->to_string());
  if (plant.initial.size() != plant.net.place_count())
    throw InputError("initial marking dimension mismatch");

  BasisGraph graph;
  graph.kind = kind;
  graph.partition = pi;
  graph.nodes.push_back(plant.initial);
  graph.node_index.emplace(plant.initial.encode(), 0);

  auto intern = [&](Marking&& m) -> std::size_t {
    auto [it, inserted] = graph.node_index.try_emplace(m.encode(), graph.nodes.size());
    if (inserted) {
      if (graph.nodes.size() + 1 > opts.node_budget)
        throw BudgetExceeded("node budget exceeded (" + std::to_string(opts.node_budget) +
                             "); net may be unbounded");
      graph.nodes.push_back(std::move(m));
    }
    return it->second;
  };

  if (opts.order == WorklistOrder::Lifo && opts.threads == 1) {
    // stack-driven reference used to check order independence
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      std::size_t src = stack.back();
      stack.pop_back();
      for (auto& pending : expand_node(plant.net, pi, kind, graph.nodes[src], opts.explore)) {
        std::size_t before = graph.nodes.size();
        std::size_t dst = intern(std::move(pending.dst));
        if (graph.nodes.size() > before) stack.push_back(dst);
        graph.edges.push_back({src, pending.transition, std::move(pending.vector), dst});
      }
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const BasisEdge& a, const BasisEdge& b) {
      return std::tie(a.src, a.transition, a.vector) < std::tie(b.src, b.transition, b.vector);
    });
    return graph;
  }

  // Level-synchronous expansion; the frontier is expanded in parallel and
  // merged in node order, so discovery order matches the serial FIFO run.
  std::size_t level_begin = 0;
  while (level_begin < graph.nodes.size()) {
    const std::size_t level_end = graph.nodes.size();
    const std::size_t width = level_end - level_begin;
    std::vector<std::vector<PendingEdge>> expansions(width);

#ifdef _OPENMP
    const int max_threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    if (max_threads > 1 && width > 1) {
      std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads)
#endif
      for (std::size_t i = 0; i < width; ++i) {
        try {
          expansions[i] =
              expand_node(plant.net, pi, kind, graph.nodes[level_begin + i], opts.explore);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(mbrg_brg_failure)
#endif
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      for (std::size_t i = 0; i < width; ++i)
        expansions[i] =
            expand_node(plant.net, pi, kind, graph.nodes[level_begin + i], opts.explore);
    }

    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t src = level_begin + i;
      for (auto& pending : expansions[i]) {
        std::size_t dst = intern(std::move(pending.dst));
        graph.edges.push_back({src, pending.transition, std::move(pending.vector), dst});
      }
    }
    level_begin = level_end;
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const BasisEdge& a, const BasisEdge& b) {
    return std::tie(a.src, a.transition, a.vector) < std::tie(b.src, b.transition, b.vector);
  });
  return graph;
}

}  // namespace

BasisGraph build_brg(const Plant& plant, const BasisPartition& pi, const BuildOptions& opts) {
  return build_graph(plant, pi, GraphKind::Classical, opts);
}

BasisGraph build_minimax_brg(const Plant& plant, const BasisPartition& pi,
                             const BuildOptions& opts) {
  return build_graph(plant, pi, GraphKind::Minimax, opts);
}

std::string canonical_graph_key(const BasisGraph& graph) {
  std::vector<std::string> lines;
  lines.reserve(graph.nodes.size() + graph.edges.size());
  for (const Marking& m : graph.nodes) lines.push_back("n " + m.to_string());
  for (const BasisEdge& e : graph.edges)
    lines.push_back("e " + graph.nodes[e.src].to_string() + " " +
                    std::to_string(e.transition) + " " + e.vector.to_string() + " " +
                    graph.nodes[e.dst].to_string());
  std::sort(lines.begin(), lines.end());
  std::string key;
  for (const auto& line : lines) {
    key += line;
    key.push_back('\n');
  }
  return key;
}

}  // namespace mbrg
