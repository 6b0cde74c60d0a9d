#include "mbrg/net.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace mbrg {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

std::string Marking::encode() const {
  std::string out;
  out.reserve(counts.size() * 4);
  for (std::int64_t c : counts) {
    if (c < 0 || c > 0xFFFFFFFFll)
      throw OverflowError("token count out of supported range [0, 2^32)");
    auto u = static_cast<std::uint32_t>(c);
    out.push_back(static_cast<char>(u & 0xFF));
    out.push_back(static_cast<char>((u >> 8) & 0xFF));
    out.push_back(static_cast<char>((u >> 16) & 0xFF));
    out.push_back(static_cast<char>((u >> 24) & 0xFF));
  }
  return out;
}

Marking Marking::decode(std::string_view bytes) {
  if (bytes.size() % 4 != 0) throw InputError("marking encoding must be a multiple of 4 bytes");
  std::vector<std::int64_t> counts(bytes.size() / 4);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::uint32_t u = 0;
    for (std::size_t b = 0; b < 4; ++b)
      u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    counts[i] = static_cast<std::int64_t>(u);
  }
  return Marking(std::move(counts));
}

namespace {

std::string join_counts(const std::vector<std::int64_t>& v, char open, char close) {
  std::string s(1, open);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(v[i]);
  }
  s.push_back(close);
  return s;
}

}  // namespace

std::string Marking::to_string() const { return join_counts(counts, '[', ']'); }

std::string FiringVector::to_string() const { return join_counts(counts, '(', ')'); }

bool dominates(const FiringVector& a, const FiringVector& b) {
  if (a.size() != b.size()) throw ContractViolation("firing vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

PetriNet::PetriNet(std::vector<std::string> places, std::vector<std::string> transitions,
                   const std::vector<Arc>& pre_arcs, const std::vector<Arc>& post_arcs)
    : places_(std::move(places)), transitions_(std::move(transitions)) {
  if (places_.empty()) throw InputError("at least one place required");
  if (transitions_.empty()) throw InputError("at least one transition required");
  for (std::size_t p = 0; p < places_.size(); ++p)
    if (!place_index_.emplace(places_[p], p).second)
      throw InputError("duplicate place id '" + places_[p] + "'");
  for (std::size_t t = 0; t < transitions_.size(); ++t)
    if (!transition_index_.emplace(transitions_[t], t).second)
      throw InputError("duplicate transition id '" + transitions_[t] + "'");

  const std::size_t m = places_.size(), n = transitions_.size();
  pre_.assign(m * n, 0);
  post_.assign(m * n, 0);
  auto apply = [&](std::vector<std::int64_t>& mat, const std::vector<Arc>& arcs, const char* which) {
    for (const Arc& a : arcs) {
      if (a.weight < 0) throw InputError("negative arc weight on " + a.place + "/" + a.transition);
      std::size_t p = place_index(a.place);
      std::size_t t = transition_index(a.transition);
      std::int64_t& cell = mat[t * m + p];
      if (cell != 0)
        throw InputError(std::string(which) + " arc (" + a.place + "," + a.transition +
                         ") specified twice");
      cell = a.weight;
    }
  };
  apply(pre_, pre_arcs, "pre");
  apply(post_, post_arcs, "post");

  inc_.resize(m * n);
  for (std::size_t i = 0; i < m * n; ++i) inc_[i] = checked_add(post_[i], -pre_[i]);
}

std::optional<std::size_t> PetriNet::find_place(std::string_view name) const {
  auto it = place_index_.find(std::string(name));
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PetriNet::find_transition(std::string_view name) const {
  auto it = transition_index_.find(std::string(name));
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PetriNet::place_index(std::string_view name) const {
  auto i = find_place(name);
  if (!i) throw InputError("unknown place id '" + std::string(name) + "'");
  return *i;
}

std::size_t PetriNet::transition_index(std::string_view name) const {
  auto i = find_transition(name);
  if (!i) throw InputError("unknown transition id '" + std::string(name) + "'");
  return *i;
}

std::span<const std::int64_t> PetriNet::pre_column(std::size_t t) const {
  return {pre_.data() + t * place_count(), place_count()};
}

std::span<const std::int64_t> PetriNet::post_column(std::size_t t) const {
  return {post_.data() + t * place_count(), place_count()};
}

std::span<const std::int64_t> PetriNet::incidence_column(std::size_t t) const {
  return {inc_.data() + t * place_count(), place_count()};
}

std::string CycleWitness::to_string() const {
  std::string s;
  for (const auto& n : nodes) {
    if (!s.empty()) s += " -> ";
    s += n;
  }
  if (!nodes.empty()) s += " -> " + nodes.front();
  return s;
}

std::optional<CycleWitness> validate_partition(const PetriNet& net, const BasisPartition& pi) {
  const std::size_t n = net.transition_count();
  std::vector<int> seen(n, 0);
  for (std::size_t t : pi.explicit_transitions) {
    if (t >= n) throw InputError("explicit transition index out of range");
    if (seen[t]++) throw InputError("transition '" + net.transition_name(t) + "' listed twice");
  }
  for (std::size_t t : pi.implicit_transitions) {
    if (t >= n) throw InputError("implicit transition index out of range");
    if (seen[t]++)
      throw InputError("transition '" + net.transition_name(t) + "' in both partition parts");
  }
  for (std::size_t t = 0; t < n; ++t)
    if (!seen[t])
      throw InputError("transition '" + net.transition_name(t) + "' missing from partition");

  // Kahn toposort on the bipartite digraph over places and implicit
  // transitions: p -> t when pre(p,t) > 0, t -> p when post(p,t) > 0.
  const std::size_t m = net.place_count();
  const std::size_t total = m + pi.implicit_count();
  std::vector<std::vector<std::size_t>> succ(total), pred(total);
  for (std::size_t i = 0; i < pi.implicit_count(); ++i) {
    std::size_t t = pi.implicit_transitions[i];
    std::size_t tn = m + i;
    for (std::size_t p = 0; p < m; ++p) {
      if (net.pre(p, t) > 0) {
        succ[p].push_back(tn);
        pred[tn].push_back(p);
      }
      if (net.post(p, t) > 0) {
        succ[tn].push_back(p);
        pred[p].push_back(tn);
      }
    }
  }

  std::vector<std::size_t> indeg(total);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < total; ++v) {
    indeg[v] = pred[v].size();
    if (indeg[v] == 0) queue.push_back(v);
  }
  std::size_t processed = 0;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    ++processed;
    for (std::size_t w : succ[v])
      if (--indeg[w] == 0) queue.push_back(w);
  }
  if (processed == total) return std::nullopt;

  // Remaining nodes all lie on cycles; walk predecessors (restricted to the
  // remaining set) from the smallest one until a node repeats.
  std::size_t start = 0;
  while (indeg[start] == 0) ++start;
  std::vector<std::size_t> path;
  std::vector<std::size_t> pos(total, SIZE_MAX);
  std::size_t v = start;
  while (pos[v] == SIZE_MAX) {
    pos[v] = path.size();
    path.push_back(v);
    std::size_t next = SIZE_MAX;
    for (std::size_t w : pred[v])
      if (indeg[w] > 0 && w < next) next = w;
    v = next;
  }
  std::vector<std::size_t> cycle(path.begin() + static_cast<std::ptrdiff_t>(pos[v]), path.end());
  std::reverse(cycle.begin(), cycle.end());  // follow arc direction
  // canonical rotation: start at the smallest node index
  auto smallest = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), smallest, cycle.end());

  CycleWitness witness;
  for (std::size_t node : cycle)
    witness.nodes.push_back(node < m ? net.place_name(node)
                                     : net.transition_name(pi.implicit_transitions[node - m]));
  return witness;
}

BasisPartition make_partition(const PetriNet& net, const std::vector<std::string>& explicit_names) {
  BasisPartition pi;
  std::vector<bool> is_explicit(net.transition_count(), false);
  for (const auto& name : explicit_names) is_explicit[net.transition_index(name)] = true;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    (is_explicit[t] ? pi.explicit_transitions : pi.implicit_transitions).push_back(t);
  if (auto cycle = validate_partition(net, pi))
    throw InputError("implicit-induced sub-net is not acyclic: " + cycle->to_string());
  return pi;
}

FinalSpec FinalSpec::from_markings(std::vector<Marking> markings) {
  for (const auto& m : markings)
    if (m.size() != markings.front().size())
      throw InputError("final markings must share one dimension");
  std::sort(markings.begin(), markings.end());
  markings.erase(std::unique(markings.begin(), markings.end()), markings.end());
  FinalSpec spec;
  spec.spec_ = std::move(markings);
  return spec;
}

FinalSpec FinalSpec::from_gmec(Gmec gmec) {
  FinalSpec spec;
  spec.spec_ = std::move(gmec);
  return spec;
}

std::optional<std::size_t> FinalSpec::dimension() const {
  if (is_gmec()) return gmec().weights.size();
  if (markings().empty()) return std::nullopt;
  return markings().front().size();
}

bool is_final(const FinalSpec& spec, const Marking& m) {
  if (spec.is_gmec()) {
    const Gmec& g = spec.gmec();
    if (g.weights.size() != m.size()) throw InputError("final-spec dimension mismatch");
    std::int64_t acc = 0;
    for (std::size_t p = 0; p < m.size(); ++p)
      acc = checked_add(acc, checked_mul(g.weights[p], m[p]));
    return acc <= g.bound;
  }
  const auto& list = spec.markings();
  return std::binary_search(list.begin(), list.end(), m);
}

Plant make_plant(PetriNet net, Marking initial, FinalSpec final_spec) {
  if (initial.size() != net.place_count())
    throw InputError("initial marking has " + std::to_string(initial.size()) + " entries, net has " +
                     std::to_string(net.place_count()) + " places");
  for (std::int64_t c : initial.counts)
    if (c < 0) throw InputError("initial marking entries must be nonnegative");
  if (auto dim = final_spec.dimension(); dim && *dim != net.place_count())
    throw InputError("final specification dimension mismatch");
  return Plant{std::move(net), std::move(initial), std::move(final_spec)};
}

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  if (t >= net.transition_count()) throw InputError("transition index out of range");
  if (m.size() != net.place_count()) throw InputError("marking dimension mismatch");
  auto pre = net.pre_column(t);
  for (std::size_t p = 0; p < pre.size(); ++p)
    if (m[p] < pre[p]) return false;
  return true;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (!is_enabled(net, m, t))
    throw ContractViolation("transition '" + net.transition_name(t) + "' is not enabled at " +
                            m.to_string());
  auto col = net.incidence_column(t);
  Marking out = m;
  for (std::size_t p = 0; p < col.size(); ++p) out.counts[p] = checked_add(out.counts[p], col[p]);
  return out;
}

bool is_dead(const PetriNet& net, const Marking& m) {
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (is_enabled(net, m, t)) return false;
  return true;
}

std::optional<Marking> acyclic_state_equation_reach(const PetriNet& net, const BasisPartition& pi,
                                                    const Marking& m, const FiringVector& y) {
  if (y.size() != pi.implicit_count())
    throw ContractViolation("firing vector length does not match implicit transition count");
  if (m.size() != net.place_count()) throw InputError("marking dimension mismatch");
  Marking out = m;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0) throw ContractViolation("firing vector entries must be nonnegative");
    if (y[i] == 0) continue;
    auto col = net.incidence_column(pi.implicit_transitions[i]);
    for (std::size_t p = 0; p < col.size(); ++p)
      out.counts[p] = checked_add(out.counts[p], checked_mul(col[p], y[i]));
  }
  for (std::int64_t c : out.counts)
    if (c < 0) return std::nullopt;
  return out;
}

}  // namespace mbrg
