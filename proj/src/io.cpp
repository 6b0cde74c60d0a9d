#include "mbrg/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace mbrg {

namespace {

constexpr std::int64_t kMaxCount = 0xFFFFFFFFll;  // canonical encoding range

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
      ++i;
    tokens.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return tokens;
}

std::int64_t parse_int(const Token& token, std::size_t line) {
  std::int64_t value = 0;
  const char* begin = token.text.data();
  const char* end = begin + token.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("expected an integer, got '" + token.text + "'", line, token.column);
  return value;
}

// "p1=2" -> (id token, value)
std::pair<Token, std::int64_t> parse_assignment(const Token& token, std::size_t line) {
  auto eq = token.text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.text.size())
    throw ParseError("expected id=value, got '" + token.text + "'", line, token.column);
  Token id{token.text.substr(0, eq), token.column};
  Token value{token.text.substr(eq + 1), token.column + eq + 1};
  return {id, parse_int(value, line)};
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PlantDocument run() {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t eol = text_.find('\n', pos);
      if (eol == std::string_view::npos) eol = text_.size();
      ++line_no;
      directive(tokenize(text_.substr(pos, eol - pos)), line_no);
      pos = eol + 1;
      if (eol == text_.size()) break;
    }
    return assemble(line_no);
  }

 private:
  void directive(const std::vector<Token>& tokens, std::size_t line) {
    if (tokens.empty()) return;
    const std::string& head = tokens[0].text;
    if (head == "net")
      net_line(tokens, line);
    else if (head == "param")
      param_line(tokens, line);
    else if (head == "places")
      id_list(tokens, line, places_, "place");
    else if (head == "transitions")
      id_list(tokens, line, transitions_, "transition");
    else if (head == "pre")
      arc_line(tokens, line, pre_arcs_, seen_pre_);
    else if (head == "post")
      arc_line(tokens, line, post_arcs_, seen_post_);
    else if (head == "m0")
      m0_line(tokens, line);
    else if (head == "explicit")
      explicit_line(tokens, line);
    else if (head == "final")
      final_line(tokens, line);
    else
      throw ParseError("unknown directive '" + head + "'", line, tokens[0].column);
  }

  void net_line(const std::vector<Token>& tokens, std::size_t line) {
    if (tokens.size() != 2) throw ParseError("net expects exactly one name", line, tokens[0].column);
    if (!name_.empty()) throw ParseError("net name declared twice", line, tokens[0].column);
    name_ = tokens[1].text;
  }

  void param_line(const std::vector<Token>& tokens, std::size_t line) {
    if (tokens.size() < 2) throw ParseError("param expects key=value pairs", line, tokens[0].column);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto [id, value] = parse_assignment(tokens[i], line);
      params_.emplace_back(id.text, value);
    }
  }

  void id_list(const std::vector<Token>& tokens, std::size_t line, std::vector<std::string>& out,
               const char* kind) {
    if (!out.empty())
      throw ParseError(std::string(kind) + "s declared twice", line, tokens[0].column);
    if (tokens.size() < 2)
      throw ParseError("at least one " + std::string(kind) + " required", line, tokens[0].column);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      if (tokens[i].text.find('=') != std::string::npos)
        throw ParseError("'=' not allowed in ids", line, tokens[i].column);
      if (std::find(out.begin(), out.end(), tokens[i].text) != out.end())
        throw ParseError("duplicate " + std::string(kind) + " id '" + tokens[i].text + "'", line,
                         tokens[i].column);
      out.push_back(tokens[i].text);
    }
  }

  std::size_t require_place(const Token& token, std::size_t line) const {
    auto it = std::find(places_.begin(), places_.end(), token.text);
    if (it == places_.end())
      throw ParseError("unknown place id '" + token.text + "'", line, token.column);
    return static_cast<std::size_t>(it - places_.begin());
  }

  std::size_t require_transition(const Token& token, std::size_t line) const {
    auto it = std::find(transitions_.begin(), transitions_.end(), token.text);
    if (it == transitions_.end())
      throw ParseError("unknown transition id '" + token.text + "'", line, token.column);
    return static_cast<std::size_t>(it - transitions_.begin());
  }

  void arc_line(const std::vector<Token>& tokens, std::size_t line, std::vector<Arc>& arcs,
                std::vector<std::pair<std::size_t, std::size_t>>& seen) {
    if (transitions_.empty())
      throw ParseError("arcs must follow the transitions line", line, tokens[0].column);
    if (tokens.size() < 3)
      throw ParseError(tokens[0].text + " expects a transition and place=weight pairs", line,
                       tokens[0].column);
    std::size_t t = require_transition(tokens[1], line);
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      auto [id, weight] = parse_assignment(tokens[i], line);
      std::size_t p = require_place(id, line);
      if (weight < 0) throw ParseError("arc weight must be nonnegative", line, tokens[i].column);
      if (std::find(seen.begin(), seen.end(), std::pair{p, t}) != seen.end())
        throw ParseError("arc (" + id.text + "," + tokens[1].text + ") specified twice", line,
                         tokens[i].column);
      seen.emplace_back(p, t);
      if (weight > 0) arcs.push_back({places_[p], transitions_[t], weight});
    }
  }

  void m0_line(const std::vector<Token>& tokens, std::size_t line) {
    if (places_.empty()) throw ParseError("m0 must follow the places line", line, tokens[0].column);
    if (m0_seen_) throw ParseError("m0 declared twice", line, tokens[0].column);
    m0_seen_ = true;
    m0_.assign(places_.size(), 0);
    std::vector<bool> assigned(places_.size(), false);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto [id, count] = parse_assignment(tokens[i], line);
      std::size_t p = require_place(id, line);
      if (assigned[p]) throw ParseError("place '" + id.text + "' assigned twice", line, id.column);
      if (count < 0 || count > kMaxCount)
        throw ParseError("token count out of supported range [0, 2^32)", line, id.column);
      assigned[p] = true;
      m0_[p] = count;
    }
  }

  void explicit_line(const std::vector<Token>& tokens, std::size_t line) {
    if (transitions_.empty())
      throw ParseError("explicit must follow the transitions line", line, tokens[0].column);
    explicit_seen_ = true;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      std::size_t t = require_transition(tokens[i], line);
      if (std::find(explicit_.begin(), explicit_.end(), t) == explicit_.end())
        explicit_.push_back(t);
    }
  }

  void final_line(const std::vector<Token>& tokens, std::size_t line) {
    if (places_.empty())
      throw ParseError("final must follow the places line", line, tokens[0].column);
    if (tokens.size() < 2)
      throw ParseError("final expects 'marking' or 'gmec'", line, tokens[0].column);
    const std::string& form = tokens[1].text;
    if (form == "marking") {
      if (gmec_) throw ParseError("final marking cannot be combined with final gmec", line,
                                  tokens[0].column);
      std::vector<std::int64_t> counts(places_.size(), 0);
      std::vector<bool> assigned(places_.size(), false);
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        auto [id, count] = parse_assignment(tokens[i], line);
        std::size_t p = require_place(id, line);
        if (assigned[p])
          throw ParseError("place '" + id.text + "' assigned twice", line, id.column);
        if (count < 0 || count > kMaxCount)
          throw ParseError("token count out of supported range [0, 2^32)", line, id.column);
        assigned[p] = true;
        counts[p] = count;
      }
      final_markings_.emplace_back(std::move(counts));
    } else if (form == "gmec") {
      if (gmec_) throw ParseError("final gmec declared twice", line, tokens[0].column);
      if (!final_markings_.empty())
        throw ParseError("final gmec cannot be combined with final marking", line,
                         tokens[0].column);
      // m weights, "<=", bound
      if (tokens.size() != places_.size() + 4)
        throw ParseError("final gmec expects " + std::to_string(places_.size()) +
                             " weights (one per place), '<=' and a bound",
                         line, tokens[0].column);
      Gmec gmec;
      for (std::size_t i = 0; i < places_.size(); ++i)
        gmec.weights.push_back(parse_int(tokens[2 + i], line));
      const Token& rel = tokens[2 + places_.size()];
      if (rel.text != "<=") throw ParseError("expected '<='", line, rel.column);
      gmec.bound = parse_int(tokens[3 + places_.size()], line);
      gmec_ = std::move(gmec);
    } else {
      throw ParseError("final expects 'marking' or 'gmec', got '" + form + "'", line,
                       tokens[1].column);
    }
  }

  PlantDocument assemble(std::size_t last_line) {
    if (places_.empty()) throw ParseError("at least one place required", last_line, 1);
    if (transitions_.empty()) throw ParseError("at least one transition required", last_line, 1);
    if (final_markings_.empty() && !gmec_)
      throw ParseError("a final specification is required", last_line, 1);

    PetriNet net(places_, transitions_, pre_arcs_, post_arcs_);
    if (!m0_seen_) m0_.assign(places_.size(), 0);

    FinalSpec final_spec = gmec_ ? FinalSpec::from_gmec(std::move(*gmec_))
                                 : FinalSpec::from_markings(std::move(final_markings_));

    // remainder-is-implicit; with no explicit line every transition is explicit
    std::vector<std::string> explicit_names;
    if (explicit_seen_)
      for (std::size_t t : explicit_) explicit_names.push_back(transitions_[t]);
    else
      explicit_names = transitions_;

    BasisPartition partition = make_partition(net, explicit_names);
    return PlantDocument{std::move(name_), std::move(params_),
                         make_plant(std::move(net), Marking(std::move(m0_)), std::move(final_spec)),
                         std::move(partition)};
  }

  std::string_view text_;
  std::string name_;
  std::vector<std::pair<std::string, std::int64_t>> params_;
  std::vector<std::string> places_, transitions_;
  std::vector<Arc> pre_arcs_, post_arcs_;
  std::vector<std::pair<std::size_t, std::size_t>> seen_pre_, seen_post_;
  std::vector<std::int64_t> m0_;
  bool m0_seen_ = false;
  bool explicit_seen_ = false;
  std::vector<std::size_t> explicit_;
  std::vector<Marking> final_markings_;
  std::optional<Gmec> gmec_;
};

}  // namespace

PlantDocument parse_plant(std::string_view text) { return Parser(text).run(); }

PlantDocument load_plant_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_plant(buffer.str());
}

std::string serialize_plant(const PlantDocument& doc) {
  const PetriNet& net = doc.plant.net;
  std::ostringstream out;
  if (!doc.name.empty()) out << "net " << doc.name << "\n";
  for (const auto& [key, value] : doc.params) out << "param " << key << "=" << value << "\n";

  out << "places";
  for (const auto& p : net.places()) out << " " << p;
  out << "\ntransitions";
  for (const auto& t : net.transitions()) out << " " << t;
  out << "\n";

  auto arc_line = [&](const char* head, std::size_t t, auto weight_of) {
    bool any = false;
    for (std::size_t p = 0; p < net.place_count(); ++p)
      if (weight_of(p, t) > 0) {
        if (!any) out << head << " " << net.transition_name(t);
        any = true;
        out << " " << net.place_name(p) << "=" << weight_of(p, t);
      }
    if (any) out << "\n";
  };
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    arc_line("pre", t, [&](std::size_t p, std::size_t tt) { return net.pre(p, tt); });
    arc_line("post", t, [&](std::size_t p, std::size_t tt) { return net.post(p, tt); });
  }

  out << "m0";
  for (std::size_t p = 0; p < net.place_count(); ++p)
    if (doc.plant.initial[p] != 0) out << " " << net.place_name(p) << "=" << doc.plant.initial[p];
  out << "\n";

  out << "explicit";
  for (std::size_t t : doc.partition.explicit_transitions) out << " " << net.transition_name(t);
  out << "\n";

  if (doc.plant.final_spec.is_gmec()) {
    const Gmec& g = doc.plant.final_spec.gmec();
    out << "final gmec";
    for (std::int64_t w : g.weights) out << " " << w;
    out << " <= " << g.bound << "\n";
  } else {
    for (const Marking& m : doc.plant.final_spec.markings()) {
      out << "final marking";
      for (std::size_t p = 0; p < net.place_count(); ++p)
        if (m[p] != 0) out << " " << net.place_name(p) << "=" << m[p];
      out << "\n";
    }
  }
  return out.str();
}

namespace {

// node order used by every export: lexicographic on markings
std::vector<std::size_t> sorted_order(const std::vector<Marking>& nodes) {
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  return order;
}

std::vector<std::size_t> rank_of(const std::vector<std::size_t>& order) {
  std::vector<std::size_t> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return rank;
}

}  // namespace

std::string export_dot(const BasisGraph& graph, const PetriNet& net) {
  auto order = sorted_order(graph.nodes);
  auto rank = rank_of(order);

  std::ostringstream out;
  out << "digraph " << (graph.kind == GraphKind::Minimax ? "minimax_brg" : "brg") << " {\n";
  out << "  rankdir=LR;\n  node [shape=box];\n";
  out << "  init [shape=point];\n";
  out << "  init -> n" << rank[0] << ";\n";
  for (std::size_t i = 0; i < order.size(); ++i)
    out << "  n" << i << " [label=\"" << graph.nodes[order[i]].to_string() << "\"];\n";

  struct Line {
    std::size_t src, t;
    FiringVector y;
    std::size_t dst;
  };
  std::vector<Line> lines;
  for (const BasisEdge& e : graph.edges)
    lines.push_back({rank[e.src], e.transition, e.vector, rank[e.dst]});
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.src, a.t, a.y, a.dst) < std::tie(b.src, b.t, b.y, b.dst);
  });
  for (const Line& l : lines)
    out << "  n" << l.src << " -> n" << l.dst << " [label=\"" << net.transition_name(l.t) << ","
        << l.y.to_string() << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string export_dot(const ReachabilityGraph& rg, const PetriNet& net) {
  auto order = sorted_order(rg.markings);
  auto rank = rank_of(order);

  std::ostringstream out;
  out << "digraph reachability_graph {\n  rankdir=LR;\n  node [shape=box];\n";
  out << "  init [shape=point];\n";
  out << "  init -> n" << rank[0] << ";\n";
  for (std::size_t i = 0; i < order.size(); ++i)
    out << "  n" << i << " [label=\"" << rg.markings[order[i]].to_string() << "\"];\n";

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> lines;
  for (const auto& e : rg.edges) lines.emplace_back(rank[e.src], e.transition, rank[e.dst]);
  std::sort(lines.begin(), lines.end());
  for (const auto& [src, t, dst] : lines)
    out << "  n" << src << " -> n" << dst << " [label=\"" << net.transition_name(t) << "\"];\n";
  out << "}\n";
  return out.str();
}

namespace {

nlohmann::ordered_json marking_json(const Marking& m, const PetriNet& net) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < net.place_count(); ++p) obj[net.place_name(p)] = m[p];
  return obj;
}

}  // namespace

std::string export_graph_json(const BasisGraph& graph, const PetriNet& net) {
  auto order = sorted_order(graph.nodes);
  auto rank = rank_of(order);

  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = graph.kind == GraphKind::Minimax ? "minimax" : "classical";
  doc["places"] = net.places();
  doc["transitions"] = net.transitions();
  nlohmann::ordered_json expl = nlohmann::ordered_json::array();
  for (std::size_t t : graph.partition.explicit_transitions) expl.push_back(net.transition_name(t));
  nlohmann::ordered_json impl = nlohmann::ordered_json::array();
  for (std::size_t t : graph.partition.implicit_transitions) impl.push_back(net.transition_name(t));
  doc["explicit"] = std::move(expl);
  doc["implicit"] = std::move(impl);
  doc["initial"] = rank[0];

  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (std::size_t i : order) nodes.push_back(graph.nodes[i].counts);
  doc["nodes"] = std::move(nodes);

  struct Line {
    std::size_t src, t;
    FiringVector y;
    std::size_t dst;
  };
  std::vector<Line> lines;
  for (const BasisEdge& e : graph.edges)
    lines.push_back({rank[e.src], e.transition, e.vector, rank[e.dst]});
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.src, a.t, a.y, a.dst) < std::tie(b.src, b.t, b.y, b.dst);
  });
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Line& l : lines) {
    nlohmann::ordered_json e;
    e["src"] = l.src;
    e["transition"] = net.transition_name(l.t);
    e["vector"] = l.y.counts;
    e["dst"] = l.dst;
    edges.push_back(std::move(e));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

std::string export_report(const Verdict& verdict, const PetriNet& net, bool include_all_deadlocks,
                          bool zero_times) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["verdict"] = verdict.nonblocking ? "NONBLOCKING" : "BLOCKING";
  doc["reason"] = std::string(to_string(verdict.reason));
  doc["witness"] = verdict.witness ? marking_json(*verdict.witness, net)
                                   : nlohmann::ordered_json(nullptr);
  if (verdict.witness_via) {
    nlohmann::ordered_json via;
    via["node"] = marking_json(verdict.witness_via->first, net);
    via["vector"] = verdict.witness_via->second.counts;
    doc["witness_via"] = std::move(via);
  }
  if (include_all_deadlocks) {
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const Marking& m : verdict.all_deadlocks) all.push_back(marking_json(m, net));
    doc["all_deadlocks"] = std::move(all);
  }

  nlohmann::ordered_json stats;
  stats["minimax_nodes"] = verdict.stats.minimax_nodes;
  stats["minimax_edges"] = verdict.stats.minimax_edges;
  stats["ico_count"] = verdict.stats.ico_count;
  stats["dead_found"] = verdict.stats.dead_found;
  stats["initial_marking_dead"] = verdict.stats.initial_marking_dead;
  nlohmann::ordered_json phase;
  phase["brg"] = zero_times ? 0.0 : verdict.stats.brg_ms;
  phase["deadlock"] = zero_times ? 0.0 : verdict.stats.deadlock_ms;
  phase["ico"] = zero_times ? 0.0 : verdict.stats.ico_ms;
  phase["unobstructed"] = zero_times ? 0.0 : verdict.stats.unobstructed_ms;
  stats["phase_ms"] = std::move(phase);
  doc["stats"] = std::move(stats);
  return doc.dump(2) + "\n";
}

}  // namespace mbrg
