// Command-line front-end: verify | brg | oracle | gen.
//
// Exit codes: 0 nonblocking / success, 1 blocking, 2 input or budget error,
// 3 cross-check disagreement.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mbrg/io.hpp"

namespace {

constexpr int kExitNonblocking = 0;
constexpr int kExitBlocking = 1;
constexpr int kExitError = 2;
constexpr int kExitMismatch = 3;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mbrg::InputError("cannot write '" + path + "'");
  out << content;
}

std::string plural(std::size_t n, const char* noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
}

struct CommonFlags {
  std::string input;
  std::size_t budget = 1'000'000;
  int threads = 0;
};

mbrg::BuildOptions build_options(const CommonFlags& flags) {
  mbrg::BuildOptions opts;
  opts.node_budget = flags.budget;
  opts.explore.max_rows = flags.budget;
  opts.threads = flags.threads;
  return opts;
}

int cmd_verify(const CommonFlags& flags, const std::string& report_path,
               const std::string& dot_path, bool all_deadlocks, bool cross_check, bool fast,
               bool deterministic) {
  mbrg::PlantDocument doc = mbrg::load_plant_file(flags.input);

  mbrg::VerifyOptions opts;
  opts.build = build_options(flags);
  opts.mode = fast ? mbrg::WitnessMode::Fast : mbrg::WitnessMode::Deterministic;
  mbrg::Verdict verdict = mbrg::verify_nonblocking(doc.plant, doc.partition, opts);

  if (verdict.nonblocking) {
    std::cout << "NONBLOCKING\n";
  } else if (verdict.reason == mbrg::VerdictReason::NonFinalDeadlock) {
    std::cout << "BLOCKING (non-final deadlock " << verdict.witness->to_string() << ")\n";
  } else {
    std::cout << "BLOCKING (obstructed at " << verdict.witness->to_string() << ")\n";
  }
  std::cout << "minimax-BRG: " << plural(verdict.stats.minimax_nodes, "node") << ", "
            << plural(verdict.stats.minimax_edges, "edge") << "\n";
  if (verdict.reason != mbrg::VerdictReason::NonFinalDeadlock)
    std::cout << "i-coreachable: " << verdict.stats.ico_count << " of "
              << verdict.stats.minimax_nodes << "\n";
  if (all_deadlocks) {
    std::cout << "non-final deadlocks (" << verdict.all_deadlocks.size() << "):";
    for (const auto& m : verdict.all_deadlocks) std::cout << " " << m.to_string();
    std::cout << "\n";
  }
  if (verdict.stats.initial_marking_dead) std::cout << "note: the initial marking is dead\n";
  if (!deterministic)
    std::cout << "phase ms: brg=" << verdict.stats.brg_ms
              << " deadlock=" << verdict.stats.deadlock_ms << " ico=" << verdict.stats.ico_ms
              << " unobstructed=" << verdict.stats.unobstructed_ms << "\n";

  if (!report_path.empty())
    write_file(report_path,
               mbrg::export_report(verdict, doc.plant.net, all_deadlocks, deterministic));
  if (!dot_path.empty()) {
    mbrg::BasisGraph graph = mbrg::build_minimax_brg(doc.plant, doc.partition, opts.build);
    write_file(dot_path, mbrg::export_dot(graph, doc.plant.net));
  }

  if (cross_check) {
    mbrg::BlockingClassification truth = mbrg::oracle_blocking(doc.plant, flags.budget);
    if (truth.is_nonblocking != verdict.nonblocking) {
      std::cout << "cross-check FAILED: oracle says "
                << (truth.is_nonblocking ? "NONBLOCKING" : "BLOCKING") << "\n";
      return kExitMismatch;
    }
    std::cout << "cross-check: oracle agrees\n";
  }
  return verdict.nonblocking ? kExitNonblocking : kExitBlocking;
}

int cmd_brg(const CommonFlags& flags, bool classical, const std::string& dot_path,
            const std::string& json_path) {
  mbrg::PlantDocument doc = mbrg::load_plant_file(flags.input);
  mbrg::BuildOptions opts = build_options(flags);
  mbrg::BasisGraph graph = classical ? mbrg::build_brg(doc.plant, doc.partition, opts)
                                     : mbrg::build_minimax_brg(doc.plant, doc.partition, opts);
  std::cout << plural(graph.nodes.size(), "node") << ", " << plural(graph.edges.size(), "edge")
            << "\n";
  if (!dot_path.empty()) write_file(dot_path, mbrg::export_dot(graph, doc.plant.net));
  if (!json_path.empty()) write_file(json_path, mbrg::export_graph_json(graph, doc.plant.net));
  return 0;
}

int cmd_oracle(const CommonFlags& flags, const std::string& dot_path) {
  mbrg::PlantDocument doc = mbrg::load_plant_file(flags.input);
  mbrg::ReachabilityGraph rg = mbrg::build_reachability_graph(doc.plant, flags.budget);
  mbrg::BlockingClassification c = mbrg::classify_blocking(doc.plant, rg);
  std::cout << "|R|=" << rg.markings.size() << ", blocking=" << c.blocking.size()
            << ", dead=" << c.dead.size() << "\n";
  if (!dot_path.empty()) write_file(dot_path, mbrg::export_dot(rg, doc.plant.net));
  return 0;
}

int cmd_gen(std::uint64_t seed, std::size_t count, const std::string& out_dir,
            const mbrg::GenConfig& config) {
  std::filesystem::create_directories(out_dir);
  std::size_t written = 0;
  std::uint64_t next_seed = seed;
  while (written < count) {
    auto instance = mbrg::gen_random_plant(config, next_seed);
    ++next_seed;
    if (!instance) continue;
    mbrg::PlantDocument doc{"gen-" + std::to_string(instance->seed),
                            {{"seed", static_cast<std::int64_t>(instance->seed)}},
                            instance->plant,
                            instance->partition};
    write_file(out_dir + "/gen-" + std::to_string(instance->seed) + ".pnet",
               mbrg::serialize_plant(doc));
    ++written;
  }
  std::cout << written << " instances written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-structural nonblockingness verification for bounded place/transition nets"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string report_path, dot_path, json_path;
  bool all_deadlocks = false, cross_check = false, fast = false, deterministic = false;
  bool classical = false, minimax = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("input", flags.input, "plant file (.pnet)")->required();
    cmd->add_option("--budget", flags.budget, "node and exploration budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", flags.threads, "worker threads (0 = all)");
  };

  CLI::App* verify = app.add_subcommand("verify", "decide nonblockingness");
  add_common(verify);
  verify->add_option("--report", report_path, "write a JSON report");
  verify->add_option("--dot", dot_path, "write the minimax graph as DOT");
  verify->add_flag("--all-deadlocks", all_deadlocks, "report every non-final deadlock");
  verify->add_flag("--cross-check", cross_check, "compare against the brute-force oracle");
  verify->add_flag("--fast", fast, "stop at the first witness (any valid one)");
  verify->add_flag("--deterministic", deterministic, "byte-identical output across runs");

  CLI::App* brg = app.add_subcommand("brg", "build a basis reachability graph");
  add_common(brg);
  brg->add_flag("--classical", classical, "minimal explanations only");
  brg->add_flag("--minimax", minimax, "minimal and maximal explanations (default)");
  brg->add_option("--dot", dot_path, "write the graph as DOT");
  brg->add_option("--json", json_path, "write the graph as JSON");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force reachability analysis");
  add_common(oracle);
  oracle->add_option("--dot", dot_path, "write the reachability graph as DOT");

  std::uint64_t gen_seed = 1;
  std::size_t gen_count = 10;
  std::string gen_out = "corpus";
  mbrg::GenConfig gen_config;
  CLI::App* gen = app.add_subcommand("gen", "write a seeded random plant corpus");
  gen->add_option("--seed", gen_seed, "first seed");
  gen->add_option("--count", gen_count, "accepted instances to write")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--rg-cap", gen_config.rg_cap, "reject instances above this reach size");
  gen->add_option("--max-places", gen_config.max_places, "maximum places");
  gen->add_option("--max-transitions", gen_config.max_transitions, "maximum transitions");
  gen->add_option("--max-tokens", gen_config.max_initial_tokens, "maximum initial tokens");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (verify->parsed())
      return cmd_verify(flags, report_path, dot_path, all_deadlocks, cross_check, fast,
                        deterministic);
    if (brg->parsed()) {
      if (classical && minimax)
        throw mbrg::InputError("--classical and --minimax are mutually exclusive");
      return cmd_brg(flags, classical, dot_path, json_path);
    }
    if (oracle->parsed()) return cmd_oracle(flags, dot_path);
    if (gen->parsed()) return cmd_gen(gen_seed, gen_count, gen_out, gen_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
