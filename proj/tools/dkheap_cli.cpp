// dkheap: replay traces, fuzz against the oracle, run the Dijkstra
// benchmark and print the rank-bound certificate.
//
// Exit codes: 0 pass, 1 mismatch or audit failure, 2 usage error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dkheap/audit.hpp"
#include "dkheap/harness.hpp"

namespace {

using namespace dkheap;
namespace hn = dkheap::harness;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Common {
  std::string strategy = "amortized";
  std::string audit = "boundary";
  std::string stats_path;
};

void add_common(CLI::App* cmd, Common& c, bool with_audit = true) {
  cmd->add_option("--strategy", c.strategy, "amortized | wc1 | wc2")
      ->check(CLI::IsMember({"amortized", "wc1", "wc2"}));
  if (with_audit)
    cmd->add_option("--audit", c.audit, "off | boundary | paranoid")->check(CLI::IsMember({"off", "boundary", "paranoid"}));
  cmd->add_option("--stats", c.stats_path, "write key=value counters to this file");
}

bool write_stats(const std::string& path, const StatsReport& report) {
  if (path.empty()) return true;
  std::ofstream out(path);
  out << hn::emit_stats(report);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return false;
  }
  return true;
}

int report(const hn::Verdict& v, const std::string& label) {
  if (v.pass) {
    std::cout << label << ": pass (" << v.results.size() << " results, " << v.metrics.reductions << " reductions)\n";
    return kPass;
  }
  std::cout << label << ": FAIL at op " << v.op_index.value_or(0) << ": " << v.message << '\n';
  return kFail;
}

int cmd_run(const std::string& path, const Common& c, bool echo) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return kUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<hn::TraceOp> ops;
  try {
    ops = hn::parse_trace(buf.str());
  } catch (const hn::TraceParseError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kUsage;
  }
  hn::Verdict v;
  try {
    v = hn::run_differential(ops, *parse_strategy(c.strategy), {.audit = *parse_audit_level(c.audit)});
  } catch (const hn::HarnessError& e) {
    std::cerr << path << ": invalid trace: " << e.what() << '\n';
    return kUsage;
  }
  if (echo)
    for (const auto& r : v.results) std::cout << (r ? std::to_string(*r) : std::string("empty")) << '\n';
  if (!write_stats(c.stats_path, v.stats)) return kUsage;
  return report(v, path);
}

int cmd_fuzz(std::uint64_t seed, std::size_t ops, std::size_t traces, const Common& c) {
  int rc = kPass;
  StatsReport last;
  for (std::size_t t = 0; t < traces; ++t) {
    const auto trace = hn::generate_trace(seed + t, ops);
    const auto v = hn::run_differential(trace, *parse_strategy(c.strategy), {.audit = *parse_audit_level(c.audit)});
    last = v.stats;
    if (report(v, "seed " + std::to_string(seed + t)) != kPass) rc = kFail;
  }
  if (!write_stats(c.stats_path, last)) return kUsage;
  return rc;
}

int cmd_bench(std::uint64_t seed, std::uint32_t vertices, std::size_t edges, const Common& c) {
  if (vertices == 0 || edges + 1 < vertices) {
    std::cerr << "error: need vertices >= 1 and edges >= vertices - 1\n";
    return kUsage;
  }
  const auto v = hn::dijkstra_bench(seed, vertices, edges, *parse_strategy(c.strategy));
  std::cout << "dijkstra seed=" << seed << " n=" << vertices << " m=" << edges << " heap_ms=" << v.heap_ms
            << " reference_ms=" << v.reference_ms << '\n'
            << hn::emit_stats(v.stats);
  if (!write_stats(c.stats_path, v.stats)) return kUsage;
  if (!v.pass) {
    std::cout << "FAIL: distance mismatch at vertex " << *v.mismatch_vertex << '\n';
    return kFail;
  }
  std::cout << "pass\n";
  return kPass;
}

int cmd_cert(int r_max) {
  if (r_max < 1 || r_max > 62) {
    std::cerr << "error: --rmax must lie in [1, 62]\n";
    return kUsage;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const bool ok = audit::rank_bound_certificate(r_max);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (int r = 1; r <= r_max; ++r)
    std::cout << "R=" << r << " n(R,R+1)=" << audit::minimal_tree_size(r, static_cast<std::uint64_t>(r) + 1)
              << " lower=" << std::exp2((r - 4) / 1.2) << '\n';
  std::cout << "certificate(" << r_max << ") = " << (ok ? "true" : "false") << " in " << ms << " ms\n";
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dkheap: worst-case DecreaseKey heap tools"};
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed = 1;
  std::size_t ops = 10'000;
  std::size_t traces = 1;
  std::uint32_t vertices = 1000;
  std::size_t edges = 8000;
  int r_max = 60;
  std::string trace_path;
  bool echo = false;

  auto* run = app.add_subcommand("run", "replay a trace file against the oracle");
  run->add_option("trace", trace_path, "trace file")->required();
  run->add_flag("--echo", echo, "print each DeleteMin/FindMin result");
  add_common(run, common);

  auto* fuzz = app.add_subcommand("fuzz", "seeded differential fuzzing");
  fuzz->add_option("--seed", seed);
  fuzz->add_option("--ops", ops)->check(CLI::PositiveNumber);
  fuzz->add_option("--traces", traces)->check(CLI::PositiveNumber);
  add_common(fuzz, common);

  auto* bench = app.add_subcommand("bench", "Dijkstra on a random connected graph");
  bench->add_option("--seed", seed);
  bench->add_option("--vertices", vertices);
  bench->add_option("--edges", edges);
  add_common(bench, common, false);

  auto* cert = app.add_subcommand("cert", "numeric certificate for the rank bound");
  cert->add_option("--rmax", r_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run) return cmd_run(trace_path, common, echo);
  if (*fuzz) return cmd_fuzz(seed, ops, traces, common);
  if (*bench) return cmd_bench(seed, vertices, edges, common);
  if (*cert) return cmd_cert(r_max);
  return kUsage;
}
