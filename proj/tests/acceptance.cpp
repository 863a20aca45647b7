// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dkheap/audit.hpp"
#include "dkheap/harness.hpp"
#include "exhaustive_cuts.hpp"
#include "heap_test_peer.hpp"

using namespace dkheap;
using namespace dkheap::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool contains(const std::string& s, const char* needle) { return s.find(needle) != std::string::npos; }

// Failure categories of one differential run, read off the verdict message.
struct Failures {
  std::size_t mismatch = 0;
  std::size_t rank_bound = 0;
  std::size_t reduction_phi = 0;
  std::size_t step_delta = 0;
  std::size_t delete_budget = 0;
  std::size_t post_delete = 0;
  std::size_t structure = 0;
  std::vector<std::string> messages;

  void record(const Verdict& v, const std::string& label) {
    if (v.pass) return;
    const std::string& m = v.message;
    if (contains(m, "returned")) ++mismatch;
    else if (contains(m, "breaks the bound")) ++rank_bound;
    else if (contains(m, "reduction did not") || contains(m, "Phi_L change") || contains(m, "drifted")) ++reduction_phi;
    else if (contains(m, "potential rose")) ++step_delta;
    else if (contains(m, "exceed the budget")) ++delete_budget;
    else if (contains(m, "stacks not drained") || contains(m, "A nodes")) ++post_delete;
    else ++structure;
    if (messages.size() < 5) messages.push_back(label + ": " + m);
  }
  [[nodiscard]] std::size_t total() const {
    return mismatch + rank_bound + reduction_phi + step_delta + delete_budget + post_delete + structure;
  }
};

struct FuzzSummary {
  Failures failures;
  std::size_t runs = 0;
  std::uint64_t reductions = 0;
  std::uint64_t paranoid_checks = 0;
  std::uint64_t delete_mins = 0;
  double worst_delete_ratio = 0.0;
  RunMetrics wc1;
  RunMetrics wc2;
  double seconds = 0.0;
};

void fold_max(RunMetrics& into, const RunMetrics& m) {
  into.max_insert.cl = std::max(into.max_insert.cl, m.max_insert.cl);
  into.max_insert.ca = std::max(into.max_insert.ca, m.max_insert.ca);
  into.max_decrease.cl = std::max(into.max_decrease.cl, m.max_decrease.cl);
  into.max_decrease.ca = std::max(into.max_decrease.ca, m.max_decrease.ca);
  into.max_find_min.cl = std::max(into.max_find_min.cl, m.max_find_min.cl);
  into.max_find_min.ca = std::max(into.max_find_min.ca, m.max_find_min.ca);
}

FuzzSummary fuzz_all() {
  FuzzSummary s;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto trace = generate_trace(seed, 10'000);
    for (Strategy st : {Strategy::Amortized, Strategy::WC1, Strategy::WC2}) {
      const Verdict v = run_differential(trace, st, {.audit = AuditLevel::Paranoid});
      ++s.runs;
      s.failures.record(v, "seed " + std::to_string(seed) + " " + to_string(st));
      s.reductions += v.metrics.reductions;
      s.paranoid_checks += v.metrics.paranoid_checks;
      s.delete_mins += v.metrics.delete_mins;
      s.worst_delete_ratio = std::max(s.worst_delete_ratio, v.metrics.worst_delete_min_ratio);
      if (st == Strategy::WC1) fold_max(s.wc1, v.metrics);
      if (st == Strategy::WC2) fold_max(s.wc2, v.metrics);
    }
  }
  s.seconds = seconds_since(t0);
  return s;
}

int failed = 0;

void line(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void dump(const Failures& f) {
  for (const auto& m : f.messages) std::printf("    %s\n", m.c_str());
}

// Criterion 5 scaling: a decrease-heavy trace whose heap grows to roughly
// n elements. Audits are off, only the reduction counts matter here.
RunMetrics scaling_run(std::size_t n, Strategy st, bool& pass) {
  const auto trace = generate_trace(n, 2 * n, {.mix = {0.55, 0.3, 0.15, 0.0}});
  const Verdict v = run_differential(trace, st, {.audit = AuditLevel::Off});
  pass = pass && v.pass;
  return v.metrics;
}

struct Fault {
  const char* invariant;
  std::function<void(Heap&)> inject;
};

Slot find_slot(const Heap& h, const std::function<bool(const NodeRecord&)>& pred) {
  const NodeStore& s = h.store();
  for (Slot x = 0; x < s.slot_count(); ++x)
    if (s.is_live_slot(x) && pred(s[x])) return x;
  return kNil;
}

bool faults_detected(std::string& detail) {
  const std::vector<Fault> faults{
      {"heap_order",
       [](Heap& h) {
         const Slot r = h.root_head();
         const Slot c = h.store()[r].child_head;
         h.mutable_node_for_testing(h.store().handle_of(c)).key = h.store()[r].key - 1;
       }},
      {"rank_consistency",
       [](Heap& h) {
         const Slot x = find_slot(h, [](const NodeRecord& n) { return n.child_head == kNil && n.parent != kNil; });
         ++h.mutable_node_for_testing(h.store().handle_of(x)).rank;
       }},
      {"parent_link",
       [](Heap& h) {
         const Slot x = find_slot(h, [&](const NodeRecord& n) { return n.parent != kNil && n.parent != h.root_head(); });
         h.mutable_node_for_testing(h.store().handle_of(x)).parent = h.root_head();
       }},
      {"sibling_shape",
       [](Heap& h) {
         const Slot x = find_slot(h, [](const NodeRecord& n) {
           return n.child_head != kNil && n.left != kNil;  // any node with children
         });
         const Slot head = h.store()[x].child_head;
         const Slot second = h.store()[head].right;
         if (second == kNil) return;
         h.mutable_node_for_testing(h.store().handle_of(head)).left = head;
       }},
      {"subtype_loss",
       [](Heap& h) {
         const Slot x = find_slot(h, [](const NodeRecord& n) { return n.subtype == Subtype::N; });
         h.mutable_node_for_testing(h.store().handle_of(x)).loss = 1;
       }},
      {"location",
       [](Heap& h) {
         const Slot x = h.root_head();
         h.mutable_node_for_testing(h.store().handle_of(x)).location = Location::None;
       }},
      {"root_subtype",
       [](Heap& h) { HeapTestPeer::set_subtype(h, h.root_head(), Subtype::N); }},
      {"registry_slot",
       [](Heap& h) {
         const Slot x = find_slot(h, [&](const NodeRecord& n) {
           return n.subtype == Subtype::N && h.registry().slot_at(ViolationType::A, n.rank) == kNil;
         });
         HeapTestPeer::registry(h).park(HeapTestPeer::store(h), ViolationType::A, x);
       }},
  };

  std::size_t detected = 0;
  for (const Fault& f : faults) {
    Heap h;
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) h.insert(static_cast<Key>(rng() % 100'000));
    if (!audit::check_structure(h).ok()) {
      detail += std::string(" baseline-dirty:") + f.invariant;
      continue;
    }
    f.inject(h);
    const auto report = audit::check_structure(h);
    if (report.count(f.invariant) > 0) ++detected;
    else detail += std::string(" missed:") + f.invariant;
  }
  detail = fmt("%zu/%zu injected faults detected", detected, faults.size()) + detail;
  return detected == faults.size();
}

}  // namespace

int main() {
  const auto t_all = Clock::now();
  std::printf("fuzzing 100 seeds x 10000 ops x 3 strategies with paranoid audits...\n");
  std::fflush(stdout);
  const FuzzSummary fz = fuzz_all();
  const Failures& f = fz.failures;

  // 1
  line(1, "differential correctness", f.total() == 0,
       fmt("%zu runs, %zu oracle mismatches, %zu runs aborted by audits, %.1fs", fz.runs, f.mismatch,
           f.total() - f.mismatch, fz.seconds));
  if (f.total()) dump(f);

  // 2
  line(2, "rank bound", fz.runs == 300 && f.rank_bound == 0 && f.total() == 0,
       fmt("rank < 4 + 1.2 log2 n checked after every public op; %zu violations", f.rank_bound));

  // 3
  line(3, "reduction potential decrease", f.reduction_phi == 0 && fz.reductions >= 1'000'000,
       fmt("%llu reductions checked, %zu failures", static_cast<unsigned long long>(fz.reductions), f.reduction_phi));

  // 4: the paranoid runs check every private call; also exercise the
  // extreme single-call cases directly.
  {
    bool ok = f.step_delta == 0;
    Heap h({.audit = AuditLevel::Paranoid});
    const Slot p = HeapTestPeer::add_root(h, 0);
    const Slot x = HeapTestPeer::add_child(h, p, 1, Subtype::N);
    HeapTestPeer::store(h)[x].rank = 3;
    HeapTestPeer::store(h)[p].rank = 1;
    std::int64_t worst = 0;
    for (int i = 0; i < 3; ++i) {
      const PhiPair before = h.registry().phi();
      HeapTestPeer::decrement_rank(h, x);
      worst = std::max(worst, h.registry().phi().total() - before.total());
    }
    ok = ok && worst <= 5;
    line(4, "private-method potential deltas", ok,
         fmt("%zu per-call violations over %llu paranoid checks; direct decrement_rank max delta %lld", f.step_delta,
             static_cast<unsigned long long>(fz.paranoid_checks), static_cast<long long>(worst)));
  }

  // 5
  {
    bool ok = fz.wc2.max_decrease.cl <= 5 && fz.wc2.max_decrease.ca <= 19 && fz.wc2.max_insert.ca <= 3 &&
              fz.wc2.max_insert.cl == 0 && fz.wc1.max_decrease.cl <= 5 && fz.wc1.max_decrease.ca <= 8;
    std::string detail = fmt("fuzz: wc2 decrease (%u CL, %u CA), wc2 insert (%u CL, %u CA), wc1 decrease (%u CL, %u CA)",
                             fz.wc2.max_decrease.cl, fz.wc2.max_decrease.ca, fz.wc2.max_insert.cl,
                             fz.wc2.max_insert.ca, fz.wc1.max_decrease.cl, fz.wc1.max_decrease.ca);
    bool pass_runs = true;
    for (std::size_t n : {1'000UL, 10'000UL, 100'000UL}) {
      const RunMetrics w2 = scaling_run(n, Strategy::WC2, pass_runs);
      const RunMetrics w1 = scaling_run(n, Strategy::WC1, pass_runs);
      ok = ok && w2.max_decrease.cl <= 5 && w2.max_decrease.ca <= 19 && w2.max_insert.ca <= 3 &&
           w1.max_decrease.cl <= 5 && w1.max_decrease.ca <= 8;
      detail += fmt("; n=%zu wc2 dk (%u,%u) ins %u, wc1 dk (%u,%u)", n, w2.max_decrease.cl, w2.max_decrease.ca,
                    w2.max_insert.ca, w1.max_decrease.cl, w1.max_decrease.ca);
    }
    line(5, "worst-case reduction budgets", ok && pass_runs, detail);
  }

  // 6
  line(6, "delete_min reduction budget", f.delete_budget == 0 && fz.worst_delete_ratio <= 1.0,
       fmt("%llu delete_min calls, worst count/budget %.3f", static_cast<unsigned long long>(fz.delete_mins),
           fz.worst_delete_ratio));

  // 7
  line(7, "post-delete_min violation budget", f.post_delete == 0 && fz.delete_mins > 0,
       fmt("stacks empty, A nodes and total loss <= R(n)+1 after %llu delete_min calls; %zu failures",
           static_cast<unsigned long long>(fz.delete_mins), f.post_delete));

  // 8
  {
    std::string detail;
    const bool faults = faults_detected(detail);
    const Verdict corrupt = run_differential(generate_trace(5, 2000), Strategy::WC2, {.corrupt_after_op = 1500});
    const bool caught = !corrupt.pass && corrupt.op_index == 1500u;
    line(8, "structural audit", f.structure == 0 && faults && caught,
         fmt("%zu findings in fuzz runs; ", f.structure) + detail +
             (caught ? "; differential corruption caught at its op" : "; differential corruption missed"));
  }

  // 9
  {
    const auto t0 = Clock::now();
    const bool cert = audit::rank_bound_certificate(60);
    bool agree = true;
    for (int r = 0; r <= 6; ++r)
      for (std::size_t loss = 0; loss <= static_cast<std::size_t>(r) + 3; ++loss)
        agree = agree && audit::minimal_tree_size(r, loss) == exhaustive::min_tree_size(r, loss);
    const double s = seconds_since(t0);
    line(9, "rank-bound certificate", cert && agree && s < 1.0,
         fmt("certificate(60)=%s, exhaustive R<=6 %s, %.3fs", cert ? "true" : "false", agree ? "agrees" : "disagrees",
             s));
  }

  // 10
  {
    const auto t0 = Clock::now();
    std::size_t ok_graphs = 0;
    std::uint32_t max_v = 0;
    std::size_t max_e = 0;
    for (std::uint32_t i = 0; i < 20; ++i) {
      const std::uint32_t v = 500 * (i + 1);
      const std::size_t e = std::min<std::size_t>(10 * static_cast<std::size_t>(v), 100'000);
      const Strategy st = i % 3 == 0 ? Strategy::Amortized : i % 3 == 1 ? Strategy::WC1 : Strategy::WC2;
      if (dijkstra_bench(1000 + i, v, e, st).pass) ++ok_graphs;
      max_v = std::max(max_v, v);
      max_e = std::max(max_e, e);
    }
    const double s = seconds_since(t0);
    line(10, "dijkstra", ok_graphs == 20 && s < 60.0,
         fmt("%zu/20 graphs match the reference (up to %u vertices, %zu edges), %.1fs", ok_graphs, max_v, max_e, s));
  }

  std::printf("%d of 10 criteria failed, %.1fs total\n", failed, seconds_since(t_all));
  return failed == 0 ? 0 : 1;
}
