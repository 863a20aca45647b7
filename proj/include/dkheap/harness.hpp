#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dkheap/heap.hpp"

namespace dkheap::harness {

// ---------------------------------------------------------------------------
// Traces

enum class OpKind : std::uint8_t { Insert, Decrease, DeleteMin, FindMin };

/// One scripted operation. `ref` is the 0-based ordinal of an earlier
/// insert and is only meaningful for Decrease.
struct TraceOp {
  OpKind kind = OpKind::Insert;
  std::uint64_t ref = 0;
  Key key = 0;

  static TraceOp insert(Key k) { return {OpKind::Insert, 0, k}; }
  static TraceOp decrease(std::uint64_t r, Key k) { return {OpKind::Decrease, r, k}; }
  static TraceOp delete_min() { return {OpKind::DeleteMin, 0, 0}; }
  static TraceOp find_min() { return {OpKind::FindMin, 0, 0}; }

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid operation for the current state (unknown or extracted ref,
/// non-decreasing key).
class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grammar, one op per line: `I <key>`, `K <ref> <key>`, `D`, `F`.
/// `#` starts a comment; blank lines are ignored. Keys are signed 64-bit.
std::vector<TraceOp> parse_trace(std::string_view text);
std::string format_trace(std::span<const TraceOp> ops);

struct OpMix {
  double insert = 0.5;
  double decrease = 0.25;
  double delete_min = 0.25;
  double find_min = 0.0;
};

struct TraceShape {
  OpMix mix;
  // Insert keys are drawn from [0, key_range]; a small range yields ties.
  Key key_range = 1'000'000;
};

/// Deterministic per seed. Ops that would be invalid in the current state
/// (DeleteMin on empty, Decrease with nothing live) become inserts.
std::vector<TraceOp> generate_trace(std::uint64_t seed, std::size_t n_ops, const TraceShape& shape = {});

// ---------------------------------------------------------------------------
// Reference semantics

/// Brute-force priority queue over (key, seq) pairs; seq is the insert
/// ordinal, the same tie-break the heap uses.
class OracleHeap {
 public:
  std::uint64_t insert(Key key);
  void decrease(std::uint64_t ref, Key key);
  /// (key, ref) of the extracted minimum.
  std::optional<std::pair<Key, std::uint64_t>> delete_min();
  [[nodiscard]] std::optional<std::pair<Key, std::uint64_t>> find_min() const;

  [[nodiscard]] bool is_live(std::uint64_t ref) const noexcept { return ref < live_.size() && live_[ref]; }
  [[nodiscard]] Key key_of(std::uint64_t ref) const { return keys_.at(ref); }
  [[nodiscard]] std::size_t size() const noexcept { return set_.size(); }
  [[nodiscard]] std::uint64_t inserted() const noexcept { return keys_.size(); }

 private:
  std::set<std::pair<Key, std::uint64_t>> set_;
  std::vector<Key> keys_;
  std::vector<bool> live_;
};

/// Applies op; DeleteMin/FindMin yield the key (absent on an empty queue),
/// Insert/Decrease yield nothing. Throws HarnessError on an invalid op.
std::optional<Key> oracle_apply(OracleHeap& oracle, const TraceOp& op);

// ---------------------------------------------------------------------------
// Differential runner

struct DiffOptions {
  AuditLevel audit = AuditLevel::Boundary;
  bool track_loss = true;
  bool phase1 = true;
  // Swap the root's key with its smallest child's key after this op.
  std::optional<std::size_t> corrupt_after_op;
};

/// Componentwise maxima over public calls, plus totals.
struct RunMetrics {
  ReductionCounts max_insert;
  ReductionCounts max_decrease;
  ReductionCounts max_find_min;
  std::uint32_t max_insert_total = 0;
  std::uint32_t max_decrease_total = 0;
  std::uint32_t max_find_min_total = 0;
  std::uint32_t max_delete_min_total = 0;
  // Largest delete_min reduction count relative to its 6R(n)+7 budget.
  double worst_delete_min_ratio = 0.0;
  std::uint64_t delete_mins = 0;
  std::uint64_t reductions = 0;
  std::uint64_t paranoid_checks = 0;
};

struct Verdict {
  bool pass = true;
  std::optional<std::size_t> op_index;  // first failing op
  std::string message;
  std::vector<std::optional<Key>> results;  // one per DeleteMin/FindMin
  StatsReport stats;
  RunMetrics metrics;
  std::uint64_t decision_digest = 0;
};

Verdict run_differential(std::span<const TraceOp> trace, Strategy strategy, const DiffOptions& options = {});

// ---------------------------------------------------------------------------
// Dijkstra benchmark

struct Graph {
  std::uint32_t vertices = 0;
  std::vector<std::vector<std::pair<std::uint32_t, Key>>> adjacency;
  std::size_t edges = 0;
};

/// Undirected connected graph: a random spanning tree plus extra random
/// edges up to `edges` in total. Weights lie in [1, 1000].
Graph random_connected_graph(std::uint64_t seed, std::uint32_t vertices, std::size_t edges);
Graph star_graph(std::span<const Key> weights);

std::vector<Key> dijkstra_with_heap(const Graph& g, std::uint32_t source, Heap& heap);
/// O(V^2) reference without any priority queue.
std::vector<Key> dijkstra_reference(const Graph& g, std::uint32_t source);

struct BenchVerdict {
  bool pass = true;
  std::optional<std::uint32_t> mismatch_vertex;
  StatsReport stats;
  double heap_ms = 0.0;
  double reference_ms = 0.0;
};

BenchVerdict dijkstra_bench(std::uint64_t graph_seed, std::uint32_t vertices, std::size_t edges,
                            Strategy strategy = Strategy::Amortized);
BenchVerdict dijkstra_bench(const Graph& g, Strategy strategy = Strategy::Amortized);

// ---------------------------------------------------------------------------
// Stats records

/// One `key=value` line per counter, in declaration order.
std::string emit_stats(const StatsReport& report);
StatsReport parse_stats(std::string_view text);

}  // namespace dkheap::harness
