#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "dkheap/core_store.hpp"
#include "dkheap/violation_registry.hpp"

namespace dkheap {

/// How the violation stacks are drained inside Insert/DecreaseKey/FindMin.
/// DeleteMin always drains them completely.
enum class Strategy : std::uint8_t {
  Amortized,  // empty both stacks
  WC1,        // reduce while Phi_X rose since the public call began
  WC2,        // fixed per-caller reduction plan
};

enum class AuditLevel : std::uint8_t {
  Off,
  Boundary,  // full structural audit after each public operation
  Paranoid,  // boundary + potential deltas after every private step
};

/// Public method on whose behalf FindMin's phases run.
enum class Caller : std::uint8_t { Insert, DecreaseKey, FindMin, DeleteMin };

const char* to_string(Strategy s) noexcept;
const char* to_string(AuditLevel a) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;
std::optional<AuditLevel> parse_audit_level(std::string_view text) noexcept;

class KeyOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by audit modes when a structural or potential invariant fails.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct HeapOptions {
  Strategy strategy = Strategy::Amortized;
  AuditLevel audit = AuditLevel::Off;
  // Maintain per-node loss and weigh L2 stack entries by it. WC1 reads
  // Phi_L and therefore requires it.
  bool track_loss = true;
  // FindMin phase-1 reductions (before the root sweep).
  bool phase1 = true;
};

struct StatsReport {
  std::uint64_t n = 0;
  std::uint64_t max_rank = 0;
  std::uint64_t phi_A = 0;
  std::uint64_t phi_L = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t reductions_CA = 0;
  std::uint64_t reductions_CL = 0;
  std::uint64_t structural_mutations = 0;
  std::uint64_t registry_mutations = 0;

  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

struct ReductionCounts {
  std::uint32_t cl = 0;
  std::uint32_t ca = 0;

  [[nodiscard]] std::uint32_t total() const noexcept { return cl + ca; }
  ReductionCounts& operator+=(const ReductionCounts& o) noexcept {
    cl += o.cl;
    ca += o.ca;
    return *this;
  }
};

/// Reductions executed by the most recent public call.
struct OpProfile {
  Caller caller = Caller::FindMin;
  ReductionCounts phase1;
  ReductionCounts phase3;
  std::uint32_t links_phase2 = 0;

  [[nodiscard]] ReductionCounts total() const noexcept {
    ReductionCounts t = phase1;
    t += phase3;
    return t;
  }
};

struct StrategyBudget {
  std::uint32_t planned_CL_phase1 = 0;
  std::uint32_t planned_CA_phase1 = 0;
  std::uint32_t planned_CA_phase3 = 0;
};

/// The WC2 reduction plan for FindMin run on behalf of `caller`. Bare
/// FindMin reuses the Insert plan; DeleteMin never uses a plan.
[[nodiscard]] constexpr StrategyBudget wc2_budget(Caller caller) noexcept {
  switch (caller) {
    case Caller::DecreaseKey: return {5, 18, 1};
    case Caller::Insert:
    case Caller::FindMin: return {0, 2, 1};
    case Caller::DeleteMin: break;
  }
  return {};
}

enum class CAOutcome : std::uint8_t { DiscardedStale, DiscardedDuplicate, ParkedInArray, Linked, StackEmpty };
enum class CLOutcome : std::uint8_t {
  DiscardedStale,
  DiscardedDuplicate,
  LossReducedL2,
  ParkedInArray,
  LinkedL1,
  StackEmpty
};

/// Priority queue with O(1) worst-case Insert, FindMin and DecreaseKey
/// (under WC1/WC2) and O(log n) DeleteMin.
///
/// The heap is a forest during a public call and a single heap-ordered tree
/// between calls. Rank/loss violations are queued on two stacks and paired
/// by rank in two arrays; the strategy decides how much queued work each
/// call performs.
class Heap {
 public:
  explicit Heap(HeapOptions options = {});

  Heap(const Heap&) = delete;
  Heap& operator=(const Heap&) = delete;
  Heap(Heap&&) noexcept = default;
  Heap& operator=(Heap&&) noexcept = default;

  Handle insert(Key key);

  /// Consolidates the forest and returns the root; absent when empty.
  std::optional<Handle> find_min();

  struct Extracted {
    Key key;
    Handle handle;  // already dead on return
  };
  std::optional<Extracted> delete_min();

  /// Throws KeyOrderError unless key < current key, DeadHandle for a stale
  /// handle.
  void decrease_key(Handle h, Key key);

  [[nodiscard]] Key key(Handle h) const { return store_[store_.resolve(h)].key; }
  [[nodiscard]] bool contains(Handle h) const noexcept { return store_.is_live(h); }
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] bool empty() const noexcept { return n_ == 0; }

  [[nodiscard]] const HeapOptions& options() const noexcept { return options_; }
  [[nodiscard]] StatsReport stats() const noexcept;
  [[nodiscard]] const OpProfile& last_op() const noexcept { return last_op_; }
  /// Running hash of every reduction outcome and link pairing.
  [[nodiscard]] std::uint64_t decision_digest() const noexcept { return digest_; }
  /// Number of per-step potential checks run in paranoid mode.
  [[nodiscard]] std::uint64_t paranoid_checks() const noexcept { return paranoid_checks_; }

  [[nodiscard]] const NodeStore& store() const noexcept { return store_; }
  [[nodiscard]] const Registry& registry() const noexcept { return registry_; }
  [[nodiscard]] Slot root_head() const noexcept { return roots_; }
  [[nodiscard]] std::size_t root_count() const noexcept { return root_count_; }

  /// Raw node access for fault-injection tests. Bypasses every invariant.
  NodeRecord& mutable_node_for_testing(Handle h) { return store_[store_.resolve(h)]; }

 private:
  friend struct HeapTestPeer;

  void decrement_rank(Slot x);
  void cut_from_parent(Slot c);
  Slot link(Slot x, Slot y);
  CAOutcome reduce_CA_once();
  CLOutcome reduce_CL_once();
  ReductionCounts run_reductions(int phase, Caller caller, Strategy strategy);
  std::optional<Handle> find_min_impl(Caller caller, Strategy strategy);
  void set_subtype_checked(Slot x, Subtype s);

  void begin_public(Caller caller);
  void end_public();
  void note(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept;
  void check_delta(const char* what, const PhiPair& before, std::int64_t max_a, std::int64_t max_l,
                   std::int64_t max_total);
  void check_reduction(const char* what, const PhiPair& before, bool is_ca);
  [[nodiscard]] bool paranoid() const noexcept { return options_.audit == AuditLevel::Paranoid; }

  HeapOptions options_;
  NodeStore store_;
  Registry registry_;
  Slot roots_ = kNil;
  std::size_t root_count_ = 0;
  std::size_t n_ = 0;

  PhiPair entry_phi_;
  std::size_t entry_n_ = 0;
  OpProfile last_op_;
  std::uint64_t comparisons_ = 0;
  std::uint64_t reductions_ca_ = 0;
  std::uint64_t reductions_cl_ = 0;
  std::uint64_t structural_ = 0;
  std::uint64_t max_rank_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::uint64_t paranoid_checks_ = 0;
};

}  // namespace dkheap
