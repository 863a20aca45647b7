#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkheap {

using Key = std::int64_t;

/// Index into the node slab. Internal links between nodes use slots; the
/// public API hands out generation-checked Handles.
using Slot = std::uint32_t;
inline constexpr Slot kNil = std::numeric_limits<Slot>::max();

/// Stable reference to a heap element. A handle is live iff its generation
/// matches the store's current generation for the slot.
struct Handle {
  Slot index = kNil;
  std::uint32_t generation = 0;

  [[nodiscard]] bool valid() const noexcept { return index != kNil; }
  friend bool operator==(const Handle&, const Handle&) = default;
};

enum class Subtype : std::uint8_t { N, A, L1, L2 };

/// Which container of type_of(subtype) currently holds the node's live
/// reference. Stale stack entries are not tracked here.
enum class Location : std::uint8_t { None, InArray, OnStack };

const char* to_string(Subtype s) noexcept;

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DeadHandle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NodeRecord {
  Key key = 0;
  std::uint64_t seq = 0;
  std::uint32_t rank = 0;
  // Instrumentation only: branching reads subtype, never loss.
  std::uint32_t loss = 0;
  Subtype subtype = Subtype::N;
  Location location = Location::None;
  bool in_list = false;
  Slot parent = kNil;
  Slot left = kNil;
  Slot right = kNil;
  Slot child_head = kNil;
  // Position of the live entry on C[type_of(subtype)] when location == OnStack.
  std::uint32_t stack_pos = 0;
};

/// Strict (key, seq) order; no two live nodes compare equal.
[[nodiscard]] inline bool precedes(const NodeRecord& a, const NodeRecord& b) noexcept {
  return a.key < b.key || (a.key == b.key && a.seq < b.seq);
}

/// Generational slab of NodeRecords. Freed slots are recycled with a
/// generation bump, so stale handles are detected rather than misrouted.
class NodeStore {
 public:
  NodeStore() = default;

  Handle allocate(Key key);
  void release(Handle h);

  [[nodiscard]] bool is_live(Handle h) const noexcept {
    return h.index < nodes_.size() && alive_[h.index] && generation_[h.index] == h.generation;
  }
  [[nodiscard]] bool is_live_slot(Slot s) const noexcept { return s < nodes_.size() && alive_[s]; }

  /// Slot of a live handle; throws DeadHandle otherwise.
  [[nodiscard]] Slot resolve(Handle h) const;
  [[nodiscard]] Handle handle_of(Slot s) const noexcept { return {s, generation_[s]}; }

  NodeRecord& operator[](Slot s) noexcept { return nodes_[s]; }
  const NodeRecord& operator[](Slot s) const noexcept { return nodes_[s]; }

  [[nodiscard]] std::size_t live_count() const noexcept { return live_; }
  [[nodiscard]] std::size_t slot_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::uint64_t next_seq() const noexcept { return next_seq_; }

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<std::uint32_t> generation_;
  std::vector<bool> alive_;
  std::vector<Slot> free_;
  std::size_t live_ = 0;
  std::uint64_t next_seq_ = 0;
};

// Sibling lists: left links cyclic (head.left is the rightmost member),
// right links acyclic (rightmost.right == kNil). A list is identified by its
// head slot, which the caller owns (the root list head or a child_head).

/// Makes x the new leftmost member. Throws ContractViolation if x is
/// already in a list.
void list_insert_leftmost(NodeStore& store, Slot& head, Slot x);

/// Unlinks x, leaving it a self-singleton. Throws ContractViolation if x is
/// not a member.
void list_remove(NodeStore& store, Slot& head, Slot x);

/// Members from leftmost to rightmost.
[[nodiscard]] std::vector<Slot> list_members(const NodeStore& store, Slot head);

}  // namespace dkheap
