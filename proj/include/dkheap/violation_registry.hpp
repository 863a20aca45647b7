#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dkheap/core_store.hpp"

namespace dkheap {

enum class ViolationType : std::uint8_t { N, A, L };

/// (A->A), (N->N), (L1->L), (L2->L).
[[nodiscard]] constexpr ViolationType type_of(Subtype s) noexcept {
  switch (s) {
    case Subtype::A: return ViolationType::A;
    case Subtype::L1:
    case Subtype::L2: return ViolationType::L;
    case Subtype::N: break;
  }
  return ViolationType::N;
}

struct PhiPair {
  std::int64_t a = 0;
  std::int64_t l = 0;

  [[nodiscard]] std::int64_t total() const noexcept { return a + l; }
  friend bool operator==(const PhiPair&, const PhiPair&) = default;
};

/// One popped stack item. `live` is false for stale entries: the node has
/// changed type, was re-pushed since, was parked, or no longer exists.
struct StackItem {
  Handle handle;
  bool live = false;
};

/// The four violation containers R_A, R_L (rank-indexed arrays) and C_A,
/// C_L (stacks), with Phi_A = |R_A| + 2|C_A| and Phi_L = 3|R_L| + 4|C_L|
/// maintained incrementally. In |C_L| the live entry of an L2 node weighs
/// its loss; every other entry, stale ones included, weighs 1.
class Registry {
 public:
  static constexpr std::uint32_t kInitialCapacity = 32;

  explicit Registry(bool weigh_loss = true);

  /// Moves x to subtype s with all container bookkeeping: x leaves
  /// R[type(old)] if parked there, gets pushed on C[type(s)] unless s is N
  /// or x already holds a live entry on that stack. Loss follows the
  /// subtype (N, A -> 0; L1 -> 1; L1 -> L2 raises it to 2).
  void set_violation_subtype(NodeStore& store, Slot x, Subtype s);

  /// Loss increment of an L2 node (its rank dropped again).
  void increment_loss(NodeStore& store, Slot x);

  void push(NodeStore& store, ViolationType t, Slot x);
  std::optional<StackItem> pop(NodeStore& store, ViolationType t);

  /// Stores x at R[t][rank(x)], which must be empty.
  void park(NodeStore& store, ViolationType t, Slot x);
  /// Empties R[t][rank]; the former occupant gets location None.
  void clear_slot(NodeStore& store, ViolationType t, std::uint32_t rank);
  [[nodiscard]] Slot slot_at(ViolationType t, std::uint32_t rank) const noexcept {
    const auto& arr = arrays_[idx(t)];
    return rank < arr.size() ? arr[rank] : kNil;
  }

  void ensure_capacity(std::uint32_t rank);
  [[nodiscard]] std::size_t capacity() const noexcept { return arrays_[0].size(); }

  [[nodiscard]] PhiPair phi() const noexcept { return phi_; }
  [[nodiscard]] std::span<const Handle> stack(ViolationType t) const noexcept { return stacks_[idx(t)]; }
  [[nodiscard]] std::span<const Slot> array(ViolationType t) const noexcept { return arrays_[idx(t)]; }
  [[nodiscard]] bool stack_empty(ViolationType t) const noexcept { return stacks_[idx(t)].empty(); }

  [[nodiscard]] bool entry_is_live(const NodeStore& store, ViolationType t, std::size_t pos) const noexcept;
  [[nodiscard]] std::int64_t entry_weight(const NodeStore& store, ViolationType t, std::size_t pos) const noexcept;

  /// Full scan of arrays and stacks; must equal phi().
  [[nodiscard]] PhiPair recompute(const NodeStore& store) const;

  [[nodiscard]] bool weighs_loss() const noexcept { return weigh_loss_; }
  [[nodiscard]] std::uint64_t mutations() const noexcept { return mutations_; }

 private:
  static constexpr std::size_t idx(ViolationType t) noexcept { return t == ViolationType::A ? 0 : 1; }
  static constexpr std::int64_t array_coef(ViolationType t) noexcept { return t == ViolationType::A ? 1 : 3; }
  static constexpr std::int64_t stack_coef(ViolationType t) noexcept { return t == ViolationType::A ? 2 : 4; }
  std::int64_t& phi_of(ViolationType t) noexcept { return t == ViolationType::A ? phi_.a : phi_.l; }
  std::int64_t live_weight(const NodeRecord& n) const noexcept {
    return weigh_loss_ && n.subtype == Subtype::L2 ? static_cast<std::int64_t>(n.loss) : 1;
  }

  std::array<std::vector<Slot>, 2> arrays_;
  std::array<std::vector<Handle>, 2> stacks_;
  PhiPair phi_;
  bool weigh_loss_;
  std::uint64_t mutations_ = 0;
};

}  // namespace dkheap
