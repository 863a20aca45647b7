#include "dkheap/violation_registry.hpp"

#include <algorithm>

namespace dkheap {

Registry::Registry(bool weigh_loss) : weigh_loss_(weigh_loss) {
  for (auto& arr : arrays_) arr.assign(kInitialCapacity, kNil);
}

void Registry::set_violation_subtype(NodeStore& store, Slot x, Subtype s) {
  NodeRecord& n = store[x];
  const Subtype old = n.subtype;
  const ViolationType from = type_of(old);
  const ViolationType to = type_of(s);

  if (from != ViolationType::N && n.location == Location::InArray) clear_slot(store, from, n.rank);
  const std::int64_t old_weight = n.location == Location::OnStack ? live_weight(n) : 0;

  n.subtype = s;
  if (weigh_loss_) {
    switch (s) {
      case Subtype::N:
      case Subtype::A: n.loss = 0; break;
      case Subtype::L1: n.loss = 1; break;
      case Subtype::L2: n.loss = old == Subtype::L1 ? 2 : std::max<std::uint32_t>(n.loss, 2); break;
    }
  }

  if (n.location == Location::OnStack) {
    if (from == to) {
      if (to == ViolationType::L) phi_.l += stack_coef(to) * (live_weight(n) - old_weight);
    } else {
      // The entry stays on C[from] as a stale item of weight 1.
      if (from == ViolationType::L) phi_.l += stack_coef(from) * (1 - old_weight);
      n.location = Location::None;
    }
  }
  if (to == ViolationType::N) {
    n.location = Location::None;
  } else if (n.location != Location::OnStack) {
    push(store, to, x);
  }
}

void Registry::increment_loss(NodeStore& store, Slot x) {
  NodeRecord& n = store[x];
  if (n.subtype != Subtype::L2) throw ContractViolation("increment_loss: node is not of subtype L2");
  if (!weigh_loss_) return;
  ++n.loss;
  if (n.location == Location::OnStack) phi_.l += stack_coef(ViolationType::L);
}

void Registry::push(NodeStore& store, ViolationType t, Slot x) {
  auto& st = stacks_[idx(t)];
  NodeRecord& n = store[x];
  st.push_back(store.handle_of(x));
  n.location = Location::OnStack;
  n.stack_pos = static_cast<std::uint32_t>(st.size() - 1);
  phi_of(t) += stack_coef(t) * (t == ViolationType::L ? live_weight(n) : 1);
  ++mutations_;
}

std::optional<StackItem> Registry::pop(NodeStore& store, ViolationType t) {
  auto& st = stacks_[idx(t)];
  if (st.empty()) return std::nullopt;
  const std::size_t pos = st.size() - 1;
  StackItem item{st[pos], entry_is_live(store, t, pos)};
  phi_of(t) -= stack_coef(t) * entry_weight(store, t, pos);
  st.pop_back();
  if (item.live) store[item.handle.index].location = Location::None;
  ++mutations_;
  return item;
}

void Registry::park(NodeStore& store, ViolationType t, Slot x) {
  NodeRecord& n = store[x];
  ensure_capacity(n.rank);
  Slot& cell = arrays_[idx(t)][n.rank];
  if (cell != kNil) throw ContractViolation("park: array slot already occupied");
  cell = x;
  n.location = Location::InArray;
  phi_of(t) += array_coef(t);
  ++mutations_;
}

void Registry::clear_slot(NodeStore& store, ViolationType t, std::uint32_t rank) {
  auto& arr = arrays_[idx(t)];
  if (rank >= arr.size() || arr[rank] == kNil) throw ContractViolation("clear_slot: array slot is empty");
  store[arr[rank]].location = Location::None;
  arr[rank] = kNil;
  phi_of(t) -= array_coef(t);
  ++mutations_;
}

void Registry::ensure_capacity(std::uint32_t rank) {
  // TODO: incremental (worst-case) doubling; growth is amortized for now.
  std::size_t cap = arrays_[0].size();
  if (rank < cap) return;
  while (cap <= rank) cap *= 2;
  for (auto& arr : arrays_) arr.resize(cap, kNil);
}

bool Registry::entry_is_live(const NodeStore& store, ViolationType t, std::size_t pos) const noexcept {
  const Handle h = stacks_[idx(t)][pos];
  if (!store.is_live(h)) return false;
  const NodeRecord& n = store[h.index];
  return n.location == Location::OnStack && n.stack_pos == pos && type_of(n.subtype) == t;
}

std::int64_t Registry::entry_weight(const NodeStore& store, ViolationType t, std::size_t pos) const noexcept {
  if (t == ViolationType::A || !entry_is_live(store, t, pos)) return 1;
  return live_weight(store[stacks_[idx(t)][pos].index]);
}

PhiPair Registry::recompute(const NodeStore& store) const {
  PhiPair p;
  for (ViolationType t : {ViolationType::A, ViolationType::L}) {
    std::int64_t v = 0;
    for (Slot s : arrays_[idx(t)])
      if (s != kNil) v += array_coef(t);
    const auto& st = stacks_[idx(t)];
    for (std::size_t i = 0; i < st.size(); ++i) v += stack_coef(t) * entry_weight(store, t, i);
    (t == ViolationType::A ? p.a : p.l) = v;
  }
  return p;
}

}  // namespace dkheap
