#include "dkheap/harness.hpp"

namespace dkheap::harness {

std::uint64_t OracleHeap::insert(Key key) {
  const std::uint64_t ref = keys_.size();
  keys_.push_back(key);
  live_.push_back(true);
  set_.emplace(key, ref);
  return ref;
}

void OracleHeap::decrease(std::uint64_t ref, Key key) {
  if (!is_live(ref)) throw HarnessError("decrease of unknown or extracted ref " + std::to_string(ref));
  if (!(key < keys_[ref])) throw HarnessError("decrease of ref " + std::to_string(ref) + " does not lower its key");
  set_.erase({keys_[ref], ref});
  keys_[ref] = key;
  set_.emplace(key, ref);
}

std::optional<std::pair<Key, std::uint64_t>> OracleHeap::delete_min() {
  if (set_.empty()) return std::nullopt;
  const auto top = *set_.begin();
  set_.erase(set_.begin());
  live_[top.second] = false;
  return top;
}

std::optional<std::pair<Key, std::uint64_t>> OracleHeap::find_min() const {
  if (set_.empty()) return std::nullopt;
  return *set_.begin();
}

std::optional<Key> oracle_apply(OracleHeap& oracle, const TraceOp& op) {
  switch (op.kind) {
    case OpKind::Insert: oracle.insert(op.key); return std::nullopt;
    case OpKind::Decrease: oracle.decrease(op.ref, op.key); return std::nullopt;
    case OpKind::DeleteMin:
      if (auto top = oracle.delete_min()) return top->first;
      return std::nullopt;
    case OpKind::FindMin:
      if (auto top = oracle.find_min()) return top->first;
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace dkheap::harness
