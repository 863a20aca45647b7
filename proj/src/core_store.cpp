#include "dkheap/core_store.hpp"

namespace dkheap {

const char* to_string(Subtype s) noexcept {
  switch (s) {
    case Subtype::N: return "N";
    case Subtype::A: return "A";
    case Subtype::L1: return "L1";
    case Subtype::L2: return "L2";
  }
  return "?";
}

Handle NodeStore::allocate(Key key) {
  Slot s;
  if (!free_.empty()) {
    s = free_.back();
    free_.pop_back();
  } else {
    if (nodes_.size() >= kNil) throw std::length_error("dkheap: node store exhausted");
    s = static_cast<Slot>(nodes_.size());
    nodes_.emplace_back();
    generation_.push_back(0);
    alive_.push_back(false);
  }
  NodeRecord& x = nodes_[s];
  x = NodeRecord{};
  x.key = key;
  x.seq = next_seq_++;
  x.left = s;
  alive_[s] = true;
  ++live_;
  return {s, generation_[s]};
}

void NodeStore::release(Handle h) {
  const Slot s = resolve(h);
  alive_[s] = false;
  ++generation_[s];
  free_.push_back(s);
  --live_;
}

Slot NodeStore::resolve(Handle h) const {
  if (!is_live(h)) throw DeadHandle("dkheap: handle does not refer to a live element");
  return h.index;
}

void list_insert_leftmost(NodeStore& store, Slot& head, Slot x) {
  NodeRecord& nx = store[x];
  if (nx.in_list) throw ContractViolation("list_insert_leftmost: node already in a list");
  nx.in_list = true;
  if (head == kNil) {
    nx.left = x;
    nx.right = kNil;
  } else {
    NodeRecord& old = store[head];
    nx.left = old.left;  // rightmost
    nx.right = head;
    old.left = x;
  }
  head = x;
}

void list_remove(NodeStore& store, Slot& head, Slot x) {
  NodeRecord& nx = store[x];
  if (!nx.in_list || head == kNil)
    throw ContractViolation("list_remove: node is not a member of the list");
  if (x == head) {
    if (nx.right == kNil) {
      head = kNil;
    } else {
      NodeRecord& next = store[nx.right];
      next.left = nx.left;
      head = nx.right;
    }
  } else {
    NodeRecord& prev = store[nx.left];
    if (prev.right != x) throw ContractViolation("list_remove: node is not a member of the list");
    prev.right = nx.right;
    if (nx.right != kNil)
      store[nx.right].left = nx.left;
    else
      store[head].left = nx.left;  // x was rightmost
  }
  nx.in_list = false;
  nx.left = x;
  nx.right = kNil;
}

std::vector<Slot> list_members(const NodeStore& store, Slot head) {
  std::vector<Slot> out;
  for (Slot s = head; s != kNil; s = store[s].right) out.push_back(s);
  return out;
}

}  // namespace dkheap
