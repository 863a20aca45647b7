#include "dkheap/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dkheap::audit {

std::size_t AuditReport::count(std::string_view invariant) const noexcept {
  return static_cast<std::size_t>(std::count_if(violations_found.begin(), violations_found.end(),
                                                [&](const Finding& f) { return f.invariant == invariant; }));
}

namespace {

class Auditor {
 public:
  explicit Auditor(const Heap& heap)
      : heap_(heap), store_(heap.store()), reg_(heap.registry()), track_loss_(heap.options().track_loss) {}

  AuditReport run() {
    check_list(heap_.root_head(), kNil);
    std::size_t roots = 0;
    for (Slot r : list_members(store_, heap_.root_head())) {
      ++roots;
      if (store_[r].parent != kNil) add("parent_link", r, "root has a parent link");
      if (store_[r].subtype != Subtype::A) add("root_subtype", r, std::string("root has subtype ") + to_string(store_[r].subtype));
      walk(r);
    }
    if (heap_.size() > 0 && roots != 1) add("root_count", kNil, std::to_string(roots) + " trees at a boundary");
    if (roots != heap_.root_count()) add("root_count", kNil, "root counter disagrees with the root list");
    if (visited_ != heap_.size())
      add("reachability", kNil, std::to_string(visited_) + " reachable nodes for size " + std::to_string(heap_.size()));

    check_registry();
    report_.phi_recomputed = reg_.recompute(store_);
    if (report_.phi_recomputed != reg_.phi()) add("phi", kNil, "incremental potential differs from a full scan");
    return std::move(report_);
  }

 private:
  void add(std::string invariant, Slot s, std::string detail) {
    Handle h = s == kNil || !store_.is_live_slot(s) ? Handle{} : store_.handle_of(s);
    report_.violations_found.push_back({std::move(invariant), h, std::move(detail)});
  }

  void check_list(Slot head, Slot owner) {
    if (head == kNil) return;
    if (store_[head].left == kNil || !store_.is_live_slot(store_[head].left)) {
      add("sibling_shape", head, "head has no left link");
      return;
    }
    Slot last = head;
    std::size_t steps = 0;
    for (Slot s = head; s != kNil; s = store_[s].right) {
      if (!store_.is_live_slot(s)) {
        add("sibling_shape", owner, "list reaches a dead slot");
        return;
      }
      if (++steps > store_.slot_count()) {
        add("sibling_shape", owner, "right links do not terminate");
        return;
      }
      if (!store_[s].in_list) add("sibling_shape", s, "member not flagged as listed");
      if (s != head && store_[store_[s].left].right != s) add("sibling_shape", s, "left.right does not point back");
      last = s;
    }
    if (store_[head].left != last) add("sibling_shape", head, "head.left is not the rightmost member");
  }

  void walk(Slot root) {
    std::vector<Slot> todo{root};
    while (!todo.empty()) {
      const Slot x = todo.back();
      todo.pop_back();
      if (++visited_ > store_.slot_count()) return;
      const NodeRecord& n = store_[x];
      report_.max_rank_observed = std::max(report_.max_rank_observed, n.rank);
      if (n.subtype == Subtype::A) ++report_.a_nodes;
      report_.total_loss += n.loss;
      check_node(x);
      check_list(n.child_head, x);
      std::uint32_t rank_children = 0;
      for (Slot c = n.child_head; c != kNil && store_.is_live_slot(c); c = store_[c].right) {
        const NodeRecord& nc = store_[c];
        if (nc.parent != x) add("parent_link", c, "child does not point to its parent");
        if (!precedes(n, nc)) add("heap_order", c, "child precedes its parent");
        if (nc.subtype != Subtype::A) ++rank_children;
        todo.push_back(c);
      }
      if (rank_children != n.rank)
        add("rank_consistency", x, "rank " + std::to_string(n.rank) + " but " + std::to_string(rank_children) + " rank children");
    }
  }

  void check_node(Slot x) {
    const NodeRecord& n = store_[x];
    if (track_loss_) {
      const bool loss_ok = n.subtype == Subtype::L1   ? n.loss == 1
                           : n.subtype == Subtype::L2 ? n.loss >= 2
                                                      : n.loss == 0;
      if (!loss_ok) add("subtype_loss", x, std::string(to_string(n.subtype)) + " with loss " + std::to_string(n.loss));
    }
    if ((n.subtype == Subtype::L1 || n.subtype == Subtype::L2) && n.parent == kNil)
      add("subtype_loss", x, "loss violation without a parent");

    const ViolationType t = type_of(n.subtype);
    switch (n.location) {
      case Location::None:
        if (t != ViolationType::N) add("location", x, "violation is in no container");
        break;
      case Location::InArray:
        if (t == ViolationType::N || reg_.slot_at(t, n.rank) != x) add("location", x, "claims an array slot it does not hold");
        if (n.subtype == Subtype::L2) add("location", x, "L2 node parked in an array");
        break;
      case Location::OnStack: {
        const auto st = t == ViolationType::N ? std::span<const Handle>{} : reg_.stack(t);
        if (n.stack_pos >= st.size() || st[n.stack_pos].index != x) add("location", x, "claims a stack entry it does not hold");
        break;
      }
    }
  }

  void check_registry() {
    for (ViolationType t : {ViolationType::A, ViolationType::L}) {
      const auto arr = reg_.array(t);
      for (std::uint32_t r = 0; r < arr.size(); ++r) {
        const Slot s = arr[r];
        if (s == kNil) continue;
        if (!store_.is_live_slot(s)) {
          add("registry_slot", kNil, "array slot " + std::to_string(r) + " holds a dead node");
          continue;
        }
        const NodeRecord& n = store_[s];
        if (type_of(n.subtype) != t || n.rank != r || n.location != Location::InArray)
          add("registry_slot", s, "array slot " + std::to_string(r) + " holds a mismatched node");
        if (t == ViolationType::L && n.subtype != Subtype::L1) add("registry_slot", s, "R_L holds a non-L1 node");
      }
    }
  }

  const Heap& heap_;
  const NodeStore& store_;
  const Registry& reg_;
  bool track_loss_;
  std::size_t visited_ = 0;
  AuditReport report_;
};

}  // namespace

AuditReport check_structure(const Heap& heap) { return Auditor(heap).run(); }

PhiPair recompute_phi(const Heap& heap) { return heap.registry().recompute(heap.store()); }

double rank_limit(std::size_t n) { return 4.0 + 1.2 * std::log2(static_cast<double>(n)); }

std::uint32_t max_rank_bound(std::size_t n) { return static_cast<std::uint32_t>(std::floor(rank_limit(n))); }

bool check_rank_bound(const Heap& heap) {
  const double limit = rank_limit(heap.size());
  const NodeStore& store = heap.store();
  for (Slot s = 0; s < store.slot_count(); ++s)
    if (store.is_live_slot(s) && static_cast<double>(store[s].rank) >= limit) return false;
  return true;
}

std::uint64_t minimal_tree_size(int rank, std::uint64_t loss) {
  if (rank < 0 || rank > 62) throw std::out_of_range("minimal_tree_size: rank must lie in [0, 62]");
  std::uint64_t size = std::uint64_t{1} << rank;
  // k grandchildren of rank (rank - 1 - k), largest first.
  for (int k = 1; k <= rank - 1 && loss > 0; ++k) {
    const std::uint64_t cuts = std::min<std::uint64_t>(loss, static_cast<std::uint64_t>(k));
    size -= cuts * (std::uint64_t{1} << (rank - 1 - k));
    loss -= cuts;
  }
  return size;
}

bool rank_bound_certificate(int r_max) {
  if (r_max > 62) throw std::out_of_range("rank_bound_certificate: r_max must be at most 62");
  for (int r = 1; r <= r_max; ++r) {
    const double lower = std::exp2((r - 4) / 1.2);
    if (lower > static_cast<double>(minimal_tree_size(r, static_cast<std::uint64_t>(r) + 1))) return false;
  }
  return true;
}

}  // namespace dkheap::audit
