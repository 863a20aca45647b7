#include <algorithm>

#include "dkheap/audit.hpp"
#include "dkheap/harness.hpp"

namespace dkheap::harness {

namespace {

void fold(ReductionCounts& max, std::uint32_t& max_total, const ReductionCounts& r) {
  max.cl = std::max(max.cl, r.cl);
  max.ca = std::max(max.ca, r.ca);
  max_total = std::max(max_total, r.total());
}

// Swap the root's key with its smallest child's: only that one edge breaks.
bool corrupt_heap_order(Heap& heap) {
  const Slot root = heap.root_head();
  if (root == kNil) return false;
  const NodeStore& store = heap.store();
  Slot best = kNil;
  for (Slot c = store[root].child_head; c != kNil; c = store[c].right)
    if (best == kNil || precedes(store[c], store[best])) best = c;
  if (best == kNil || store[best].key == store[root].key) return false;
  NodeRecord& r = heap.mutable_node_for_testing(store.handle_of(root));
  NodeRecord& c = heap.mutable_node_for_testing(store.handle_of(best));
  std::swap(r.key, c.key);
  return true;
}

}  // namespace

Verdict run_differential(std::span<const TraceOp> trace, Strategy strategy, const DiffOptions& options) {
  Heap heap(HeapOptions{
      .strategy = strategy, .audit = options.audit, .track_loss = options.track_loss, .phase1 = options.phase1});
  OracleHeap oracle;
  std::vector<Handle> handles;
  Verdict v;
  RunMetrics& m = v.metrics;

  auto fail = [&](std::size_t i, std::string msg) {
    v.pass = false;
    v.op_index = i;
    v.message = std::move(msg);
  };

  for (std::size_t i = 0; i < trace.size() && v.pass; ++i) {
    const TraceOp& op = trace[i];
    const std::optional<Key> expected = oracle_apply(oracle, op);
    try {
      switch (op.kind) {
        case OpKind::Insert:
          handles.push_back(heap.insert(op.key));
          fold(m.max_insert, m.max_insert_total, heap.last_op().total());
          break;
        case OpKind::Decrease:
          heap.decrease_key(handles.at(op.ref), op.key);
          fold(m.max_decrease, m.max_decrease_total, heap.last_op().total());
          break;
        case OpKind::DeleteMin: {
          const std::size_t n_before = heap.size();
          const auto got = heap.delete_min();
          const std::optional<Key> key = got ? std::optional<Key>(got->key) : std::nullopt;
          v.results.push_back(key);
          if (key != expected) {
            fail(i, "delete_min returned " + (key ? std::to_string(*key) : "nothing") + ", oracle " +
                        (expected ? std::to_string(*expected) : "nothing"));
            break;
          }
          if (got) {
            ++m.delete_mins;
            const std::uint32_t total = heap.last_op().total().total();
            m.max_delete_min_total = std::max(m.max_delete_min_total, total);
            const double budget = 6.0 * audit::max_rank_bound(n_before) + 7.0;
            m.worst_delete_min_ratio = std::max(m.worst_delete_min_ratio, total / budget);
          }
          break;
        }
        case OpKind::FindMin: {
          const auto got = heap.find_min();
          const std::optional<Key> key = got ? std::optional<Key>(heap.key(*got)) : std::nullopt;
          v.results.push_back(key);
          fold(m.max_find_min, m.max_find_min_total, heap.last_op().total());
          if (key != expected)
            fail(i, "find_min returned " + (key ? std::to_string(*key) : "nothing") + ", oracle " +
                        (expected ? std::to_string(*expected) : "nothing"));
          break;
        }
      }
    } catch (const InvariantViolation& e) {
      fail(i, e.what());
    } catch (const ContractViolation& e) {
      fail(i, std::string("contract: ") + e.what());
    }

    if (v.pass && options.corrupt_after_op == i && corrupt_heap_order(heap)) {
      const audit::AuditReport report = audit::check_structure(heap);
      if (!report.ok()) {
        const audit::Finding& f = report.violations_found.front();
        fail(i, "audit: " + f.invariant + ": " + f.detail);
      }
    }
  }

  v.stats = heap.stats();
  m.reductions = v.stats.reductions_CA + v.stats.reductions_CL;
  m.paranoid_checks = heap.paranoid_checks();
  v.decision_digest = heap.decision_digest();
  return v;
}

}  // namespace dkheap::harness
