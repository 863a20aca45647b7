#include "dkheap/heap.hpp"

#include <string>

#include "dkheap/audit.hpp"

namespace dkheap {

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Amortized: return "amortized";
    case Strategy::WC1: return "wc1";
    case Strategy::WC2: return "wc2";
  }
  return "?";
}

const char* to_string(AuditLevel a) noexcept {
  switch (a) {
    case AuditLevel::Off: return "off";
    case AuditLevel::Boundary: return "boundary";
    case AuditLevel::Paranoid: return "paranoid";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept {
  if (text == "amortized") return Strategy::Amortized;
  if (text == "wc1") return Strategy::WC1;
  if (text == "wc2") return Strategy::WC2;
  return std::nullopt;
}

std::optional<AuditLevel> parse_audit_level(std::string_view text) noexcept {
  if (text == "off") return AuditLevel::Off;
  if (text == "boundary") return AuditLevel::Boundary;
  if (text == "paranoid") return AuditLevel::Paranoid;
  return std::nullopt;
}

Heap::Heap(HeapOptions options) : options_(options), registry_(options.track_loss) {
  if (options_.strategy == Strategy::WC1 && !options_.track_loss)
    throw std::invalid_argument("dkheap: the wc1 strategy needs loss tracking");
}

StatsReport Heap::stats() const noexcept {
  const PhiPair phi = registry_.phi();
  return {
      .n = n_,
      .max_rank = max_rank_,
      .phi_A = static_cast<std::uint64_t>(phi.a),
      .phi_L = static_cast<std::uint64_t>(phi.l),
      .comparisons = comparisons_,
      .reductions_CA = reductions_ca_,
      .reductions_CL = reductions_cl_,
      .structural_mutations = structural_,
      .registry_mutations = registry_.mutations(),
  };
}

// ---------------------------------------------------------------------------
// Paranoid-mode accounting

void Heap::note(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  for (std::uint64_t v : {a, b, c}) {
    digest_ ^= v + 0x9e3779b97f4a7c15ULL + (digest_ << 6) + (digest_ >> 2);
    digest_ *= 0x100000001b3ULL;
  }
}

void Heap::check_delta(const char* what, const PhiPair& before, std::int64_t max_a, std::int64_t max_l,
                       std::int64_t max_total) {
  const PhiPair after = registry_.phi();
  const std::int64_t da = after.a - before.a;
  const std::int64_t dl = after.l - before.l;
  ++paranoid_checks_;
  if (da > max_a || dl > max_l || da + dl > max_total) {
    throw InvariantViolation(std::string(what) + ": potential rose by (" + std::to_string(da) + ", " +
                             std::to_string(dl) + ")");
  }
}

void Heap::check_reduction(const char* what, const PhiPair& before, bool is_ca) {
  const PhiPair after = registry_.phi();
  ++paranoid_checks_;
  if (after.total() > before.total() - 1)
    throw InvariantViolation(std::string(what) + ": reduction did not decrease the potential");
  if (is_ca ? after.l != before.l : after.l > before.l - 1)
    throw InvariantViolation(std::string(what) + ": unexpected Phi_L change");
  if (registry_.recompute(store_) != after)
    throw InvariantViolation(std::string(what) + ": incremental potential drifted from a full scan");
}

void Heap::set_subtype_checked(Slot x, Subtype s) {
  if (!paranoid() || s != Subtype::A) {
    registry_.set_violation_subtype(store_, x, s);
    return;
  }
  const PhiPair before = registry_.phi();
  registry_.set_violation_subtype(store_, x, s);
  check_delta("set_violation_subtype(A)", before, 2, 0, 2);
}

// ---------------------------------------------------------------------------
// Private methods

void Heap::decrement_rank(Slot x) {
  NodeRecord& n = store_[x];
  if (n.rank == 0) throw ContractViolation("decrement_rank: rank underflow");
  const PhiPair before = registry_.phi();
  switch (n.subtype) {
    case Subtype::A: registry_.set_violation_subtype(store_, x, Subtype::A); break;
    case Subtype::N: registry_.set_violation_subtype(store_, x, Subtype::L1); break;
    case Subtype::L1: registry_.set_violation_subtype(store_, x, Subtype::L2); break;
    case Subtype::L2: registry_.increment_loss(store_, x); break;
  }
  --n.rank;
  if (paranoid()) check_delta("decrement_rank", before, 1, 5, 5);
}

void Heap::cut_from_parent(Slot c) {
  const PhiPair before = registry_.phi();
  NodeRecord& n = store_[c];
  const Slot p = n.parent;
  if (p != kNil) {
    if (n.subtype != Subtype::A) decrement_rank(p);
    list_remove(store_, store_[p].child_head, c);
    n.parent = kNil;
    structural_ += 2;
  } else {
    list_remove(store_, roots_, c);
    --root_count_;
    ++structural_;
  }
  if (paranoid()) check_delta("cut_from_parent", before, 1, 5, 5);
}

Slot Heap::link(Slot x, Slot y) {
  const Subtype sx = store_[x].subtype;
  if (x == y || sx != store_[y].subtype || (sx != Subtype::A && sx != Subtype::L1) ||
      (sx == Subtype::L1 && store_[x].rank != store_[y].rank))
    throw ContractViolation("link: operands must be distinct A nodes or equal-rank L1 nodes");

  const PhiPair before = registry_.phi();
  ++comparisons_;
  const bool x_first = precedes(store_[x], store_[y]);
  const Slot s = x_first ? x : y;
  const Slot h = x_first ? y : x;
  note(0x11, store_[s].seq, store_[h].seq);

  if (sx == Subtype::L1 && store_[h].parent == s) {
    // h already hangs under s. Cutting it would push s to L2 before the
    // relink restores its rank, so the edge is renewed in place: h's loss
    // resets, s keeps rank and loss 1 and is queued again.
    registry_.set_violation_subtype(store_, h, Subtype::N);
    registry_.set_violation_subtype(store_, s, Subtype::L1);
    if (paranoid()) check_delta("link", before, 2, 5, 5);
    return s;
  }

  cut_from_parent(h);
  list_insert_leftmost(store_, store_[s].child_head, h);
  store_[h].parent = s;
  structural_ += 2;

  const Subtype hh = store_[s].rank <= store_[h].rank ? Subtype::N : Subtype::A;
  if (store_[h].subtype != hh) registry_.set_violation_subtype(store_, h, hh);
  if (hh == Subtype::N) {
    const Subtype ss = store_[s].subtype == Subtype::A ? Subtype::A : Subtype::N;
    set_subtype_checked(s, ss);
    NodeRecord& ns = store_[s];
    ++ns.rank;
    if (ns.rank > max_rank_) max_rank_ = ns.rank;
  }
  // A-links inside a C_A reduction push the winner after it was popped or
  // unparked, so Phi_A may rise by 2 here; the reduction as a whole still
  // decreases the potential.
  if (paranoid()) check_delta("link", before, 2, 5, 5);
  return s;
}

CAOutcome Heap::reduce_CA_once() {
  const PhiPair before = registry_.phi();
  const auto item = registry_.pop(store_, ViolationType::A);
  if (!item) return CAOutcome::StackEmpty;
  ++reductions_ca_;
  ++last_op_.phase1.ca;  // moved to the right phase by run_reductions

  CAOutcome outcome;
  const Slot x = item->handle.index;
  if (!item->live) {
    const bool dup = store_.is_live(item->handle) && store_[x].subtype == Subtype::A &&
                     store_[x].location == Location::InArray &&
                     registry_.slot_at(ViolationType::A, store_[x].rank) == x;
    outcome = dup ? CAOutcome::DiscardedDuplicate : CAOutcome::DiscardedStale;
  } else {
    const std::uint32_t r = store_[x].rank;
    const Slot y = registry_.slot_at(ViolationType::A, r);
    if (y == kNil) {
      registry_.park(store_, ViolationType::A, x);
      outcome = CAOutcome::ParkedInArray;
    } else {
      registry_.clear_slot(store_, ViolationType::A, r);
      link(x, y);  // the winner re-enters C_A
      outcome = CAOutcome::Linked;
    }
  }
  note(0x20 + static_cast<std::uint64_t>(outcome));
  if (paranoid()) check_reduction("reduce_CA_once", before, true);
  return outcome;
}

CLOutcome Heap::reduce_CL_once() {
  const PhiPair before = registry_.phi();
  const auto item = registry_.pop(store_, ViolationType::L);
  if (!item) return CLOutcome::StackEmpty;
  ++reductions_cl_;
  ++last_op_.phase1.cl;

  CLOutcome outcome;
  const Slot x = item->handle.index;
  if (!item->live) {
    const bool dup = store_.is_live(item->handle) && store_[x].subtype == Subtype::L1 &&
                     store_[x].location == Location::InArray &&
                     registry_.slot_at(ViolationType::L, store_[x].rank) == x;
    outcome = dup ? CLOutcome::DiscardedDuplicate : CLOutcome::DiscardedStale;
  } else if (store_[x].subtype == Subtype::L2) {
    const Slot p = store_[x].parent;
    if (p == kNil) throw ContractViolation("reduce_CL_once: L2 node without a parent");
    set_subtype_checked(x, Subtype::A);
    decrement_rank(p);
    outcome = CLOutcome::LossReducedL2;
  } else {
    const std::uint32_t r = store_[x].rank;
    const Slot y = registry_.slot_at(ViolationType::L, r);
    if (y == kNil) {
      registry_.park(store_, ViolationType::L, x);
      outcome = CLOutcome::ParkedInArray;
    } else {
      registry_.clear_slot(store_, ViolationType::L, r);
      link(x, y);
      outcome = CLOutcome::LinkedL1;
    }
  }
  note(0x30 + static_cast<std::uint64_t>(outcome));
  if (paranoid()) check_reduction("reduce_CL_once", before, false);
  return outcome;
}

ReductionCounts Heap::run_reductions(int phase, Caller caller, Strategy strategy) {
  // The reduce_* helpers bump last_op_.phase1; rebase so the counts can be
  // attributed to the requested phase.
  const ReductionCounts base = last_op_.phase1;
  auto cl_once = [&] { return reduce_CL_once() != CLOutcome::StackEmpty; };
  auto ca_once = [&] { return reduce_CA_once() != CAOutcome::StackEmpty; };

  switch (strategy) {
    case Strategy::Amortized:
      while (!registry_.stack_empty(ViolationType::L) || !registry_.stack_empty(ViolationType::A)) {
        while (cl_once()) {
        }
        while (ca_once()) {
        }
      }
      break;
    case Strategy::WC1:
      while (registry_.phi().l > entry_phi_.l && cl_once()) {
      }
      while (registry_.phi().a > entry_phi_.a && ca_once()) {
      }
      break;
    case Strategy::WC2: {
      const StrategyBudget plan = wc2_budget(caller);
      const std::uint32_t cl_plan = phase == 1 ? plan.planned_CL_phase1 : 0;
      const std::uint32_t ca_plan = phase == 1 ? plan.planned_CA_phase1 : plan.planned_CA_phase3;
      for (std::uint32_t i = 0; i < cl_plan && cl_once(); ++i) {
      }
      for (std::uint32_t i = 0; i < ca_plan && ca_once(); ++i) {
      }
      break;
    }
  }

  ReductionCounts done{last_op_.phase1.cl - base.cl, last_op_.phase1.ca - base.ca};
  if (phase != 1) {
    last_op_.phase1 = base;
    last_op_.phase3 += done;
  }
  return done;
}

std::optional<Handle> Heap::find_min_impl(Caller caller, Strategy strategy) {
  if (roots_ == kNil) {
    // Only stale entries can remain (e.g. of the last extracted root).
    run_reductions(1, caller, strategy);
    return std::nullopt;
  }

  // Phase 0: every root becomes a parentless A node.
  std::size_t count = 0;
  for (Slot r = roots_; r != kNil; r = store_[r].right) {
    ++count;
    if (store_[r].parent != kNil) {
      store_[r].parent = kNil;
      ++structural_;
    }
    if (store_[r].subtype != Subtype::A) set_subtype_checked(r, Subtype::A);
  }
  root_count_ = count;

  if (options_.phase1) run_reductions(1, caller, strategy);

  // Phase 2: link neighbours while stepping leftwards around the cyclic list.
  Slot cur = roots_;
  while (root_count_ > 1) {
    const Slot s = link(cur, store_[cur].left);
    ++last_op_.links_phase2;
    cur = store_[s].left;
  }

  run_reductions(3, caller, strategy);
  return store_.handle_of(roots_);
}

// ---------------------------------------------------------------------------
// Public methods

void Heap::begin_public(Caller caller) {
  entry_phi_ = registry_.phi();
  entry_n_ = n_;
  last_op_ = OpProfile{};
  last_op_.caller = caller;
}

void Heap::end_public() {
  if (options_.audit == AuditLevel::Off) return;
  if (last_op_.caller == Caller::DeleteMin) {
    // Budget uses the size the call started with.
    const std::uint32_t budget = 6 * audit::max_rank_bound(entry_n_) + 7;
    if (last_op_.total().total() > budget)
      throw InvariantViolation("delete_min: " + std::to_string(last_op_.total().total()) +
                               " reductions exceed the budget " + std::to_string(budget));
    if (!registry_.stack_empty(ViolationType::A) || !registry_.stack_empty(ViolationType::L))
      throw InvariantViolation("delete_min: stacks not drained");
  }
  if (n_ == 0) return;
  const audit::AuditReport report = audit::check_structure(*this);
  if (!report.ok()) {
    const audit::Finding& f = report.violations_found.front();
    throw InvariantViolation("audit: " + f.invariant + " at slot " + std::to_string(f.node.index) + ": " +
                             f.detail);
  }
  if (static_cast<double>(report.max_rank_observed) >= audit::rank_limit(n_))
    throw InvariantViolation("audit: rank " + std::to_string(report.max_rank_observed) + " breaks the bound for n = " +
                             std::to_string(n_));
  if (last_op_.caller == Caller::DeleteMin) {
    const std::size_t limit = audit::max_rank_bound(n_) + 1;
    if (report.a_nodes > limit || (options_.track_loss && report.total_loss > limit))
      throw InvariantViolation("delete_min: " + std::to_string(report.a_nodes) + " A nodes, total loss " +
                               std::to_string(report.total_loss) + ", limit " + std::to_string(limit));
  }
}

Handle Heap::insert(Key key) {
  begin_public(Caller::Insert);
  const Handle h = store_.allocate(key);
  list_insert_leftmost(store_, roots_, h.index);
  ++root_count_;
  ++structural_;
  ++n_;
  find_min_impl(Caller::Insert, options_.strategy);
  end_public();
  return h;
}

std::optional<Handle> Heap::find_min() {
  begin_public(Caller::FindMin);
  auto root = find_min_impl(Caller::FindMin, options_.strategy);
  end_public();
  return root;
}

std::optional<Heap::Extracted> Heap::delete_min() {
  if (roots_ == kNil) return std::nullopt;
  if (root_count_ != 1) throw ContractViolation("delete_min: heap is not consolidated");
  begin_public(Caller::DeleteMin);

  const Slot rho = roots_;
  NodeRecord& nr = store_[rho];
  const Extracted out{nr.key, store_.handle_of(rho)};
  roots_ = nr.child_head;
  nr.child_head = kNil;
  nr.in_list = false;
  nr.left = rho;
  nr.right = kNil;
  root_count_ = 0;
  structural_ += 2;
  registry_.set_violation_subtype(store_, rho, Subtype::N);

  // Phase 1 drains both stacks, so no live reference to rho survives it.
  find_min_impl(Caller::DeleteMin, Strategy::Amortized);
  store_.release(out.handle);
  --n_;
  end_public();
  return out;
}

void Heap::decrease_key(Handle h, Key key) {
  const Slot x = store_.resolve(h);
  if (!(key < store_[x].key)) throw KeyOrderError("decrease_key: new key must be strictly smaller");
  begin_public(Caller::DecreaseKey);
  cut_from_parent(x);
  list_insert_leftmost(store_, roots_, x);
  ++root_count_;
  ++structural_;
  store_[x].key = key;
  find_min_impl(Caller::DecreaseKey, options_.strategy);
  end_public();
}

}  // namespace dkheap
