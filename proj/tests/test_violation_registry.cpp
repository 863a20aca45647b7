#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dkheap/violation_registry.hpp"

using namespace dkheap;

namespace {

struct Fixture {
  NodeStore store;
  Registry reg;

  Slot node(Key k, std::uint32_t rank = 0) {
    const Slot s = store.allocate(k).index;
    store[s].rank = rank;
    return s;
  }
};

}  // namespace

TEST_CASE("type_of maps subtypes to violation types") {
  CHECK(type_of(Subtype::N) == ViolationType::N);
  CHECK(type_of(Subtype::A) == ViolationType::A);
  CHECK(type_of(Subtype::L1) == ViolationType::L);
  CHECK(type_of(Subtype::L2) == ViolationType::L);
}

TEST_CASE("an empty registry has zero potential and capacity 32") {
  Registry reg;
  CHECK(reg.phi() == PhiPair{0, 0});
  CHECK(reg.capacity() == 32);
  CHECK(reg.stack_empty(ViolationType::A));
  CHECK(reg.stack_empty(ViolationType::L));
}

TEST_CASE("N -> A pushes on C_A") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::A);
  CHECK(f.reg.phi() == PhiPair{2, 0});
  CHECK(f.store[x].location == Location::OnStack);
  CHECK(f.reg.stack(ViolationType::A).size() == 1);
  CHECK(f.store[x].loss == 0);
}

TEST_CASE("N -> L1 pushes on C_L with loss 1") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L1);
  CHECK(f.reg.phi() == PhiPair{0, 4});
  CHECK(f.store[x].loss == 1);
}

TEST_CASE("L1 -> L2 on the stack reweighs the live entry by loss") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L2);
  CHECK(f.store[x].loss == 2);
  CHECK(f.reg.stack(ViolationType::L).size() == 1);
  CHECK(f.reg.phi() == PhiPair{0, 8});
  f.reg.increment_loss(f.store, x);
  CHECK(f.store[x].loss == 3);
  CHECK(f.reg.phi() == PhiPair{0, 12});
  CHECK(f.reg.recompute(f.store) == f.reg.phi());
}

TEST_CASE("increment_loss rejects non-L2 nodes") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L1);
  CHECK_THROWS_AS(f.reg.increment_loss(f.store, x), ContractViolation);
}

TEST_CASE("L -> A leaves a stale unit entry on C_L") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L1);
  f.reg.set_violation_subtype(f.store, x, Subtype::L2);
  f.reg.increment_loss(f.store, x);  // live weight 3
  f.reg.set_violation_subtype(f.store, x, Subtype::A);
  CHECK(f.reg.phi() == PhiPair{2, 4});
  CHECK(f.reg.recompute(f.store) == f.reg.phi());
  CHECK_FALSE(f.reg.entry_is_live(f.store, ViolationType::L, 0));
  CHECK(f.reg.entry_is_live(f.store, ViolationType::A, 0));

  const PhiPair before = f.reg.phi();
  const auto item = f.reg.pop(f.store, ViolationType::L);
  REQUIRE(item);
  CHECK_FALSE(item->live);
  CHECK(f.reg.phi().l == before.l - 4);
  CHECK(f.store[x].location == Location::OnStack);  // still on C_A
}

TEST_CASE("A -> N takes the node out of its array slot") {
  Fixture f;
  const Slot x = f.node(1, 3);
  f.reg.set_violation_subtype(f.store, x, Subtype::A);
  const auto item = f.reg.pop(f.store, ViolationType::A);
  REQUIRE(item);
  CHECK(item->live);
  f.reg.park(f.store, ViolationType::A, x);
  CHECK(f.reg.slot_at(ViolationType::A, 3) == x);
  CHECK(f.reg.phi() == PhiPair{1, 0});
  f.reg.set_violation_subtype(f.store, x, Subtype::N);
  CHECK(f.reg.slot_at(ViolationType::A, 3) == kNil);
  CHECK(f.reg.phi() == PhiPair{0, 0});
  CHECK(f.store[x].location == Location::None);
}

TEST_CASE("stacks pop in LIFO order") {
  Fixture f;
  std::vector<Slot> xs;
  for (int i = 0; i < 5; ++i) {
    xs.push_back(f.node(i));
    f.reg.set_violation_subtype(f.store, xs.back(), Subtype::A);
  }
  for (int i = 4; i >= 0; --i) {
    const auto item = f.reg.pop(f.store, ViolationType::A);
    REQUIRE(item);
    CHECK(item->handle.index == xs[static_cast<std::size_t>(i)]);
    CHECK(item->live);
  }
  CHECK_FALSE(f.reg.pop(f.store, ViolationType::A));
  CHECK(f.reg.phi() == PhiPair{0, 0});
}

TEST_CASE("a stale C_A entry pops for -2") {
  Fixture f;
  const Slot x = f.node(1);
  f.reg.set_violation_subtype(f.store, x, Subtype::A);
  f.reg.set_violation_subtype(f.store, x, Subtype::N);
  CHECK(f.reg.phi() == PhiPair{2, 0});
  const auto item = f.reg.pop(f.store, ViolationType::A);
  REQUIRE(item);
  CHECK_FALSE(item->live);
  CHECK(f.reg.phi() == PhiPair{0, 0});
}

TEST_CASE("an entry for a released node is stale") {
  Fixture f;
  const Handle h = f.store.allocate(1);
  f.reg.set_violation_subtype(f.store, h.index, Subtype::A);
  f.store.release(h);
  f.store.allocate(2);  // recycles the slot
  CHECK_FALSE(f.reg.entry_is_live(f.store, ViolationType::A, 0));
}

TEST_CASE("park refuses an occupied slot") {
  Fixture f;
  const Slot a = f.node(1, 2);
  const Slot b = f.node(2, 2);
  f.reg.park(f.store, ViolationType::L, a);
  CHECK(f.reg.phi() == PhiPair{0, 3});
  CHECK_THROWS_AS(f.reg.park(f.store, ViolationType::L, b), ContractViolation);
  f.reg.clear_slot(f.store, ViolationType::L, 2);
  CHECK_THROWS_AS(f.reg.clear_slot(f.store, ViolationType::L, 2), ContractViolation);
}

TEST_CASE("ensure_capacity doubles past the requested rank") {
  Registry reg;
  reg.ensure_capacity(31);
  CHECK(reg.capacity() == 32);
  reg.ensure_capacity(32);
  CHECK(reg.capacity() == 64);
  reg.ensure_capacity(200);
  CHECK(reg.capacity() == 256);
  CHECK(reg.array(ViolationType::A).size() == reg.array(ViolationType::L).size());
}

TEST_CASE("parking at a high rank grows both arrays") {
  Fixture f;
  const Slot x = f.node(1, 40);
  f.reg.park(f.store, ViolationType::A, x);
  CHECK(f.reg.capacity() == 64);
  CHECK(f.reg.slot_at(ViolationType::A, 40) == x);
}

TEST_CASE("without loss weighting every entry weighs one") {
  NodeStore store;
  Registry reg(false);
  const Slot x = store.allocate(1).index;
  reg.set_violation_subtype(store, x, Subtype::L1);
  reg.set_violation_subtype(store, x, Subtype::L2);
  reg.increment_loss(store, x);
  CHECK(reg.phi() == PhiPair{0, 4});
  CHECK(reg.recompute(store) == reg.phi());
}

TEST_CASE("random registry operations keep the incremental potential exact") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    Fixture f;
    std::vector<Slot> nodes;
    for (int i = 0; i < 30; ++i) nodes.push_back(f.node(i, static_cast<std::uint32_t>(i)));
    for (int step = 0; step < 2000; ++step) {
      const Slot x = nodes[rng() % nodes.size()];
      NodeRecord& n = f.store[x];
      switch (rng() % 6) {
        case 0: f.reg.set_violation_subtype(f.store, x, Subtype::N); break;
        case 1: f.reg.set_violation_subtype(f.store, x, Subtype::A); break;
        case 2:
          if (n.subtype == Subtype::N) f.reg.set_violation_subtype(f.store, x, Subtype::L1);
          else if (n.subtype == Subtype::L1) f.reg.set_violation_subtype(f.store, x, Subtype::L2);
          else if (n.subtype == Subtype::L2) f.reg.increment_loss(f.store, x);
          break;
        case 3: {
          const ViolationType t = rng() % 2 ? ViolationType::A : ViolationType::L;
          const auto item = f.reg.pop(f.store, t);
          if (item && item->live) {
            const NodeRecord& p = f.store[item->handle.index];
            if (p.subtype != Subtype::L2 && f.reg.slot_at(t, p.rank) == kNil)
              f.reg.park(f.store, t, item->handle.index);
          }
          break;
        }
        default: break;
      }
      REQUIRE(f.reg.recompute(f.store) == f.reg.phi());
      CHECK(f.reg.phi().a >= 0);
      CHECK(f.reg.phi().l >= 0);
    }
  }
}
