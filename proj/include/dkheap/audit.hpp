#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dkheap/heap.hpp"

namespace dkheap::audit {

struct Finding {
  std::string invariant;
  Handle node;
  std::string detail;
};

struct AuditReport {
  std::vector<Finding> violations_found;
  std::uint32_t max_rank_observed = 0;
  PhiPair phi_recomputed;
  // Violation sizes: subtype-A nodes (roots included) and summed loss.
  std::size_t a_nodes = 0;
  std::uint64_t total_loss = 0;

  [[nodiscard]] bool ok() const noexcept { return violations_found.empty(); }
  [[nodiscard]] std::size_t count(std::string_view invariant) const noexcept;
};

/// Full read-only audit of a quiescent heap at a public-operation boundary:
/// heap order, sibling-list shape, rank = number of non-A children,
/// subtype/loss consistency, root subtypes, registry slots and location
/// flags, potential counters, reachability of every live node.
[[nodiscard]] AuditReport check_structure(const Heap& heap);

/// Phi_A and Phi_L by full scan of arrays and stacks.
[[nodiscard]] PhiPair recompute_phi(const Heap& heap);

/// 4 + 1.2 log2(n); every rank must stay strictly below it.
[[nodiscard]] double rank_limit(std::size_t n);
/// floor(4 + 1.2 log2(n)), the R(n) used by the DeleteMin budgets.
[[nodiscard]] std::uint32_t max_rank_bound(std::size_t n);

/// True iff every live rank < rank_limit(n). Requires n >= 1.
[[nodiscard]] bool check_rank_bound(const Heap& heap);

/// Fewest nodes of a binomial tree of rank `rank` after at most `loss`
/// cuts that keep the root's children: the largest grandchild subtrees are
/// cut first. Throws std::out_of_range for rank > 62.
[[nodiscard]] std::uint64_t minimal_tree_size(int rank, std::uint64_t loss);

/// True iff 2^((R-4)/1.2) <= minimal_tree_size(R, R+1) for R in [1, r_max].
[[nodiscard]] bool rank_bound_certificate(int r_max);

}  // namespace dkheap::audit
