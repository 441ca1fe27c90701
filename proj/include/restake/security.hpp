#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "restake/attack.hpp"
#include "restake/model.hpp"

namespace restake {

inline constexpr std::size_t kDefaultEnumerationCap = 24;

struct AttackWitness {
  ValidatorSet coalition;        // sorted validator ids
  std::vector<NodeId> attacked;  // M(coalition), sorted service ids
  Rat profit;                    // strictly positive
};

struct SecurityVerdict {
  bool secure = true;
  std::optional<AttackWitness> witness;  // present iff insecure
};

struct SecurityOptions {
  /// Hard limit on the validator count for exact enumeration.
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  /// Default: stop at the first profitable coalition in enumeration order.
  /// Exhaustive: return the maximum-profit coalition (earliest on ties).
  bool exhaustive = false;
  /// Allow the engine to split the search across OpenMP threads. The verdict
  /// and witness are identical either way.
  bool parallel = true;
};

/// Exact security decision: secure iff no coalition has a strictly positive
/// attack profit. Coalitions are enumerated over validators ordered by
/// descending stake (ties by ascending id), subsets of the tail first, with
/// sound profit-bound pruning. The witness of an insecure graph is the first
/// profitable coalition in that order (or the most profitable under
/// `exhaustive`), independent of thread count.
/// Throws CapacityError above the enumeration cap.
SecurityVerdict is_secure_exact(const RestakingGraph& graph, const StakeVector& stakes,
                                const SecurityOptions& options = {});

/// Serial reference: sweeps every coalition with no pruning, via a Gray-code
/// walk. Kept deliberately independent of the pruned engine; used by the
/// equivalence tests and the benchmark. Same witness contract.
SecurityVerdict is_secure_reference(const RestakingGraph& graph, const StakeVector& stakes,
                                    std::size_t enumeration_cap = 20);

struct SufficiencyReport {
  bool holds = true;
  /// Per-validator slack: stake minus the required allocation total.
  /// Negative slack marks a violated inequality.
  std::vector<std::pair<NodeId, Rat>> slacks;
};

/// The linear-time sufficient condition for security: for every validator,
/// sigma_v >= sum over adjacent services of (sigma_v / total_s)(pi_s / alpha_s).
/// Throws DegenerateInputError if a non-isolated service has zero total stake.
SufficiencyReport satisfies_sufficient_condition(const RestakingGraph& graph,
                                                 const StakeVector& stakes);

struct PosAttack {
  std::vector<NodeId> coalition;  // sorted validator ids
  Rat stake;                      // total allocated stake of the coalition
};

struct PosVerdict {
  bool secure = true;
  std::optional<PosAttack> attack;  // present iff insecure
};

/// Security of a single star protocol: insecure iff some subset holds a
/// share strictly above alpha while its allocated stake is strictly below
/// the service value.
PosVerdict pos_is_secure(const PoSInstance& pos,
                         std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Among subsets whose share strictly exceeds alpha, one minimizing total
/// allocated stake (the earliest in enumeration order on ties). Absent when
/// no subset can attack.
std::optional<PosAttack> min_attacking_subset(const PoSInstance& pos,
                                              std::size_t enumeration_cap = kDefaultEnumerationCap);

}  // namespace restake
