#pragma once

#include <vector>

#include "restake/model.hpp"

namespace restake {

/// Coalition of validators, given by id. Order and duplicates are
/// normalized internally.
using ValidatorSet = std::vector<NodeId>;

/// Whether coalition W can attack `service`: the coalition's share of the
/// total stake adjacent to the service strictly exceeds alpha. Compared
/// exactly; equality means "cannot attack".
/// Throws DegenerateInputError when the service has zero total stake.
bool can_attack(const RestakingGraph& graph, const StakeVector& stakes,
                const ValidatorSet& coalition, NodeId service);

/// M(W): every service the coalition can attack. Services with zero value
/// and zero adjacent stake are treated as not attackable; zero adjacent
/// stake behind a positive value is a degenerate input.
std::vector<NodeId> maximal_attack_set(const RestakingGraph& graph, const StakeVector& stakes,
                                       const ValidatorSet& coalition);

/// Value of M(W) minus the coalition's stake. Positive means profitable.
Rat attack_profit(const RestakingGraph& graph, const StakeVector& stakes,
                  const ValidatorSet& coalition);

}  // namespace restake
