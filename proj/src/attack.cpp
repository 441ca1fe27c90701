#include "restake/attack.hpp"

#include <algorithm>
#include <string>

#include "restake/errors.hpp"

namespace restake {

namespace {

// Coalition membership as a validator-index bitmap. Validates ids.
std::vector<char> coalition_mask(const RestakingGraph& graph, const ValidatorSet& coalition) {
  std::vector<char> in(graph.num_validators(), 0);
  for (NodeId v : coalition) in[graph.validator_index(v)] = 1;
  return in;
}

}  // namespace

bool can_attack(const RestakingGraph& graph, const StakeVector& stakes,
                const ValidatorSet& coalition, NodeId service) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  const std::vector<char> in = coalition_mask(graph, coalition);
  const std::size_t si = graph.service_index(service);

  Rat coalition_stake, total;
  for (std::uint32_t vi : graph.service_neighbors(si)) {
    total += sigma[vi];
    if (in[vi]) coalition_stake += sigma[vi];
  }
  if (!total.is_positive())
    throw DegenerateInputError("service " + std::to_string(service) +
                               " has zero total adjacent stake");
  // share > alpha, cross-multiplied to stay exact
  return coalition_stake > graph.service_at(si).alpha * total;
}

std::vector<NodeId> maximal_attack_set(const RestakingGraph& graph, const StakeVector& stakes,
                                       const ValidatorSet& coalition) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  const std::vector<char> in = coalition_mask(graph, coalition);

  std::vector<NodeId> attacked;
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    Rat coalition_stake, total;
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      total += sigma[vi];
      if (in[vi]) coalition_stake += sigma[vi];
    }
    if (!total.is_positive()) {
      // A valueless service with no stake behind it cannot be attacked in
      // any meaningful sense; value at stake with nothing behind it is 0/0.
      if (graph.service_at(si).value.is_positive())
        throw DegenerateInputError("service " + std::to_string(graph.service_at(si).id) +
                                   " has zero total adjacent stake");
      continue;
    }
    if (coalition_stake > graph.service_at(si).alpha * total)
      attacked.push_back(graph.service_at(si).id);
  }
  return attacked;
}

Rat attack_profit(const RestakingGraph& graph, const StakeVector& stakes,
                  const ValidatorSet& coalition) {
  Rat gain;
  for (NodeId s : maximal_attack_set(graph, stakes, coalition))
    gain += graph.service_at(graph.service_index(s)).value;

  Rat loss;
  std::vector<NodeId> sorted(coalition);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (NodeId v : sorted) {
    graph.validator_index(v);  // membership check
    loss += stakes.at(v);
  }
  return gain - loss;
}

}  // namespace restake
