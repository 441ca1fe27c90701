#pragma once

#include <utility>
#include <vector>

#include "restake/model.hpp"

namespace restake::testing {

// Complete bipartite with unit stakes and the attack threshold at half the
// validator count; secure with zero slack, so subset search cannot prune
// early. The worst case for the enumeration engines.
inline std::pair<RestakingGraph, StakeVector> balanced_hard(std::uint32_t n) {
  const std::uint32_t k = n / 2;
  std::vector<ServiceSpec> services;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId s = 1; s <= k; ++s) {
    services.push_back({s, Rat(1), Rat(2 * static_cast<long>(k) - 1, 2 * static_cast<long>(n))});
    for (NodeId v = 1; v <= n; ++v) edges.emplace_back(s, v);
  }
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (NodeId v = 1; v <= n; ++v) {
    validators.push_back(v);
    stakes.emplace_back(v, Rat(1));
  }
  return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
          StakeVector(std::move(stakes))};
}

// One service, n validators, every validator staked on it.
inline std::pair<RestakingGraph, StakeVector> single_service(Rat value, Rat alpha,
                                                             std::vector<Rat> stakes) {
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> entries;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    const NodeId v = static_cast<NodeId>(i + 1);
    validators.push_back(v);
    entries.emplace_back(v, stakes[i]);
    edges.emplace_back(1, v);
  }
  return {RestakingGraph::create({{1, std::move(value), std::move(alpha)}}, std::move(validators),
                                 std::move(edges)),
          StakeVector(std::move(entries))};
}

}  // namespace restake::testing
