#include <algorithm>
#include <string>

#include "restake/errors.hpp"
#include "restake/security.hpp"

namespace restake {

namespace {

// Minimum-stake attacking subset, enumerated in ascending-mask order over
// the allocation list (entry j carries bit j), exclude-first. A branch whose
// stake already reaches the best total cannot strictly improve and is cut;
// that keeps the earliest minimizer.
struct MinSubsetSearch {
  const std::vector<std::pair<NodeId, Rat>>& alloc;
  Rat threshold;  // alpha * total

  bool found = false;
  Rat best_stake{};
  std::vector<std::uint32_t> best_members{};
  std::vector<std::uint32_t> members{};
  Rat stake{};

  void dfs(int bit) {
    if (found && stake >= best_stake) return;
    if (bit < 0) {
      if (stake > threshold) {
        found = true;
        best_stake = stake;
        best_members = members;
      }
      return;
    }
    dfs(bit - 1);
    stake += alloc[static_cast<std::size_t>(bit)].second;
    members.push_back(static_cast<std::uint32_t>(bit));
    dfs(bit - 1);
    members.pop_back();
    stake -= alloc[static_cast<std::size_t>(bit)].second;
  }
};

}  // namespace

std::optional<PosAttack> min_attacking_subset(const PoSInstance& pos,
                                              std::size_t enumeration_cap) {
  const auto& alloc = pos.allocations();
  if (alloc.size() > enumeration_cap)
    throw CapacityError("PoS subset enumeration over " + std::to_string(alloc.size()) +
                        " validators exceeds the cap of " + std::to_string(enumeration_cap));

  const Rat total = pos.total();
  if (!total.is_positive() && pos.value().is_positive())
    throw DegenerateInputError("PoS instance has positive value but zero total allocation");

  MinSubsetSearch search{alloc, pos.alpha() * total};
  search.dfs(static_cast<int>(alloc.size()) - 1);
  if (!search.found) return std::nullopt;

  PosAttack attack;
  for (std::uint32_t j : search.best_members) attack.coalition.push_back(alloc[j].first);
  std::sort(attack.coalition.begin(), attack.coalition.end());
  attack.stake = search.best_stake;
  return attack;
}

PosVerdict pos_is_secure(const PoSInstance& pos, std::size_t enumeration_cap) {
  const std::optional<PosAttack> attack = min_attacking_subset(pos, enumeration_cap);
  if (!attack) return {true, std::nullopt};
  if (attack->stake >= pos.value()) return {true, std::nullopt};  // strict loss rule
  return {false, attack};
}

}  // namespace restake
