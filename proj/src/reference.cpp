#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>

#include "restake/errors.hpp"
#include "restake/security.hpp"

namespace restake {

// Unpruned exact check. Walks all 2^n coalitions with a Gray-code sweep so
// each step toggles a single validator; no bound is ever consulted. The
// coalition ordering key is the canonical mask (validators sorted by
// descending stake, ascending id on ties; position i carries bit n-1-i), so
// the reported witness is the first profitable coalition in the same order
// the pruned engine uses.
SecurityVerdict is_secure_reference(const RestakingGraph& graph, const StakeVector& stakes,
                                    std::size_t enumeration_cap) {
  const std::size_t n = graph.num_validators();
  if (n > enumeration_cap)
    throw CapacityError("reference security sweep over " + std::to_string(n) +
                        " validators exceeds its cap of " + std::to_string(enumeration_cap));

  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (sigma[a] != sigma[b]) return sigma[a] > sigma[b];
    return graph.validator_at(a) < graph.validator_at(b);
  });
  std::vector<std::uint32_t> pos_of_index(n);
  for (std::uint32_t p = 0; p < n; ++p) pos_of_index[order[p]] = p;

  // Tracked services: positive value, positive adjacent stake.
  std::vector<Rat> threshold, value;
  std::vector<std::vector<std::uint32_t>> tracked_of_pos(n);
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    const ServiceSpec& s = graph.service_at(si);
    Rat total;
    for (std::uint32_t vi : graph.service_neighbors(si)) total += sigma[vi];
    if (!total.is_positive()) {
      if (s.value.is_positive())
        throw DegenerateInputError("service " + std::to_string(s.id) +
                                   " has zero total adjacent stake");
      continue;
    }
    if (!s.value.is_positive()) continue;
    const std::uint32_t t = static_cast<std::uint32_t>(threshold.size());
    threshold.push_back(s.alpha * total);
    value.push_back(s.value);
    for (std::uint32_t vi : graph.service_neighbors(si))
      tracked_of_pos[pos_of_index[vi]].push_back(t);
  }

  std::vector<Rat> in_w(threshold.size());
  std::vector<char> attacks(threshold.size(), 0);
  Rat w_value, sigma_w;

  bool found = false;
  std::uint64_t best_mask = 0;
  Rat best_profit;

  const std::uint64_t count = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  for (std::uint64_t step = 1; step < count; ++step) {
    const int bit = std::countr_zero(step);
    const std::uint64_t flipped = std::uint64_t{1} << bit;
    gray ^= flipped;
    const std::size_t pos = n - 1 - static_cast<std::size_t>(bit);
    const bool now_in = (gray & flipped) != 0;

    if (now_in)
      sigma_w += sigma[order[pos]];
    else
      sigma_w -= sigma[order[pos]];
    for (std::uint32_t t : tracked_of_pos[pos]) {
      if (now_in)
        in_w[t] += sigma[order[pos]];
      else
        in_w[t] -= sigma[order[pos]];
      const bool hot = in_w[t] > threshold[t];
      if (hot && !attacks[t]) {
        attacks[t] = 1;
        w_value += value[t];
      } else if (!hot && attacks[t]) {
        attacks[t] = 0;
        w_value -= value[t];
      }
    }

    if (w_value > sigma_w && (!found || gray < best_mask)) {
      found = true;
      best_mask = gray;
      best_profit = w_value - sigma_w;
    }
  }

  if (!found) return {true, std::nullopt};

  ValidatorSet coalition;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (best_mask & (std::uint64_t{1} << (n - 1 - pos)))
      coalition.push_back(graph.validator_at(order[pos]));
  }
  std::sort(coalition.begin(), coalition.end());

  AttackWitness w;
  w.coalition = coalition;
  w.attacked = maximal_attack_set(graph, stakes, coalition);
  w.profit = best_profit;
  return {false, std::move(w)};
}

}  // namespace restake
