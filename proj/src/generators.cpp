#include "restake/generators.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "restake/errors.hpp"
#include "restake/security.hpp"

namespace restake {

namespace {

// Raw draws from the engine, reduced by modulo. std::uniform_int_distribution
// is not bit-stable across standard libraries; this is.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

Rat draw_rat(std::mt19937_64& rng, long max_value, long max_denominator) {
  const long den = 1 + static_cast<long>(below(rng, static_cast<std::uint64_t>(max_denominator)));
  const long num = 1 + static_cast<long>(below(rng, static_cast<std::uint64_t>(max_value * den)));
  return Rat(num, den);
}

// Smallest k with sigma_v * 2^k >= required_v for every validator. The
// required amounts are invariant under uniform scaling (shares cancel), so
// this terminates.
std::uint32_t scale_exponent_for_sufficiency(const RestakingGraph& graph,
                                             const StakeVector& stakes) {
  const SufficiencyReport report = satisfies_sufficient_condition(graph, stakes);
  std::uint32_t k = 0;
  for (const auto& [vid, slack] : report.slacks) {
    if (!slack.is_negative()) continue;
    const Rat sigma = stakes.at(vid);
    const Rat required = sigma - slack;
    Rat scaled = sigma;
    std::uint32_t kv = 0;
    while (scaled < required) {
      scaled += scaled;
      ++kv;
    }
    k = std::max(k, kv);
  }
  return k;
}

StakeVector scale_stakes(const StakeVector& stakes, std::uint32_t exponent) {
  Rat factor(1);
  for (std::uint32_t i = 0; i < exponent; ++i) factor += factor;
  std::vector<std::pair<NodeId, Rat>> scaled;
  for (const auto& [vid, stake] : stakes.entries()) scaled.emplace_back(vid, stake * factor);
  return StakeVector(std::move(scaled));
}

}  // namespace

std::pair<RestakingGraph, StakeVector> gen_rs_lower_family(std::uint32_t m) {
  if (m < 1) throw InputError("family generator requires m >= 1");
  const long lm = static_cast<long>(m);

  std::vector<ServiceSpec> services;
  for (std::uint32_t s = 1; s <= m; ++s)
    services.push_back({s, Rat(2), Rat(1, 2 * lm + 1)});

  const NodeId heavy = m * m + 1;
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (NodeId v = 1; v <= heavy; ++v) {
    validators.push_back(v);
    stakes.emplace_back(v, v == heavy ? Rat(2 * lm) : Rat(1, lm));
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::uint32_t s = 1; s <= m; ++s) {
    edges.emplace_back(s, heavy);
    for (std::uint32_t j = 1; j <= m; ++j) edges.emplace_back(s, (s - 1) * m + j);
  }
  return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
          StakeVector(std::move(stakes))};
}

std::vector<PoSProtocol> gen_poss_lower_family(std::uint32_t m) {
  if (m < 1) throw InputError("family generator requires m >= 1");
  const long lm = static_cast<long>(m);
  std::vector<PoSProtocol> protocols;
  for (std::uint32_t s = 1; s <= m; ++s) {
    std::vector<std::pair<NodeId, Rat>> alloc = {{s, Rat(1)}, {m + 1, Rat(1, lm)}};
    protocols.push_back({s, PoSInstance::create(Rat(1), Rat(1, lm + 1), std::move(alloc))});
  }
  return protocols;
}

GeneratedInstance gen_random(const RandomSpec& spec) {
  if (spec.num_services < 1) throw InputError("random generator requires at least one service");
  if (spec.num_validators < 1) throw InputError("random generator requires at least one validator");
  if (spec.alphas.empty()) throw InputError("random generator requires alpha choices");
  for (const Rat& a : spec.alphas)
    if (!a.is_positive() || a > Rat(1))
      throw InputError("alpha choice " + a.str() + " outside (0, 1]");

  auto build = [&](std::uint32_t attempt) -> std::pair<RestakingGraph, StakeVector> {
    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + attempt + 1);
    const std::uint32_t m = spec.num_services;
    const std::uint32_t n = spec.num_validators;

    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::vector<char>> has(m + 1, std::vector<char>(n + 1, 0));
    for (NodeId s = 1; s <= m; ++s)
      for (NodeId v = 1; v <= n; ++v)
        if (below(rng, 100) < spec.density_percent) has[s][v] = 1;
    // keep every service backed and every validator placeable
    for (NodeId s = 1; s <= m; ++s) {
      bool any = false;
      for (NodeId v = 1; v <= n; ++v) any = any || has[s][v];
      if (!any) has[s][1 + below(rng, n)] = 1;
    }
    for (NodeId v = 1; v <= n; ++v) {
      bool any = false;
      for (NodeId s = 1; s <= m; ++s) any = any || has[s][v];
      if (!any) has[1 + below(rng, m)][v] = 1;
    }
    for (NodeId s = 1; s <= m; ++s)
      for (NodeId v = 1; v <= n; ++v)
        if (has[s][v]) edges.emplace_back(s, v);

    std::vector<ServiceSpec> services;
    for (NodeId s = 1; s <= m; ++s) {
      const Rat value = draw_rat(rng, spec.value_max, spec.max_denominator);
      const Rat alpha = spec.alphas[below(rng, spec.alphas.size())];
      services.push_back({s, value, alpha});
    }
    std::vector<NodeId> validators;
    std::vector<std::pair<NodeId, Rat>> stakes;
    for (NodeId v = 1; v <= n; ++v) {
      validators.push_back(v);
      stakes.emplace_back(v, draw_rat(rng, spec.stake_max, spec.max_denominator));
    }
    return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
            StakeVector(std::move(stakes))};
  };

  if (spec.force == ForceMode::None) {
    auto [graph, stakes] = build(0);
    return {std::move(graph), std::move(stakes), 1, 0};
  }

  if (spec.force == ForceMode::Sufficient) {
    auto [graph, stakes] = build(0);
    const std::uint32_t k = scale_exponent_for_sufficiency(graph, stakes);
    return {std::move(graph), k > 0 ? scale_stakes(stakes, k) : std::move(stakes), 1, k};
  }

  // ForceMode::Secure: rejection-sample, then fall back to scaling.
  for (std::uint32_t attempt = 0; attempt < spec.max_retries; ++attempt) {
    auto [graph, stakes] = build(attempt);
    if (is_secure_exact(graph, stakes).secure)
      return {std::move(graph), std::move(stakes), attempt + 1, 0};
  }
  auto [graph, stakes] = build(spec.max_retries);
  const std::uint32_t k = scale_exponent_for_sufficiency(graph, stakes);
  StakeVector scaled = k > 0 ? scale_stakes(stakes, k) : stakes;
  return {std::move(graph), std::move(scaled), spec.max_retries + 1, k};
}

std::vector<PoSProtocol> gen_random_pos_set(const RandomPosSpec& spec) {
  if (spec.num_services < 1 || spec.num_validators < 1)
    throw InputError("random protocol set requires at least one service and one validator");
  std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + 0x517cc1b727220a95ULL);

  std::vector<PoSProtocol> protocols;
  for (NodeId s = 1; s <= spec.num_services; ++s) {
    std::vector<NodeId> members;
    for (NodeId v = 1; v <= spec.num_validators; ++v)
      if (below(rng, 100) < spec.participation_percent) members.push_back(v);
    if (members.empty()) members.push_back(1 + static_cast<NodeId>(below(rng, spec.num_validators)));

    const Rat value = draw_rat(rng, spec.value_max, spec.max_denominator);
    const Rat alpha = spec.alphas[below(rng, spec.alphas.size())];
    std::vector<std::pair<NodeId, Rat>> alloc;
    for (NodeId v : members) alloc.emplace_back(v, draw_rat(rng, spec.stake_max, spec.max_denominator));

    PoSInstance instance = PoSInstance::create(value, alpha, std::move(alloc));
    // scale the cheapest attacking subset out of profitability
    if (auto attack = min_attacking_subset(instance); attack && attack->stake < value) {
      Rat scaled = attack->stake;
      Rat factor(1);
      while (scaled < value) {
        scaled += scaled;
        factor += factor;
      }
      std::vector<std::pair<NodeId, Rat>> rescaled;
      for (const auto& [vid, amount] : instance.allocations())
        rescaled.emplace_back(vid, amount * factor);
      instance = PoSInstance::create(value, alpha, std::move(rescaled));
    }
    protocols.push_back({s, std::move(instance)});
  }
  return protocols;
}

}  // namespace restake
