#include "restake/savings.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "restake/errors.hpp"
#include "restake/generators.hpp"

namespace restake {

bool AnalyticCap::admits(const Rat& ratio) const {
  if (kind == Kind::Rational) return ratio <= value;
  // ratio <= 2*sqrt(n) - 1  <=>  (ratio + 1)^2 <= 4n, both sides nonnegative
  const Rat shifted = ratio + Rat(1);
  if (shifted.is_negative()) return true;
  return shifted * shifted <= Rat(4 * static_cast<long>(n));
}

std::string AnalyticCap::str() const {
  if (kind == Kind::Rational) return value.str();
  return "2*sqrt(" + std::to_string(n) + ")-1";
}

namespace {

MethodBound make_bound(std::string method, Rat extra, const Rat& total,
                       std::optional<AnalyticCap> cap) {
  MethodBound b;
  b.method = std::move(method);
  b.ratio = extra / total;
  b.extra = std::move(extra);
  b.cap = std::move(cap);
  if (b.cap) b.cap_holds = b.cap->admits(b.ratio);
  return b;
}

void require_verified(const RestakingGraph& graph, const AugmentedDivision& division,
                      std::size_t enumeration_cap) {
  const DivisionCheck check = verify_division(graph, division.augmented, division.plan,
                                              enumeration_cap);
  if (!check.ok) {
    std::string bad;
    for (const auto& r : check.services)
      if (!r.secure) bad += " " + std::to_string(r.service);
    throw std::logic_error(division.method + " construction failed verification on services:" + bad);
  }
}

}  // namespace

RSReport rs_upper_bounds(const RestakingGraph& graph, const StakeVector& stakes,
                         const RSOptions& options) {
  const Rat total = stakes.total();
  if (!total.is_positive()) throw DegenerateInputError("total stake is zero");

  RSReport report;
  report.total_stake = total;

  if (graph.num_validators() <= options.enumeration_cap) {
    const SecurityVerdict verdict = is_secure_exact(graph, stakes, {options.enumeration_cap});
    if (!verdict.secure)
      throw InsecureInputError(
          "restaking savings are defined for secure graphs only; found a profitable coalition "
          "of " + std::to_string(verdict.witness->coalition.size()) + " validator(s) with profit " +
              verdict.witness->profit.str(),
          verdict.witness->coalition);
  } else {
    report.notes.push_back("security not verified (above enumeration cap); bounds assume it");
  }

  const SufficiencyReport sufficiency = satisfies_sufficient_condition(graph, stakes);
  if (sufficiency.holds) {
    DivisionPlan plan = proportional_division(graph, stakes);
    DivisionCheck check = verify_division(graph, stakes, plan, options.enumeration_cap);
    if (!check.ok) throw std::logic_error("proportional division failed verification");
    report.bounds.push_back(make_bound("proportional", Rat(0), total,
                                       AnalyticCap::rational(Rat(0))));
  } else {
    report.notes.push_back("sufficient condition fails; proportional division not applicable");
  }

  {
    AugmentedDivision d = construct_maxdeg_augmentation(graph, stakes);
    require_verified(graph, d, options.enumeration_cap);
    report.bounds.push_back(make_bound(
        d.method, d.extra, total,
        AnalyticCap::rational(Rat(static_cast<long>(graph.max_service_degree())))));
  }
  {
    CoverResult cover;
    if (graph.num_services() <= options.cover_service_cap) {
      cover = compute_cover_K(graph, CoverMode::Exact, options.cover_service_cap);
    } else {
      cover = compute_cover_K(graph, CoverMode::Greedy, options.cover_service_cap);
      report.notes.push_back("cover computed greedily (service count above the exact cap)");
    }
    AugmentedDivision d = construct_cover_augmentation(graph, stakes, cover);
    require_verified(graph, d, options.enumeration_cap);
    report.bounds.push_back(make_bound(
        d.method, d.extra, total,
        AnalyticCap::rational(Rat(static_cast<long>(cover.incidence)))));
  }
  {
    AugmentedDivision d = construct_sqrt_augmentation(graph, stakes);
    require_verified(graph, d, options.enumeration_cap);
    report.bounds.push_back(make_bound(
        d.method, d.extra, total,
        AnalyticCap::two_sqrt_n_minus_one(graph.num_validators())));
  }
  {
    AugmentedDivision d = construct_alpha_augmentation(graph, stakes);
    require_verified(graph, d, options.enumeration_cap);
    std::optional<AnalyticCap> cap;
    if (graph.num_services() >= 2) {
      std::vector<Rat> alphas;
      for (const ServiceSpec& s : graph.services()) alphas.push_back(s.alpha);
      std::sort(alphas.begin(), alphas.end());
      cap = AnalyticCap::rational(Rat(1) / alphas[1]);
    }
    report.bounds.push_back(make_bound(d.method, d.extra, total, std::move(cap)));
  }

  for (const MethodBound& b : report.bounds) {
    if (!report.best_upper || b.ratio < *report.best_upper) report.best_upper = b.ratio;
  }

  if (options.family_m && *options.family_m >= 2)
    report.family_lower = rs_family_lower_bound(*options.family_m);

  if (options.run_oracle) {
    Rat budget = options.oracle_budget.value_or([&] {
      for (const MethodBound& b : report.bounds)
        if (b.method == "maxdeg") return b.extra;
      return total;  // unreachable; maxdeg always runs
    }());
    report.oracle_value = rs_exact_oracle(graph, stakes, options.oracle_granularity, budget);
  }
  return report;
}

Rat rs_family_lower_bound(std::uint32_t m) {
  if (m < 2) throw InputError("family lower bound requires m >= 2");
  const long lm = static_cast<long>(m);
  return Rat(lm * lm - 2 * lm, 3 * lm);
}

AugmentedDivision rs_family_upper_certificate(std::uint32_t m) {
  if (m < 1) throw InputError("family certificate requires m >= 1");
  auto [graph, stakes] = gen_rs_lower_family(m);
  const long lm = static_cast<long>(m);
  const NodeId heavy = static_cast<NodeId>(m) * m + 1;

  AugmentedDivision out;
  out.method = "family-certificate";
  out.extra = Rat(2 * lm * lm - lm);

  std::vector<std::pair<NodeId, Rat>> augmented;
  for (const auto& [vid, stake] : stakes.entries())
    augmented.emplace_back(vid, vid == heavy ? stake + out.extra : stake);
  out.augmented = StakeVector(std::move(augmented));

  // small validators have a single service each; the heavy one splits evenly
  for (NodeId vid : graph.validators()) {
    std::map<NodeId, Rat> split;
    if (vid == heavy) {
      for (const ServiceSpec& s : graph.services()) split[s.id] = Rat(2 * lm + 1);
    } else {
      split[graph.validator_neighborhood(vid).front()] = stakes.at(vid);
    }
    out.plan.splits[vid] = std::move(split);
  }
  return out;
}

std::pair<RestakingGraph, StakeVector> aggregate_pos(const std::vector<PoSProtocol>& protocols) {
  std::set<NodeId> seen_services;
  for (const PoSProtocol& p : protocols) {
    if (!seen_services.insert(p.service).second)
      throw InputError("duplicate protocol for service " + std::to_string(p.service));
    const PosVerdict verdict = pos_is_secure(p.instance);
    if (!verdict.secure)
      throw InsecureInputError(
          "protocol for service " + std::to_string(p.service) +
              " is insecure; attacking subset holds stake " + verdict.attack->stake.str() +
              " below the service value " + p.instance.value().str(),
          verdict.attack->coalition);
  }

  std::vector<ServiceSpec> services;
  std::map<NodeId, Rat> stake_sum;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const PoSProtocol& p : protocols) {
    services.push_back({p.service, p.instance.value(), p.instance.alpha()});
    for (const auto& [vid, amount] : p.instance.allocations()) {
      edges.emplace_back(p.service, vid);  // a declared zero still creates the edge
      stake_sum[vid] += amount;
    }
  }
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (const auto& [vid, sum] : stake_sum) {
    validators.push_back(vid);
    stakes.emplace_back(vid, sum);
  }
  return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
          StakeVector(std::move(stakes))};
}

PossAugmentation poss_upper_construction(const RestakingGraph& graph, const StakeVector& stakes) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  std::vector<Rat> augmented(sigma);
  Rat extra;
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    const Rat& pi = graph.service_at(si).value;
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      augmented[vi] += pi;
      extra += pi;
    }
  }
  std::vector<std::pair<NodeId, Rat>> entries;
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi)
    entries.emplace_back(graph.validator_at(vi), augmented[vi]);
  return {StakeVector(std::move(entries)), std::move(extra)};
}

bool check_stake_value_inequality(const RestakingGraph& graph, const StakeVector& stakes) {
  return stakes.total() >= graph.total_value();
}

PoSSReport poss_analysis(const RestakingGraph& graph, const StakeVector& stakes,
                         const PoSSOptions& options) {
  const Rat total = stakes.total();
  if (!total.is_positive()) throw DegenerateInputError("total stake is zero");

  PoSSReport report;
  report.total_stake = total;
  report.total_value = graph.total_value();
  report.lemma_holds = check_stake_value_inequality(graph, stakes);

  if (graph.num_validators() <= options.enumeration_cap) {
    SecurityVerdict verdict = is_secure_exact(graph, stakes, {options.enumeration_cap});
    report.aggregated_secure = verdict.secure;
    report.witness = std::move(verdict.witness);
  } else {
    report.notes.push_back("aggregate security not decided (above enumeration cap)");
  }

  PossAugmentation aug = poss_upper_construction(graph, stakes);
  report.construction_extra = aug.extra;
  report.construction_ratio = aug.extra / total;
  report.construction_cap =
      AnalyticCap::rational(Rat(static_cast<long>(graph.max_service_degree())));
  if (graph.num_validators() <= options.enumeration_cap)
    report.construction_verified = is_secure_exact(graph, aug.stakes, {options.enumeration_cap}).secure;

  if (options.run_oracle) {
    const Rat budget = options.oracle_budget.value_or(aug.extra);
    report.oracle_value =
        poss_exact_oracle(graph, stakes, options.oracle_granularity, budget);
    if (report.oracle_value) report.oracle_extra = *report.oracle_value * total;
  }
  return report;
}

}  // namespace restake
