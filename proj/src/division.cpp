#include "restake/division.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "restake/errors.hpp"

namespace restake {

namespace {

std::string id_str(NodeId id) { return std::to_string(id); }

// Split map with explicit zeros for every neighbor service of `vidx`.
std::map<NodeId, Rat> zero_split(const RestakingGraph& graph, std::size_t vidx) {
  std::map<NodeId, Rat> split;
  for (std::uint32_t si : graph.validator_neighbors(vidx)) split[graph.service_at(si).id] = Rat(0);
  return split;
}

void require_not_stranded(const RestakingGraph& graph, std::size_t vidx, const Rat& stake,
                          const std::string& method) {
  if (graph.validator_neighbors(vidx).empty() && stake.is_positive())
    throw InputError(method + ": validator " + id_str(graph.validator_at(vidx)) +
                     " has positive stake but no adjacent service; no division can place it");
}

}  // namespace

DivisionCheck verify_division(const RestakingGraph& graph, const StakeVector& augmented,
                              const DivisionPlan& plan, std::size_t enumeration_cap) {
  const std::vector<Rat> sigma = aligned_stakes(graph, augmented);

  std::vector<std::string> issues;
  // service index -> (validator id -> allocated amount)
  std::vector<std::vector<std::pair<NodeId, Rat>>> per_service(graph.num_services());

  for (const auto& [vid, split] : plan.splits) {
    if (!graph.has_validator(vid)) {
      issues.push_back("plan names unknown validator " + id_str(vid));
      continue;
    }
    const std::size_t vi = graph.validator_index(vid);
    const auto& neighbors = graph.validator_neighbors(vi);
    Rat sum;
    for (const auto& [sid, amount] : split) {
      if (!graph.has_service(sid)) {
        issues.push_back("validator " + id_str(vid) + " allocates to unknown service " +
                         id_str(sid));
        continue;
      }
      const std::uint32_t si = static_cast<std::uint32_t>(graph.service_index(sid));
      if (!std::binary_search(neighbors.begin(), neighbors.end(), si)) {
        issues.push_back("validator " + id_str(vid) + " allocates outside its neighborhood, to service " +
                         id_str(sid));
        continue;
      }
      if (amount.is_negative()) {
        issues.push_back("validator " + id_str(vid) + " allocates a negative amount to service " +
                         id_str(sid));
        continue;
      }
      sum += amount;
      per_service[si].emplace_back(vid, amount);
    }
    if (sum != sigma[vi])
      issues.push_back("validator " + id_str(vid) + ": split sums to " + sum.str() +
                       ", stake is " + sigma[vi].str());
  }
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    const NodeId vid = graph.validator_at(vi);
    if (!plan.splits.count(vid) && sigma[vi].is_positive())
      issues.push_back("validator " + id_str(vid) + " has stake " + sigma[vi].str() +
                       " but no split entry");
  }
  if (!issues.empty()) throw ValidationError("malformed division plan", issues);

  DivisionCheck check;
  check.ok = true;
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    const ServiceSpec& spec = graph.service_at(si);
    // Missing entries are implicit zeros; declare every neighbor.
    std::map<NodeId, Rat> alloc;
    for (std::uint32_t vi : graph.service_neighbors(si)) alloc[graph.validator_at(vi)] = Rat(0);
    for (const auto& [vid, amount] : per_service[si]) alloc[vid] = amount;

    ServiceDivisionResult result;
    result.service = spec.id;
    PoSInstance star =
        PoSInstance::create(spec.value, spec.alpha,
                            std::vector<std::pair<NodeId, Rat>>(alloc.begin(), alloc.end()));
    if (spec.value.is_positive() && !star.total().is_positive()) {
      result.secure = false;  // a valued service that the division left unbacked
    } else {
      PosVerdict verdict = pos_is_secure(star, enumeration_cap);
      result.secure = verdict.secure;
      result.attack = std::move(verdict.attack);
    }
    if (!result.secure) check.ok = false;
    check.services.push_back(std::move(result));
  }
  return check;
}

DivisionPlan proportional_division(const RestakingGraph& graph, const StakeVector& stakes) {
  const SufficiencyReport report = satisfies_sufficient_condition(graph, stakes);
  if (!report.holds) {
    std::string offenders;
    for (const auto& [vid, slack] : report.slacks) {
      if (slack.is_negative()) {
        if (!offenders.empty()) offenders += ", ";
        offenders += "v" + id_str(vid) + " (slack " + slack.str() + ")";
      }
    }
    throw InputError("proportional division requires the sufficient condition; violated by " +
                     offenders);
  }

  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  std::vector<Rat> weight(graph.num_services());
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    if (graph.service_neighbors(si).empty()) continue;
    Rat total;
    for (std::uint32_t vi : graph.service_neighbors(si)) total += sigma[vi];
    const ServiceSpec& s = graph.service_at(si);
    weight[si] = s.value / s.alpha / total;
  }

  DivisionPlan plan;
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    require_not_stranded(graph, vi, sigma[vi], "proportional division");
    const auto& neighbors = graph.validator_neighbors(vi);
    std::map<NodeId, Rat> split;
    Rat required_sum;
    for (std::uint32_t si : neighbors) {
      const Rat required = sigma[vi] * weight[si];
      split[graph.service_at(si).id] = required;
      required_sum += required;
    }
    if (!neighbors.empty()) {
      const Rat slack_each = (sigma[vi] - required_sum) / Rat(static_cast<long>(neighbors.size()));
      for (auto& [sid, amount] : split) amount += slack_each;
    }
    plan.splits[graph.validator_at(vi)] = std::move(split);
  }
  return plan;
}

AugmentedDivision construct_maxdeg_augmentation(const RestakingGraph& graph,
                                                const StakeVector& stakes) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);

  AugmentedDivision out;
  out.method = "maxdeg";
  std::vector<std::pair<NodeId, Rat>> augmented;
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    require_not_stranded(graph, vi, sigma[vi], "maxdeg construction");
    const auto& neighbors = graph.validator_neighbors(vi);
    std::map<NodeId, Rat> split;
    Rat added;
    for (std::uint32_t si : neighbors) {
      const Rat& pi = graph.service_at(si).value;
      split[graph.service_at(si).id] = pi;
      added += pi;
    }
    if (!neighbors.empty()) {
      // fold the original stake into the lowest-id service
      split.begin()->second += sigma[vi];
    }
    out.extra += added;
    augmented.emplace_back(graph.validator_at(vi), sigma[vi] + added);
    out.plan.splits[graph.validator_at(vi)] = std::move(split);
  }
  out.augmented = StakeVector(std::move(augmented));
  return out;
}

AugmentedDivision construct_cover_augmentation(const RestakingGraph& graph,
                                               const StakeVector& stakes,
                                               const CoverResult& cover) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);

  std::vector<char> in_cover(graph.num_services(), 0);
  for (NodeId sid : cover.cover) in_cover[graph.service_index(sid)] = 1;

  std::vector<std::size_t> incidence(graph.num_validators(), 0);
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    if (!in_cover[si]) continue;
    for (std::uint32_t vi : graph.service_neighbors(si)) ++incidence[vi];
  }
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    if (incidence[vi] == 0 && sigma[vi].is_positive())
      throw InputError("cover construction: validator " + id_str(graph.validator_at(vi)) +
                       " is not covered");
  }

  AugmentedDivision out;
  out.method = "cover";
  out.selected_services = cover.cover;

  std::vector<Rat> augmented(sigma);
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    if (incidence[vi] > 1) {
      const Rat added = Rat(static_cast<long>(incidence[vi] - 1)) * sigma[vi];
      augmented[vi] += added;
      out.extra += added;
    }
  }

  // plan: full original profile to each cover service, fresh pi to one
  // neighbor for the rest
  std::vector<std::map<NodeId, Rat>> split(graph.num_validators());
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) split[vi] = zero_split(graph, vi);

  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    const ServiceSpec& s = graph.service_at(si);
    if (in_cover[si]) {
      for (std::uint32_t vi : graph.service_neighbors(si)) split[vi][s.id] = sigma[vi];
    } else if (s.value.is_positive()) {
      const std::uint32_t chosen = graph.service_neighbors(si).front();  // lowest validator id
      split[chosen][s.id] += s.value;
      augmented[chosen] += s.value;
      out.extra += s.value;
    }
  }
  std::vector<std::pair<NodeId, Rat>> entries;
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    require_not_stranded(graph, vi, sigma[vi], "cover construction");
    entries.emplace_back(graph.validator_at(vi), augmented[vi]);
    out.plan.splits[graph.validator_at(vi)] = std::move(split[vi]);
  }
  out.augmented = StakeVector(std::move(entries));
  return out;
}

AugmentedDivision construct_sqrt_augmentation(const RestakingGraph& graph,
                                              const StakeVector& stakes) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  const std::size_t n = graph.num_validators();

  // Greedy layer: pick services whose residual degree d satisfies d*d >= n
  // (integer arithmetic; no irrational comparison needed).
  std::vector<char> in_layer(graph.num_services(), 0);
  std::vector<char> absorbed(n, 0);  // validators in V_L
  std::vector<NodeId> layer;
  for (;;) {
    bool picked = false;
    for (std::size_t si = 0; si < graph.num_services() && !picked; ++si) {
      if (in_layer[si]) continue;
      std::size_t residual = 0;
      for (std::uint32_t vi : graph.service_neighbors(si))
        if (!absorbed[vi]) ++residual;
      if (residual * residual >= n && residual > 0) {
        in_layer[si] = 1;
        layer.push_back(graph.service_at(si).id);
        for (std::uint32_t vi : graph.service_neighbors(si)) absorbed[vi] = 1;
        picked = true;
      }
    }
    if (!picked) break;
  }

  AugmentedDivision out;
  out.method = "sqrt";
  out.selected_services = layer;

  std::vector<Rat> augmented(sigma);
  std::vector<std::map<NodeId, Rat>> split(n);
  for (std::size_t vi = 0; vi < n; ++vi) split[vi] = zero_split(graph, vi);

  // Absorbed validators replicate their stake across their layer services.
  for (std::size_t vi = 0; vi < n; ++vi) {
    if (!absorbed[vi]) continue;
    std::size_t covering = 0;
    for (std::uint32_t si : graph.validator_neighbors(vi)) {
      if (in_layer[si]) {
        split[vi][graph.service_at(si).id] = sigma[vi];
        ++covering;
      }
    }
    if (covering > 1) {
      const Rat added = Rat(static_cast<long>(covering - 1)) * sigma[vi];
      augmented[vi] += added;
      out.extra += added;
    }
  }

  // Residual services: fresh pi at every residual neighbor; residual
  // validators fold their stake into their lowest-id residual service.
  std::vector<std::uint32_t> fold_target(n, UINT32_MAX);
  for (std::size_t vi = 0; vi < n; ++vi) {
    if (absorbed[vi]) continue;
    require_not_stranded(graph, vi, sigma[vi], "sqrt construction");
    // Everything adjacent to a layer service was absorbed, so all neighbors
    // of a residual validator are residual services.
    if (!graph.validator_neighbors(vi).empty())
      fold_target[vi] = graph.validator_neighbors(vi).front();
  }

  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    if (in_layer[si]) continue;
    const ServiceSpec& s = graph.service_at(si);
    if (!s.value.is_positive()) continue;
    bool backed = false;
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      if (absorbed[vi]) continue;
      split[vi][s.id] += s.value;
      augmented[vi] += s.value;
      out.extra += s.value;
      backed = true;
    }
    if (!backed) {
      // all neighbors were absorbed into the layer; back the service with a
      // single fresh pi at its lowest-id neighbor
      const std::uint32_t chosen = graph.service_neighbors(si).front();
      split[chosen][s.id] += s.value;
      augmented[chosen] += s.value;
      out.extra += s.value;
      out.notes.push_back("service " + id_str(s.id) +
                          " had no residual neighbor; secured by a fresh stake at validator " +
                          id_str(graph.validator_at(chosen)));
    }
  }
  for (std::size_t vi = 0; vi < n; ++vi) {
    if (absorbed[vi] || fold_target[vi] == UINT32_MAX) continue;
    split[vi][graph.service_at(fold_target[vi]).id] += sigma[vi];
  }

  std::vector<std::pair<NodeId, Rat>> entries;
  for (std::size_t vi = 0; vi < n; ++vi) {
    entries.emplace_back(graph.validator_at(vi), augmented[vi]);
    out.plan.splits[graph.validator_at(vi)] = std::move(split[vi]);
  }
  out.augmented = StakeVector(std::move(entries));
  return out;
}

AugmentedDivision construct_alpha_augmentation(const RestakingGraph& graph,
                                               const StakeVector& stakes) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  const std::size_t n = graph.num_validators();

  std::vector<std::uint32_t> by_alpha(graph.num_services());
  for (std::uint32_t i = 0; i < by_alpha.size(); ++i) by_alpha[i] = i;
  std::sort(by_alpha.begin(), by_alpha.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (graph.service_at(a).alpha != graph.service_at(b).alpha)
      return graph.service_at(a).alpha < graph.service_at(b).alpha;
    return graph.service_at(a).id < graph.service_at(b).id;
  });

  AugmentedDivision out;
  out.method = "alpha";

  std::vector<Rat> augmented(sigma);
  std::vector<Rat> remaining(sigma);
  std::vector<std::map<NodeId, Rat>> split(n);
  for (std::size_t vi = 0; vi < n; ++vi) {
    require_not_stranded(graph, vi, sigma[vi], "alpha construction");
    split[vi] = zero_split(graph, vi);
  }

  for (std::size_t rank = 0; rank < by_alpha.size(); ++rank) {
    const std::uint32_t si = by_alpha[rank];
    const ServiceSpec& s = graph.service_at(si);
    if (rank > 0) {
      // fresh pi/alpha at the lowest-id neighbor secures the service on its own
      if (s.value.is_positive()) {
        const Rat fresh = s.value / s.alpha;
        const std::uint32_t chosen = graph.service_neighbors(si).front();
        split[chosen][s.id] += fresh;
        augmented[chosen] += fresh;
        out.extra += fresh;
      }
    }
    // consume whatever stake the neighbors still hold
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      if (remaining[vi].is_positive()) {
        split[vi][s.id] += remaining[vi];
        remaining[vi] = Rat(0);
      }
    }
  }

  std::vector<std::pair<NodeId, Rat>> entries;
  for (std::size_t vi = 0; vi < n; ++vi) {
    entries.emplace_back(graph.validator_at(vi), augmented[vi]);
    out.plan.splits[graph.validator_at(vi)] = std::move(split[vi]);
  }
  out.augmented = StakeVector(std::move(entries));
  return out;
}

}  // namespace restake
