#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restake/model.hpp"
#include "restake/security.hpp"

namespace restake {

inline constexpr std::size_t kDefaultCoverCap = 20;

/// A stake augmentation together with a division plan realizing it.
struct AugmentedDivision {
  StakeVector augmented;  // dominates the original stakes componentwise
  DivisionPlan plan;      // sums to the augmented stake, exactly
  Rat extra;              // total added stake
  std::string method;
  std::vector<NodeId> selected_services;  // cover R / greedy layer, when meaningful
  std::vector<std::string> notes;
};

struct ServiceDivisionResult {
  NodeId service = 0;
  bool secure = false;
  std::optional<PosAttack> attack;  // absent when secure or when no stake backs a valued service
};

struct DivisionCheck {
  bool ok = false;
  std::vector<ServiceDivisionResult> services;
};

/// Checks that the plan is a structurally valid division of `augmented`
/// (per-validator sums match, allocations stay inside neighborhoods) and that
/// every induced star protocol is secure. Structural violations throw
/// ValidationError listing every offender; security failures come back as
/// per-service verdicts.
DivisionCheck verify_division(const RestakingGraph& graph, const StakeVector& augmented,
                              const DivisionPlan& plan,
                              std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Division that allocates each validator's stake in proportion to the
/// services' required amounts and spreads any slack uniformly. Only valid
/// when the sufficient condition holds; refuses otherwise.
DivisionPlan proportional_division(const RestakingGraph& graph, const StakeVector& stakes);

/// Adds pi_s to every validator in N(s); each validator folds its original
/// stake into its lowest-id service. Extra added: sum of degree(s) * pi_s.
AugmentedDivision construct_maxdeg_augmentation(const RestakingGraph& graph,
                                                const StakeVector& stakes);

enum class CoverMode { Exact, Greedy };

struct CoverResult {
  std::vector<NodeId> cover;  // service ids whose neighborhoods cover V
  std::size_t incidence = 0;  // max number of cover services any validator touches
};

/// A cover of the validator set by service neighborhoods. Exact mode
/// minimizes the maximum incidence (capacity-limited on the service count);
/// greedy mode returns a valid cover quickly.
CoverResult compute_cover_K(const RestakingGraph& graph, CoverMode mode,
                            std::size_t service_cap = kDefaultCoverCap);

/// Replicates each validator's stake once per covering service and secures
/// out-of-cover services with a single fresh pi_s.
AugmentedDivision construct_cover_augmentation(const RestakingGraph& graph,
                                               const StakeVector& stakes,
                                               const CoverResult& cover);

/// Greedy high-degree peeling: services with residual degree at least
/// sqrt(n) keep their full original stake profile; the rest are secured by
/// fresh pi_s at each residual neighbor. Extra stays within (2*sqrt(n)-1)*T.
AugmentedDivision construct_sqrt_augmentation(const RestakingGraph& graph,
                                              const StakeVector& stakes);

/// The smallest-alpha service keeps the original stake profile; every other
/// service is secured by a fresh pi_s/alpha_s at one neighbor, consuming
/// validators in sequence. Extra stays within T/alpha_2.
AugmentedDivision construct_alpha_augmentation(const RestakingGraph& graph,
                                               const StakeVector& stakes);

}  // namespace restake
