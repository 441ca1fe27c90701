#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restake/division.hpp"
#include "restake/model.hpp"
#include "restake/security.hpp"

namespace restake {

inline constexpr std::size_t kOracleValidatorCap = 12;
inline constexpr std::size_t kOracleServiceCap = 6;

/// Analytic cap on a construction's extra/T ratio. The square-root bound
/// 2*sqrt(n)-1 is irrational, so it is kept symbolic and compared by
/// squaring.
struct AnalyticCap {
  enum class Kind { Rational, TwoSqrtNMinusOne };
  Kind kind = Kind::Rational;
  Rat value;          // meaningful for Kind::Rational
  std::size_t n = 0;  // meaningful for Kind::TwoSqrtNMinusOne

  static AnalyticCap rational(Rat v) { return {Kind::Rational, std::move(v), 0}; }
  static AnalyticCap two_sqrt_n_minus_one(std::size_t n) { return {Kind::TwoSqrtNMinusOne, Rat(0), n}; }

  /// ratio <= cap, exactly.
  bool admits(const Rat& ratio) const;
  std::string str() const;
};

struct MethodBound {
  std::string method;
  Rat extra;
  Rat ratio;  // extra / T(sigma)
  std::optional<AnalyticCap> cap;
  bool cap_holds = true;
};

struct RSReport {
  Rat total_stake;
  std::vector<MethodBound> bounds;
  std::optional<Rat> best_upper;    // min realized ratio
  std::optional<Rat> oracle_value;  // grid-search minimum, when requested
  std::optional<Rat> family_lower;  // proof-driven bound, family instances only
  std::vector<std::string> notes;
};

struct RSOptions {
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  std::size_t cover_service_cap = kDefaultCoverCap;
  bool run_oracle = false;
  Rat oracle_granularity = Rat(1);
  std::optional<Rat> oracle_budget;     // default: the maxdeg construction's extra
  std::optional<std::uint32_t> family_m;  // set when the instance is a generated family member
};

/// Runs every augmentation construction on a secure restaking graph,
/// verifies each, and reports realized extra/ratio next to the analytic
/// caps. Refuses insecure inputs with a witness (InsecureInputError); above
/// the enumeration cap security is taken on trust and noted.
RSReport rs_upper_bounds(const RestakingGraph& graph, const StakeVector& stakes,
                         const RSOptions& options = {});

/// Grid oracle for restaking savings: the smallest total stake addition (in
/// multiples of g, up to budget B) that admits a fully secure division, as a
/// fraction of T(sigma). One-sided: never below the true minimum. Absent
/// when nothing within budget works.
std::optional<Rat> rs_exact_oracle(const RestakingGraph& graph, const StakeVector& stakes,
                                   const Rat& granularity, const Rat& budget,
                                   std::size_t validator_cap = kOracleValidatorCap,
                                   std::size_t service_cap = kOracleServiceCap);

/// (m^2 - 2m) / 3m: the certified lower bound for the generated worst-case
/// family. Requires m >= 2.
Rat rs_family_lower_bound(std::uint32_t m);

/// The closing certificate for the family: adds 2m^2 - m to the heavy
/// validator and splits it evenly, giving ratio (2m^2 - m) / 3m.
AugmentedDivision rs_family_upper_certificate(std::uint32_t m);

/// Aggregates secure star protocols into one restaking graph: an edge per
/// declared allocation (zeros included), stakes summed per validator.
/// Refuses insecure protocols with a witness.
std::pair<RestakingGraph, StakeVector> aggregate_pos(const std::vector<PoSProtocol>& protocols);

struct PossAugmentation {
  StakeVector stakes;
  Rat extra;
};

/// Adds pi_s to every validator of every service; the result is secure and
/// the extra stays within max-degree * T(sigma).
PossAugmentation poss_upper_construction(const RestakingGraph& graph, const StakeVector& stakes);

/// Grid oracle for PoS savings: the smallest total stake addition (multiples
/// of g, up to B) that makes the graph secure, as a fraction of T(sigma).
std::optional<Rat> poss_exact_oracle(const RestakingGraph& graph, const StakeVector& stakes,
                                     const Rat& granularity, const Rat& budget,
                                     std::size_t validator_cap = kOracleValidatorCap);

/// T(sigma) >= T(pi). Holds for every secure graph and every aggregate of
/// secure protocols.
bool check_stake_value_inequality(const RestakingGraph& graph, const StakeVector& stakes);

struct PoSSReport {
  Rat total_stake;
  Rat total_value;
  bool lemma_holds = false;  // T(sigma) >= T(pi)
  bool aggregated_secure = false;
  std::optional<AttackWitness> witness;
  Rat construction_extra;
  Rat construction_ratio;
  AnalyticCap construction_cap;  // max service degree
  bool construction_verified = false;
  std::optional<Rat> oracle_value;  // ratio
  std::optional<Rat> oracle_extra;
  std::vector<std::string> notes;
};

struct PoSSOptions {
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  bool run_oracle = false;
  Rat oracle_granularity = Rat(1);
  std::optional<Rat> oracle_budget;  // default: the upper construction's extra
};

/// Full PoS-savings analysis of an aggregated graph.
PoSSReport poss_analysis(const RestakingGraph& graph, const StakeVector& stakes,
                         const PoSSOptions& options = {});

}  // namespace restake
