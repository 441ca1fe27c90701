#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "restake/model.hpp"

namespace restake {

/// Worst-case family: m services of value 2 with alpha = 1/(2m+1); m^2 small
/// validators of stake 1/m, one heavy validator of stake 2m adjacent to every
/// service; service s additionally owns the small validators (s-1)m+1 .. sm.
std::pair<RestakingGraph, StakeVector> gen_rs_lower_family(std::uint32_t m);

/// PoS-savings family: m star protocols of value 1 with alpha = 1/(m+1);
/// protocol s has a dedicated validator s with stake 1 and the shared
/// validator m+1 with stake 1/m. Every protocol is secure with the shared
/// validator sitting exactly on the attack threshold.
std::vector<PoSProtocol> gen_poss_lower_family(std::uint32_t m);

enum class ForceMode { None, Secure, Sufficient };

struct RandomSpec {
  std::uint32_t num_services = 3;
  std::uint32_t num_validators = 6;
  std::uint32_t density_percent = 60;
  long stake_max = 8;          // stakes drawn from (0, stake_max]
  long value_max = 4;          // values drawn from (0, value_max]
  long max_denominator = 64;   // rationals kept coarse so exact math stays fast
  std::vector<Rat> alphas = {Rat(1, 4), Rat(1, 3), Rat(1, 2)};
  std::uint64_t seed = 1;
  ForceMode force = ForceMode::None;
  std::uint32_t max_retries = 64;
};

struct GeneratedInstance {
  RestakingGraph graph;
  StakeVector stakes;
  std::uint32_t attempts = 0;
  std::uint32_t scale_exponent = 0;  // stakes were multiplied by 2^k to reach the condition
};

/// Seeded random instance; identical spec gives an identical instance.
/// Force::Secure rejection-samples against the exact checker and, past the
/// retry limit, multiplies all stakes by the smallest power of two that
/// satisfies the sufficient condition (shares are scale-invariant, so the
/// required amounts stay fixed while stakes grow). Force::Sufficient scales
/// directly.
GeneratedInstance gen_random(const RandomSpec& spec);

struct RandomPosSpec {
  std::uint32_t num_services = 2;
  std::uint32_t num_validators = 4;
  std::uint32_t participation_percent = 60;
  long stake_max = 4;
  long value_max = 4;
  long max_denominator = 16;
  std::vector<Rat> alphas = {Rat(1, 4), Rat(1, 3), Rat(1, 2)};
  std::uint64_t seed = 1;
};

/// Seeded set of secure star protocols over a shared validator pool, for
/// aggregation studies. Insecure draws are scaled up (smallest power of two)
/// until the cheapest attacking subset is no longer profitable.
std::vector<PoSProtocol> gen_random_pos_set(const RandomPosSpec& spec);

}  // namespace restake
