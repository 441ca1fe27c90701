#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "restake/errors.hpp"
#include "restake/generators.hpp"
#include "restake/security.hpp"

using namespace restake;
using restake::testing::single_service;

TEST_CASE("exact security: the worst-case family is secure") {
  for (std::uint32_t m : {1u, 2u, 3u, 4u}) {
    auto [graph, stakes] = gen_rs_lower_family(m);
    SecurityOptions opts;
    opts.enumeration_cap = 64;
    CHECK(is_secure_exact(graph, stakes, opts).secure);
  }
}

TEST_CASE("exact security: flipping one stake produces a witness") {
  {
    auto [graph, stakes] = single_service(Rat(3), Rat(1, 2), {Rat(2), Rat(2)});
    CHECK(is_secure_exact(graph, stakes).secure);
  }
  {
    auto [graph, stakes] = single_service(Rat(3), Rat(1, 2), {Rat(5, 2), Rat(2)});
    const SecurityVerdict v = is_secure_exact(graph, stakes);
    REQUIRE_FALSE(v.secure);
    CHECK(v.witness->coalition == ValidatorSet{1});
    CHECK(v.witness->attacked == std::vector<NodeId>{1});
    CHECK(v.witness->profit == Rat(1, 2));
  }
}

TEST_CASE("exact security: trivial graphs") {
  auto graph = RestakingGraph::create({}, {1, 2}, {});
  StakeVector stakes({{1, Rat(1)}, {2, Rat(2)}});
  CHECK(is_secure_exact(graph, stakes).secure);

  auto empty = RestakingGraph::create({}, {}, {});
  CHECK(is_secure_exact(empty, StakeVector()).secure);
}

TEST_CASE("exact security: profit exactly zero is not profitable") {
  auto [graph, stakes] = single_service(Rat(1), Rat(1, 4), {Rat(1)});
  CHECK(is_secure_exact(graph, stakes).secure);
}

TEST_CASE("exact security: capacity cap") {
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> entries;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v <= 30; ++v) {
    validators.push_back(v);
    entries.emplace_back(v, Rat(1));
    edges.emplace_back(1, v);
  }
  auto graph = RestakingGraph::create({{1, Rat(1), Rat(1, 2)}}, validators, edges);
  StakeVector stakes(entries);
  CHECK_THROWS_AS(is_secure_exact(graph, stakes), CapacityError);
  SecurityOptions wide;
  wide.enumeration_cap = 32;
  CHECK(is_secure_exact(graph, stakes, wide).secure);
}

TEST_CASE("pruned search, reference sweep, and parallel search agree") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    RandomSpec spec;
    spec.num_services = 1 + seed % 5;
    spec.num_validators = 2 + seed % 9;
    spec.density_percent = 30 + seed % 60;
    spec.seed = seed;
    GeneratedInstance inst = gen_random(spec);

    SecurityOptions serial;
    serial.parallel = false;
    const SecurityVerdict pruned = is_secure_exact(inst.graph, inst.stakes, serial);
    const SecurityVerdict reference = is_secure_reference(inst.graph, inst.stakes);
    const SecurityVerdict parallel = is_secure_exact(inst.graph, inst.stakes);

    REQUIRE(pruned.secure == reference.secure);
    REQUIRE(pruned.secure == parallel.secure);
    if (!pruned.secure) {
      CHECK(pruned.witness->coalition == reference.witness->coalition);
      CHECK(pruned.witness->profit == reference.witness->profit);
      CHECK(pruned.witness->coalition == parallel.witness->coalition);

      // the witness re-validates through the primitive operations
      const AttackWitness& w = *pruned.witness;
      CHECK(attack_profit(inst.graph, inst.stakes, w.coalition) == w.profit);
      CHECK(maximal_attack_set(inst.graph, inst.stakes, w.coalition) == w.attacked);
      CHECK(w.profit.is_positive());
    }
  }
}

TEST_CASE("parallel path agrees with serial on instances wide enough to split") {
  // 18 validators crosses the prefix-splitting threshold
  RandomSpec spec;
  spec.num_services = 4;
  spec.num_validators = 18;
  spec.density_percent = 50;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    spec.seed = seed;
    GeneratedInstance inst = gen_random(spec);
    SecurityOptions serial;
    serial.parallel = false;
    const SecurityVerdict a = is_secure_exact(inst.graph, inst.stakes, serial);
    const SecurityVerdict b = is_secure_exact(inst.graph, inst.stakes);
    REQUIRE(a.secure == b.secure);
    if (!a.secure) {
      CHECK(a.witness->coalition == b.witness->coalition);
      CHECK(a.witness->profit == b.witness->profit);
    }
  }
}

TEST_CASE("serial and parallel agree on a zero-slack instance that defeats pruning") {
  auto [graph, stakes] = restake::testing::balanced_hard(20);
  SecurityOptions serial;
  serial.parallel = false;
  CHECK(is_secure_exact(graph, stakes, serial).secure);
  CHECK(is_secure_exact(graph, stakes).secure);

  // nudge one stake down and the half-coalition turns profitable
  std::vector<std::pair<NodeId, Rat>> bent(stakes.entries());
  bent[0].second = Rat(9, 10);
  const StakeVector bent_stakes(bent);
  const SecurityVerdict a = is_secure_exact(graph, bent_stakes, serial);
  const SecurityVerdict b = is_secure_exact(graph, bent_stakes);
  REQUIRE_FALSE(a.secure);
  REQUIRE_FALSE(b.secure);
  CHECK(a.witness->coalition == b.witness->coalition);
  CHECK(a.witness->profit == b.witness->profit);
}

TEST_CASE("exhaustive mode returns the maximum profit") {
  // two profitable coalitions with different profits
  auto graph = RestakingGraph::create({{1, Rat(4), Rat(1, 10)}, {2, Rat(2), Rat(1, 10)}},
                                      {1, 2}, {{1, 1}, {2, 2}});
  StakeVector stakes({{1, Rat(1)}, {2, Rat(1)}});
  SecurityOptions opts;
  const SecurityVerdict first = is_secure_exact(graph, stakes, opts);
  opts.exhaustive = true;
  const SecurityVerdict best = is_secure_exact(graph, stakes, opts);
  REQUIRE_FALSE(first.secure);
  REQUIRE_FALSE(best.secure);
  CHECK(best.witness->profit == Rat(4));  // coalition {v1, v2}: gains 6, burns 2
  CHECK(best.witness->coalition == ValidatorSet{1, 2});
  CHECK(best.witness->profit >= first.witness->profit);
}

TEST_CASE("sufficient condition on the family: violated by a factor two and by 4m^2") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const SufficiencyReport report = satisfies_sufficient_condition(graph, stakes);
  CHECK_FALSE(report.holds);
  for (const auto& [vid, slack] : report.slacks) {
    if (vid == 10) {
      CHECK(slack == Rat(6) - Rat(36));  // requirement 4m^2 = 36 against stake 6
    } else {
      CHECK(slack == Rat(-1, 3));  // requirement 2/m against stake 1/m
    }
  }
}

TEST_CASE("sufficient condition: boundary and degenerate cases") {
  {
    auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(2)});
    const SufficiencyReport report = satisfies_sufficient_condition(graph, stakes);
    CHECK(report.holds);
    CHECK(report.slacks.at(0).second == Rat(0));
  }
  {
    auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(0)});
    CHECK_THROWS_AS(satisfies_sufficient_condition(graph, stakes), DegenerateInputError);
  }
}

TEST_CASE("sufficient condition implies exact security") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomSpec spec;
    spec.num_services = 1 + seed % 4;
    spec.num_validators = 2 + seed % 7;
    spec.seed = seed;
    spec.force = ForceMode::Sufficient;
    GeneratedInstance inst = gen_random(spec);
    REQUIRE(satisfies_sufficient_condition(inst.graph, inst.stakes).holds);
    CHECK(is_secure_exact(inst.graph, inst.stakes).secure);
  }
}

TEST_CASE("secure graphs hold at least their total value") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomSpec spec;
    spec.num_services = 1 + seed % 4;
    spec.num_validators = 2 + seed % 7;
    spec.seed = seed ^ 0x5555;
    spec.force = ForceMode::Secure;
    GeneratedInstance inst = gen_random(spec);
    CHECK(inst.stakes.total() >= inst.graph.total_value());
  }
}

TEST_CASE("star protocol security") {
  // lone full-value allocation is secure for any alpha
  auto lone = PoSInstance::create(Rat(5), Rat(1, 100), {{1, Rat(0)}, {2, Rat(0)}, {3, Rat(5)}});
  CHECK(pos_is_secure(lone).secure);

  auto split = PoSInstance::create(Rat(2), Rat(1, 3), {{1, Rat(1)}, {2, Rat(1)}});
  const PosVerdict v = pos_is_secure(split);
  REQUIRE_FALSE(v.secure);
  CHECK(v.attack->coalition == std::vector<NodeId>{1});
  CHECK(v.attack->stake == Rat(1));

  // total at pi/alpha is safe under any split
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const long pieces = 2 + static_cast<long>(rng() % 4);
    const Rat pi(1 + static_cast<long>(rng() % 5));
    const Rat alpha(1, 2 + static_cast<long>(rng() % 5));
    const Rat target = pi / alpha;
    std::vector<std::pair<NodeId, Rat>> alloc;
    Rat assigned;
    for (long i = 0; i < pieces - 1; ++i) {
      const Rat piece = (target - assigned) / Rat(2 + static_cast<long>(rng() % 3));
      alloc.emplace_back(static_cast<NodeId>(i + 1), piece);
      assigned += piece;
    }
    alloc.emplace_back(static_cast<NodeId>(pieces), target - assigned);
    CHECK(pos_is_secure(PoSInstance::create(pi, alpha, alloc)).secure);
  }
}

TEST_CASE("star protocol degenerate input") {
  auto unbacked = PoSInstance::create(Rat(1), Rat(1, 2), {{1, Rat(0)}});
  CHECK_THROWS_AS(pos_is_secure(unbacked), DegenerateInputError);
  // valueless and unbacked is fine
  auto idle = PoSInstance::create(Rat(0), Rat(1, 2), {{1, Rat(0)}});
  CHECK(pos_is_secure(idle).secure);
}

TEST_CASE("minimum attacking subset") {
  auto two = PoSInstance::create(Rat(2), Rat(1, 3), {{1, Rat(1)}, {2, Rat(1)}});
  const auto attack = min_attacking_subset(two);
  REQUIRE(attack.has_value());
  CHECK(attack->coalition == std::vector<NodeId>{1});
  CHECK(attack->stake == Rat(1));

  auto lone = PoSInstance::create(Rat(3), Rat(1, 2), {{7, Rat(3)}});
  const auto self = min_attacking_subset(lone);
  REQUIRE(self.has_value());
  CHECK(self->coalition == std::vector<NodeId>{7});
  CHECK(self->stake == Rat(3));

  // nobody can exceed a share of one
  auto locked = PoSInstance::create(Rat(1), Rat(1), {{1, Rat(2)}, {2, Rat(5)}});
  CHECK_FALSE(min_attacking_subset(locked).has_value());
}

TEST_CASE("star security is equivalent to the minimum attacking subset rule") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    std::vector<std::pair<NodeId, Rat>> alloc;
    for (std::size_t i = 0; i < k; ++i)
      alloc.emplace_back(static_cast<NodeId>(i + 1),
                         Rat(static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 4)));
    const Rat pi(1 + static_cast<long>(rng() % 6));
    const Rat alpha(1, 2 + static_cast<long>(rng() % 6));
    PoSInstance pos = PoSInstance::create(pi, alpha, alloc);
    if (!pos.total().is_positive()) continue;
    const auto attack = min_attacking_subset(pos);
    const bool secure = pos_is_secure(pos).secure;
    CHECK(secure == (!attack || attack->stake >= pi));
  }
}
