#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "restake/division.hpp"
#include "restake/errors.hpp"
#include "restake/generators.hpp"
#include "restake/savings.hpp"

using namespace restake;
using restake::testing::single_service;

namespace {

std::size_t ceil_sqrt(std::size_t n) {
  std::size_t k = 0;
  while (k * k < n) ++k;
  return k;
}

Rat second_smallest_alpha(const RestakingGraph& graph) {
  std::vector<Rat> alphas;
  for (const ServiceSpec& s : graph.services()) alphas.push_back(s.alpha);
  std::sort(alphas.begin(), alphas.end());
  return alphas.at(1);
}

}  // namespace

TEST_CASE("verify_division: structural validation") {
  auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(2)});

  DivisionPlan ok;
  ok.splits[1][1] = Rat(2);
  CHECK(verify_division(graph, stakes, ok).ok);

  DivisionPlan sum_mismatch;
  sum_mismatch.splits[1][1] = Rat(1);
  CHECK_THROWS_AS(verify_division(graph, stakes, sum_mismatch), ValidationError);

  DivisionPlan foreign;
  foreign.splits[1][1] = Rat(2);
  foreign.splits[1][9] = Rat(0);
  CHECK_THROWS_AS(verify_division(graph, stakes, foreign), ValidationError);

  DivisionPlan missing;  // stake present, no split entry
  CHECK_THROWS_AS(verify_division(graph, stakes, missing), ValidationError);

  try {
    verify_division(graph, stakes, sum_mismatch);
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
  }
}

TEST_CASE("verify_division: per-service security verdicts") {
  auto [graph, stakes] = single_service(Rat(2), Rat(1, 3), {Rat(1), Rat(1)});
  DivisionPlan plan;
  plan.splits[1][1] = Rat(1);
  plan.splits[2][1] = Rat(1);
  const DivisionCheck check = verify_division(graph, stakes, plan);
  CHECK_FALSE(check.ok);
  REQUIRE(check.services.size() == 1);
  CHECK_FALSE(check.services[0].secure);
  CHECK(check.services[0].attack->coalition == std::vector<NodeId>{1});
}

TEST_CASE("verify_division: empty graph") {
  auto graph = RestakingGraph::create({}, {}, {});
  CHECK(verify_division(graph, StakeVector(), DivisionPlan()).ok);
}

TEST_CASE("proportional division: forced and even cases") {
  {
    auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(2)});
    const DivisionPlan plan = proportional_division(graph, stakes);
    CHECK(plan.splits.at(1).at(1) == Rat(2));
    CHECK(verify_division(graph, stakes, plan).ok);
  }
  {
    auto [graph, stakes] = single_service(Rat(2), Rat(1, 2), {Rat(2), Rat(2)});
    const DivisionPlan plan = proportional_division(graph, stakes);
    CHECK(plan.splits.at(1).at(1) == Rat(2));
    CHECK(plan.splits.at(2).at(1) == Rat(2));
    CHECK(verify_division(graph, stakes, plan).ok);
  }
}

TEST_CASE("proportional division refuses when the condition fails") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  CHECK_THROWS_AS(proportional_division(graph, stakes), InputError);
}

TEST_CASE("proportional division verifies and meets per-service requirements") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomSpec spec;
    spec.num_services = 1 + seed % 4;
    spec.num_validators = 2 + seed % 7;
    spec.seed = seed * 31;
    spec.force = ForceMode::Sufficient;
    GeneratedInstance inst = gen_random(spec);
    const DivisionPlan plan = proportional_division(inst.graph, inst.stakes);
    CHECK(verify_division(inst.graph, inst.stakes, plan).ok);

    for (const ServiceSpec& s : inst.graph.services()) {
      Rat allocated;
      for (NodeId v : inst.graph.service_neighborhood(s.id)) allocated += plan.splits.at(v).at(s.id);
      CHECK(allocated >= s.value / s.alpha);
    }
  }
}

TEST_CASE("maxdeg augmentation on the family") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const AugmentedDivision d = construct_maxdeg_augmentation(graph, stakes);
  CHECK(d.extra == Rat(24));  // sum of degree(s) * pi_s = 3 * 4 * 2
  CHECK(d.augmented.at(10) == Rat(12));
  CHECK(d.augmented.at(1) == Rat(7, 3));
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
  // cap: max degree 4, so extra/T <= 4 with T = 9
  CHECK(d.extra / stakes.total() <= Rat(4));
}

TEST_CASE("maxdeg augmentation: single service, single validator") {
  auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(1)});
  const AugmentedDivision d = construct_maxdeg_augmentation(graph, stakes);
  CHECK(d.extra == Rat(1));
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
}

TEST_CASE("cover computation") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const CoverResult exact = compute_cover_K(graph, CoverMode::Exact);
  CHECK(exact.cover == std::vector<NodeId>{1, 2, 3});  // the only cover
  CHECK(exact.incidence == 3);                         // the heavy validator

  const CoverResult greedy = compute_cover_K(graph, CoverMode::Greedy);
  CHECK(greedy.incidence >= exact.incidence);

  {
    auto [g, s] = single_service(Rat(1), Rat(1, 2), {Rat(1), Rat(1), Rat(1)});
    CHECK(compute_cover_K(g, CoverMode::Exact).incidence == 1);
  }
  {
    // two services with disjoint neighborhoods
    auto g = RestakingGraph::create({{1, Rat(1), Rat(1, 2)}, {2, Rat(1), Rat(1, 2)}}, {1, 2},
                                    {{1, 1}, {2, 2}});
    const CoverResult r = compute_cover_K(g, CoverMode::Exact);
    CHECK(r.incidence == 1);
    CHECK(r.cover == std::vector<NodeId>{1, 2});
  }
  {
    // uncoverable validator
    auto g = RestakingGraph::create({{1, Rat(1), Rat(1, 2)}}, {1, 2}, {{1, 1}});
    CHECK_THROWS_AS(compute_cover_K(g, CoverMode::Exact), InputError);
  }
  {
    std::vector<ServiceSpec> services;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId s = 1; s <= 21; ++s) {
      services.push_back({s, Rat(1), Rat(1, 2)});
      edges.emplace_back(s, 1);
    }
    auto g = RestakingGraph::create(services, {1}, edges);
    CHECK_THROWS_AS(compute_cover_K(g, CoverMode::Exact), CapacityError);
    CHECK(compute_cover_K(g, CoverMode::Greedy).incidence == 1);
  }
}

TEST_CASE("cover augmentation on the family") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const CoverResult cover = compute_cover_K(graph, CoverMode::Exact);
  const AugmentedDivision d = construct_cover_augmentation(graph, stakes, cover);
  CHECK(d.extra == Rat(12));  // the heavy validator is replicated twice more
  CHECK(d.augmented.at(10) == Rat(18));
  CHECK(d.augmented.at(1) == Rat(1, 3));
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
  CHECK(d.extra / stakes.total() <= Rat(static_cast<long>(cover.incidence)));
}

TEST_CASE("cover augmentation with a disjoint cover adds nothing") {
  auto g = RestakingGraph::create({{1, Rat(1), Rat(1, 2)}, {2, Rat(1), Rat(1, 2)}}, {1, 2},
                                  {{1, 1}, {2, 2}});
  StakeVector s({{1, Rat(2)}, {2, Rat(2)}});
  const CoverResult cover = compute_cover_K(g, CoverMode::Exact);
  const AugmentedDivision d = construct_cover_augmentation(g, s, cover);
  CHECK(d.extra == Rat(0));
  CHECK(verify_division(g, d.augmented, d.plan).ok);
}

TEST_CASE("sqrt augmentation traces the greedy layer on the family") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const AugmentedDivision d = construct_sqrt_augmentation(graph, stakes);
  // n = 10: only service 1 reaches residual degree 4 with 16 >= 10
  CHECK(d.selected_services == std::vector<NodeId>{1});
  CHECK(d.extra == Rat(12));  // services 2 and 3 add pi = 2 at three residual neighbors each
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
  CHECK(AnalyticCap::two_sqrt_n_minus_one(10).admits(d.extra / stakes.total()));
}

TEST_CASE("sqrt augmentation: single service, single validator") {
  auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(1)});
  const AugmentedDivision d = construct_sqrt_augmentation(graph, stakes);
  CHECK(d.extra == Rat(0));  // degree 1 over n = 1 qualifies; original profile suffices
  CHECK(d.selected_services == std::vector<NodeId>{1});
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
}

TEST_CASE("sqrt augmentation backs a residual service whose neighbors were all absorbed") {
  // service 1 absorbs v1..v4 (degree 4 >= sqrt(4)); service 2 lives inside
  // that neighborhood, so it has no residual neighbor left
  auto graph = RestakingGraph::create(
      {{1, Rat(1), Rat(1, 2)}, {2, Rat(1), Rat(1, 2)}}, {1, 2, 3, 4},
      {{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}});
  StakeVector stakes({{1, Rat(1)}, {2, Rat(1)}, {3, Rat(1)}, {4, Rat(1)}});
  REQUIRE(is_secure_exact(graph, stakes).secure);
  const AugmentedDivision d = construct_sqrt_augmentation(graph, stakes);
  CHECK(d.selected_services == std::vector<NodeId>{1});
  CHECK_FALSE(d.notes.empty());
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
  CHECK(AnalyticCap::two_sqrt_n_minus_one(4).admits(d.extra / stakes.total()));
}

TEST_CASE("constructions refuse stranded positive stake") {
  auto graph = RestakingGraph::create({{1, Rat(1), Rat(1, 2)}}, {1, 2}, {{1, 1}});
  StakeVector stakes({{1, Rat(2)}, {2, Rat(1)}});  // validator 2 has stake but no edges
  CHECK_THROWS_AS(construct_maxdeg_augmentation(graph, stakes), InputError);
  CHECK_THROWS_AS(construct_sqrt_augmentation(graph, stakes), InputError);
  CHECK_THROWS_AS(construct_alpha_augmentation(graph, stakes), InputError);

  // with zero stranded stake everything works
  StakeVector zeroed({{1, Rat(2)}, {2, Rat(0)}});
  const AugmentedDivision d = construct_maxdeg_augmentation(graph, zeroed);
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
}

TEST_CASE("alpha augmentation on the family") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const AugmentedDivision d = construct_alpha_augmentation(graph, stakes);
  CHECK(d.extra == Rat(28));  // two later services at pi/alpha = 14 each
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
  CHECK(d.extra / stakes.total() <= Rat(1) / second_smallest_alpha(graph));
}

TEST_CASE("alpha augmentation: equal security parameters bound the ratio by their inverse") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    RandomSpec spec;
    spec.num_services = 2 + seed % 4;
    spec.num_validators = 2 + seed % 7;
    spec.alphas = {Rat(1, 2)};
    spec.seed = seed * 13;
    spec.force = ForceMode::Secure;
    GeneratedInstance inst = gen_random(spec);
    const AugmentedDivision d = construct_alpha_augmentation(inst.graph, inst.stakes);
    CHECK(verify_division(inst.graph, d.augmented, d.plan).ok);
    CHECK(d.extra / inst.stakes.total() <= Rat(2));
  }
}

TEST_CASE("alpha augmentation: single service adds nothing") {
  auto [graph, stakes] = single_service(Rat(1), Rat(1, 2), {Rat(2)});
  const AugmentedDivision d = construct_alpha_augmentation(graph, stakes);
  CHECK(d.extra == Rat(0));
  CHECK(verify_division(graph, d.augmented, d.plan).ok);
}

TEST_CASE("every construction verifies, dominates, and meets its cap on secure instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomSpec spec;
    spec.num_services = 1 + seed % 5;
    spec.num_validators = 2 + seed % 8;
    spec.density_percent = 35 + seed % 55;
    spec.seed = seed * 101;
    spec.force = ForceMode::Secure;
    GeneratedInstance inst = gen_random(spec);
    const Rat total = inst.stakes.total();

    const CoverResult cover = compute_cover_K(inst.graph, CoverMode::Exact);
    const AugmentedDivision constructions[] = {
        construct_maxdeg_augmentation(inst.graph, inst.stakes),
        construct_cover_augmentation(inst.graph, inst.stakes, cover),
        construct_sqrt_augmentation(inst.graph, inst.stakes),
        construct_alpha_augmentation(inst.graph, inst.stakes),
    };
    for (const AugmentedDivision& d : constructions) {
      CAPTURE(seed);
      CAPTURE(d.method);
      CHECK(verify_division(inst.graph, d.augmented, d.plan).ok);
      for (const auto& [vid, stake] : inst.stakes.entries())
        CHECK(d.augmented.at(vid) >= stake);
      CHECK(d.extra == d.augmented.total() - total);
      CHECK_FALSE(d.extra.is_negative());
    }
    CHECK(constructions[0].extra / total <=
          Rat(static_cast<long>(inst.graph.max_service_degree())));
    CHECK(constructions[1].extra / total <= Rat(static_cast<long>(cover.incidence)));
    CHECK(AnalyticCap::two_sqrt_n_minus_one(inst.graph.num_validators())
              .admits(constructions[2].extra / total));
    if (inst.graph.num_services() >= 2)
      CHECK(constructions[3].extra / total <= Rat(1) / second_smallest_alpha(inst.graph));

    // the greedy layer stays within ceil(sqrt(n)) rounds
    CHECK(constructions[2].selected_services.size() <= ceil_sqrt(inst.graph.num_validators()));

    // exact cover incidence never beats the max degree
    CHECK(cover.incidence <= inst.graph.max_service_degree());
  }
}
