#include <doctest.h>

#include "restake/division.hpp"
#include "restake/errors.hpp"
#include "restake/generators.hpp"
#include "restake/io.hpp"

using namespace restake;

TEST_CASE("graph documents round-trip exactly") {
  auto [graph, stakes] = gen_rs_lower_family(3);
  const std::string text = serialize_graph_document(graph, stakes, FamilyInfo{"rs-lower", 3});
  const GraphDocument doc = parse_graph_document(text, true);
  CHECK(serialize_graph_document(doc.graph, doc.stakes, doc.family) == text);
  CHECK(doc.stakes.at(10) == Rat(6));
  CHECK(doc.graph.service_at(0).alpha == Rat(1, 7));
  REQUIRE(doc.family.has_value());
  CHECK(doc.family->tag == "rs-lower");
  CHECK(doc.family->m == 3);
}

TEST_CASE("numbers accept fractions, decimals, and integers; floats are rejected") {
  const char* text = R"({
    "services": [{"id": 1, "value": "0.5", "alpha": "1/4"}],
    "validators": [{"id": 1, "stake": 3}],
    "edges": [{"service": 1, "validator": 1}]
  })";
  const GraphDocument doc = parse_graph_document(text);
  CHECK(doc.graph.service_at(0).value == Rat(1, 2));
  CHECK(doc.stakes.at(1) == Rat(3));

  const char* with_float = R"({
    "services": [{"id": 1, "value": 0.5, "alpha": "1/4"}],
    "validators": [{"id": 1, "stake": "3"}],
    "edges": [{"service": 1, "validator": 1}]
  })";
  CHECK_THROWS_AS(parse_graph_document(with_float), InputError);
}

TEST_CASE("unknown fields: rejected in strict mode, warned about otherwise") {
  const char* text = R"({
    "services": [{"id": 1, "value": "1", "alpha": "1/2"}],
    "validators": [{"id": 1, "stake": "2"}],
    "edges": [{"service": 1, "validator": 1}],
    "comment": "scratch"
  })";
  CHECK_THROWS_AS(parse_graph_document(text, true), InputError);
  std::vector<std::string> warnings;
  CHECK_NOTHROW(parse_graph_document(text, false, &warnings));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("comment") != std::string::npos);
}

TEST_CASE("malformed documents are input errors") {
  CHECK_THROWS_AS(parse_graph_document("not json"), InputError);
  CHECK_THROWS_AS(parse_graph_document("{}"), InputError);
  CHECK_THROWS_AS(parse_graph_document(R"({"services": [], "validators": []})"), InputError);
  const char* bad_edge = R"({
    "services": [{"id": 1, "value": "1", "alpha": "1/2"}],
    "validators": [{"id": 1, "stake": "2"}],
    "edges": [{"service": 1}]
  })";
  CHECK_THROWS_AS(parse_graph_document(bad_edge), InputError);
}

TEST_CASE("protocol documents round-trip exactly") {
  const auto protocols = gen_poss_lower_family(2);
  const std::string text = serialize_pos_document(protocols, FamilyInfo{"poss-lower", 2});
  const PosDocument doc = parse_pos_document(text, true);
  CHECK(serialize_pos_document(doc.protocols, doc.family) == text);
  REQUIRE(doc.protocols.size() == 2);
  CHECK(doc.protocols[0].instance.allocations() ==
        std::vector<std::pair<NodeId, Rat>>{{1, Rat(1)}, {3, Rat(1, 2)}});
}

TEST_CASE("plan documents round-trip exactly") {
  auto [graph, stakes] = gen_rs_lower_family(2);
  const AugmentedDivision d = construct_sqrt_augmentation(graph, stakes);
  const std::string text = serialize_plan_document(d);
  const AugmentedDivision parsed = parse_plan_document(text, true);
  CHECK(serialize_plan_document(parsed) == text);
  CHECK(parsed.method == d.method);
  CHECK(parsed.extra == d.extra);
  CHECK(verify_division(graph, parsed.augmented, parsed.plan).ok);
}

TEST_CASE("serialization is byte-deterministic") {
  auto [graph, stakes] = gen_rs_lower_family(4);
  CHECK(serialize_graph_document(graph, stakes) == serialize_graph_document(graph, stakes));
}
