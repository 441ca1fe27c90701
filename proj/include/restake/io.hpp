#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restake/division.hpp"
#include "restake/model.hpp"

namespace restake {

/// Provenance stamp written by the generator so downstream analysis can
/// attach family-specific bounds.
struct FamilyInfo {
  std::string tag;
  std::uint32_t m = 0;
};

struct GraphDocument {
  RestakingGraph graph;
  StakeVector stakes;
  std::optional<FamilyInfo> family;
};

struct PosDocument {
  std::vector<PoSProtocol> protocols;
  std::optional<FamilyInfo> family;
};

/// Numbers are serialized as canonical fraction strings ("p" or "p/q") so a
/// parse -> serialize -> parse round trip is exact. Decimal strings and JSON
/// integers are accepted on input and converted exactly.
/// In strict mode unknown fields are errors; otherwise they are collected
/// into `warnings` (when given) and ignored.
GraphDocument parse_graph_document(const std::string& text, bool strict = false,
                                   std::vector<std::string>* warnings = nullptr);
std::string serialize_graph_document(const RestakingGraph& graph, const StakeVector& stakes,
                                     const std::optional<FamilyInfo>& family = std::nullopt);

PosDocument parse_pos_document(const std::string& text, bool strict = false,
                               std::vector<std::string>* warnings = nullptr);
std::string serialize_pos_document(const std::vector<PoSProtocol>& protocols,
                                   const std::optional<FamilyInfo>& family = std::nullopt);

AugmentedDivision parse_plan_document(const std::string& text, bool strict = false,
                                      std::vector<std::string>* warnings = nullptr);
std::string serialize_plan_document(const AugmentedDivision& division);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace restake
