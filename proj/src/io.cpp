#include "restake/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "restake/errors.hpp"

namespace restake {

namespace {

using Json = nlohmann::ordered_json;

Rat parse_number(const Json& j, const std::string& where) {
  if (j.is_string()) return Rat::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_number_float())
    throw InputError(where + ": floating-point literals are inexact; write the number as a "
                             "string (\"p/q\" or decimal)");
  throw InputError(where + ": expected a number string");
}

NodeId parse_id(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long>() >= 0))
    throw InputError(where + ": expected a nonnegative integer id");
  return j.get<NodeId>();
}

void note_unknown_keys(const Json& obj, std::initializer_list<const char*> known,
                       const std::string& where, bool strict,
                       std::vector<std::string>* warnings) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (ok) continue;
    if (strict) throw InputError(where + ": unknown field '" + key + "'");
    if (warnings) warnings->push_back(where + ": ignoring unknown field '" + key + "'");
  }
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

Json parse_root(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

std::optional<FamilyInfo> parse_family(const Json& root, bool strict,
                                       std::vector<std::string>* warnings) {
  auto it = root.find("family");
  if (it == root.end()) return std::nullopt;
  const Json& f = *it;
  if (!f.is_object()) throw InputError("family: expected an object");
  note_unknown_keys(f, {"tag", "m"}, "family", strict, warnings);
  FamilyInfo info;
  info.tag = require(f, "tag", "family").get<std::string>();
  info.m = parse_id(require(f, "m", "family"), "family.m");
  return info;
}

Json family_json(const FamilyInfo& info) {
  Json f;
  f["tag"] = info.tag;
  f["m"] = info.m;
  return f;
}

}  // namespace

GraphDocument parse_graph_document(const std::string& text, bool strict,
                                   std::vector<std::string>* warnings) {
  const Json root = parse_root(text);
  if (!root.is_object()) throw InputError("graph file: expected a JSON object");
  note_unknown_keys(root, {"services", "validators", "edges", "family"}, "graph file", strict,
                    warnings);

  std::vector<ServiceSpec> services;
  for (const Json& s : require(root, "services", "graph file")) {
    note_unknown_keys(s, {"id", "value", "alpha"}, "service entry", strict, warnings);
    services.push_back({parse_id(require(s, "id", "service entry"), "service id"),
                        parse_number(require(s, "value", "service entry"), "service value"),
                        parse_number(require(s, "alpha", "service entry"), "service alpha")});
  }
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (const Json& v : require(root, "validators", "graph file")) {
    note_unknown_keys(v, {"id", "stake"}, "validator entry", strict, warnings);
    const NodeId id = parse_id(require(v, "id", "validator entry"), "validator id");
    validators.push_back(id);
    stakes.emplace_back(id, parse_number(require(v, "stake", "validator entry"), "stake"));
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const Json& e : require(root, "edges", "graph file")) {
    note_unknown_keys(e, {"service", "validator"}, "edge entry", strict, warnings);
    edges.emplace_back(parse_id(require(e, "service", "edge entry"), "edge service"),
                       parse_id(require(e, "validator", "edge entry"), "edge validator"));
  }
  return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
          StakeVector(std::move(stakes)), parse_family(root, strict, warnings)};
}

std::string serialize_graph_document(const RestakingGraph& graph, const StakeVector& stakes,
                                     const std::optional<FamilyInfo>& family) {
  Json root;
  root["services"] = Json::array();
  for (const ServiceSpec& s : graph.services()) {
    Json j;
    j["id"] = s.id;
    j["value"] = s.value.str();
    j["alpha"] = s.alpha.str();
    root["services"].push_back(std::move(j));
  }
  root["validators"] = Json::array();
  for (NodeId v : graph.validators()) {
    Json j;
    j["id"] = v;
    j["stake"] = stakes.at(v).str();
    root["validators"].push_back(std::move(j));
  }
  root["edges"] = Json::array();
  for (const ServiceSpec& s : graph.services()) {
    for (NodeId v : graph.service_neighborhood(s.id)) {
      Json j;
      j["service"] = s.id;
      j["validator"] = v;
      root["edges"].push_back(std::move(j));
    }
  }
  if (family) root["family"] = family_json(*family);
  return root.dump(2) + "\n";
}

PosDocument parse_pos_document(const std::string& text, bool strict,
                               std::vector<std::string>* warnings) {
  const Json root = parse_root(text);
  if (!root.is_object()) throw InputError("protocol file: expected a JSON object");
  note_unknown_keys(root, {"protocols", "family"}, "protocol file", strict, warnings);

  PosDocument doc;
  for (const Json& p : require(root, "protocols", "protocol file")) {
    note_unknown_keys(p, {"service", "value", "alpha", "allocations"}, "protocol entry", strict,
                      warnings);
    const NodeId service = parse_id(require(p, "service", "protocol entry"), "protocol service");
    std::vector<std::pair<NodeId, Rat>> alloc;
    for (const Json& a : require(p, "allocations", "protocol entry")) {
      note_unknown_keys(a, {"validator", "stake"}, "allocation entry", strict, warnings);
      alloc.emplace_back(parse_id(require(a, "validator", "allocation entry"), "allocation validator"),
                         parse_number(require(a, "stake", "allocation entry"), "allocation stake"));
    }
    doc.protocols.push_back(
        {service, PoSInstance::create(parse_number(require(p, "value", "protocol entry"), "value"),
                                      parse_number(require(p, "alpha", "protocol entry"), "alpha"),
                                      std::move(alloc))});
  }
  doc.family = parse_family(root, strict, warnings);
  return doc;
}

std::string serialize_pos_document(const std::vector<PoSProtocol>& protocols,
                                   const std::optional<FamilyInfo>& family) {
  Json root;
  root["protocols"] = Json::array();
  for (const PoSProtocol& p : protocols) {
    Json j;
    j["service"] = p.service;
    j["value"] = p.instance.value().str();
    j["alpha"] = p.instance.alpha().str();
    j["allocations"] = Json::array();
    for (const auto& [vid, stake] : p.instance.allocations()) {
      Json a;
      a["validator"] = vid;
      a["stake"] = stake.str();
      j["allocations"].push_back(std::move(a));
    }
    root["protocols"].push_back(std::move(j));
  }
  if (family) root["family"] = family_json(*family);
  return root.dump(2) + "\n";
}

AugmentedDivision parse_plan_document(const std::string& text, bool strict,
                                      std::vector<std::string>* warnings) {
  const Json root = parse_root(text);
  if (!root.is_object()) throw InputError("plan file: expected a JSON object");
  note_unknown_keys(root, {"method", "extra", "stakes", "splits", "selected_services", "notes"},
                    "plan file", strict, warnings);

  AugmentedDivision d;
  d.method = require(root, "method", "plan file").get<std::string>();
  d.extra = parse_number(require(root, "extra", "plan file"), "plan extra");
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (const Json& v : require(root, "stakes", "plan file")) {
    note_unknown_keys(v, {"id", "stake"}, "stake entry", strict, warnings);
    stakes.emplace_back(parse_id(require(v, "id", "stake entry"), "stake id"),
                        parse_number(require(v, "stake", "stake entry"), "stake"));
  }
  d.augmented = StakeVector(std::move(stakes));
  for (const Json& s : require(root, "splits", "plan file")) {
    note_unknown_keys(s, {"validator", "allocations"}, "split entry", strict, warnings);
    const NodeId vid = parse_id(require(s, "validator", "split entry"), "split validator");
    auto& split = d.plan.splits[vid];
    for (const Json& a : require(s, "allocations", "split entry")) {
      note_unknown_keys(a, {"service", "stake"}, "split allocation", strict, warnings);
      split[parse_id(require(a, "service", "split allocation"), "split service")] =
          parse_number(require(a, "stake", "split allocation"), "split stake");
    }
  }
  if (auto it = root.find("selected_services"); it != root.end())
    for (const Json& s : *it) d.selected_services.push_back(parse_id(s, "selected service"));
  if (auto it = root.find("notes"); it != root.end())
    for (const Json& s : *it) d.notes.push_back(s.get<std::string>());
  return d;
}

std::string serialize_plan_document(const AugmentedDivision& division) {
  Json root;
  root["method"] = division.method;
  root["extra"] = division.extra.str();
  root["stakes"] = Json::array();
  for (const auto& [vid, stake] : division.augmented.entries()) {
    Json j;
    j["id"] = vid;
    j["stake"] = stake.str();
    root["stakes"].push_back(std::move(j));
  }
  root["splits"] = Json::array();
  for (const auto& [vid, split] : division.plan.splits) {
    Json j;
    j["validator"] = vid;
    j["allocations"] = Json::array();
    for (const auto& [sid, amount] : split) {
      Json a;
      a["service"] = sid;
      a["stake"] = amount.str();
      j["allocations"].push_back(std::move(a));
    }
    root["splits"].push_back(std::move(j));
  }
  if (!division.selected_services.empty()) root["selected_services"] = division.selected_services;
  if (!division.notes.empty()) root["notes"] = division.notes;
  return root.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << text;
}

}  // namespace restake
