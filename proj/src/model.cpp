#include "restake/model.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "restake/errors.hpp"

namespace restake {

namespace {

std::string id_str(NodeId id) { return std::to_string(id); }

}  // namespace

RestakingGraph RestakingGraph::create(std::vector<ServiceSpec> services,
                                      std::vector<NodeId> validators,
                                      std::vector<std::pair<NodeId, NodeId>> edges) {
  RestakingGraph g;

  std::sort(services.begin(), services.end(),
            [](const ServiceSpec& a, const ServiceSpec& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < services.size(); ++i) {
    if (services[i].id == services[i - 1].id)
      throw InputError("duplicate service id " + id_str(services[i].id));
  }
  for (const ServiceSpec& s : services) {
    if (!s.alpha.is_positive() || s.alpha > Rat(1))
      throw InputError("service " + id_str(s.id) + ": alpha must satisfy 0 < alpha <= 1, got " +
                       s.alpha.str());
    if (s.value.is_negative())
      throw InputError("service " + id_str(s.id) + ": negative value " + s.value.str());
  }

  std::sort(validators.begin(), validators.end());
  for (std::size_t i = 1; i < validators.size(); ++i) {
    if (validators[i] == validators[i - 1])
      throw InputError("duplicate validator id " + id_str(validators[i]));
  }

  g.services_ = std::move(services);
  g.validators_ = std::move(validators);
  g.svc_adj_.resize(g.services_.size());
  g.val_adj_.resize(g.validators_.size());

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& [sid, vid] : edges) {
    if (!seen.insert({sid, vid}).second)
      throw InputError("duplicate edge (" + id_str(sid) + ", " + id_str(vid) + ")");
    const std::size_t si = g.service_index(sid);
    const std::size_t vi = g.validator_index(vid);
    g.svc_adj_[si].push_back(static_cast<std::uint32_t>(vi));
    g.val_adj_[vi].push_back(static_cast<std::uint32_t>(si));
  }
  for (auto& adj : g.svc_adj_) std::sort(adj.begin(), adj.end());
  for (auto& adj : g.val_adj_) std::sort(adj.begin(), adj.end());
  g.num_edges_ = seen.size();

  for (std::size_t si = 0; si < g.services_.size(); ++si) {
    if (g.services_[si].value.is_positive() && g.svc_adj_[si].empty())
      throw InputError("service " + id_str(g.services_[si].id) +
                       " has positive value but no validators");
  }
  return g;
}

std::size_t RestakingGraph::service_index(NodeId id) const {
  auto it = std::lower_bound(services_.begin(), services_.end(), id,
                             [](const ServiceSpec& s, NodeId key) { return s.id < key; });
  if (it == services_.end() || it->id != id)
    throw InputError("unknown service id " + id_str(id));
  return static_cast<std::size_t>(it - services_.begin());
}

std::size_t RestakingGraph::validator_index(NodeId id) const {
  auto it = std::lower_bound(validators_.begin(), validators_.end(), id);
  if (it == validators_.end() || *it != id)
    throw InputError("unknown validator id " + id_str(id));
  return static_cast<std::size_t>(it - validators_.begin());
}

bool RestakingGraph::has_service(NodeId id) const {
  auto it = std::lower_bound(services_.begin(), services_.end(), id,
                             [](const ServiceSpec& s, NodeId key) { return s.id < key; });
  return it != services_.end() && it->id == id;
}

bool RestakingGraph::has_validator(NodeId id) const {
  return std::binary_search(validators_.begin(), validators_.end(), id);
}

std::vector<NodeId> RestakingGraph::service_neighborhood(NodeId service) const {
  std::vector<NodeId> out;
  for (std::uint32_t vi : svc_adj_[service_index(service)]) out.push_back(validators_[vi]);
  return out;
}

std::vector<NodeId> RestakingGraph::validator_neighborhood(NodeId validator) const {
  std::vector<NodeId> out;
  for (std::uint32_t si : val_adj_[validator_index(validator)]) out.push_back(services_[si].id);
  return out;
}

std::size_t RestakingGraph::service_degree(NodeId service) const {
  return svc_adj_[service_index(service)].size();
}

std::size_t RestakingGraph::validator_degree(NodeId validator) const {
  return val_adj_[validator_index(validator)].size();
}

std::size_t RestakingGraph::max_service_degree() const {
  std::size_t d = 0;
  for (const auto& adj : svc_adj_) d = std::max(d, adj.size());
  return d;
}

Rat RestakingGraph::total_value() const {
  Rat sum;
  for (const ServiceSpec& s : services_) sum += s.value;
  return sum;
}

StakeVector::StakeVector(std::vector<std::pair<NodeId, Rat>> stakes) : entries_(std::move(stakes)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first == entries_[i - 1].first)
      throw InputError("duplicate stake entry for validator " + id_str(entries_[i].first));
    if (entries_[i].second.is_negative())
      throw InputError("validator " + id_str(entries_[i].first) + ": negative stake " +
                       entries_[i].second.str());
  }
}

bool StakeVector::has(NodeId validator) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), validator,
                             [](const auto& e, NodeId key) { return e.first < key; });
  return it != entries_.end() && it->first == validator;
}

const Rat& StakeVector::at(NodeId validator) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), validator,
                             [](const auto& e, NodeId key) { return e.first < key; });
  if (it == entries_.end() || it->first != validator)
    throw InputError("no stake entry for validator " + id_str(validator));
  return it->second;
}

Rat StakeVector::total() const {
  Rat sum;
  for (const auto& [id, stake] : entries_) sum += stake;
  return sum;
}

Rat total_stake(const StakeVector& stakes) { return stakes.total(); }

std::vector<Rat> aligned_stakes(const RestakingGraph& graph, const StakeVector& stakes) {
  if (stakes.size() != graph.num_validators())
    throw InputError("stake vector has " + std::to_string(stakes.size()) +
                     " entries, graph has " + std::to_string(graph.num_validators()) +
                     " validators");
  std::vector<Rat> out;
  out.reserve(graph.num_validators());
  for (NodeId id : graph.validators()) out.push_back(stakes.at(id));
  return out;
}

PoSInstance PoSInstance::create(Rat value, Rat alpha,
                                std::vector<std::pair<NodeId, Rat>> allocations) {
  if (!alpha.is_positive() || alpha > Rat(1))
    throw InputError("PoS instance: alpha must satisfy 0 < alpha <= 1, got " + alpha.str());
  if (value.is_negative())
    throw InputError("PoS instance: negative value " + value.str());
  std::sort(allocations.begin(), allocations.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < allocations.size(); ++i) {
    if (i > 0 && allocations[i].first == allocations[i - 1].first)
      throw InputError("PoS instance: duplicate allocation for validator " +
                       id_str(allocations[i].first));
    if (allocations[i].second.is_negative())
      throw InputError("PoS instance: negative allocation for validator " +
                       id_str(allocations[i].first));
  }
  PoSInstance p;
  p.value_ = std::move(value);
  p.alpha_ = std::move(alpha);
  p.allocations_ = std::move(allocations);
  return p;
}

Rat PoSInstance::total() const {
  Rat sum;
  for (const auto& [id, c] : allocations_) sum += c;
  return sum;
}

}  // namespace restake
