#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "restake/rat.hpp"

namespace restake {

using NodeId = std::uint32_t;

struct ServiceSpec {
  NodeId id = 0;
  Rat value;  // pi_s >= 0
  Rat alpha;  // 0 < alpha_s <= 1
};

/// Bipartite graph of services and validators. Immutable after creation;
/// the stake vector is deliberately kept separate.
class RestakingGraph {
 public:
  /// Validates and builds adjacency. Rules enforced here:
  ///  - 0 < alpha <= 1 and value >= 0 for every service,
  ///  - every service with positive value has at least one validator,
  ///  - edge endpoints exist, no duplicate edges, no duplicate ids.
  static RestakingGraph create(std::vector<ServiceSpec> services,
                               std::vector<NodeId> validators,
                               std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t num_services() const { return services_.size(); }
  std::size_t num_validators() const { return validators_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  const std::vector<ServiceSpec>& services() const { return services_; }
  const std::vector<NodeId>& validators() const { return validators_; }

  std::size_t service_index(NodeId id) const;    // throws InputError when unknown
  std::size_t validator_index(NodeId id) const;  // throws InputError when unknown
  bool has_service(NodeId id) const;
  bool has_validator(NodeId id) const;

  const ServiceSpec& service_at(std::size_t idx) const { return services_[idx]; }
  NodeId validator_at(std::size_t idx) const { return validators_[idx]; }

  // Adjacency in index space, each list sorted ascending.
  const std::vector<std::uint32_t>& service_neighbors(std::size_t sidx) const {
    return svc_adj_[sidx];
  }
  const std::vector<std::uint32_t>& validator_neighbors(std::size_t vidx) const {
    return val_adj_[vidx];
  }

  /// N_G(s) as validator ids, sorted ascending.
  std::vector<NodeId> service_neighborhood(NodeId service) const;
  /// N_G(v) as service ids, sorted ascending.
  std::vector<NodeId> validator_neighborhood(NodeId validator) const;

  std::size_t service_degree(NodeId service) const;
  std::size_t validator_degree(NodeId validator) const;
  std::size_t max_service_degree() const;

  /// Sum of service values.
  Rat total_value() const;

 private:
  RestakingGraph() = default;

  std::vector<ServiceSpec> services_;  // sorted by id
  std::vector<NodeId> validators_;     // sorted
  std::vector<std::vector<std::uint32_t>> svc_adj_;
  std::vector<std::vector<std::uint32_t>> val_adj_;
  std::size_t num_edges_ = 0;
};

/// Per-validator stakes. Entries are sorted by validator id; all stakes >= 0.
class StakeVector {
 public:
  StakeVector() = default;
  explicit StakeVector(std::vector<std::pair<NodeId, Rat>> stakes);

  const std::vector<std::pair<NodeId, Rat>>& entries() const { return entries_; }
  bool has(NodeId validator) const;
  const Rat& at(NodeId validator) const;  // throws InputError when missing
  std::size_t size() const { return entries_.size(); }

  Rat total() const;

 private:
  std::vector<std::pair<NodeId, Rat>> entries_;
};

/// T(sigma): exact total stake.
Rat total_stake(const StakeVector& stakes);

/// Stakes of exactly the graph's validator set, in validator-index order.
/// Throws InputError if the domains differ.
std::vector<Rat> aligned_stakes(const RestakingGraph& graph, const StakeVector& stakes);

/// One service's star protocol: a value, a security parameter, and a stake
/// allocation over its validators. Zero allocations are meaningful (they
/// declare participation).
class PoSInstance {
 public:
  static PoSInstance create(Rat value, Rat alpha,
                            std::vector<std::pair<NodeId, Rat>> allocations);

  const Rat& value() const { return value_; }
  const Rat& alpha() const { return alpha_; }
  const std::vector<std::pair<NodeId, Rat>>& allocations() const { return allocations_; }
  Rat total() const;

 private:
  PoSInstance() = default;
  Rat value_;
  Rat alpha_;
  std::vector<std::pair<NodeId, Rat>> allocations_;  // sorted by validator id
};

struct PoSProtocol {
  NodeId service = 0;
  PoSInstance instance;
};

/// Per-validator split of stake across the validator's services.
/// Missing entries for neighbor services are read as zero; allocations to
/// non-neighbors are rejected at verification time.
struct DivisionPlan {
  std::map<NodeId, std::map<NodeId, Rat>> splits;  // validator -> service -> amount
};

}  // namespace restake
