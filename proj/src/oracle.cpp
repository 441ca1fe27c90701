#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "restake/errors.hpp"
#include "restake/savings.hpp"

namespace restake {

namespace {

// Star security on a bare allocation vector: insecure iff some subset holds
// stake strictly above alpha * total while staying strictly below pi.
// Mirrors pos_is_secure; kept local so the oracle's inner loop stays lean.
struct StarScan {
  const std::vector<Rat>& alloc;
  Rat threshold;
  bool found = false;
  Rat best{};

  void dfs(int i, Rat sum) {
    if (found && sum >= best) return;
    if (i < 0) {
      if (sum > threshold) {
        found = true;
        best = std::move(sum);
      }
      return;
    }
    dfs(i - 1, sum);
    dfs(i - 1, sum + alloc[static_cast<std::size_t>(i)]);
  }
};

bool star_secure(const std::vector<Rat>& alloc, const Rat& alpha, const Rat& pi) {
  if (!pi.is_positive()) return true;
  Rat total;
  for (const Rat& a : alloc) total += a;
  if (!total.is_positive()) return false;  // valued service left unbacked
  StarScan scan{alloc, alpha * total};
  scan.dfs(static_cast<int>(alloc.size()) - 1, Rat(0));
  return !scan.found || scan.best >= pi;
}

// ---------------------------------------------------------------------------
// Restaking-savings oracle.
//
// Candidates are stake additions in grid units, enumerated level by level
// (total added units ascending), so the first feasible level is the grid
// minimum. A candidate is feasible when some division of the augmented
// stakes secures every service: degree-1 validators are forced, free
// validators enumerate grid splits (or all-to-one splits when their stake is
// off-grid). Two accelerators keep the scan cheap: a memo of star-security
// verdicts keyed by the exact allocation, and, for services with a single
// free neighbor, a memoized minimum secure contribution that rejects most
// candidates without any split enumeration.
// ---------------------------------------------------------------------------

enum class Role : std::uint8_t { Forced, Free, Isolated };

struct OracleSetup {
  const RestakingGraph& graph;
  Rat granularity;
  std::vector<Rat> sigma;

  OracleSetup(const RestakingGraph& g, Rat gran, std::vector<Rat> stakes)
      : graph(g), granularity(std::move(gran)), sigma(std::move(stakes)) {}

  std::vector<Role> role;                   // per validator index
  std::vector<std::uint32_t> addable;       // validator indices that may receive stake
  std::vector<std::uint32_t> free_list;     // validator indices with degree >= 2
  std::vector<char> on_grid;                // sigma_v is a multiple of g
  std::vector<long> sigma_units;            // meaningful when on grid
  std::vector<char> relevant;               // per service: value > 0
  std::vector<std::vector<std::uint32_t>> single_free_services;  // per free rank
  long budget_units = 0;
  long max_contribution_units = 0;
};

struct ThreadCtx {
  std::unordered_map<std::string, char> star_memo;
  std::unordered_map<std::string, long> min_memo;
  std::vector<std::vector<std::string>> token;  // [validator][added units] -> stake string
  std::vector<std::vector<Rat>> stake_of;       // same shape, the value itself

  const std::string& token_for(const OracleSetup& su, std::uint32_t vi, long k) {
    auto& cache = token[vi];
    auto& values = stake_of[vi];
    while (static_cast<long>(cache.size()) <= k) {
      const Rat v = su.sigma[vi] + Rat(static_cast<long>(cache.size())) * su.granularity;
      cache.push_back(v.str());
      values.push_back(v);
    }
    return cache[static_cast<std::size_t>(k)];
  }
  const Rat& stake_for(const OracleSetup& su, std::uint32_t vi, long k) {
    token_for(su, vi, k);
    return stake_of[vi][static_cast<std::size_t>(k)];
  }
};

// Per-candidate feasibility check.
struct Feasibility {
  const OracleSetup& su;
  ThreadCtx& tc;
  const std::vector<long>& added;  // units per validator index

  // per service: allocation values and key tokens, by neighbor position
  std::vector<std::vector<Rat>> alloc;
  std::vector<std::vector<std::string>> tokens;
  std::vector<int> undecided;  // free neighbors not yet assigned
  std::vector<std::vector<std::uint32_t>> pos_of_validator;  // per service, parallel to neighbors

  Feasibility(const OracleSetup& setup, ThreadCtx& thread_ctx, const std::vector<long>& k)
      : su(setup), tc(thread_ctx), added(k) {}

  bool secure_by_memo(std::size_t si) {
    std::string key = std::to_string(si);
    for (const std::string& t : tokens[si]) {
      key += '|';
      key += t;
    }
    auto [it, inserted] = tc.star_memo.try_emplace(key, 2);
    if (inserted) {
      const ServiceSpec& s = su.graph.service_at(si);
      it->second = star_secure(alloc[si], s.alpha, s.value) ? 1 : 0;
    }
    return it->second == 1;
  }

  // Minimum secure grid contribution for the single free slot of service si,
  // with every other neighbor forced. -1 when nothing up to the global
  // maximum works.
  long min_secure_contribution(std::size_t si, std::size_t free_pos) {
    std::string key = "m" + std::to_string(si);
    for (std::size_t p = 0; p < tokens[si].size(); ++p) {
      key += '|';
      key += p == free_pos ? std::string("?") : tokens[si][p];
    }
    auto [it, inserted] = tc.min_memo.try_emplace(key, -2);
    if (inserted) {
      const ServiceSpec& s = su.graph.service_at(si);
      long min_c = -1;
      for (long c = 0; c <= su.max_contribution_units; ++c) {
        alloc[si][free_pos] = Rat(c) * su.granularity;
        if (star_secure(alloc[si], s.alpha, s.value)) {
          min_c = c;
          break;
        }
      }
      alloc[si][free_pos] = Rat(0);
      it->second = min_c;
    }
    return it->second;
  }

  bool run() {
    const RestakingGraph& g = su.graph;
    const std::size_t m = g.num_services();
    alloc.assign(m, {});
    tokens.assign(m, {});
    undecided.assign(m, 0);
    pos_of_validator.assign(m, {});

    for (std::size_t si = 0; si < m; ++si) {
      const auto& nb = g.service_neighbors(si);
      alloc[si].assign(nb.size(), Rat(0));
      tokens[si].assign(nb.size(), {});
      pos_of_validator[si].assign(nb.size(), 0);
      for (std::size_t p = 0; p < nb.size(); ++p) {
        const std::uint32_t vi = nb[p];
        pos_of_validator[si][p] = vi;
        if (su.role[vi] == Role::Forced) {
          alloc[si][p] = tc.stake_for(su, vi, added[vi]);
          tokens[si][p] = tc.token_for(su, vi, added[vi]);
        } else if (su.role[vi] == Role::Free) {
          ++undecided[si];
        }
        // isolated validators never appear as neighbors
      }
      if (su.relevant[si] && undecided[si] == 0 && !secure_by_memo(si)) return false;
    }

    // Necessary condition: a free validator must be able to pay the minimum
    // secure contribution of every service it alone completes.
    for (std::size_t rank = 0; rank < su.free_list.size(); ++rank) {
      const std::uint32_t vi = su.free_list[rank];
      if (!su.on_grid[vi]) continue;
      const long capacity = su.sigma_units[vi] + added[vi];
      long need = 0;
      for (std::uint32_t si : su.single_free_services[rank]) {
        if (!su.relevant[si]) continue;
        std::size_t free_pos = 0;
        const auto& nb = g.service_neighbors(si);
        for (std::size_t p = 0; p < nb.size(); ++p)
          if (nb[p] == vi) free_pos = p;
        const long min_c = min_secure_contribution(si, free_pos);
        if (min_c < 0) return false;
        need += min_c;
        if (need > capacity) return false;
      }
    }
    return assign_free(0);
  }

  bool assign_free(std::size_t rank) {
    if (rank == su.free_list.size()) return true;
    const std::uint32_t vi = su.free_list[rank];
    const auto& services = su.graph.validator_neighbors(vi);
    if (su.on_grid[vi])
      return split_grid(rank, vi, services, 0, su.sigma_units[vi] + added[vi]);
    return split_all_to_one(rank, vi, services);
  }

  bool place(std::uint32_t vi, std::uint32_t si, const Rat& amount, std::string token) {
    std::size_t p = 0;
    const auto& nb = su.graph.service_neighbors(si);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (nb[i] == vi) p = i;
    alloc[si][p] = amount;
    tokens[si][p] = std::move(token);
    --undecided[si];
    if (undecided[si] == 0 && su.relevant[si]) return secure_by_memo(si);
    return true;
  }

  void unplace(std::uint32_t vi, std::uint32_t si) {
    std::size_t p = 0;
    const auto& nb = su.graph.service_neighbors(si);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (nb[i] == vi) p = i;
    alloc[si][p] = Rat(0);
    tokens[si][p].clear();
    ++undecided[si];
  }

  bool split_grid(std::size_t rank, std::uint32_t vi,
                  const std::vector<std::uint32_t>& services, std::size_t slot, long remaining) {
    if (slot + 1 == services.size()) {
      const std::uint32_t si = services[slot];
      const bool ok = place(vi, si, Rat(remaining) * su.granularity,
                            "c" + std::to_string(remaining));
      const bool done = ok && assign_free(rank + 1);
      unplace(vi, si);
      return done;
    }
    const std::uint32_t si = services[slot];
    for (long c = 0; c <= remaining; ++c) {
      const bool ok = place(vi, si, Rat(c) * su.granularity, "c" + std::to_string(c));
      if (ok && split_grid(rank, vi, services, slot + 1, remaining - c)) return true;
      unplace(vi, si);
    }
    return false;
  }

  bool split_all_to_one(std::size_t rank, std::uint32_t vi,
                        const std::vector<std::uint32_t>& services) {
    const Rat& stake = tc.stake_for(su, vi, added[vi]);
    const std::string& token = tc.token_for(su, vi, added[vi]);
    for (std::size_t target = 0; target < services.size(); ++target) {
      bool ok = true;
      std::size_t placed = 0;
      for (std::size_t j = 0; j < services.size(); ++j) {
        const bool is_target = j == target;
        ok = place(vi, services[j], is_target ? stake : Rat(0),
                   is_target ? "r" + token : std::string("c0"));
        ++placed;
        if (!ok) break;
      }
      if (ok && assign_free(rank + 1)) return true;
      for (std::size_t j = 0; j < placed; ++j) unplace(vi, services[j]);
    }
    return false;
  }
};

// Enumerates compositions of `total` units over su.addable and calls
// `feasible` on each until one succeeds. Runs the first coordinate across
// threads; the outcome (does any candidate at this level work) is
// order-independent.
bool any_candidate_feasible(const OracleSetup& su, long total,
                            std::vector<ThreadCtx>& thread_ctxs) {
  const std::size_t width = su.addable.size();
  if (width == 0) {
    if (total != 0) return false;
    std::vector<long> k(su.graph.num_validators(), 0);
    Feasibility f(su, thread_ctxs[0], k);
    return f.run();
  }

  std::atomic<bool> hit{false};

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long c0 = 0; c0 <= total; ++c0) {
    if (hit.load(std::memory_order_relaxed)) continue;
    if (width == 1 && c0 != total) continue;  // a single recipient takes everything
#ifdef _OPENMP
    ThreadCtx& tc = thread_ctxs[static_cast<std::size_t>(omp_get_thread_num())];
#else
    ThreadCtx& tc = thread_ctxs[0];
#endif
    std::vector<long> k(su.graph.num_validators(), 0);
    k[su.addable[0]] = c0;

    // distribute the remainder over addable[1..]
    auto rec = [&](auto&& self, std::size_t idx, long remaining) -> bool {
      if (hit.load(std::memory_order_relaxed)) return true;
      if (idx + 1 == su.addable.size()) {
        k[su.addable[idx]] = remaining;
        Feasibility f(su, tc, k);
        const bool ok = f.run();
        k[su.addable[idx]] = 0;
        return ok;
      }
      for (long c = 0; c <= remaining; ++c) {
        k[su.addable[idx]] = c;
        if (self(self, idx + 1, remaining - c)) {
          k[su.addable[idx]] = 0;
          return true;
        }
      }
      k[su.addable[idx]] = 0;
      return false;
    };

    bool ok;
    if (width == 1) {
      Feasibility f(su, tc, k);
      ok = f.run();
    } else {
      ok = rec(rec, 1, total - c0);
    }
    if (ok) hit.store(true, std::memory_order_relaxed);
  }
  return hit.load();
}

}  // namespace

std::optional<Rat> rs_exact_oracle(const RestakingGraph& graph, const StakeVector& stakes,
                                   const Rat& granularity, const Rat& budget,
                                   std::size_t validator_cap, std::size_t service_cap) {
  if (!granularity.is_positive()) throw InputError("oracle granularity must be positive");
  if (budget.is_negative()) throw InputError("oracle budget must be nonnegative");
  if (graph.num_validators() > validator_cap)
    throw CapacityError("savings oracle over " + std::to_string(graph.num_validators()) +
                        " validators exceeds its cap of " + std::to_string(validator_cap));
  if (graph.num_services() > service_cap)
    throw CapacityError("savings oracle over " + std::to_string(graph.num_services()) +
                        " services exceeds its cap of " + std::to_string(service_cap));

  const Rat total = stakes.total();
  if (!total.is_positive()) throw DegenerateInputError("total stake is zero");

  OracleSetup su(graph, granularity, aligned_stakes(graph, stakes));
  const std::size_t n = graph.num_validators();
  su.role.resize(n);
  su.on_grid.resize(n);
  su.sigma_units.resize(n, 0);
  for (std::size_t vi = 0; vi < n; ++vi) {
    const std::size_t deg = graph.validator_neighbors(vi).size();
    if (deg == 0) {
      // A stranded positive stake can never be divided, at any budget.
      if (su.sigma[vi].is_positive()) return std::nullopt;
      su.role[vi] = Role::Isolated;
    } else if (deg == 1) {
      su.role[vi] = Role::Forced;
      su.addable.push_back(static_cast<std::uint32_t>(vi));
    } else {
      su.role[vi] = Role::Free;
      su.addable.push_back(static_cast<std::uint32_t>(vi));
      su.free_list.push_back(static_cast<std::uint32_t>(vi));
    }
    const Rat units = su.sigma[vi] / granularity;
    su.on_grid[vi] = units.is_integer() ? 1 : 0;
    if (su.on_grid[vi]) su.sigma_units[vi] = Rat::floor_div(su.sigma[vi], granularity);
  }
  su.relevant.resize(graph.num_services());
  for (std::size_t si = 0; si < graph.num_services(); ++si)
    su.relevant[si] = graph.service_at(si).value.is_positive() ? 1 : 0;

  // services completed by exactly one free validator, grouped by that validator
  su.single_free_services.resize(su.free_list.size());
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    std::uint32_t only_free = UINT32_MAX;
    int free_count = 0;
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      if (su.role[vi] == Role::Free) {
        ++free_count;
        only_free = vi;
      }
    }
    if (free_count == 1) {
      for (std::size_t rank = 0; rank < su.free_list.size(); ++rank)
        if (su.free_list[rank] == only_free)
          su.single_free_services[rank].push_back(static_cast<std::uint32_t>(si));
    }
  }

  su.budget_units = Rat::floor_div(budget, granularity);
  Rat max_stake;
  for (std::size_t vi = 0; vi < n; ++vi) max_stake = std::max(max_stake, su.sigma[vi]);
  su.max_contribution_units = Rat::floor_div(max_stake + budget, granularity);

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::vector<ThreadCtx> thread_ctxs(static_cast<std::size_t>(threads));
  for (ThreadCtx& tc : thread_ctxs) {
    tc.token.resize(n);
    tc.stake_of.resize(n);
  }

  for (long t = 0; t <= su.budget_units; ++t) {
    if (any_candidate_feasible(su, t, thread_ctxs))
      return Rat(t) * granularity / total;
  }
  return std::nullopt;
}

std::optional<Rat> poss_exact_oracle(const RestakingGraph& graph, const StakeVector& stakes,
                                     const Rat& granularity, const Rat& budget,
                                     std::size_t validator_cap) {
  if (!granularity.is_positive()) throw InputError("oracle granularity must be positive");
  if (budget.is_negative()) throw InputError("oracle budget must be nonnegative");
  const std::size_t n = graph.num_validators();
  if (n > validator_cap)
    throw CapacityError("PoS-savings oracle over " + std::to_string(n) +
                        " validators exceeds its cap of " + std::to_string(validator_cap));

  const Rat total = stakes.total();
  if (!total.is_positive()) throw DegenerateInputError("total stake is zero");
  const long budget_units = Rat::floor_div(budget, granularity);

  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);

  auto secure_with = [&](const std::vector<long>& added) {
    std::vector<std::pair<NodeId, Rat>> entries;
    for (std::size_t vi = 0; vi < n; ++vi)
      entries.emplace_back(graph.validator_at(vi),
                           sigma[vi] + Rat(added[vi]) * granularity);
    SecurityOptions opts;
    opts.parallel = false;  // candidates are already spread across threads
    return is_secure_exact(graph, StakeVector(std::move(entries)), opts).secure;
  };

  for (long t = 0; t <= budget_units; ++t) {
    std::atomic<bool> hit{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long c0 = 0; c0 <= t; ++c0) {
      if (hit.load(std::memory_order_relaxed)) continue;
      if (n == 1 && c0 != t) continue;
      std::vector<long> added(n, 0);
      added[0] = c0;
      auto rec = [&](auto&& self, std::size_t idx, long remaining) -> bool {
        if (hit.load(std::memory_order_relaxed)) return true;
        if (idx + 1 >= n) {
          if (idx < n) added[idx] = remaining;
          const bool ok = secure_with(added);
          if (idx < n) added[idx] = 0;
          return ok;
        }
        for (long c = 0; c <= remaining; ++c) {
          added[idx] = c;
          if (self(self, idx + 1, remaining - c)) {
            added[idx] = 0;
            return true;
          }
        }
        added[idx] = 0;
        return false;
      };
      bool ok;
      if (n == 1) {
        ok = secure_with(added);
      } else {
        ok = rec(rec, 1, t - c0);
      }
      if (ok) hit.store(true, std::memory_order_relaxed);
    }
    if (hit.load()) return Rat(t) * granularity / total;
  }
  return std::nullopt;
}

}  // namespace restake
