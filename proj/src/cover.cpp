#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "restake/division.hpp"
#include "restake/errors.hpp"

namespace restake {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits make_bits(std::size_t n) { return Bits((n + 63) / 64, 0); }

void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

bool covers_all(const Bits& a, const Bits& b, const Bits& full) {
  for (std::size_t i = 0; i < full.size(); ++i)
    if ((a[i] | b[i]) != full[i]) return false;
  return true;
}

// Exact search for a cover minimizing the maximum incidence. Services are
// enumerated in ascending-id order, exclude-first, so the first cover
// achieving the optimum is the one reported. Two cuts: the running maximum
// incidence only grows as services are added, and a branch whose remaining
// services cannot close the coverage gap is dead.
struct ExactCoverSearch {
  const RestakingGraph& graph;
  std::size_t m, n;
  Bits full;
  std::vector<Bits> suffix_union;  // validators coverable by services si..m-1

  std::vector<std::size_t> incidence;
  Bits covered;
  std::size_t covered_count = 0;
  std::size_t current_max = 0;
  std::vector<std::uint32_t> chosen;

  bool found = false;
  std::size_t best_k = 0;
  std::vector<std::uint32_t> best_cover;

  explicit ExactCoverSearch(const RestakingGraph& g)
      : graph(g), m(g.num_services()), n(g.num_validators()), incidence(n, 0) {
    full = make_bits(n);
    for (std::size_t vi = 0; vi < n; ++vi) set_bit(full, vi);
    covered = make_bits(n);
    suffix_union.assign(m + 1, make_bits(n));
    for (std::size_t si = m; si-- > 0;) {
      suffix_union[si] = suffix_union[si + 1];
      for (std::uint32_t vi : graph.service_neighbors(si)) set_bit(suffix_union[si], vi);
    }
  }

  void dfs(std::size_t si) {
    if (found && current_max >= best_k) return;
    if (si == m) {
      if (covered_count == n) {
        found = true;
        best_k = current_max;
        best_cover = chosen;
      }
      return;
    }
    if (!covers_all(covered, suffix_union[si], full)) return;

    dfs(si + 1);

    std::vector<std::uint32_t> newly;
    const std::size_t prev_max = current_max;
    for (std::uint32_t vi : graph.service_neighbors(si)) {
      if (incidence[vi] == 0) {
        set_bit(covered, vi);
        ++covered_count;
        newly.push_back(vi);
      }
      ++incidence[vi];
      current_max = std::max(current_max, incidence[vi]);
    }
    chosen.push_back(static_cast<std::uint32_t>(si));
    dfs(si + 1);
    chosen.pop_back();
    for (std::uint32_t vi : graph.service_neighbors(si)) --incidence[vi];
    for (std::uint32_t vi : newly) {
      covered[vi / 64] &= ~(std::uint64_t{1} << (vi % 64));
      --covered_count;
    }
    current_max = prev_max;
  }
};

}  // namespace

CoverResult compute_cover_K(const RestakingGraph& graph, CoverMode mode,
                            std::size_t service_cap) {
  const std::size_t n = graph.num_validators();
  const std::size_t m = graph.num_services();

  std::vector<char> reachable(n, 0);
  for (std::size_t si = 0; si < m; ++si)
    for (std::uint32_t vi : graph.service_neighbors(si)) reachable[vi] = 1;
  for (std::size_t vi = 0; vi < n; ++vi) {
    if (!reachable[vi])
      throw InputError("validator " + std::to_string(graph.validator_at(vi)) +
                       " is adjacent to no service; no cover exists");
  }

  if (mode == CoverMode::Exact) {
    if (m > service_cap)
      throw CapacityError("exact cover search over " + std::to_string(m) +
                          " services exceeds the cap of " + std::to_string(service_cap) +
                          "; use greedy mode");
    ExactCoverSearch search(graph);
    search.dfs(0);
    CoverResult result;
    for (std::uint32_t si : search.best_cover) result.cover.push_back(graph.service_at(si).id);
    result.incidence = search.best_k;
    return result;
  }

  // Greedy: repeatedly take the service covering the most uncovered
  // validators (lowest id on ties).
  std::vector<char> covered(n, 0);
  std::size_t uncovered = n;
  std::vector<std::size_t> incidence(n, 0);
  CoverResult result;
  while (uncovered > 0) {
    std::size_t best_si = m;
    std::size_t best_gain = 0;
    for (std::size_t si = 0; si < m; ++si) {
      std::size_t gain = 0;
      for (std::uint32_t vi : graph.service_neighbors(si))
        if (!covered[vi]) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best_si = si;
      }
    }
    if (best_si == m) break;  // unreachable given the pre-check
    for (std::uint32_t vi : graph.service_neighbors(best_si)) {
      if (!covered[vi]) {
        covered[vi] = 1;
        --uncovered;
      }
      ++incidence[vi];
    }
    result.cover.push_back(graph.service_at(best_si).id);
  }
  if (n > 0) result.incidence = *std::max_element(incidence.begin(), incidence.end());
  return result;
}

}  // namespace restake
