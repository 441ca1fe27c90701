#include "restake/security.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "restake/errors.hpp"

namespace restake {

namespace {

// Shared setup for coalition enumeration. Validators are ordered by
// descending stake (ascending id on ties); position i carries canonical
// weight 2^(n-1-i), and the coalition with the smallest canonical mask is
// "first". Only services that can contribute value to an attack (positive
// value, positive adjacent stake) are tracked.
struct EnumSetup {
  std::vector<std::uint32_t> order;  // position -> validator index
  std::vector<Rat> stake;            // by position
  std::vector<Rat> threshold;        // per tracked service: alpha * total
  std::vector<Rat> value;            // per tracked service: pi
  std::vector<std::vector<std::uint32_t>> tracked_of_pos;  // position -> tracked ordinals
};

EnumSetup make_setup(const RestakingGraph& graph, const std::vector<Rat>& sigma) {
  const std::size_t n = graph.num_validators();
  EnumSetup su;
  su.order.resize(n);
  std::iota(su.order.begin(), su.order.end(), 0u);
  std::sort(su.order.begin(), su.order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (sigma[a] != sigma[b]) return sigma[a] > sigma[b];
    return graph.validator_at(a) < graph.validator_at(b);
  });
  su.stake.reserve(n);
  for (std::uint32_t vi : su.order) su.stake.push_back(sigma[vi]);

  std::vector<std::uint32_t> pos_of_index(n);
  for (std::uint32_t p = 0; p < n; ++p) pos_of_index[su.order[p]] = p;

  su.tracked_of_pos.resize(n);
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    const ServiceSpec& s = graph.service_at(si);
    Rat total;
    for (std::uint32_t vi : graph.service_neighbors(si)) total += sigma[vi];
    if (!total.is_positive()) {
      if (s.value.is_positive())
        throw DegenerateInputError("service " + std::to_string(s.id) +
                                   " has zero total adjacent stake");
      continue;  // valueless and unstaked: irrelevant to profit
    }
    if (!s.value.is_positive()) continue;
    const std::uint32_t t = static_cast<std::uint32_t>(su.threshold.size());
    su.threshold.push_back(s.alpha * total);
    su.value.push_back(s.value);
    for (std::uint32_t vi : graph.service_neighbors(si))
      su.tracked_of_pos[pos_of_index[vi]].push_back(t);
  }
  return su;
}

// Incremental search state along one root-to-node path.
//
// `avail` holds the stake that the coalition plus all still-undecided
// validators contribute to each tracked service. Since the attack set is
// monotone in the coalition, value(attackable under avail) - stake(W)
// bounds the profit of every completion, and a non-positive bound kills the
// subtree.
struct SearchState {
  const EnumSetup* su;

  std::vector<Rat> in_w;     // per tracked service: coalition stake
  std::vector<Rat> avail;    // per tracked service: coalition + undecided stake
  std::vector<char> w_attacks;
  std::vector<char> avail_attacks;
  Rat w_value;      // value attackable by the coalition
  Rat avail_value;  // value attackable by coalition + undecided
  Rat sigma_w;
  std::vector<std::uint32_t> included;  // positions, ascending

  // task-local best, used only in exhaustive mode
  bool found = false;
  Rat best_profit;
  std::vector<std::uint32_t> witness;

  explicit SearchState(const EnumSetup& setup) : su(&setup) {
    const std::size_t m = setup.threshold.size();
    in_w.assign(m, Rat(0));
    avail.assign(m, Rat(0));
    w_attacks.assign(m, 0);
    avail_attacks.assign(m, 0);
    for (std::size_t p = 0; p < setup.stake.size(); ++p)
      for (std::uint32_t t : setup.tracked_of_pos[p]) avail[t] += setup.stake[p];
    for (std::size_t t = 0; t < m; ++t) {
      if (avail[t] > setup.threshold[t]) {
        avail_attacks[t] = 1;
        avail_value += setup.value[t];
      }
    }
  }

  void include(std::size_t pos) {
    sigma_w += su->stake[pos];
    included.push_back(static_cast<std::uint32_t>(pos));
    for (std::uint32_t t : su->tracked_of_pos[pos]) {
      in_w[t] += su->stake[pos];
      if (!w_attacks[t] && in_w[t] > su->threshold[t]) {
        w_attacks[t] = 1;
        w_value += su->value[t];
      }
    }
  }

  void undo_include(std::size_t pos) {
    sigma_w -= su->stake[pos];
    included.pop_back();
    for (std::uint32_t t : su->tracked_of_pos[pos]) {
      in_w[t] -= su->stake[pos];
      if (w_attacks[t] && !(in_w[t] > su->threshold[t])) {
        w_attacks[t] = 0;
        w_value -= su->value[t];
      }
    }
  }

  void exclude(std::size_t pos) {
    for (std::uint32_t t : su->tracked_of_pos[pos]) {
      avail[t] -= su->stake[pos];
      if (avail_attacks[t] && !(avail[t] > su->threshold[t])) {
        avail_attacks[t] = 0;
        avail_value -= su->value[t];
      }
    }
  }

  void undo_exclude(std::size_t pos) {
    for (std::uint32_t t : su->tracked_of_pos[pos]) {
      avail[t] += su->stake[pos];
      if (!avail_attacks[t] && avail[t] > su->threshold[t]) {
        avail_attacks[t] = 1;
        avail_value += su->value[t];
      }
    }
  }

  bool subtree_dead(bool exhaustive) const {
    // Upper bound on the profit of any completion of the current prefix.
    if (exhaustive && found) return !(avail_value > sigma_w + best_profit);
    return !(avail_value > sigma_w);
  }
};

struct Record {
  std::uint64_t mask = 0;  // canonical order key
  Rat profit;
  std::vector<std::uint32_t> positions;
};

// Depth-first driver. The exclude branch stays in the current task (it
// precedes in canonical order); at shallow depths the include branch is
// spawned as an OpenMP task on a copy of the state. Every profitable
// coalition that could be the winner is guaranteed to be recorded, so the
// reduction (smallest mask, or largest profit with smallest mask on ties)
// is independent of scheduling.
struct Driver {
  const EnumSetup& su;
  std::size_t n;
  bool exhaustive;
  int spawn_limit;  // spawn tasks at depths strictly below this; -1 disables

  std::atomic<std::uint64_t> first_hit{UINT64_MAX};
  std::mutex mu;
  std::vector<Record> records;

  Driver(const EnumSetup& setup, bool exhaustive_mode, int limit)
      : su(setup), n(setup.stake.size()), exhaustive(exhaustive_mode), spawn_limit(limit) {}

  std::uint64_t mask_of(const std::vector<std::uint32_t>& positions) const {
    std::uint64_t mask = 0;
    for (std::uint32_t p : positions) mask |= std::uint64_t{1} << (n - 1 - p);
    return mask;
  }

  void record(std::uint64_t mask, const Rat& profit, const std::vector<std::uint32_t>& positions) {
    if (!exhaustive) {
      std::uint64_t cur = first_hit.load(std::memory_order_relaxed);
      while (mask < cur &&
             !first_hit.compare_exchange_weak(cur, mask, std::memory_order_relaxed)) {
      }
    }
    const std::lock_guard<std::mutex> lock(mu);
    records.push_back({mask, profit, positions});
  }

  // Handles the check event of the coalition formed right after an include.
  // Returns true when the current task may stop: everything left in its
  // subtree comes later in canonical order than the recorded hit.
  bool note_coalition(SearchState& st, std::uint64_t mask) {
    if (!(st.w_value > st.sigma_w)) return false;
    const Rat profit = st.w_value - st.sigma_w;
    if (exhaustive) {
      if (!st.found || profit > st.best_profit) {
        st.found = true;
        st.best_profit = profit;
        st.witness = st.included;
      }
      return false;
    }
    record(mask, profit, st.included);
    return true;
  }

  // Entered with `pos` undecided and `mask` the canonical key of the
  // current coalition (the low end of this subtree's key interval).
  bool explore(SearchState& st, std::size_t pos, std::uint64_t mask) {
    if (!exhaustive && mask > first_hit.load(std::memory_order_relaxed))
      return false;  // an earlier coalition already won
    if (st.subtree_dead(exhaustive)) return false;
    if (pos == n) return false;

    const std::uint64_t imask = mask | (std::uint64_t{1} << (n - 1 - pos));
#ifdef _OPENMP
    if (static_cast<int>(pos) < spawn_limit) {
      auto child = std::make_shared<SearchState>(st);
#pragma omp task firstprivate(child, pos, imask)
      descend_include(*child, pos, imask);
      st.exclude(pos);
      const bool stop = explore(st, pos + 1, mask);
      st.undo_exclude(pos);
      // A hit in the exclude subtree precedes everything in the include
      // subtree, which will cancel itself against first_hit.
      return stop;
    }
#endif
    st.exclude(pos);
    bool stop = explore(st, pos + 1, mask);
    st.undo_exclude(pos);
    if (stop) return true;

    st.include(pos);
    stop = note_coalition(st, imask);
    if (!stop) stop = explore(st, pos + 1, imask);
    st.undo_include(pos);
    return stop;
  }

  void descend_include(SearchState& st, std::size_t pos, std::uint64_t imask) {
    st.include(pos);
    if (!note_coalition(st, imask)) explore(st, pos + 1, imask);
    if (exhaustive && st.found) record(mask_of(st.witness), st.best_profit, st.witness);
  }

  void descend_root(SearchState& st) {
    explore(st, 0, 0);  // the empty coalition has zero profit; never a witness
    if (exhaustive && st.found) record(mask_of(st.witness), st.best_profit, st.witness);
  }

  Record reduce() const {
    Record best;
    bool have = false;
    for (const Record& r : records) {
      if (!have) {
        best = r;
        have = true;
        continue;
      }
      if (exhaustive) {
        if (r.profit > best.profit || (r.profit == best.profit && r.mask < best.mask)) best = r;
      } else if (r.mask < best.mask) {
        best = r;
      }
    }
    best.mask = have ? best.mask : UINT64_MAX;
    return best;
  }

  bool anything() const { return !records.empty(); }
};

}  // namespace

SecurityVerdict is_secure_exact(const RestakingGraph& graph, const StakeVector& stakes,
                                const SecurityOptions& options) {
  const std::size_t n = graph.num_validators();
  if (n > options.enumeration_cap)
    throw CapacityError("exact security check over " + std::to_string(n) +
                        " validators exceeds the enumeration cap of " +
                        std::to_string(options.enumeration_cap) +
                        "; use the sufficient condition or constructive bounds, or raise the cap");
  if (n > 64)
    throw CapacityError("exact security check is limited to 64 validators");  // order keys are 64-bit

  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);
  const EnumSetup su = make_setup(graph, sigma);

  int spawn_limit = -1;
#ifdef _OPENMP
  if (options.parallel && n >= 16 && omp_get_max_threads() > 1)
    spawn_limit = static_cast<int>(n) - 8;  // keep leaf-side subtrees serial
#endif

  Driver driver(su, options.exhaustive, spawn_limit);
  {
    SearchState root(su);
#ifdef _OPENMP
    if (spawn_limit > 0) {
#pragma omp parallel
#pragma omp single nowait
      driver.descend_root(root);
    } else {
      driver.descend_root(root);
    }
#else
    driver.descend_root(root);
#endif
  }

  if (!driver.anything()) return {true, std::nullopt};
  const Record winner = driver.reduce();

  ValidatorSet coalition;
  coalition.reserve(winner.positions.size());
  for (std::uint32_t pos : winner.positions)
    coalition.push_back(graph.validator_at(su.order[pos]));
  std::sort(coalition.begin(), coalition.end());

  AttackWitness w;
  w.coalition = coalition;
  w.attacked = maximal_attack_set(graph, stakes, coalition);
  w.profit = winner.profit;
  return {false, std::move(w)};
}

SufficiencyReport satisfies_sufficient_condition(const RestakingGraph& graph,
                                                 const StakeVector& stakes) {
  const std::vector<Rat> sigma = aligned_stakes(graph, stakes);

  // weight_s = (pi_s / alpha_s) / total_s, shared across the service's validators
  std::vector<Rat> weight(graph.num_services());
  for (std::size_t si = 0; si < graph.num_services(); ++si) {
    if (graph.service_neighbors(si).empty()) continue;
    Rat total;
    for (std::uint32_t vi : graph.service_neighbors(si)) total += sigma[vi];
    if (!total.is_positive())
      throw DegenerateInputError("service " + std::to_string(graph.service_at(si).id) +
                                 " has zero total adjacent stake");
    const ServiceSpec& s = graph.service_at(si);
    weight[si] = s.value / s.alpha / total;
  }

  SufficiencyReport report;
  for (std::size_t vi = 0; vi < graph.num_validators(); ++vi) {
    Rat weight_sum;
    for (std::uint32_t si : graph.validator_neighbors(vi)) weight_sum += weight[si];
    const Rat slack = sigma[vi] - sigma[vi] * weight_sum;
    if (slack.is_negative()) report.holds = false;
    report.slacks.emplace_back(graph.validator_at(vi), slack);
  }
  return report;
}

}  // namespace restake
