#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "iochain/absorbing_chain.hpp"
#include "iochain/error.hpp"
#include "iochain/io_table.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

struct SimulationConfig {
  std::size_t n_walks = 100000;
  std::uint64_t seed = 0x5eed;
  std::size_t step_cap = 1000000;
  std::size_t partitions = 4;  // each partition draws from its own stream
};

/**
 * Empirical statistics of absorbed random walks from one start state.
 * Visit counts include the starting visit; steps count transitions until
 * the first entry into an absorbing state.
 */
struct WalkStats {
  std::size_t start_state = 0;
  std::size_t n_walks = 0;
  std::uint64_t seed = 0;
  std::size_t partitions = 1;
  std::vector<std::size_t> transient;  // state indices for mean_visits
  std::vector<std::size_t> absorbing;  // state indices for absorb_freq
  double mean_steps = 0.0;
  double stderr_steps = 0.0;
  Vector mean_visits;
  Vector stderr_visits;
  Vector absorb_freq;
  std::size_t censored = 0;  // walks stopped by the step cap

  bool has_censoring() const noexcept { return censored > 0; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct PartitionTally {
  std::uint64_t walks = 0;
  std::uint64_t censored = 0;
  std::uint64_t steps = 0;
  long double steps_sq = 0.0L;
  std::vector<std::uint64_t> visits;
  std::vector<long double> visits_sq;
  std::vector<std::uint64_t> absorbed;
};

}  // namespace detail

/**
 * Simulates random walks on a row-stochastic transition matrix until they
 * reach a state whose self-loop probability is one.
 *
 * Walks are split into `partitions` contiguous blocks; block p uses an
 * mt19937_64 seeded with splitmix64(seed + p). Tallies are integer and are
 * combined in partition order, so output is bit-identical for a fixed
 * (seed, partitions) pair regardless of thread scheduling.
 */
inline WalkStats simulate(const Matrix& transition, std::size_t start, const SimulationConfig& cfg = {}) {
  if (!transition.is_square()) throw DimensionMismatch("transition matrix must be square");
  const std::size_t n = transition.rows();
  if (start >= n) throw IndexOutOfRange("start state " + std::to_string(start) + " out of range");
  if (cfg.n_walks == 0) throw InputError("need at least one walk");
  if (cfg.step_cap == 0) throw InputError("step cap must be positive");
  if (classify_stochasticity(transition, 1e-9, Axis::rows).kind != StochasticKind::stochastic)
    throw NotStochastic("transition matrix is not row-stochastic");

  std::vector<bool> is_absorbing(n, false);
  WalkStats out;
  for (std::size_t i = 0; i < n; ++i) {
    is_absorbing[i] = transition(i, i) == 1.0;
    (is_absorbing[i] ? out.absorbing : out.transient).push_back(i);
  }
  if (is_absorbing[start])
    throw NotTransientStart("start state " + std::to_string(start) + " is absorbing");
  if (out.absorbing.empty()) throw NoAbsorbingState("chain has no absorbing state");

  // Cumulative rows for inverse-CDF sampling.
  std::vector<double> cdf(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) cdf[i * n + j] = (acc += std::max(0.0, transition(i, j)));
  }
  std::vector<std::size_t> slot(n, 0);
  for (std::size_t k = 0; k < out.transient.size(); ++k) slot[out.transient[k]] = k;
  std::vector<std::size_t> absorb_slot(n, 0);
  for (std::size_t k = 0; k < out.absorbing.size(); ++k) absorb_slot[out.absorbing[k]] = k;

  const std::size_t parts = std::max<std::size_t>(1, std::min(cfg.partitions, cfg.n_walks));
  std::vector<detail::PartitionTally> tallies(parts);

  auto run_partition = [&](std::size_t p) {
    auto& tally = tallies[p];
    tally.visits.assign(out.transient.size(), 0);
    tally.visits_sq.assign(out.transient.size(), 0.0L);
    tally.absorbed.assign(out.absorbing.size(), 0);
    const std::size_t begin = cfg.n_walks * p / parts;
    const std::size_t end = cfg.n_walks * (p + 1) / parts;
    std::mt19937_64 rng(detail::splitmix64(cfg.seed + p));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint64_t> walk_visits(out.transient.size(), 0);
    std::vector<std::size_t> touched;

    for (std::size_t w = begin; w < end; ++w) {
      std::size_t state = start;
      std::uint64_t steps = 0;
      touched.clear();
      while (!is_absorbing[state] && steps < cfg.step_cap) {
        const std::size_t s = slot[state];
        if (walk_visits[s]++ == 0) touched.push_back(s);
        const double* row = cdf.data() + state * n;
        const double u = unit(rng) * row[n - 1];
        std::size_t next = static_cast<std::size_t>(std::upper_bound(row, row + n, u) - row);
        if (next >= n) next = n - 1;
        state = next;
        ++steps;
      }
      ++tally.walks;
      tally.steps += steps;
      tally.steps_sq += static_cast<long double>(steps) * static_cast<long double>(steps);
      if (is_absorbing[state])
        ++tally.absorbed[absorb_slot[state]];
      else
        ++tally.censored;
      for (std::size_t s : touched) {
        tally.visits[s] += walk_visits[s];
        tally.visits_sq[s] += static_cast<long double>(walk_visits[s]) * walk_visits[s];
        walk_visits[s] = 0;
      }
    }
  };

  if (parts == 1) {
    run_partition(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(parts);
    for (std::size_t p = 0; p < parts; ++p) workers.emplace_back(run_partition, p);
    for (auto& t : workers) t.join();
  }

  detail::PartitionTally total;
  total.visits.assign(out.transient.size(), 0);
  total.visits_sq.assign(out.transient.size(), 0.0L);
  total.absorbed.assign(out.absorbing.size(), 0);
  for (const auto& t : tallies) {
    total.walks += t.walks;
    total.censored += t.censored;
    total.steps += t.steps;
    total.steps_sq += t.steps_sq;
    for (std::size_t k = 0; k < t.visits.size(); ++k) {
      total.visits[k] += t.visits[k];
      total.visits_sq[k] += t.visits_sq[k];
    }
    for (std::size_t k = 0; k < t.absorbed.size(); ++k) total.absorbed[k] += t.absorbed[k];
  }

  const long double walks = static_cast<long double>(total.walks);
  auto mean_and_stderr = [&](std::uint64_t sum, long double sum_sq, double& mean, double& se) {
    const long double m = static_cast<long double>(sum) / walks;
    mean = static_cast<double>(m);
    if (total.walks < 2) {
      se = 0.0;
      return;
    }
    long double var = (sum_sq - walks * m * m) / (walks - 1.0L);
    if (var < 0.0L) var = 0.0L;
    se = static_cast<double>(std::sqrt(var / walks));
  };

  out.start_state = start;
  out.n_walks = total.walks;
  out.seed = cfg.seed;
  out.partitions = parts;
  out.censored = total.censored;
  mean_and_stderr(total.steps, total.steps_sq, out.mean_steps, out.stderr_steps);
  out.mean_visits.resize(out.transient.size());
  out.stderr_visits.resize(out.transient.size());
  for (std::size_t k = 0; k < out.transient.size(); ++k)
    mean_and_stderr(total.visits[k], total.visits_sq[k], out.mean_visits[k], out.stderr_visits[k]);
  out.absorb_freq.assign(out.absorbing.size(), 0.0);
  const std::uint64_t finished = total.walks - total.censored;
  if (finished > 0)
    for (std::size_t k = 0; k < out.absorbing.size(); ++k)
      out.absorb_freq[k] = static_cast<double>(total.absorbed[k]) / static_cast<double>(finished);
  return out;
}

inline WalkStats simulate(const AugmentedChain& chain, std::size_t start, const SimulationConfig& cfg = {}) {
  return simulate(chain.transition, start, cfg);
}

struct ZScore {
  std::string quantity;
  double empirical = 0.0;
  double analytic = 0.0;
  double stderr_value = 0.0;
  double z = 0.0;
  bool flagged = false;
};

struct ComparisonReport {
  std::vector<ZScore> scores;
  bool censored = false;
  double z_limit = 3.0;

  std::size_t flagged_count() const {
    return static_cast<std::size_t>(
        std::count_if(scores.begin(), scores.end(), [](const ZScore& z) { return z.flagged; }));
  }
  // Censored walks bias the means downwards, so they void the comparison.
  bool certified() const { return !censored && flagged_count() == 0; }
};

namespace detail {

inline ZScore make_score(std::string name, double empirical, double analytic, double se, double limit) {
  ZScore z{std::move(name), empirical, analytic, se, 0.0, false};
  const double diff = empirical - analytic;
  if (se > 0.0)
    z.z = diff / se;
  else if (diff != 0.0)
    z.z = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  z.flagged = std::abs(z.z) > limit;
  return z;
}

}  // namespace detail

/**
 * z-scores of the simulated steps and visit counts against the fundamental
 * matrix of the transient block. `fundamental_block` rows and columns follow
 * stats.transient order.
 */
inline ComparisonReport compare(const WalkStats& stats, const Matrix& fundamental_block,
                                const std::vector<std::string>& labels = {}, double z_limit = 3.0) {
  const std::size_t p = stats.transient.size();
  if (fundamental_block.rows() != p || fundamental_block.cols() != p)
    throw DimensionMismatch("fundamental block does not match the simulated transient states");
  const auto it = std::find(stats.transient.begin(), stats.transient.end(), stats.start_state);
  const auto row = static_cast<std::size_t>(it - stats.transient.begin());

  ComparisonReport report;
  report.z_limit = z_limit;
  report.censored = stats.has_censoring();
  double t = 0.0;
  for (std::size_t j = 0; j < p; ++j) t += fundamental_block(row, j);
  report.scores.push_back(detail::make_score("steps", stats.mean_steps, t, stats.stderr_steps, z_limit));
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t state = stats.transient[j];
    const std::string name =
        "visits[" + (state < labels.size() ? labels[state] : std::to_string(state)) + "]";
    report.scores.push_back(detail::make_score(name, stats.mean_visits[j], fundamental_block(row, j),
                                               stats.stderr_visits[j], z_limit));
  }
  return report;
}

/// Compares a walk on the augmented chain of `orientation` with N (indirect) or Q (direct).
inline ComparisonReport compare(const WalkStats& stats, const ChainAnalysis& analysis, Orientation orientation,
                                const std::vector<std::string>& labels = {}, double z_limit = 3.0) {
  return compare(stats, orientation == Orientation::indirect ? analysis.n_mat() : analysis.q(), labels,
                 z_limit);
}

}  // namespace iochain
