#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "iochain/error.hpp"
#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

inline constexpr double kProductivityMargin = 1e-9;

/**
 * (I - sub)^-1 for a substochastic block with spectral radius below one.
 *
 * The radius is bounded first by the smaller of the largest row and column
 * sums; power iteration is only needed when that bound reaches one.
 */
inline Matrix fundamental(const Matrix& sub) {
  if (!sub.is_square()) throw DimensionMismatch("fundamental matrix needs a square block");
  if (!sub.is_nonnegative()) throw InputError("fundamental matrix needs a nonnegative block");
  const Vector rs = sub.row_sums();
  const Vector cs = sub.col_sums();
  const double bound =
      std::min(*std::max_element(rs.begin(), rs.end()), *std::max_element(cs.begin(), cs.end()));
  if (bound >= 1.0 - kProductivityMargin) {
    const double rho = perron_root(sub).root;
    if (rho >= 1.0 - kProductivityMargin)
      throw NonProductive("spectral radius " + std::to_string(rho) +
                              " is not below 1: final demand never absorbs the production",
                          rho);
  }
  const std::size_t n = sub.rows();
  Matrix inv = lu_invert(Matrix::identity(n) - sub);
  // Rounding can leave -1e-17 where the exact inverse has a structural zero.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (inv(i, j) < 0.0) inv(i, j) = 0.0;
  return inv;
}

/// t_i = sum_j N_ij: expected steps to absorption, initial visit included.
inline Vector absorption_times(const Matrix& n_mat) { return n_mat.row_sums(); }

struct AbsorptionSplit {
  std::vector<std::size_t> transient;  // state indices, in chain order
  std::vector<std::size_t> absorbing;
  Matrix transient_block{1, 1};   // B
  Matrix absorption_block{1, 1};  // R
  Matrix fundamental_block{1, 1}; // (I - B)^-1
  Matrix absorb_probs{1, 1};      // N R
};

/**
 * Canonical-form split of an absorbing chain into transient block B and
 * absorption block R, with absorption probabilities N R.
 */
inline AbsorptionSplit absorption_analysis(const Matrix& transition, std::vector<std::string> labels) {
  const Digraph g = adjacency_from_matrix(transition, std::move(labels));
  const StateClassification states = classify_states(g);
  AbsorptionSplit out;
  out.absorbing = states.states_of(StateKind::absorbing);
  if (out.absorbing.empty()) throw NoAbsorbingState("chain has no absorbing state");
  out.transient = states.states_of(StateKind::transient);
  if (out.transient.empty()) throw NoAbsorbingState("chain has no transient state");
  if (out.absorbing.size() + out.transient.size() != transition.rows())
    throw NoAbsorbingState("chain has a recurrent class that is not absorbing");

  const std::size_t p = out.transient.size(), q = out.absorbing.size();
  out.transient_block = Matrix(p, p);
  out.absorption_block = Matrix(p, q);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b)
      out.transient_block(a, b) = transition(out.transient[a], out.transient[b]);
    for (std::size_t b = 0; b < q; ++b)
      out.absorption_block(a, b) = transition(out.transient[a], out.absorbing[b]);
  }
  out.fundamental_block = fundamental(out.transient_block);
  out.absorb_probs = out.fundamental_block * out.absorption_block;
  return out;
}

inline AbsorptionSplit absorption_analysis(const AugmentedChain& chain) {
  return absorption_analysis(chain.transition, chain.labels);
}

inline constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();

struct AbsorptionBounds {
  Vector upper;  // reached when everything flows to the transformation pole
  Vector lower;  // reached when everything flows to the outlet pole
  std::size_t transformation_pole = 0;  // argmin y
  std::size_t outlet_pole = 0;          // argmax y
};

namespace detail {

// 1 + (1 - y_i) / y_pivot, which is 1 / y_pivot when i is the pivot.
// A pole with y_i = 1 leaves in one step whatever the pivot.
inline double time_bound(double y_i, double y_pivot) {
  const double keep = 1.0 - y_i;
  if (keep <= 0.0) return 1.0;
  if (y_pivot <= 0.0) return kInfiniteBound;
  return 1.0 + keep / y_pivot;
}

}  // namespace detail

inline AbsorptionBounds absorption_time_bounds(const Vector& y_rates) {
  if (y_rates.empty()) throw InvalidRates("empty rate vector");
  for (double y : y_rates)
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidRates("final-demand rates must lie in [0, 1]");
  AbsorptionBounds b;
  b.transformation_pole =
      static_cast<std::size_t>(std::min_element(y_rates.begin(), y_rates.end()) - y_rates.begin());
  b.outlet_pole =
      static_cast<std::size_t>(std::max_element(y_rates.begin(), y_rates.end()) - y_rates.begin());
  const double y_slow = y_rates[b.transformation_pole];
  const double y_fast = y_rates[b.outlet_pole];
  for (double y : y_rates) {
    b.upper.push_back(detail::time_bound(y, y_slow));
    b.lower.push_back(detail::time_bound(y, y_fast));
  }
  return b;
}

/// (t - t_lower) / (t_upper - t_lower); empty where the interval is degenerate or unbounded.
inline std::vector<std::optional<double>> relative_duration(const Vector& t, const Vector& upper,
                                                            const Vector& lower) {
  if (t.size() != upper.size() || t.size() != lower.size())
    throw DimensionMismatch("relative_duration inputs differ in length");
  std::vector<std::optional<double>> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(upper[i]) || upper[i] == lower[i]) continue;
    out[i] = (t[i] - lower[i]) / (upper[i] - lower[i]);
  }
  return out;
}

enum class SensitivityKind { output_wrt_final_demand, output_wrt_value_added, money_wrt_final_demand };

inline const char* to_string(SensitivityKind k) {
  switch (k) {
    case SensitivityKind::output_wrt_final_demand: return "output_wrt_final_demand";
    case SensitivityKind::output_wrt_value_added: return "output_wrt_value_added";
    case SensitivityKind::money_wrt_final_demand: return "money_wrt_final_demand";
  }
  return "output_wrt_final_demand";
}

/**
 * Fundamental matrices of one economy plus the time-to-absorption vector
 * and its bounds. Immutable once built; sensitivities are plain lookups.
 *
 *   o     = (I - theta)^-1   dX_i/dY_j
 *   n_mat = (I - alpha)^-1   dX_j/dW_i
 *   q     = (I - G)^-1       dM_j/dY_i, identical to o transposed
 */
class ChainAnalysis {
public:
  explicit ChainAnalysis(const CoefficientSet& c)
      : poles_(c.poles),
        o_(fundamental(c.theta)),
        n_(fundamental(c.alpha)),
        q_(o_.transpose()),
        t_(absorption_times(n_)),
        bounds_(absorption_time_bounds(c.y_rates)),
        dt_(relative_duration(t_, bounds_.upper, bounds_.lower)) {}

  std::size_t size() const noexcept { return poles_.size(); }
  const std::vector<std::string>& poles() const noexcept { return poles_; }
  const Matrix& o() const noexcept { return o_; }
  const Matrix& n_mat() const noexcept { return n_; }
  const Matrix& q() const noexcept { return q_; }
  const Vector& t() const noexcept { return t_; }
  const Vector& t_upper() const noexcept { return bounds_.upper; }
  const Vector& t_lower() const noexcept { return bounds_.lower; }
  const AbsorptionBounds& bounds() const noexcept { return bounds_; }
  const std::vector<std::optional<double>>& dt_ratio() const noexcept { return dt_; }

  const Matrix& matrix_for(SensitivityKind k) const noexcept {
    switch (k) {
      case SensitivityKind::output_wrt_final_demand: return o_;
      case SensitivityKind::output_wrt_value_added: return n_;
      case SensitivityKind::money_wrt_final_demand: return q_;
    }
    return o_;
  }

private:
  std::vector<std::string> poles_;
  Matrix o_;
  Matrix n_;
  Matrix q_;
  Vector t_;
  AbsorptionBounds bounds_;
  std::vector<std::optional<double>> dt_;
};

inline double sensitivity(const ChainAnalysis& a, SensitivityKind kind, std::size_t i, std::size_t j) {
  if (i >= a.size() || j >= a.size())
    throw IndexOutOfRange("sensitivity index (" + std::to_string(i) + "," + std::to_string(j) +
                          ") outside " + std::to_string(a.size()) + " poles");
  return a.matrix_for(kind)(i, j);
}

// For dX_i/dY_j the origin is j and the target i.
struct SensitivityEntry {
  double value = 0.0;
  std::size_t target = 0;  // row index i
  std::size_t origin = 0;  // column index j

  friend bool operator==(const SensitivityEntry&, const SensitivityEntry&) = default;
};

/// The k largest (or smallest) entries; ties broken by (target, origin).
inline std::vector<SensitivityEntry> extreme_sensitivities(const ChainAnalysis& a, SensitivityKind kind,
                                                           std::size_t k, bool largest) {
  const Matrix& m = a.matrix_for(kind);
  std::vector<SensitivityEntry> all;
  all.reserve(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) all.push_back({m(i, j), i, j});
  auto order = [largest](const SensitivityEntry& x, const SensitivityEntry& y) {
    if (x.value != y.value) return largest ? x.value > y.value : x.value < y.value;
    return std::tie(x.target, x.origin) < std::tie(y.target, y.origin);
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), order);
  all.resize(k);
  return all;
}

/**
 * Theoretical envelope of the marginal effects dX_i/dY_j given the rates:
 * floor delta_ij, self-effect ceiling 1/y_i, cross-effect ceiling (1-y_i)/y_j.
 */
struct MarginalEnvelope {
  double min_self = 1.0;
  double min_cross = 0.0;
  Vector max_self;
  Matrix max_cross{1, 1};
};

inline MarginalEnvelope marginal_extremes(const Vector& y_rates) {
  if (y_rates.empty()) throw InvalidRates("empty rate vector");
  for (double y : y_rates)
    if (!(y > 0.0 && y <= 1.0)) throw InvalidRates("marginal envelope needs rates in (0, 1]");
  const std::size_t n = y_rates.size();
  MarginalEnvelope env;
  env.max_cross = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    env.max_self.push_back(1.0 / y_rates[i]);
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) env.max_cross(i, j) = (1.0 - y_rates[i]) / y_rates[j];
  }
  return env;
}

}  // namespace iochain
