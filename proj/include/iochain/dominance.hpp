#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iochain/absorbing_chain.hpp"
#include "iochain/error.hpp"
#include "iochain/io_table.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

enum class Structure { almost_pyramidal, fair_division, almost_loop };

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::almost_pyramidal: return "almost_pyramidal";
    case Structure::fair_division: return "fair_division";
    case Structure::almost_loop: return "almost_loop";
  }
  return "fair_division";
}

inline Structure parse_structure(std::string_view s) {
  if (s == "almost_pyramidal" || s == "pyramid") return Structure::almost_pyramidal;
  if (s == "fair_division" || s == "fair") return Structure::fair_division;
  if (s == "almost_loop" || s == "loop") return Structure::almost_loop;
  throw InputError("unknown structure '" + std::string(s) + "'");
}

// Interpolation nodes taken from the retention rates 1 - y.
struct DominanceNodes {
  double low = 0.0;   // min(1 - y): outlet pole
  double mean = 0.0;  // mean(1 - y)
  double high = 0.0;  // max(1 - y): transformation pole
};

inline DominanceNodes dominance_nodes(const Vector& y_rates) {
  if (y_rates.empty()) throw InvalidRates("empty rate vector");
  DominanceNodes nodes{1.0 - y_rates[0], 0.0, 1.0 - y_rates[0]};
  double sum = 0.0;
  for (double y : y_rates) {
    const double keep = 1.0 - y;
    nodes.low = std::min(nodes.low, keep);
    nodes.high = std::max(nodes.high, keep);
    sum += keep;
  }
  nodes.mean = sum / static_cast<double>(y_rates.size());
  return nodes;
}

inline constexpr double kNodeSeparation = 1e-12;

/**
 * Dominance measure: the quadratic through (low, 0), (mean, 1/2), (high, 1).
 * 0 reads as a pure pyramid, 1/2 as fair division, 1 as a pure loop.
 */
inline double f_measure(double x, const DominanceNodes& nodes) {
  const double a = nodes.high, b = nodes.low, c = nodes.mean;
  if (std::abs(a - b) <= kNodeSeparation || std::abs(c - b) <= kNodeSeparation ||
      std::abs(a - c) <= kNodeSeparation)
    throw DegenerateNodes("dominance nodes coincide (" + std::to_string(b) + ", " + std::to_string(c) +
                          ", " + std::to_string(a) + ")");
  return 0.5 * (x - b) * (x - a) / ((c - b) * (c - a)) + (x - b) * (x - c) / ((a - b) * (a - c));
}

inline constexpr double kDefaultStructureBand = 0.01;

inline Structure classify_structure(double f_value, double band = kDefaultStructureBand) {
  if (!std::isfinite(f_value)) throw InputError("dominance measure must be finite");
  if (std::abs(f_value - 0.5) <= band) return Structure::fair_division;
  return f_value < 0.5 ? Structure::almost_pyramidal : Structure::almost_loop;
}

/// 1 / (1 - lambda); infinite when lambda reaches one.
inline double relaxation_time(double lambda_star) {
  const double gap = 1.0 - lambda_star;
  return gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::infinity();
}

struct SpectralSummary {
  double lambda_star = 0.0;  // Perron root of the trade matrix
  double gap = 1.0;          // 1 - lambda_star
  double t_rel = 1.0;        // 1 / gap
  DominanceNodes nodes;
  std::optional<double> f_value;        // empty when the nodes coincide
  std::optional<Structure> structure;   // follows f_value
};

inline SpectralSummary spectral_summary(const CoefficientSet& c, double band = kDefaultStructureBand) {
  SpectralSummary s;
  s.lambda_star = perron_root(c.alpha).root;
  s.gap = 1.0 - s.lambda_star;
  s.t_rel = relaxation_time(s.lambda_star);
  s.nodes = dominance_nodes(c.y_rates);
  try {
    s.f_value = f_measure(s.lambda_star, s.nodes);
    s.structure = classify_structure(*s.f_value, band);
  } catch (const DegenerateNodes&) {
    // uniform rates: every structure collapses to the same spectrum
  }
  return s;
}

/**
 * Coefficient set realising a given trade matrix with the given final-demand
 * rates. Value added is fixed at one per pole, so X^T = 1^T (I - A)^-1.
 */
inline CoefficientSet coefficients_from_trade(const Matrix& alpha, const Vector& y_rates,
                                              std::vector<std::string> poles = {}) {
  const std::size_t n = alpha.rows();
  if (!alpha.is_square() || y_rates.size() != n) throw DimensionMismatch("trade matrix / rate size mismatch");
  if (poles.empty())
    for (std::size_t i = 0; i < n; ++i) poles.push_back("P" + std::to_string(i + 1));
  const Vector ones(n, 1.0);
  const Vector output = left_multiply(ones, fundamental(alpha));
  Matrix flows(n, n);
  Vector demand(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) flows(i, j) = alpha(i, j) * output[i];
    demand[i] = y_rates[i] * output[i];
  }
  return coefficients(make_flow_table(std::move(poles), std::move(flows), std::move(demand)));
}

/**
 * Canonical trade matrices of the three limiting structures:
 *
 *   loop:    every pole ships its whole retained share 1 - y_i to the
 *            transformation pole (argmax 1 - y), which is autarkic;
 *   pyramid: the outlet pole (argmin 1 - y) keeps lambda = min(1 - y) for
 *            itself, every other pole spreads lambda evenly over the
 *            non-outlet poles and routes its surplus to the outlet;
 *   fair:    A_ij = (1 - y_i) / n.
 */
inline Matrix structure_trade_matrix(Structure kind, const Vector& y_rates) {
  const std::size_t n = y_rates.size();
  if (n == 0) throw InvalidRates("empty rate vector");
  for (double y : y_rates)
    if (!(y > 0.0 && y <= 1.0)) throw InvalidRates("structure generators need rates in (0, 1]");
  Matrix a(n, n);
  switch (kind) {
    case Structure::fair_division:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = (1.0 - y_rates[i]) / static_cast<double>(n);
      break;
    case Structure::almost_loop: {
      const auto pivot = static_cast<std::size_t>(
          std::min_element(y_rates.begin(), y_rates.end()) - y_rates.begin());
      for (std::size_t i = 0; i < n; ++i) a(i, pivot) = 1.0 - y_rates[i];
      break;
    }
    case Structure::almost_pyramidal: {
      const auto outlet = static_cast<std::size_t>(
          std::max_element(y_rates.begin(), y_rates.end()) - y_rates.begin());
      const double lambda = 1.0 - y_rates[outlet];
      a(outlet, outlet) = lambda;
      if (n == 1) break;
      // The block among the other poles has root (n-1)/n * lambda, so the
      // outlet's lambda stays a simple dominant eigenvalue.
      const double share = lambda / static_cast<double>(n);
      const double block = share * static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == outlet) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (j != outlet) a(i, j) = share;
        a(i, outlet) = std::max(0.0, (1.0 - y_rates[i]) - block);
      }
      break;
    }
  }
  return a;
}

inline CoefficientSet synthesize_structure(Structure kind, const Vector& y_rates) {
  return coefficients_from_trade(structure_trade_matrix(kind, y_rates), y_rates);
}

}  // namespace iochain
