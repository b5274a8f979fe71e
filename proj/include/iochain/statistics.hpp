#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iochain/error.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

/// Sample Pearson correlation.
inline double pearson(const Vector& xs, const Vector& ys) {
  if (xs.size() != ys.size())
    throw LengthMismatch("series lengths differ (" + std::to_string(xs.size()) + " vs " +
                         std::to_string(ys.size()) + ")");
  if (xs.size() < 3) throw TooFewPoints("correlation needs at least 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConstantSeries("correlation of a constant series is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxTerms = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NoConvergence("incomplete beta continued fraction did not converge", h, 0.0);
}

}  // namespace detail

/// Regularised incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta needs positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta argument must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Student-t cumulative distribution with `df` degrees of freedom.
inline double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw InputError("degrees of freedom must be positive");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

struct PValue {
  double value = 1.0;
  bool exact = false;  // |r| = 1: perfect correlation, p is 0 by convention
};

/// Two-sided p-value of H0: rho = 0, with t = r sqrt((n-2)/(1-r^2)) on n-2 degrees of freedom.
inline PValue t_test_p(double r, std::size_t n) {
  if (n < 3) throw TooFewPoints("t-test needs at least 3 points");
  if (!(r >= -1.0 && r <= 1.0)) throw InputError("correlation must lie in [-1, 1]");
  if (std::abs(r) == 1.0) return {0.0, true};
  const double df = static_cast<double>(n - 2);
  // Two-sided tail equals I_{df/(df+t^2)}(df/2, 1/2) with df/(df+t^2) = 1 - r^2.
  return {incomplete_beta(0.5 * df, 0.5, 1.0 - r * r), false};
}

enum class PanelField { growth_rate, lambda_star, t_rel, node_max, node_mean, node_min, f_value, max_t, min_t };

inline const char* to_string(PanelField f) {
  switch (f) {
    case PanelField::growth_rate: return "growth_rate";
    case PanelField::lambda_star: return "lambda_star";
    case PanelField::t_rel: return "t_rel";
    case PanelField::node_max: return "node_max";
    case PanelField::node_mean: return "node_mean";
    case PanelField::node_min: return "node_min";
    case PanelField::f_value: return "f_value";
    case PanelField::max_t: return "max_t";
    case PanelField::min_t: return "min_t";
  }
  return "growth_rate";
}

inline PanelField parse_panel_field(std::string_view s) {
  for (auto f : {PanelField::growth_rate, PanelField::lambda_star, PanelField::t_rel, PanelField::node_max,
                 PanelField::node_mean, PanelField::node_min, PanelField::f_value, PanelField::max_t,
                 PanelField::min_t})
    if (s == to_string(f)) return f;
  throw InputError("unknown panel field '" + std::string(s) + "'");
}

/// One country's summary line in the benchmark panel.
struct PanelRow {
  std::string country;
  double growth_rate = 0.0;  // percent, supplied externally
  double lambda_star = 0.0;
  double t_rel = 1.0;
  double node_max = 0.0;
  double node_mean = 0.0;
  double node_min = 0.0;
  std::optional<double> f_value;
  double max_t = 1.0;
  std::string argmax_t;
  double min_t = 1.0;
  std::string argmin_t;

  double field(PanelField f) const {
    switch (f) {
      case PanelField::growth_rate: return growth_rate;
      case PanelField::lambda_star: return lambda_star;
      case PanelField::t_rel: return t_rel;
      case PanelField::node_max: return node_max;
      case PanelField::node_mean: return node_mean;
      case PanelField::node_min: return node_min;
      case PanelField::f_value:
        if (!f_value) throw InputError("country '" + country + "' has no dominance measure");
        return *f_value;
      case PanelField::max_t: return max_t;
      case PanelField::min_t: return min_t;
    }
    return 0.0;
  }
};

struct CorrelationCell {
  double r = 1.0;
  PValue p{0.0, true};
  std::size_t n = 0;
};

struct CorrelationMatrix {
  std::vector<PanelField> fields;
  std::vector<std::string> countries;  // rows that entered the computation
  std::vector<CorrelationCell> cells;  // row-major, fields.size() squared

  const CorrelationCell& at(std::size_t i, std::size_t j) const { return cells[i * fields.size() + j]; }
};

/**
 * Pairwise correlations over the selected fields after dropping excluded
 * countries. The matrix is symmetric; the diagonal is r = 1 with an exact p.
 */
inline CorrelationMatrix panel_correlate(const std::vector<PanelRow>& rows, const std::vector<PanelField>& fields,
                                         const std::set<std::string>& exclude = {}) {
  CorrelationMatrix out;
  out.fields = fields;
  std::vector<const PanelRow*> kept;
  for (const auto& r : rows)
    if (!exclude.contains(r.country)) kept.push_back(&r);
  if (kept.size() < 3)
    throw TooFewPoints("correlation needs at least 3 countries after exclusion, have " +
                       std::to_string(kept.size()));
  for (const auto* r : kept) out.countries.push_back(r->country);

  std::vector<Vector> series(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f)
    for (const auto* r : kept) series[f].push_back(r->field(fields[f]));

  const std::size_t k = fields.size();
  for (std::size_t i = 0; i < k; ++i) pearson(series[i], series[i]);  // rejects constant fields
  out.cells.assign(k * k, CorrelationCell{1.0, {0.0, true}, kept.size()});
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = pearson(series[i], series[j]);
      const CorrelationCell cell{r, t_test_p(r, kept.size()), kept.size()};
      out.cells[i * k + j] = cell;
      out.cells[j * k + i] = cell;
    }
  return out;
}

}  // namespace iochain
