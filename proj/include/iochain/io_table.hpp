#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "iochain/error.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

// Label of the appended absorbing state (final expenditure / added value).
inline const std::string kFinalExpenditureLabel = "FE";

/**
 * Input-output flow table. flows(i, j) is what supplier pole i delivers to
 * user pole j; all money amounts share one currency unit.
 */
struct FlowTable {
  std::vector<std::string> poles;
  Matrix flows{1, 1};
  Vector final_demand;  // Y
  Vector value_added;   // W
  Vector output;        // X
  std::vector<std::string> diagnostics;

  std::size_t size() const noexcept { return poles.size(); }
};

struct ParseOptions {
  bool transpose = false;          // source stores user rows / supplier columns
  bool drop_zero_output = false;   // remove zero-output poles instead of failing
  double negative_tol = 1e-9;      // negatives above -tol are clamped to zero
  double identity_rel_tol = 1e-6;  // W cross-check and sum(Y) = sum(W)
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const auto cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    cells.emplace_back(trim(cell));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParseError(line, column, "expected a number, found '" + cell + "'");
  return value;
}

inline bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace detail

/**
 * Checks accounting identities, derives X and W, and clamps tiny negatives.
 * Used by the CSV reader and by programmatic constructors alike.
 */
inline FlowTable make_flow_table(std::vector<std::string> poles, Matrix flows, Vector final_demand,
                                 std::optional<Vector> given_value_added = std::nullopt,
                                 const ParseOptions& opts = {}) {
  const std::size_t n = poles.size();
  if (n == 0) throw ValidationError("flow table has no poles");
  if (flows.rows() != n || flows.cols() != n || final_demand.size() != n)
    throw DimensionMismatch("flow table blocks do not match the pole count");
  if (given_value_added && given_value_added->size() != n)
    throw DimensionMismatch("value-added row does not match the pole count");

  std::vector<std::string> diagnostics;
  {
    std::set<std::string> seen;
    for (const auto& p : poles) {
      if (p.empty()) throw ValidationError("empty pole code");
      if (!seen.insert(p).second) throw ValidationError("duplicate pole code '" + p + "'");
    }
  }

  auto clamp = [&](double& v, const std::string& where) {
    if (v >= 0.0) return;
    if (v < -opts.negative_tol)
      throw ValidationError("negative " + where + " (" + std::to_string(v) + ")");
    diagnostics.push_back("clamped " + where + " value " + std::to_string(v) + " to 0");
    v = 0.0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = flows(i, j);
      clamp(v, "flow " + poles[i] + "->" + poles[j]);
      flows(i, j) = v;
    }
    clamp(final_demand[i], "final demand of " + poles[i]);
  }

  // Zero-output poles: a zero row plus zero final demand.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    double x = final_demand[i];
    for (std::size_t j = 0; j < n; ++j) x += flows(i, j);
    if (x > 0.0) {
      keep.push_back(i);
      continue;
    }
    if (!opts.drop_zero_output) throw ZeroOutputPole(poles[i]);
    diagnostics.push_back("dropped zero-output pole '" + poles[i] + "'");
  }
  if (keep.empty()) throw ValidationError("every pole has zero output");

  const std::size_t m = keep.size();
  FlowTable t;
  t.flows = Matrix(m, m);
  t.final_demand.resize(m);
  t.output.resize(m);
  t.value_added.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    t.poles.push_back(poles[keep[a]]);
    t.final_demand[a] = final_demand[keep[a]];
    for (std::size_t b = 0; b < m; ++b) t.flows(a, b) = flows(keep[a], keep[b]);
  }
  // Flows out of a dropped pole are zero by construction; flows into one would
  // make its value added negative, so reject them here.
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(keep.begin(), keep.end(), i) != keep.end()) continue;
    for (std::size_t r = 0; r < n; ++r)
      if (flows(r, i) > 0.0)
        throw ValidationError("zero-output pole '" + poles[i] + "' purchases inputs");
  }

  for (std::size_t i = 0; i < m; ++i) {
    t.output[i] = t.final_demand[i];
    for (std::size_t j = 0; j < m; ++j) t.output[i] += t.flows(i, j);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double inputs = 0.0;
    for (std::size_t i = 0; i < m; ++i) inputs += t.flows(i, j);
    double w = t.output[j] - inputs;
    const double scale = t.output[j];
    if (w < 0.0) {
      if (w < -opts.identity_rel_tol * scale)
        throw ValidationError("inputs of pole '" + t.poles[j] + "' exceed its output (W = " +
                              std::to_string(w) + ")");
      w = 0.0;
    }
    t.value_added[j] = w;
    if (given_value_added) {
      const double given = (*given_value_added)[keep[j]];
      if (std::abs(given - w) > opts.identity_rel_tol * scale)
        throw ValidationError("value added of pole '" + t.poles[j] + "' is " + std::to_string(given) +
                              " but the column identity gives " + std::to_string(w));
    }
  }

  double sum_y = 0.0, sum_w = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum_y += t.final_demand[i];
    sum_w += t.value_added[i];
  }
  if (std::abs(sum_y - sum_w) > opts.identity_rel_tol * std::max(sum_y, sum_w))
    throw ValidationError("total final demand " + std::to_string(sum_y) +
                          " differs from total value added " + std::to_string(sum_w));

  t.diagnostics = std::move(diagnostics);
  return t;
}

/**
 * Reads a flow table from CSV:
 *
 *     pole,<code_1>,...,<code_n>,Y
 *     <code_i>,x_i1,...,x_in,Y_i        (n rows)
 *     W,w_1,...,w_n[,]                  (optional)
 */
inline FlowTable parse_flow_table(std::istream& in, const ParseOptions& opts = {}) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
    if (detail::is_blank(raw)) continue;
    header = detail::split_csv_line(raw);
    break;
  }
  if (header.empty()) throw ParseError(line_no, 1, "missing header row");
  if (header.size() < 3 || header.front() != "pole" || header.back() != "Y")
    throw ParseError(line_no, 1, "header must read 'pole,<codes...>,Y'");

  const std::size_t n = header.size() - 2;
  std::vector<std::string> poles(header.begin() + 1, header.end() - 1);
  std::vector<double> flows(n * n, 0.0);
  Vector final_demand(n, 0.0);
  std::optional<Vector> value_added;

  std::size_t row = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (detail::is_blank(raw)) continue;
    auto cells = detail::split_csv_line(raw);
    if (cells.front() == "W" && row == n) {
      if (value_added) throw ParseError(line_no, 1, "duplicate W row");
      if (cells.size() == n + 2 && cells.back().empty()) cells.pop_back();
      if (cells.size() != n + 1)
        throw ParseError(line_no, cells.size(), "W row needs " + std::to_string(n) + " values");
      value_added.emplace(n);
      for (std::size_t j = 0; j < n; ++j)
        (*value_added)[j] = detail::parse_number(cells[j + 1], line_no, j + 2);
      continue;
    }
    if (value_added) throw ParseError(line_no, 1, "W must be the final row");
    if (row == n) throw ParseError(line_no, 1, "more data rows than header poles");
    if (cells.size() != n + 2)
      throw ParseError(line_no, std::min(cells.size(), n + 2),
                       "expected " + std::to_string(n + 2) + " cells, found " +
                           std::to_string(cells.size()));
    if (cells.front() != poles[row])
      throw ParseError(line_no, 1,
                       "row code '" + cells.front() + "' does not match header code '" + poles[row] + "'");
    for (std::size_t j = 0; j < n; ++j)
      flows[row * n + j] = detail::parse_number(cells[j + 1], line_no, j + 2);
    final_demand[row] = detail::parse_number(cells[n + 1], line_no, n + 2);
    ++row;
  }
  if (row != n)
    throw ParseError(line_no, 1, "expected " + std::to_string(n) + " data rows, found " + std::to_string(row));

  Matrix flow_matrix(n, n, std::move(flows));
  if (opts.transpose) flow_matrix = flow_matrix.transpose();
  return make_flow_table(std::move(poles), std::move(flow_matrix), std::move(final_demand),
                         std::move(value_added), opts);
}

struct CoefficientSet {
  std::vector<std::string> poles;
  Matrix theta{1, 1};  // technical: x_ij / X_j
  Matrix alpha{1, 1};  // trade: x_ij / X_i
  Vector w_rates;      // W_j / X_j
  Vector y_rates;      // Y_i / X_i
  Matrix g{1, 1};      // monetary supply coefficients, theta transposed

  std::size_t size() const noexcept { return poles.size(); }
};

inline CoefficientSet coefficients(const FlowTable& t) {
  const std::size_t n = t.size();
  CoefficientSet c;
  c.poles = t.poles;
  c.theta = Matrix(n, n);
  c.alpha = Matrix(n, n);
  c.w_rates.resize(n);
  c.y_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c.theta(i, j) = t.flows(i, j) / t.output[j];
      c.alpha(i, j) = t.flows(i, j) / t.output[i];
    }
    c.y_rates[i] = t.final_demand[i] / t.output[i];
    c.w_rates[i] = t.value_added[i] / t.output[i];
  }
  c.g = c.theta.transpose();

  if (!classify_stochasticity(c.theta, 1e-9, Axis::cols).is_substochastic() ||
      !classify_stochasticity(c.alpha, 1e-9, Axis::rows).is_substochastic())
    throw ValidationError("coefficient matrices are not substochastic");
  return c;
}

enum class Orientation { direct, indirect };

inline const char* to_string(Orientation o) {
  return o == Orientation::direct ? "direct" : "indirect";
}

inline Orientation parse_orientation(std::string_view s) {
  if (s == "direct") return Orientation::direct;
  if (s == "indirect") return Orientation::indirect;
  throw InputError("unknown orientation '" + std::string(s) + "' (expected direct or indirect)");
}

/// Row-stochastic (n+1)-state chain; the last state absorbs.
struct AugmentedChain {
  Matrix transition{1, 1};
  Orientation orientation = Orientation::indirect;
  std::size_t absorbing_index = 0;
  std::vector<std::string> labels;  // poles followed by "FE"
};

/**
 * indirect: [[A, y], [0, 1]]   (supply flows, absorbed by final demand)
 * direct:   [[G, w], [0, 1]]   (G = theta^T, the monetary dual; absorbed by value added)
 */
inline AugmentedChain augment(const CoefficientSet& c, Orientation orientation) {
  const std::size_t n = c.size();
  const Matrix& block = orientation == Orientation::indirect ? c.alpha : c.g;
  const Vector& exit = orientation == Orientation::indirect ? c.y_rates : c.w_rates;
  AugmentedChain chain;
  chain.orientation = orientation;
  chain.absorbing_index = n;
  chain.transition = Matrix(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) chain.transition(i, j) = block(i, j);
    chain.transition(i, n) = exit[i];
  }
  chain.transition(n, n) = 1.0;
  chain.labels = c.poles;
  chain.labels.push_back(kFinalExpenditureLabel);
  return chain;
}

}  // namespace iochain
