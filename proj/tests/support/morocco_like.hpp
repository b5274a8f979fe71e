#pragma once

// A 36-pole table shaped like the published Moroccan one: same pole codes and
// the same final-demand rates (recovered from the lower time bounds), with a
// dense random trade pattern among the first 35 poles. D97T98 only sells to
// final demand.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iochain/io_table.hpp"
#include "support/oracles.hpp"

namespace iochain::fixtures {

struct TimesRow {
  std::string pole;
  double t = 0.0, t_upper = 0.0, t_lower = 0.0;
  bool has_dt = false;
  double dt = 0.0;
};

inline std::vector<TimesRow> morocco_times() {
  std::ifstream in(std::string(IOCHAIN_TEST_DATA) + "/morocco_times.csv");
  if (!in) throw std::runtime_error("missing morocco_times.csv");
  std::string line;
  std::getline(in, line);
  std::vector<TimesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    TimesRow r;
    std::string cell;
    std::getline(ss, r.pole, ',');
    std::getline(ss, cell, ',');
    r.t = std::stod(cell);
    std::getline(ss, cell, ',');
    r.t_upper = std::stod(cell);
    std::getline(ss, cell, ',');
    r.t_lower = std::stod(cell);
    if (std::getline(ss, cell, ',') && !cell.empty()) {
      r.has_dt = true;
      r.dt = std::stod(cell);
    }
    rows.push_back(r);
  }
  return rows;
}

// With the outlet rate equal to one, t_lower_i = 2 - y_i.
inline FlowTable morocco_like_table(std::uint64_t seed = 2015) {
  const auto rows = morocco_times();
  const std::size_t n = rows.size();
  std::vector<std::string> poles;
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    poles.push_back(rows[i].pole);
    y[i] = std::min(1.0, 2.0 - rows[i].t_lower);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  Matrix alpha(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double total = 0.0;
    Vector w(n - 1);
    for (auto& v : w) total += (v = unit(rng));
    for (std::size_t j = 0; j + 1 < n; ++j) alpha(i, j) = (1.0 - y[i]) * w[j] / total;
  }
  // Value added of one per pole: X^T = 1^T (I - A)^-1.
  const Matrix inv = gauss_jordan_inverse(Matrix::identity(n) - alpha);
  Vector x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x[j] += inv(i, j);
  Matrix flows(n, n);
  Vector demand(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) flows(i, j) = alpha(i, j) * x[i];
    demand[i] = y[i] * x[i];
  }
  return make_flow_table(poles, flows, demand);
}

}  // namespace iochain::fixtures
