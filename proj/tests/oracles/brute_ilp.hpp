#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tirs/assign.hpp"

namespace oracle {

struct BruteIlp {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> values;
};

// All 2^n assignments of the model's binaries, rows checked term by term.
inline BruteIlp brute_ilp(const tirs::IlpModel& m) {
  const std::size_t n = m.variables.size();
  if (n > 24) throw std::invalid_argument("too many variables for enumeration");
  BruteIlp best;
  std::vector<std::uint8_t> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1U;
    bool ok = true;
    for (const auto& row : m.rows) {
      double lhs = 0.0;
      for (auto [j, a] : row.terms) lhs += a * x[j];
      if (row.equality ? lhs != row.rhs : lhs > row.rhs) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<double> costs;
    for (std::size_t j = 0; j < n; ++j)
      if (x[j]) costs.push_back(m.variables[j].cost);
    std::sort(costs.begin(), costs.end());
    double obj = 0.0;
    for (double c : costs) obj += c;
    if (obj < best.objective) {
      best.objective = obj;
      best.values = x;
      best.feasible = true;
    }
  }
  return best;
}

}  // namespace oracle
