#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tirs::lp {

enum class Sense { LessEqual, Equal };

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;  // (column, coefficient)
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

// minimize cost . x  subject to rows, x >= 0.
struct Problem {
  std::size_t columns = 0;
  std::vector<double> cost;
  std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

struct Options {
  std::size_t max_iterations = 0;  // 0: 50 * (rows + columns) + 1000
  std::size_t refactor_interval = 200;
  double tolerance = 1e-9;
};

// Two-phase revised primal simplex with an explicit dense basis inverse.
// Dantzig pricing falls back to Bland's rule during degenerate stalls.
Result solve(const Problem& p, const Options& opts = {});

}  // namespace tirs::lp
