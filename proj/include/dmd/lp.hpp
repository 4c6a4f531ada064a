#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "dmd/errors.hpp"

namespace dmd {

enum class Rel { LE, EQ, GE };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense-by-contract LP (rows stored sparsely to keep big oracles in memory).
// Objective is maximized. Default variable bounds are [0, +inf).
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return objective_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  void set_objective(std::size_t j, double coeff);
  void set_bounds(std::size_t j, double lo, double hi);

  // Sparse row: (variable index, coefficient) pairs. rhs must be finite.
  void add_row(std::vector<std::pair<std::size_t, double>> coeffs, Rel rel, double rhs);
  // Dense row; width must equal num_vars.
  void add_row_dense(const std::vector<double>& coeffs, Rel rel, double rhs);

  struct Row {
    std::vector<std::pair<std::size_t, double>> coeffs;
    Rel rel;
    double rhs;
  };

  const std::vector<double>& objective() const { return objective_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

 private:
  std::vector<double> objective_;
  std::vector<Row> rows_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Two-phase revised simplex with bounded variables; Dantzig pricing with a
// Bland fallback after degenerate stalls. Feasibility tolerance 1e-9.
// Throws SolverLimitError after 1e6 pivots.
LPSolution solve(const LinearProgram& p);

}  // namespace dmd
