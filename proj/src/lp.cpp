#include "dmd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmd {

LinearProgram::LinearProgram(std::size_t num_vars)
    : objective_(num_vars, 0.0), lower_(num_vars, 0.0), upper_(num_vars, kInf) {}

void LinearProgram::set_objective(std::size_t j, double coeff) {
  if (j >= objective_.size()) throw std::invalid_argument("lp: objective index out of range");
  objective_[j] = coeff;
}

void LinearProgram::set_bounds(std::size_t j, double lo, double hi) {
  if (j >= objective_.size()) throw std::invalid_argument("lp: bound index out of range");
  lower_[j] = lo;
  upper_[j] = hi;
}

void LinearProgram::add_row(std::vector<std::pair<std::size_t, double>> coeffs, Rel rel,
                            double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("lp: non-finite rhs");
  for (const auto& [j, a] : coeffs) {
    if (j >= objective_.size()) throw std::invalid_argument("lp: row index out of range");
    if (!std::isfinite(a)) throw std::invalid_argument("lp: non-finite coefficient");
  }
  rows_.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::add_row_dense(const std::vector<double>& coeffs, Rel rel, double rhs) {
  if (coeffs.size() != objective_.size()) throw std::invalid_argument("lp: row width mismatch");
  std::vector<std::pair<std::size_t, double>> sparse;
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    if (coeffs[j] != 0.0) sparse.emplace_back(j, coeffs[j]);
  add_row(std::move(sparse), rel, rhs);
}

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;

enum class State : unsigned char { Basic, AtLower, AtUpper, Free };

struct Simplex {
  std::size_t n;  // structural
  std::size_t m;  // rows
  std::size_t total;
  std::size_t art_begin;
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> lo, up, cost, val;  // val: value of nonbasic vars
  std::vector<double> rhs;
  std::vector<State> state;
  std::vector<int> basis;     // size m
  std::vector<double> xb;     // basic values
  std::vector<double> binv;   // m*m row-major
  bool bland = false;
  bool bland_always = false;
  double pivot_tol = kPivotTol;
  int degen_run = 0;
  long pivots = 0;
  long changes = 0;        // basis changes + bound flips (progress counter)
  long max_pivots = 1000000;
  long refactor_every = 0;  // rebuild the inverse every N pivots (0 = never)
  bool parallel_rows = false;
  double scale = 1.0;

  double b_inv(std::size_t i, std::size_t k) const { return binv[i * m + k]; }

  std::vector<double> compute_w(int j) const {
    std::vector<double> w(m, 0.0);
    for (const auto& [r, a] : cols[j])
      for (std::size_t i = 0; i < m; ++i) w[i] += binv[i * m + r] * a;
    return w;
  }

  void recompute_xb() {
    std::vector<double> rhs_eff = rhs;
    for (std::size_t j = 0; j < total; ++j) {
      if (state[j] == State::Basic || val[j] == 0.0) continue;
      for (const auto& [r, a] : cols[j]) rhs_eff[r] -= a * val[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += binv[i * m + k] * rhs_eff[k];
      xb[i] = s;
    }
  }

  // Rebuild binv from the basis columns by Gauss-Jordan (repair path).
  void refactor() {
    std::vector<double> B(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      // += rather than =: a column may carry several entries for one row
      // (callers are allowed to repeat a variable within a row).
      for (const auto& [r, a] : cols[basis[i]]) B[static_cast<std::size_t>(r) * m + i] += a;
    std::vector<double> inv(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col; r < m; ++r)
        if (std::abs(B[r * m + col]) > std::abs(B[piv * m + col])) piv = r;
      if (std::abs(B[piv * m + col]) < 1e-12) throw std::runtime_error("lp: singular basis");
      if (piv != col) {
        for (std::size_t k = 0; k < m; ++k) {
          std::swap(B[piv * m + k], B[col * m + k]);
          std::swap(inv[piv * m + k], inv[col * m + k]);
        }
      }
      double d = B[col * m + col];
      for (std::size_t k = 0; k < m; ++k) {
        B[col * m + k] /= d;
        inv[col * m + k] /= d;
      }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel_rows)
#endif
      for (long long r = 0; r < static_cast<long long>(m); ++r) {
        if (static_cast<std::size_t>(r) == col) continue;
        double f = B[r * m + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) {
          B[r * m + k] -= f * B[col * m + k];
          inv[r * m + k] -= f * inv[col * m + k];
        }
      }
    }
    binv = std::move(inv);
    recompute_xb();
  }

  // One simplex phase; returns true on optimal, false on unbounded.
  bool iterate() {
    std::vector<double> y(m);
    while (true) {
      if (++pivots > max_pivots) throw SolverLimitError("lp: pivot cap exceeded");
      // y = c_B B^-1 (only rows with costed basic vars contribute)
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        double cb = cost[basis[r]];
        if (cb == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) y[i] += cb * binv[r * m + i];
      }
      int enter = -1, dir = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < total; ++j) {
        State st = state[j];
        if (st == State::Basic) continue;
        if (up[j] - lo[j] <= 0.0 && st != State::Free) continue;  // fixed
        double d = cost[j];
        for (const auto& [r, a] : cols[j]) d -= y[r] * a;
        int dj = 0;
        if (st == State::AtLower && d > kDualTol)
          dj = 1;
        else if (st == State::AtUpper && d < -kDualTol)
          dj = -1;
        else if (st == State::Free && std::abs(d) > kDualTol)
          dj = d > 0 ? 1 : -1;
        if (dj == 0) continue;
        if (bland) {
          enter = static_cast<int>(j);
          dir = dj;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = static_cast<int>(j);
          dir = dj;
        }
      }
      if (enter < 0) return true;

      std::vector<double> w = compute_w(enter);
      const double flip_cap = (std::isfinite(up[enter]) && std::isfinite(lo[enter]))
                                  ? up[enter] - lo[enter]
                                  : kInf;
      // Two-pass (Harris) ratio test. Pass 1: minimum ratio with each bound
      // relaxed by a small feasibility slack. Pass 2: among the rows whose
      // exact ratio fits under that relaxed minimum, leave on the largest
      // pivot, which keeps the basis well conditioned; a plain "tightest row
      // wins" rule happily picks pivots barely above the tolerance and walks
      // the basis into singularity.
      constexpr double kFeasSlack = 1e-9;
      double theta_rel = flip_cap;
      auto row_ratio = [&](std::size_t r, double slack, double& t, bool& hit_upper) {
        int bv = basis[r];
        double rate = -dir * w[r];  // d xb[r] / d theta
        if (rate < 0) {
          if (!std::isfinite(lo[bv])) return false;
          t = (xb[r] - lo[bv] + slack) / (-rate);
          hit_upper = false;
        } else {
          if (!std::isfinite(up[bv])) return false;
          t = (up[bv] - xb[r] + slack) / rate;
          hit_upper = true;
        }
        if (t < 0) t = 0;
        return true;
      };
      for (std::size_t r = 0; r < m; ++r) {
        if (std::abs(w[r]) < pivot_tol) continue;
        double t;
        bool hu;
        if (row_ratio(r, kFeasSlack, t, hu)) theta_rel = std::min(theta_rel, t);
      }
      int leave_row = -1;
      double leave_pivot = 0.0;
      bool leave_at_upper = false;
      double theta = flip_cap;
      for (std::size_t r = 0; r < m; ++r) {
        if (std::abs(w[r]) < pivot_tol) continue;
        double t;
        bool hu;
        if (!row_ratio(r, 0.0, t, hu)) continue;
        if (t > theta_rel) continue;
        bool take;
        if (leave_row < 0)
          take = true;
        else if (bland)
          take = basis[r] < basis[leave_row];
        else
          take = std::abs(w[r]) > std::abs(leave_pivot);
        if (take) {
          leave_row = static_cast<int>(r);
          leave_pivot = w[r];
          leave_at_upper = hu;
          theta = t;
        }
      }
      if (leave_row < 0 && !std::isfinite(flip_cap)) return false;  // unbounded

      degen_run = theta < 1e-10 ? degen_run + 1 : 0;
      if (degen_run > 200) bland = true;

      if (leave_row < 0) {
        theta = flip_cap;
        // Bound flip of the entering variable.
        for (std::size_t r = 0; r < m; ++r) xb[r] -= dir * theta * w[r];
        val[enter] = dir > 0 ? up[enter] : lo[enter];
        state[enter] = dir > 0 ? State::AtUpper : State::AtLower;
        ++changes;
        continue;
      }

      double enter_val =
          (state[enter] == State::Free ? val[enter]
                                       : (state[enter] == State::AtLower ? lo[enter] : up[enter])) +
          dir * theta;
      for (std::size_t r = 0; r < m; ++r) xb[r] -= dir * theta * w[r];
      int lv = basis[leave_row];
      state[lv] = leave_at_upper ? State::AtUpper : State::AtLower;
      val[lv] = leave_at_upper ? up[lv] : lo[lv];
      basis[leave_row] = enter;
      state[enter] = State::Basic;
      xb[leave_row] = enter_val;
      ++changes;
      update_binv(static_cast<std::size_t>(leave_row), w);
      if (refactor_every > 0 && changes % refactor_every == 0)
        refactor();
      else if (pivots % 512 == 0)
        recompute_xb();
    }
  }

  void update_binv(std::size_t r, const std::vector<double>& w) {
    double piv = w[r];
    double* rowr = binv.data() + r * m;
    for (std::size_t k = 0; k < m; ++k) rowr[k] /= piv;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel_rows)
#endif
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
      if (static_cast<std::size_t>(i) == r) continue;
      double f = w[i];
      if (f == 0.0) continue;
      double* rowi = binv.data() + i * m;
      for (std::size_t k = 0; k < m; ++k) rowi[k] -= f * rowr[k];
    }
  }

  // Pivot a basic artificial (at value ~0) out of row r if possible.
  void drive_out_artificial(std::size_t r) {
    const double* rowr = binv.data() + r * m;
    for (std::size_t j = 0; j < art_begin; ++j) {
      if (state[j] == State::Basic) continue;
      if (up[j] - lo[j] <= 0.0 && state[j] != State::Free) continue;
      double piv = 0.0;
      for (const auto& [i, a] : cols[j]) piv += rowr[i] * a;
      if (std::abs(piv) < 1e-7) continue;
      std::vector<double> w = compute_w(static_cast<int>(j));
      int lv = basis[r];
      double enter_val = state[j] == State::Free ? val[j] : (state[j] == State::AtLower ? lo[j] : up[j]);
      state[lv] = State::AtLower;
      val[lv] = 0.0;
      basis[r] = static_cast<int>(j);
      state[j] = State::Basic;
      xb[r] = enter_val;
      update_binv(r, w);
      recompute_xb();
      return;
    }
    // Redundant row: pin the artificial at zero.
    lo[basis[r]] = up[basis[r]] = 0.0;
  }
};

}  // namespace

namespace {

LPSolution solve_impl(const LinearProgram& p, bool conservative) {
  const std::size_t n = p.num_vars();
  const std::size_t m = p.num_rows();
  for (std::size_t j = 0; j < n; ++j)
    if (p.lower()[j] > p.upper()[j]) return {LPStatus::Infeasible, {}, 0.0};

  Simplex s;
  s.n = n;
  s.m = m;
  s.max_pivots = std::max<long>(50000, 200 * static_cast<long>(n + m));
  if (conservative) {
    s.bland = s.bland_always = true;
    s.pivot_tol = 1e-9;
    // Frequent rebuilds keep the inverse accurate through long degenerate
    // runs; skip them on very large programs where one rebuild is O(m^3).
    if (m <= 2000) s.refactor_every = 200;
  }
  s.parallel_rows = m >= 512;
  s.total = n + m;
  s.cols.resize(n + m);
  s.lo.assign(n + m, 0.0);
  s.up.assign(n + m, kInf);
  s.cost.assign(n + m, 0.0);
  s.val.assign(n + m, 0.0);
  s.state.assign(n + m, State::AtLower);
  s.rhs.resize(m);
  double scale = 1.0;

  for (std::size_t j = 0; j < n; ++j) {
    s.lo[j] = p.lower()[j];
    s.up[j] = p.upper()[j];
  }
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = p.rows()[r];
    for (const auto& [j, a] : row.coeffs) s.cols[j].emplace_back(static_cast<int>(r), a);
    std::size_t sl = n + r;
    s.cols[sl].emplace_back(static_cast<int>(r), 1.0);
    switch (row.rel) {
      case Rel::LE: s.lo[sl] = 0.0; s.up[sl] = kInf; break;
      case Rel::GE: s.lo[sl] = -kInf; s.up[sl] = 0.0; break;
      case Rel::EQ: s.lo[sl] = 0.0; s.up[sl] = 0.0; break;
    }
    s.rhs[r] = row.rhs;
    scale = std::max(scale, std::abs(row.rhs));
  }

  // Equilibrate: geometric-mean row/column scaling (rounded to powers of two)
  // keeps coefficient magnitudes near 1, which stabilizes the ratio test on
  // rows mixing tiny probability products with unit coefficients. Slack
  // columns are scaled by 1/R so their coefficient stays exactly 1.
  std::vector<double> rscale(m, 1.0), cscale(n, 1.0);
  if (m > 0 && n > 0) {
    for (int pass = 0; pass < 4; ++pass) {
      std::vector<double> logsum(m, 0.0);
      std::vector<int> cnt(m, 0);
      for (std::size_t j = 0; j < n; ++j)
        for (const auto& [r, a] : s.cols[j]) {
          double v = std::abs(a) * rscale[r] * cscale[j];
          if (v > 0) {
            logsum[r] += std::log2(v);
            ++cnt[r];
          }
        }
      for (std::size_t r = 0; r < m; ++r)
        if (cnt[r] > 0) rscale[r] *= std::exp2(-std::round(logsum[r] / cnt[r]));
      for (std::size_t j = 0; j < n; ++j) {
        double ls = 0.0;
        int c = 0;
        for (const auto& [r, a] : s.cols[j]) {
          double v = std::abs(a) * rscale[r] * cscale[j];
          if (v > 0) {
            ls += std::log2(v);
            ++c;
          }
        }
        if (c > 0) cscale[j] *= std::exp2(-std::round(ls / c));
      }
    }
    for (std::size_t r = 0; r < m; ++r) rscale[r] = std::clamp(rscale[r], 0x1p-20, 0x1p20);
    for (std::size_t j = 0; j < n; ++j) cscale[j] = std::clamp(cscale[j], 0x1p-20, 0x1p20);
    for (std::size_t j = 0; j < n; ++j) {
      for (auto& [r, a] : s.cols[j]) a *= rscale[r] * cscale[j];
      if (std::isfinite(s.lo[j])) s.lo[j] /= cscale[j];
      if (std::isfinite(s.up[j])) s.up[j] /= cscale[j];
      s.cost[j] *= cscale[j];
    }
    scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      s.rhs[r] *= rscale[r];
      scale = std::max(scale, std::abs(s.rhs[r]));
    }
  }

  // Nonbasic start at the nearest finite bound.
  for (std::size_t j = 0; j < n + m; ++j) {
    if (std::isfinite(s.lo[j])) {
      s.state[j] = State::AtLower;
      s.val[j] = s.lo[j];
    } else if (std::isfinite(s.up[j])) {
      s.state[j] = State::AtUpper;
      s.val[j] = s.up[j];
    } else {
      s.state[j] = State::Free;
      s.val[j] = 0.0;
    }
  }

  // Residuals with all variables (incl. slacks) nonbasic; slacks whose target
  // lands in their range enter the basis directly, others get an artificial.
  std::vector<double> resid(m);
  for (std::size_t r = 0; r < m; ++r) resid[r] = s.rhs[r];
  for (std::size_t j = 0; j < n; ++j) {
    if (s.val[j] == 0.0) continue;
    for (const auto& [r, a] : s.cols[j]) resid[r] -= a * s.val[j];
  }

  s.basis.assign(m, -1);
  s.xb.assign(m, 0.0);
  s.binv.assign(m * m, 0.0);
  std::vector<std::size_t> art_rows;
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t sl = n + r;
    double target = resid[r];  // slack value making the row tight
    if (target >= s.lo[sl] - 1e-12 && target <= s.up[sl] + 1e-12) {
      s.basis[r] = static_cast<int>(sl);
      s.state[sl] = State::Basic;
      s.xb[r] = std::clamp(target, s.lo[sl], s.up[sl]);
      s.binv[r * m + r] = 1.0;
    } else {
      double bound = target < s.lo[sl] ? s.lo[sl] : s.up[sl];
      s.state[sl] = target < s.lo[sl] ? State::AtLower : State::AtUpper;
      s.val[sl] = bound;
      double residual = target - bound;
      double g = residual >= 0 ? 1.0 : -1.0;
      std::size_t aj = s.cols.size();
      s.cols.push_back({{static_cast<int>(r), g}});
      s.lo.push_back(0.0);
      s.up.push_back(kInf);
      s.cost.push_back(0.0);
      s.val.push_back(0.0);
      s.state.push_back(State::Basic);
      s.basis[r] = static_cast<int>(aj);
      s.xb[r] = std::abs(residual);
      s.binv[r * m + r] = g;
      art_rows.push_back(r);
    }
  }
  s.art_begin = n + m;
  s.total = s.cols.size();
  s.scale = scale;

  // Phase 1: drive the artificial infeasibility to zero.
  if (!art_rows.empty()) {
    for (std::size_t j = s.art_begin; j < s.total; ++j) s.cost[j] = -1.0;
    if (!s.iterate()) throw std::runtime_error("lp: phase 1 unbounded");
    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      if (static_cast<std::size_t>(s.basis[r]) >= s.art_begin) infeas += std::abs(s.xb[r]);
    if (infeas > 1e-8 * (1.0 + scale)) {
      // Do not declare infeasibility off a possibly drifted inverse: rebuild
      // it, finish phase 1 exactly, and re-measure.
      s.refactor();
      s.degen_run = 0;
      if (!s.iterate()) throw std::runtime_error("lp: phase 1 unbounded");
      infeas = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        if (static_cast<std::size_t>(s.basis[r]) >= s.art_begin) infeas += std::abs(s.xb[r]);
      if (infeas > 1e-8 * (1.0 + scale)) return {LPStatus::Infeasible, {}, 0.0};
    }
    for (std::size_t r = 0; r < m; ++r)
      if (static_cast<std::size_t>(s.basis[r]) >= s.art_begin) s.drive_out_artificial(r);
    for (std::size_t j = s.art_begin; j < s.total; ++j) {
      s.cost[j] = 0.0;
      if (s.state[j] != State::Basic) {
        s.lo[j] = s.up[j] = 0.0;
        s.val[j] = 0.0;
        s.state[j] = State::AtLower;
      }
    }
  }

  // Phase 2 (objective in the scaled variable space).
  for (std::size_t j = 0; j < n; ++j) s.cost[j] = p.objective()[j] * cscale[j];
  s.bland = s.bland_always;
  s.degen_run = 0;
  if (!s.iterate()) return {LPStatus::Unbounded, {}, 0.0};

  auto extract = [&]() {
    LPSolution sol;
    sol.status = LPStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = s.state[j] == State::Basic ? 0.0 : s.val[j];
    for (std::size_t r = 0; r < m; ++r)
      if (static_cast<std::size_t>(s.basis[r]) < n) sol.x[s.basis[r]] = s.xb[r];
    // Map back from the scaled variable space and snap basic variables onto
    // their bounds: the relaxed ratio test can leave them a hair outside,
    // and callers rely on bounds (e.g. u >= 0) holding exactly.
    for (std::size_t j = 0; j < n; ++j)
      sol.x[j] = std::clamp(sol.x[j] * cscale[j], p.lower()[j], p.upper()[j]);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += p.objective()[j] * sol.x[j];
    return sol;
  };

  auto max_violation = [&](const LPSolution& sol) {
    double worst = 0.0;
    for (const auto& row : p.rows()) {
      double lhs = 0.0;
      for (const auto& [j, a] : row.coeffs) lhs += a * sol.x[j];
      double v = 0.0;
      if (row.rel == Rel::LE) v = lhs - row.rhs;
      else if (row.rel == Rel::GE) v = row.rhs - lhs;
      else v = std::abs(lhs - row.rhs);
      worst = std::max(worst, v);
    }
    return worst;
  };

  // Verification: the running inverse can drift, which both breaks primal
  // feasibility and corrupts reduced costs (a silently suboptimal "optimum").
  // Rebuild the inverse from scratch and re-optimize until a pass with a
  // fresh inverse needs no pivot at all and the solution satisfies the
  // original rows.
  LPSolution sol = extract();
  for (int attempt = 0; attempt < 4; ++attempt) {
    s.refactor();
    s.bland = s.bland_always;
    s.degen_run = 0;
    long before = s.changes;
    if (!s.iterate()) return {LPStatus::Unbounded, {}, 0.0};
    sol = extract();
    if (s.changes == before && max_violation(sol) <= 1e-7 * (1.0 + scale)) return sol;
  }
  throw std::runtime_error("lp: could not verify optimality");
}

}  // namespace

LPSolution solve(const LinearProgram& p) {
  try {
    return solve_impl(p, false);
  } catch (const std::runtime_error&) {
    // Numerical breakdown on the fast path (singular rebuilt basis, a repair
    // that could not restore feasibility, or a pivot-count blowout from
    // degenerate thrashing): restart with Bland's rule and a larger pivot
    // tolerance. A failure on the conservative path propagates.
    return solve_impl(p, true);
  }
}

}  // namespace dmd
