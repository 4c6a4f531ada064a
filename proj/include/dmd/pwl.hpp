#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace dmd {

// Concave piecewise-linear function on [domain_lo, +inf).
// Below domain_lo the function is -inf (evaluate returns nullopt).
// Above the last breakpoint it continues with a fixed extension slope.
class PiecewiseLinearConcave {
 public:
  enum class Extension { Constant, LastSlope };

  struct Point {
    double c;
    double y;
  };

  PiecewiseLinearConcave(std::vector<Point> breakpoints, Extension ext);

  // Least concave majorant of the given points (max y kept per abscissa).
  static PiecewiseLinearConcave upper_envelope(std::vector<Point> points, Extension ext);

  // nullopt below domain_lo; interpolation inside; extension beyond domain_hi.
  std::optional<double> evaluate(double c) const;

  // Exact maximizer; ties toward the smallest abscissa.
  // Requires a non-positive extension slope (otherwise unbounded).
  std::pair<double, double> argmax() const;

  // f(c) + slope * c; the extension slope shifts by the same amount.
  PiecewiseLinearConcave add_linear(double slope) const;

  double domain_lo() const { return xs_.front(); }
  double domain_hi() const { return xs_.back(); }
  std::size_t num_breakpoints() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double extension_slope() const { return ext_slope_; }

 private:
  PiecewiseLinearConcave() = default;

  std::vector<double> xs_;
  std::vector<double> ys_;
  double ext_slope_ = 0.0;
};

// Samples fn on [lo, hi] (17 uniform points to start), bisects intervals whose
// midpoint exceeds the chord by more than delta/2 (point cap 4096), then
// repairs with the upper concave envelope. fn must be thread-safe: midpoints
// of a refinement wave are evaluated concurrently when parallel is set.
PiecewiseLinearConcave adaptive_concave_fit(const std::function<double(double)>& fn, double lo,
                                            double hi, double delta, bool parallel = true,
                                            int initial_points = 17, int max_points = 4096);

}  // namespace dmd
