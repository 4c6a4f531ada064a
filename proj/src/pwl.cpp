#include "dmd/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmd {

namespace {
constexpr double kConcavitySlack = 1e-9;
}

PiecewiseLinearConcave::PiecewiseLinearConcave(std::vector<Point> breakpoints, Extension ext) {
  if (breakpoints.empty()) throw std::invalid_argument("pwl: no breakpoints");
  xs_.reserve(breakpoints.size());
  ys_.reserve(breakpoints.size());
  for (const auto& p : breakpoints) {
    if (!xs_.empty() && !(p.c > xs_.back()))
      throw std::invalid_argument("pwl: abscissae not strictly increasing");
    xs_.push_back(p.c);
    ys_.push_back(p.y);
  }
  double prev_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    double s = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
    if (s > prev_slope + kConcavitySlack) throw std::invalid_argument("pwl: not concave");
    prev_slope = std::min(prev_slope, s);
  }
  double last_slope = xs_.size() > 1 ? (ys_.back() - ys_[ys_.size() - 2]) /
                                           (xs_.back() - xs_[xs_.size() - 2])
                                     : 0.0;
  ext_slope_ = (ext == Extension::LastSlope && xs_.size() > 1) ? last_slope : 0.0;
  if (xs_.size() > 1 && ext_slope_ > last_slope + kConcavitySlack)
    throw std::invalid_argument("pwl: extension breaks concavity");
}

PiecewiseLinearConcave PiecewiseLinearConcave::upper_envelope(std::vector<Point> points,
                                                              Extension ext) {
  if (points.empty()) throw std::invalid_argument("pwl: empty point set");
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.c < b.c || (a.c == b.c && a.y < b.y); });
  // Max y per abscissa.
  std::vector<Point> uniq;
  for (const auto& p : points) {
    if (!uniq.empty() && uniq.back().c == p.c)
      uniq.back().y = std::max(uniq.back().y, p.y);
    else
      uniq.push_back(p);
  }
  // Upper hull, left to right; collinear middle points dropped.
  std::vector<Point> hull;
  for (const auto& p : uniq) {
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& m = hull.back();
      double turn = (m.y - a.y) * (p.c - a.c) - (p.y - a.y) * (m.c - a.c);
      if (turn <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return PiecewiseLinearConcave(std::move(hull), ext);
}

std::optional<double> PiecewiseLinearConcave::evaluate(double c) const {
  if (c < xs_.front()) return std::nullopt;
  if (c >= xs_.back()) return ys_.back() + ext_slope_ * (c - xs_.back());
  auto it = std::upper_bound(xs_.begin(), xs_.end(), c);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());  // xs_[i-1] <= c < xs_[i]
  double t = (c - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

std::pair<double, double> PiecewiseLinearConcave::argmax() const {
  if (ext_slope_ > 1e-12) throw std::logic_error("pwl: argmax of function unbounded above");
  std::size_t best = 0;
  for (std::size_t i = 1; i < ys_.size(); ++i)
    if (ys_[i] > ys_[best]) best = i;
  return {xs_[best], ys_[best]};
}

PiecewiseLinearConcave PiecewiseLinearConcave::add_linear(double slope) const {
  PiecewiseLinearConcave out;
  out.xs_ = xs_;
  out.ys_ = ys_;
  for (std::size_t i = 0; i < out.ys_.size(); ++i) out.ys_[i] += slope * xs_[i];
  out.ext_slope_ = ext_slope_ + slope;
  return out;
}

PiecewiseLinearConcave adaptive_concave_fit(const std::function<double(double)>& fn, double lo,
                                            double hi, double delta, bool parallel,
                                            int initial_points, int max_points) {
  using Point = PiecewiseLinearConcave::Point;
  if (!(delta > 0.0)) throw std::invalid_argument("fit: delta must be positive");
  if (!(hi >= lo)) throw std::invalid_argument("fit: empty interval");
  if (hi - lo < 1e-12)
    return PiecewiseLinearConcave({{lo, fn(lo)}}, PiecewiseLinearConcave::Extension::Constant);

  int n0 = std::max(2, initial_points);
  std::vector<double> cs(n0);
  for (int i = 0; i < n0; ++i) cs[i] = lo + (hi - lo) * i / (n0 - 1);

  auto batch_eval = [&](const std::vector<double>& xs) {
    std::vector<double> ys(xs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < static_cast<long long>(xs.size()); ++i) ys[i] = fn(xs[i]);
    return ys;
  };

  std::vector<Point> samples;
  {
    auto ys = batch_eval(cs);
    for (int i = 0; i < n0; ++i) samples.push_back({cs[i], ys[i]});
  }

  struct Interval {
    double a, ya, b, yb;
  };
  std::vector<Interval> frontier;
  for (int i = 0; i + 1 < n0; ++i)
    frontier.push_back({samples[i].c, samples[i].y, samples[i + 1].c, samples[i + 1].y});

  int count = n0;
  // Bisect while the midpoint beats the chord by more than delta/2, which
  // bounds the concave function's gap over the interval by delta.
  while (!frontier.empty() && count < max_points) {
    std::vector<double> mids(frontier.size());
    for (std::size_t i = 0; i < frontier.size(); ++i)
      mids[i] = 0.5 * (frontier[i].a + frontier[i].b);
    auto ys = batch_eval(mids);
    std::vector<Interval> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const Interval& iv = frontier[i];
      double chord = 0.5 * (iv.ya + iv.yb);
      if (ys[i] - chord > delta / 2 && count < max_points && iv.b - iv.a > 1e-10) {
        samples.push_back({mids[i], ys[i]});
        ++count;
        next.push_back({iv.a, iv.ya, mids[i], ys[i]});
        next.push_back({mids[i], ys[i], iv.b, iv.yb});
      }
    }
    frontier = std::move(next);
  }
  // Constant extension when the fitted function is flat or rising at the right
  // edge; otherwise continue with the (negative) last slope to keep concavity.
  auto env = PiecewiseLinearConcave::upper_envelope(samples,
                                                    PiecewiseLinearConcave::Extension::LastSlope);
  if (env.extension_slope() >= -kConcavitySlack) {
    std::vector<Point> bps;
    for (std::size_t i = 0; i < env.num_breakpoints(); ++i)
      bps.push_back({env.xs()[i], env.ys()[i]});
    env = PiecewiseLinearConcave::upper_envelope(std::move(bps),
                                                 PiecewiseLinearConcave::Extension::Constant);
  }
  return env;
}

}  // namespace dmd
