#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "logconvex/covariogram.hpp"
#include "logconvex/numkernel.hpp"
#include "logconvex/profile.hpp"

namespace logconvex {

/// rho_{K~_p(g)}(u) = ((p / g(0)) int_0^inf r^{p-1} g(r u) dr)^{1/p}.
template <RayProfile G>
double ball_body_radial(const G& g, double p, const Vec& u)
{
  if (!(p > 0.0)) {
    throw DomainError("ball_body_radial: p must be positive");
  }
  const double g0 = g.origin_value();
  if (!(g0 > 0.0)) {
    throw DomainError("ball_body_radial: g(0) must be positive");
  }
  return std::pow(p / g0 * ray_moment(g, u, p), 1.0 / p);
}

/// Star body K~_p(g) with its radial function evaluated on demand.
template <RayProfile G>
class BallBody
{
 public:
  BallBody(const G& g, double p)
      : g_(&g)
      , p_(p)
  {
    if (!(p > 0.0)) {
      throw DomainError("BallBody: p must be positive");
    }
  }

  double p() const { return p_; }
  int dim() const { return g_->dim(); }
  double radial(const Vec& u) const { return ball_body_radial(*g_, p_, u); }

 private:
  const G* g_;
  double p_;
};

struct BallBodyVolume
{
  double volume = 0.0;    // |K~_n(g)|
  double integral = 0.0;  // int g over the same grid
  double residual = 0.0;  // |volume * g(0) - integral| / integral
};

/// |K~_n(g)|, cross-checked against int g / g(0) on every call.
template <RayProfile G>
BallBodyVolume ball_body_volume(const G& g, const SphereGrid& grid)
{
  const int n = g.dim();
  if (grid.dim != n) {
    throw DomainError("ball_body_volume: grid dimension mismatch");
  }
  const double g0 = g.origin_value();
  std::vector<double> moments(grid.size(), 0.0);
  const bool even = g.is_even() && grid.antipodal;
  const std::size_t count = even ? grid.size() / 2 : grid.size();
  for (std::size_t i = 0; i < count; ++i) {
    moments[i] = ray_moment(g, grid.nodes[i], n);
  }
  auto moment = [&](const Vec&, std::size_t i) { return moments[i]; };
  auto radial = [&](const Vec&, std::size_t i) { return std::pow(n / g0 * moments[i], 1.0 / n); };

  BallBodyVolume out;
  out.volume = unit_ball_volume(n) *
               sphere_mean([&](const Vec& u, std::size_t i) { return std::pow(radial(u, i), n); },
                           grid, even);
  out.integral = n * unit_ball_volume(n) * sphere_mean(moment, grid, even);
  out.residual = std::abs(out.volume * g0 - out.integral) / out.integral;
  const double tol = std::max(g.integration_tolerance(), 1e-12);
  if (out.residual > 5.0 * tol) {
    throw ConsistencyError("ball_body_volume: |K~_n(g)| g(0) disagrees with the integral of g");
  }
  return out;
}

/// t / Gamma(1 + p)^{1/p}.
inline double inclusion_factor(double p, double t)
{
  return t / std::pow(std::tgamma(1.0 + p), 1.0 / p);
}

/// 12 geometric points in (0.01 p/e, p/e], the last one exactly p/e.
inline std::vector<double> default_t_grid(double p)
{
  const double top = p / std::numbers::e;
  const int count = 12;
  std::vector<double> ts;
  ts.reserve(count);
  for (int k = 1; k <= count; ++k) {
    ts.push_back(top * std::pow(0.01, static_cast<double>(count - k) / count));
  }
  ts.back() = top;
  return ts;
}

struct InclusionRow
{
  double p = 0.0;
  double t = 0.0;
  std::size_t direction = 0;
  double lhs = 0.0;  // t / Gamma(1+p)^{1/p} * rho_{K~_p(g)}(u)
  double rhs = 0.0;  // rho_{K_t(g)}(u)
  double margin = 0.0;
};

struct InclusionReport
{
  double p = 0.0;
  double tol = 0.0;
  std::vector<InclusionRow> rows;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_abs_margin = 0.0;
  bool failed = false;

  void write_csv(std::ostream& os) const
  {
    os << "p,t,direction,lhs_radial,rhs_radial,margin\n";
    os.precision(17);
    for (const auto& r : rows) {
      os << r.p << ',' << r.t << ',' << r.direction << ',' << r.lhs << ',' << r.rhs << ','
         << r.margin << '\n';
    }
  }
};

namespace detail {

inline double relative_margin(double lhs, double rhs)
{
  if (lhs == 0.0) {
    return rhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return rhs / lhs - 1.0;
}

/// Row computation without the domain check on t, so tests can probe t > p/e.
template <RayProfile G>
InclusionReport inclusion_rows(const G& g, double p, std::span<const double> t_grid,
                               const SphereGrid& grid, double tol)
{
  InclusionReport report;
  report.p = p;
  report.tol = tol;
  // radii of an even g repeat on antipodal nodes
  const bool even = g.is_even() && grid.antipodal;
  const std::size_t half = grid.size() / 2;
  std::vector<double> ball(grid.size(), 0.0);
  std::vector<std::vector<double>> level(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (even && i >= half) {
      ball[i] = ball[i - half];
      level[i] = level[i - half];
      continue;
    }
    ball[i] = ball_body_radial(g, p, grid.nodes[i]);
    level[i].reserve(t_grid.size());
    for (double t : t_grid) {
      level[i].push_back(g.level_radial(t, grid.nodes[i]));
    }
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double factor = inclusion_factor(p, t_grid[k]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      InclusionRow row{p, t_grid[k], i, factor * ball[i], level[i][k], 0.0};
      row.margin = relative_margin(row.lhs, row.rhs);
      report.min_margin = std::min(report.min_margin, row.margin);
      report.max_abs_margin = std::max(report.max_abs_margin, std::abs(row.margin));
      report.rows.push_back(row);
    }
  }
  report.failed = report.min_margin < -tol;
  return report;
}

}  // namespace detail

/// Direction-wise check of (t / Gamma(1+p)^{1/p}) K~_p(g) subset K_t(g) for t in (0, p/e].
/// margin = rho_{K_t(g)} / (scaled rho_{K~_p}) - 1; the report fails when some margin < -tol.
template <RayProfile G>
InclusionReport check_inclusion_lemma(const G& g, double p, std::span<const double> t_grid,
                                      const SphereGrid& grid, double tol)
{
  const double top = p / std::numbers::e;
  for (double t : t_grid) {
    if (!(t > 0.0) || t > top * (1.0 + 1e-12)) {
      throw DomainError("check_inclusion_lemma: t must lie in (0, p/e]");
    }
  }
  return detail::inclusion_rows(g, p, t_grid, grid, tol);
}

}  // namespace logconvex
