#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "logconvex/bodies.hpp"
#include "logconvex/covariogram.hpp"
#include "logconvex/logconcave.hpp"
#include "logconvex/numkernel.hpp"

namespace logconvex {

namespace detail {

// Representative of {x, -x} so that both signs evaluate bit-identically.
inline Vec even_representative(const Vec& x)
{
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      return x[i] < 0.0 ? Vec(-x) : x;
    }
  }
  return x;
}

}  // namespace detail

/// ||x||_{Pi*(K)} = |x| |P_{x-perp} K|.
inline double pibody_norm_body(const ConvexBody& k, const Vec& x)
{
  const double len = x.norm();
  if (len == 0.0) {
    return 0.0;
  }
  return len * shadow_volume(k, detail::even_representative(x) / len);
}

/// ||x||_{Pi*(f)} = 2 |x| ||f||_inf int_0^inf |P_{x-perp} K_t(f)| e^{-t} dt.
inline double pibody_norm_fn(const LogConcaveFunction& f, const Vec& x,
                             const QuadratureSpec& spec = {})
{
  const double len = x.norm();
  if (len == 0.0) {
    return 0.0;
  }
  const Vec u = detail::even_representative(x) / len;
  const double shadows =
      integrate_exp_weighted([&](double t) { return f.level_shadow_volume(t, u); }, spec);
  return 2.0 * len * f.peak() * shadows;
}

/// Polar rule on the hyperplane u-perp for an n-dimensional function: S^0 when n = 2.
inline SphereGrid perp_grid(int n, int budget, Seed seed)
{
  if (n < 2) {
    throw DomainError("perp_grid: dimension must be >= 2");
  }
  return n == 2 ? sphere_grid_s0() : sphere_grid(n - 1, budget, seed);
}

/// ||x||_{Pi*(f)} = 2 |x| int_{x-perp} P_{x-perp} f, the shadow integrated in polar
/// coordinates about the origin of x-perp using the (n-1)-dimensional rule `grid`.
inline double pibody_norm_fn_shadowform(const LogConcaveFunction& f, const Vec& x,
                                        const SphereGrid& grid, double rel_tol = 1e-9)
{
  const double len = x.norm();
  if (len == 0.0) {
    return 0.0;
  }
  const int m = f.dim() - 1;
  if (grid.dim != m) {
    throw DomainError("pibody_norm_fn_shadowform: grid must live on the sphere of x-perp");
  }
  const LogConcaveFunction shade = fn_shadow(f, x / len);
  HalflineOptions opts;
  opts.rel_tol = rel_tol;
  auto ray = [&](const Vec& v, std::size_t) {
    return integrate_halfline(
        [&](double r) { return std::pow(r, m - 1) * eval(shade, r * v); }, 1e-12, opts);
  };
  const double integral = m * unit_ball_volume(m) * sphere_mean(ray, grid);
  return 2.0 * len * integral;
}

/// Pi*(K) or Pi*(f) as a star body: rho(u) = 1 / ||u||.
class PolarProjectionBody
{
 public:
  static PolarProjectionBody of_body(ConvexBody k)
  {
    const int n = k.dim();
    return PolarProjectionBody(n, [k = std::move(k)](const Vec& x) { return pibody_norm_body(k, x); });
  }

  static PolarProjectionBody of_function(LogConcaveFunction f, QuadratureSpec spec = {})
  {
    spec.validate();
    const int n = f.dim();
    return PolarProjectionBody(
        n, [f = std::move(f), spec](const Vec& x) { return pibody_norm_fn(f, x, spec); });
  }

  int dim() const { return dim_; }
  double norm(const Vec& x) const { return norm_(x); }

  double radial(const Vec& u) const
  {
    const double v = norm_(u);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DegenerateBodyError("polar projection body: norm vanishes in some direction");
    }
    return 1.0 / v;
  }

 private:
  PolarProjectionBody(int dim, std::function<double(const Vec&)> norm)
      : dim_(dim)
      , norm_(std::move(norm))
  {
  }

  int dim_;
  std::function<double(const Vec&)> norm_;
};

/// |Pi*|, via |B_2^n| sum_i w_i rho(u_i)^n. The norm is even, so only half an antipodal
/// grid is evaluated.
inline double pibody_volume(const PolarProjectionBody& body, const SphereGrid& grid)
{
  if (grid.dim != body.dim()) {
    throw DomainError("pibody_volume: grid dimension mismatch");
  }
  return radial_mean_pow([&](const Vec& u) { return body.radial(u); }, grid, body.dim(), true);
}

struct LevelsetLimitRow
{
  std::size_t direction = 0;
  double lambda = 0.0;
  double rho_lambda = 0.0;  // rho_{K_{-log(1-lambda)}(g)}(u) / lambda
  double rho_target = 0.0;  // 2 ||f||_1 / ||u||_{Pi*(f)}
  double margin = 0.0;      // rho_lambda / rho_target - 1
};

struct LevelsetLimitReport
{
  double tol = 0.0;
  double tol_limit = 0.0;
  std::vector<LevelsetLimitRow> rows;
  double min_margin = std::numeric_limits<double>::infinity();
  // max over directions of (inf_lambda rho_lambda / rho_target - 1)
  double limit_residual = 0.0;
  bool containment_ok = true;
  bool limit_ok = true;

  void write_csv(std::ostream& os) const
  {
    os << "direction,lambda,rho_lambda,rho_target,margin\n";
    os.precision(17);
    for (const auto& r : rows) {
      os << r.direction << ',' << r.lambda << ',' << r.rho_lambda << ',' << r.rho_target << ','
         << r.margin << '\n';
    }
  }
};

/// Compares K_{-log(1-lambda)}(g) / lambda, g the covariogram of f, with 2 ||f||_1 Pi*(f)
/// direction by direction.
inline LevelsetLimitReport check_levelset_limit(const LogConcaveFunction& f,
                                                const QuadratureSpec& spec,
                                                std::span<const double> lambdas,
                                                const SphereGrid& directions, double tol,
                                                double tol_limit)
{
  for (double lambda : lambdas) {
    if (!(lambda > 0.0) || !(lambda < 1.0)) {
      throw DomainError("check_levelset_limit: lambda must lie in (0, 1)");
    }
  }
  const Covariogram g(f, spec);
  const double two_mass = 2.0 * mass(f, spec);
  LevelsetLimitReport report;
  report.tol = tol;
  report.tol_limit = tol_limit;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const Vec& u = directions.nodes[i];
    const double target = two_mass / pibody_norm_fn(f, u, spec);
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
      const double rho = g.level_radial(-std::log1p(-lambda), u) / lambda;
      LevelsetLimitRow row{i, lambda, rho, target, rho / target - 1.0};
      report.min_margin = std::min(report.min_margin, row.margin);
      best = std::min(best, rho);
      report.rows.push_back(row);
    }
    report.limit_residual = std::max(report.limit_residual, best / target - 1.0);
  }
  report.containment_ok = report.min_margin >= -tol;
  report.limit_ok = report.limit_residual <= tol_limit;
  return report;
}

}  // namespace logconvex
