#pragma once

#include <cmath>
#include <concepts>
#include <limits>

#include "logconvex/logconcave.hpp"
#include "logconvex/numkernel.hpp"

namespace logconvex {

/// A log-concave g on R^n with g(0) = ||g||_inf > 0, queried along rays from the origin.
/// Satisfied by Covariogram and FunctionProfile.
template <class G>
concept RayProfile = requires(const G& g, const Vec& x, double t) {
  { g.dim() } -> std::convertible_to<int>;
  { g.value(x) } -> std::convertible_to<double>;
  { g.origin_value() } -> std::convertible_to<double>;
  { g.level_radial(t, x) } -> std::convertible_to<double>;
  { g.is_even() } -> std::convertible_to<bool>;
  { g.integration_tolerance() } -> std::convertible_to<double>;
};

/// Uses a log-concave function directly as the profile g. Level sets come from the
/// function's own K_t, so their radial values are exact.
class FunctionProfile
{
 public:
  explicit FunctionProfile(LogConcaveFunction f)
      : f_(std::move(f))
      , origin_(eval(f_, Vec::Zero(f_.dim())))
  {
    if (origin_ < f_.peak() * (1.0 - 1e-12)) {
      throw DomainError("FunctionProfile: the maximum must be attained at the origin");
    }
  }

  int dim() const { return f_.dim(); }
  double value(const Vec& x) const { return eval(f_, x); }
  double origin_value() const { return origin_; }
  bool is_even() const { return false; }
  double integration_tolerance() const { return 1e-9; }
  const LogConcaveFunction& function() const { return f_; }

  /// rho_{K_t(g)}(u); zero where the level set only touches 0 in direction u.
  double level_radial(double t, const Vec& u) const
  {
    if (t < 0.0) {
      throw DomainError("level_radial: t must be nonnegative");
    }
    if (f_.kind() == FunctionKind::exp_gauge && f_.apex().isZero()) {
      return t / gauge(f_.body(), u);
    }
    return 1.0 / gauge(level_set(f_, t), u);
  }

 private:
  LogConcaveFunction f_;
  double origin_;
};

/// int_0^inf r^{p-1} g(r u) dr.
template <RayProfile G>
double ray_moment(const G& g, const Vec& u, double p, double cutoff_tol = 1e-9)
{
  HalflineOptions opts;
  opts.rel_tol = std::max(1e-10, g.integration_tolerance());
  return integrate_halfline(
      [&](double r) { return std::pow(r, p - 1.0) * g.value(r * u); }, cutoff_tol, opts);
}

/// int_{R^n} g in polar coordinates: n |B_2^n| sum_i w_i int_0^inf r^{n-1} g(r u_i) dr.
template <RayProfile G>
double profile_total_integral(const G& g, const SphereGrid& grid)
{
  const int n = g.dim();
  if (grid.dim != n) {
    throw DomainError("profile_total_integral: grid dimension mismatch");
  }
  auto moment = [&](const Vec& u, std::size_t) { return ray_moment(g, u, n); };
  return n * unit_ball_volume(n) * sphere_mean(moment, grid, g.is_even());
}

}  // namespace logconvex
