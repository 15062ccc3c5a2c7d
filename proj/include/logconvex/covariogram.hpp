#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "logconvex/logconcave.hpp"
#include "logconvex/numkernel.hpp"
#include "logconvex/profile.hpp"

namespace logconvex {

/// Functional covariogram of f:
///   g(x) = int_0^inf e^{-t} |K_t(f) cap (x + K_t(f))| dt
///        = int min{f(y), f(y - x)} dy / ||f||_inf.
/// Even, log-concave, maximal at 0 with g(0) = ||f||_1 / ||f||_inf.
class Covariogram
{
 public:
  explicit Covariogram(LogConcaveFunction f, QuadratureSpec spec = {})
      : f_(std::move(f))
      , spec_(spec)
  {
    spec_.validate();
    origin_ = value(Vec::Zero(f_.dim()));
    if (!(origin_ > 0.0)) {
      throw DomainError("Covariogram: g(0) must be positive");
    }
  }

  int dim() const { return f_.dim(); }
  const LogConcaveFunction& source() const { return f_; }
  const QuadratureSpec& spec() const { return spec_; }
  bool is_even() const { return true; }
  double integration_tolerance() const { return spec_.rel_tol; }
  double origin_value() const { return origin_; }

  double value(const Vec& x) const
  {
    return integrate_exp_weighted([&](double t) { return f_.level_overlap_volume(t, x); }, spec_);
  }

  /// g(0) - g(x), integrated directly so that small drops keep their relative accuracy.
  double drop(const Vec& x) const
  {
    if (x.isZero()) {
      return 0.0;
    }
    return integrate_exp_weighted(
        [&](double t) { return f_.level_volume(t) - f_.level_overlap_volume(t, x); }, spec_);
  }

  /// rho_{K_t(g)}(u): the r with g(r u) = e^{-t} g(0), i.e. drop(r u) = (1 - e^{-t}) g(0).
  double level_radial(double t, const Vec& u) const
  {
    if (!(t > 0.0)) {
      throw DomainError("g_levelset_radial: t must be positive");
    }
    // Quadrature noise can make the sampled drop non-monotone along the ray; the search sees
    // values clamped between those already observed at smaller and larger radii.
    std::map<double, double> seen;
    auto envelope = [&](double r) {
      double v = r == 0.0 ? 0.0 : -drop(r * u);
      const auto above = seen.upper_bound(r);
      for (auto it = above; it != seen.end(); ++it) {
        v = std::max(v, it->second);
      }
      for (auto it = seen.begin(); it != above && it->first < r; ++it) {
        v = std::min(v, it->second);
      }
      seen.emplace(r, v);
      return v;
    };
    return bisect_decreasing(envelope, std::expm1(-t) * origin_, 1.0);
  }

 private:
  LogConcaveFunction f_;
  QuadratureSpec spec_;
  double origin_ = 0.0;
};

inline double g_eval(const Covariogram& g, const Vec& x) { return g.value(x); }

inline double g_levelset_radial(const Covariogram& g, double t, const Vec& u)
{
  return g.level_radial(t, u);
}

inline std::vector<double> default_lambda_grid()
{
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

/// max over lambda of |log g(lambda x) - (1 - lambda) log g(0) - lambda log g(x)|.
template <RayProfile G>
double ray_loglinearity_deficit(const G& g, const Vec& x, std::span<const double> lambdas)
{
  const double gx = g.value(x);
  if (!(gx > 0.0)) {
    throw DomainError("ray_loglinearity_deficit: g(x) = 0, the ray leaves the support");
  }
  const double log_g0 = std::log(g.origin_value());
  const double log_gx = std::log(gx);
  double worst = 0.0;
  for (double lambda : lambdas) {
    if (lambda < 0.0 || lambda > 1.0) {
      throw DomainError("ray_loglinearity_deficit: lambda must lie in [0, 1]");
    }
    if (lambda == 0.0 || lambda == 1.0) {
      continue;
    }
    const double mid = std::log(g.value(lambda * x));
    worst = std::max(worst, std::abs(mid - (1.0 - lambda) * log_g0 - lambda * log_gx));
  }
  return worst;
}

/// int_{R^n} g, integrated in polar coordinates over `grid`.
inline double g_total_integral(const Covariogram& g, const SphereGrid& grid)
{
  return profile_total_integral(g, grid);
}

/// int int min{f(x), f(y)} dx dy = ||f||_inf * int g.
inline double min_pair_integral(const LogConcaveFunction& f, const QuadratureSpec& spec,
                                const SphereGrid& grid)
{
  return f.peak() * g_total_integral(Covariogram(f, spec), grid);
}

}  // namespace logconvex
