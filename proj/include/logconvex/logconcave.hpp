#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "logconvex/bodies.hpp"
#include "logconvex/numkernel.hpp"

namespace logconvex {

enum class FunctionKind { characteristic, exp_gauge, gaussian, custom };

/// f = M e^{-v} with v convex, v >= 0 and min v = 0, so that ||f||_inf = M.
///
///  - characteristic(K):   v = 0 on K, +inf outside.
///  - exp_gauge(K, apex):  v(x) = ||x - apex||_K (apex defaults to 0; 0 in K required).
///  - gaussian(c, S):      v(x) = (x - c)^T S^{-1} (x - c).
///  - custom:              caller-supplied potential and level-set oracle t -> {v <= t}.
///
/// The first three have homothetic level sets K_t = p + s(t) (B - p), which lets the
/// layer-cake integrands below skip materializing K_t.
class LogConcaveFunction
{
 public:
  using Potential = std::function<double(const Vec&)>;
  using LevelOracle = std::function<ConvexBody(double)>;

  static LogConcaveFunction characteristic(ConvexBody k, double peak = 1.0)
  {
    require_full(k);
    LogConcaveFunction f(FunctionKind::characteristic, k.dim(), peak);
    f.body_ = std::move(k);
    return f;
  }

  static LogConcaveFunction exp_gauge(ConvexBody k, double peak = 1.0,
                                      std::optional<Vec> apex = std::nullopt)
  {
    require_full(k);
    const int d = k.dim();
    (void)gauge(k, Vec::Zero(d));  // throws unless 0 is in K
    LogConcaveFunction f(FunctionKind::exp_gauge, d, peak);
    f.apex_ = apex.value_or(Vec::Zero(d));
    if (f.apex_.size() != d) {
      throw DomainError("exp_gauge: apex has wrong dimension");
    }
    f.body_ = std::move(k);
    return f;
  }

  static LogConcaveFunction gaussian(Vec center, Mat shape, double peak = 1.0)
  {
    const int d = static_cast<int>(center.size());
    LogConcaveFunction f(FunctionKind::gaussian, d, peak);
    f.body_ = ConvexBody::ellipsoid(center, shape);
    f.apex_ = std::move(center);
    return f;
  }

  static LogConcaveFunction custom(int dim, Potential potential, LevelOracle level_sets,
                                   double peak = 1.0)
  {
    if (!potential || !level_sets) {
      throw DomainError("custom: potential and level-set oracle are required");
    }
    LogConcaveFunction f(FunctionKind::custom, dim, peak);
    f.potential_ = std::move(potential);
    f.level_sets_ = std::move(level_sets);
    return f;
  }

  int dim() const { return dim_; }
  FunctionKind kind() const { return kind_; }
  /// ||f||_inf.
  double peak() const { return peak_; }

  /// K for characteristic/exp_gauge, the level-1 ellipsoid for gaussian.
  const ConvexBody& body() const
  {
    if (kind_ == FunctionKind::custom) {
      throw UnsupportedKindError("custom functions carry no base body");
    }
    return *body_;
  }
  /// Apex of exp_gauge, centre of gaussian.
  const Vec& apex() const { return apex_; }
  const Potential& potential_fn() const { return potential_; }
  const LevelOracle& level_oracle() const { return level_sets_; }

  double potential(const Vec& x) const
  {
    switch (kind_) {
      case FunctionKind::characteristic:
        return contains(*body_, x) ? 0.0 : std::numeric_limits<double>::infinity();
      case FunctionKind::exp_gauge:
        return gauge(*body_, x - apex_);
      case FunctionKind::gaussian: {
        const Vec w = detail::whiten(*body_, x - apex_);
        return w.squaredNorm();
      }
      case FunctionKind::custom:
        return potential_(x);
    }
    return 0.0;
  }

  /// |K_t(f)|.
  double level_volume(double t) const
  {
    switch (kind_) {
      case FunctionKind::characteristic:
        return volume(*body_);
      case FunctionKind::exp_gauge:
        return std::pow(t, dim_) * volume(*body_);
      case FunctionKind::gaussian:
        return std::pow(t, 0.5 * dim_) * volume(*body_);
      case FunctionKind::custom:
        return volume(level_sets_(t));
    }
    return 0.0;
  }

  /// |K_t(f) cap (x + K_t(f))|.
  double level_overlap_volume(double t, const Vec& x) const
  {
    switch (kind_) {
      case FunctionKind::characteristic:
        return overlap_volume(*body_, x);
      case FunctionKind::exp_gauge:
        return t > 0.0 ? std::pow(t, dim_) * overlap_volume(*body_, x / t) : 0.0;
      case FunctionKind::gaussian: {
        if (!(t > 0.0)) {
          return 0.0;
        }
        const double s = std::sqrt(t);
        return std::pow(s, dim_) * overlap_volume(*body_, x / s);
      }
      case FunctionKind::custom: {
        const ConvexBody k = level_sets_(t);
        return volume(intersect(k, translate(k, x)));
      }
    }
    return 0.0;
  }

  /// |P_{u-perp} K_t(f)|.
  double level_shadow_volume(double t, const Vec& u) const
  {
    switch (kind_) {
      case FunctionKind::characteristic:
        return shadow_volume(*body_, u);
      case FunctionKind::exp_gauge:
        return std::pow(t, dim_ - 1) * shadow_volume(*body_, u);
      case FunctionKind::gaussian:
        return std::pow(t, 0.5 * (dim_ - 1)) * shadow_volume(*body_, u);
      case FunctionKind::custom:
        return shadow_volume(level_sets_(t), u);
    }
    return 0.0;
  }

 private:
  LogConcaveFunction(FunctionKind kind, int dim, double peak)
      : kind_(kind)
      , dim_(dim)
      , peak_(peak)
  {
    if (!(peak > 0.0) || !std::isfinite(peak)) {
      throw DomainError("log-concave function: peak value must be positive and finite");
    }
    if (dim < 1) {
      throw DomainError("log-concave function: dimension must be positive");
    }
  }

  static void require_full(const ConvexBody& k)
  {
    if (k.is_empty()) {
      throw DegenerateBodyError("log-concave function: body is empty");
    }
  }

  FunctionKind kind_;
  int dim_;
  double peak_;
  std::optional<ConvexBody> body_;
  Vec apex_;
  Potential potential_;
  LevelOracle level_sets_;
};

inline double eval(const LogConcaveFunction& f, const Vec& x)
{
  const double v = f.potential(x);
  return std::isinf(v) ? 0.0 : f.peak() * std::exp(-v);
}

/// K_t(f) = {x : f(x) >= e^{-t} ||f||_inf} = {v <= t}.
inline ConvexBody level_set(const LogConcaveFunction& f, double t)
{
  if (t < 0.0) {
    throw DomainError("level_set: t must be nonnegative");
  }
  const int n = f.dim();
  switch (f.kind()) {
    case FunctionKind::characteristic:
      return f.body();
    case FunctionKind::exp_gauge:
      if (t == 0.0) {
        throw DomainError("level_set: K_0 of exp_gauge is a point");
      }
      return translate(linear_image(f.body(), t * Mat::Identity(n, n)), f.apex());
    case FunctionKind::gaussian:
      if (t == 0.0) {
        throw DomainError("level_set: K_0 of a gaussian is a point");
      }
      return ConvexBody::ellipsoid(f.apex(), t * f.body().shape());
    case FunctionKind::custom:
      return f.level_oracle()(t);
  }
  return f.body();
}

/// ||f||_1 = ||f||_inf * int_0^inf e^{-t} |K_t(f)| dt.
inline double mass(const LogConcaveFunction& f, const QuadratureSpec& spec = {})
{
  spec.validate();
  return f.peak() * integrate_exp_weighted([&f](double t) { return f.level_volume(t); }, spec);
}

/// y -> max_s f(y + s u) on u-perp, in the coordinates of orthocomplement_basis(u).
inline LogConcaveFunction fn_shadow(const LogConcaveFunction& f, const Vec& u)
{
  if (f.dim() < 2) {
    throw DomainError("fn_shadow: dimension must be >= 2");
  }
  const Mat basis = orthocomplement_basis(u);
  switch (f.kind()) {
    case FunctionKind::characteristic:
      return LogConcaveFunction::characteristic(shadow(f.body(), u), f.peak());
    case FunctionKind::exp_gauge:
      return LogConcaveFunction::exp_gauge(shadow(f.body(), u), f.peak(),
                                           Vec(basis.transpose() * f.apex()));
    case FunctionKind::gaussian:
      return LogConcaveFunction::gaussian(basis.transpose() * f.apex(),
                                          basis.transpose() * f.body().shape() * basis, f.peak());
    case FunctionKind::custom:
      break;
  }
  throw UnsupportedKindError("fn_shadow: custom functions have no closed-form shadow");
}

/// x -> f(A x + b) for invertible A.
inline LogConcaveFunction compose_affine(const LogConcaveFunction& f, const Mat& a,
                                         const Vec& b)
{
  const int n = f.dim();
  if (a.rows() != n || a.cols() != n || b.size() != n) {
    throw DomainError("compose_affine: wrong sizes");
  }
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) {
    throw DomainError("compose_affine: matrix is singular");
  }
  const Mat inv = lu.inverse();
  // {x : A x + b in S} = A^{-1}(S - b)
  auto pull = [&](const ConvexBody& s) { return linear_image(translate(s, -b), inv); };
  switch (f.kind()) {
    case FunctionKind::characteristic:
      return LogConcaveFunction::characteristic(pull(f.body()), f.peak());
    case FunctionKind::exp_gauge:
      return LogConcaveFunction::exp_gauge(linear_image(f.body(), inv), f.peak(),
                                           Vec(inv * (f.apex() - b)));
    case FunctionKind::gaussian:
      return LogConcaveFunction::gaussian(inv * (f.apex() - b),
                                          inv * f.body().shape() * inv.transpose(), f.peak());
    case FunctionKind::custom: {
      auto potential = f.potential_fn();
      auto oracle = f.level_oracle();
      return LogConcaveFunction::custom(
          n, [potential, a, b](const Vec& x) { return potential(a * x + b); },
          [oracle, pull](double t) { return pull(oracle(t)); }, f.peak());
    }
  }
  return f;
}

/// c * f.
inline LogConcaveFunction scaled(const LogConcaveFunction& f, double c)
{
  const double peak = c * f.peak();
  switch (f.kind()) {
    case FunctionKind::characteristic:
      return LogConcaveFunction::characteristic(f.body(), peak);
    case FunctionKind::exp_gauge:
      return LogConcaveFunction::exp_gauge(f.body(), peak, f.apex());
    case FunctionKind::gaussian:
      return LogConcaveFunction::gaussian(f.apex(), f.body().shape(), peak);
    case FunctionKind::custom:
      return LogConcaveFunction::custom(f.dim(), f.potential_fn(), f.level_oracle(), peak);
  }
  return f;
}

/// Largest relative deviation of f from e^{-t}||f||_inf over boundary points of the oracle's
/// K_t in the given directions. Spot check for custom level-set oracles.
inline double level_set_deviation(const LogConcaveFunction& f, double t, const SphereGrid& dirs)
{
  const ConvexBody k = level_set(f, t);
  Vec inner = Vec::Zero(f.dim());
  if (k.is_polytope()) {
    for (const Vec& v : k.vertices()) {
      inner += v;
    }
    inner /= static_cast<double>(k.vertices().size());
  } else {
    inner = k.center();
  }
  const ConvexBody centred = translate(k, -inner);
  const double expected = std::exp(-t) * f.peak();
  double worst = 0.0;
  for (const Vec& u : dirs.nodes) {
    const Vec x = inner + radial(centred, u) * u;
    worst = std::max(worst, std::abs(eval(f, x) - expected) / expected);
  }
  return worst;
}

}  // namespace logconvex
