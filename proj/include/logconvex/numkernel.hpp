#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "logconvex/errors.hpp"

namespace logconvex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Seed for every stochastic routine. Identical seeds and budgets give bit-identical results.
struct Seed
{
  std::uint64_t value = 0;

  /// Child seed for an independent sub-task (splitmix64 step).
  Seed derive(std::uint64_t salt) const
  {
    std::uint64_t z = value + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Seed{z ^ (z >> 31)};
  }
};

/// Controls the layer-cake integrals over t in [0, t_max] with weight e^{-t}.
struct QuadratureSpec
{
  double t_max = 40.0;
  int panels = 512;  ///< upper bound on adaptive subintervals
  double rel_tol = 1e-6;

  void validate() const
  {
    if (!(t_max > 0.0) || !(rel_tol > 0.0)) {
      throw DomainError("QuadratureSpec: t_max and rel_tol must be positive");
    }
    if (std::exp(-t_max) > rel_tol / 10.0) {
      throw DomainError("QuadratureSpec: e^{-t_max} must not exceed rel_tol/10");
    }
    if (panels < 16) {
      throw DomainError("QuadratureSpec: panels must be at least 16");
    }
  }
};

struct QuadratureResult
{
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// Kronrod 15-point nodes on [-1, 1] (positive half, descending) and weights; the
// embedded 7-point Gauss rule uses the odd-indexed nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod_panel(F& f, double a, double b)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw EvaluationError("non-finite integrand value", x);
    }
    return y;
  };
  const double fc = eval(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = eval(center - dx) + eval(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) {
      gauss += kGaussWeights[j / 2] * sum;
    }
  }
  return Panel{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) over the partition given by `breakpoints`.
/// The panel with the largest error estimate is bisected until the summed estimate
/// drops below max(abs_tol, rel_tol*|I|) or `max_panels` is reached.
template <class F>
QuadratureResult adaptive_integrate(F&& f, std::span<const double> breakpoints, double rel_tol,
                                    double abs_tol, int max_panels)
{
  std::priority_queue<detail::Panel> heap;
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) {
      heap.push(detail::kronrod_panel(f, breakpoints[i], breakpoints[i + 1]));
      out.evaluations += 15;
    }
  }
  auto totals = [&heap] {
    auto copy = heap;
    double value = 0.0, error = 0.0;
    for (; !copy.empty(); copy.pop()) {
      value += copy.top().value;
      error += copy.top().error;
    }
    return std::pair{value, error};
  };
  auto [value, error] = totals();
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < max_panels) {
    const detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      break;
    }
    heap.pop();
    const detail::Panel left = detail::kronrod_panel(f, worst.a, mid);
    const detail::Panel right = detail::kronrod_panel(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  std::tie(value, error) = totals();
  out.value = value;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

/// Approximates the integral of h(t) e^{-t} over [0, t_max].
template <class H>
double integrate_exp_weighted(H&& h, const QuadratureSpec& spec)
{
  std::vector<double> cuts{0.0};
  for (double c : {1.0, 3.0, 7.0, 15.0}) {
    if (c < spec.t_max) {
      cuts.push_back(c);
    }
  }
  cuts.push_back(spec.t_max);
  auto weighted = [&h](double t) { return h(t) * std::exp(-t); };
  return adaptive_integrate(weighted, cuts, spec.rel_tol, 1e-300, spec.panels).value;
}

struct HalflineOptions
{
  double rel_tol = 1e-8;
  int max_panels = 256;
  double r_start = 1.0 / 1024.0;
  double r_cap = 1e6;
};

/// Integral of h over [0, inf). The support is truncated at the first point of the
/// geometric scan r = r_start * 2^k where h falls below cutoff_tol times its running max.
template <class H>
double integrate_halfline(H&& h, double cutoff_tol = 1e-9, const HalflineOptions& opts = {})
{
  double peak = 0.0;
  double r = opts.r_start;
  std::vector<double> scanned;
  for (;;) {
    const double v = h(r);
    if (!std::isfinite(v)) {
      throw EvaluationError("integrate_halfline: non-finite integrand", r);
    }
    scanned.push_back(r);
    if (v > peak) {
      peak = v;
    } else if (peak > 0.0 && v < cutoff_tol * peak) {
      break;
    }
    if (r >= opts.r_cap) {
      if (peak == 0.0) {
        return 0.0;
      }
      throw DivergenceError("integrate_halfline: no decay detected before r = 1e6");
    }
    r = std::min(2.0 * r, opts.r_cap);
  }
  const double end = scanned.back();
  std::vector<double> cuts{0.0};
  for (double s : scanned) {
    if (s >= end / 64.0) {
      cuts.push_back(s);
    }
  }
  if (scanned.size() >= 2) {
    // Locate the edge of the support so that a jump there falls on a panel boundary.
    double lo = scanned[scanned.size() - 2];
    double hi = end;
    for (int i = 0; i < 60 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) >= cutoff_tol * peak ? lo : hi) = mid;
    }
    if (hi > cuts[cuts.size() - 2] && hi < end) {
      cuts.insert(cuts.end() - 1, hi);
    }
  }
  return adaptive_integrate(h, cuts, opts.rel_tol, 1e-300, opts.max_panels).value;
}

/// Quadrature rule for the uniform probability measure on S^{n-1}.
/// When `antipodal` is set, node i + N/2 is the negation of node i.
struct SphereGrid
{
  int dim = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  bool antipodal = false;

  std::size_t size() const { return nodes.size(); }
};

/// n = 2: equally spaced angles 2*pi*k/N. n >= 3: normalized Gaussian samples drawn in
/// antithetic pairs (u, -u) from a mt19937_64 stream seeded with `seed`.
inline SphereGrid sphere_grid(int dim, int budget, Seed seed)
{
  if (dim < 2) {
    throw DomainError("sphere_grid: dim must be >= 2");
  }
  if (budget < 64) {
    throw DomainError("sphere_grid: budget must be >= 64");
  }
  SphereGrid grid;
  grid.dim = dim;
  grid.nodes.reserve(budget);
  grid.weights.assign(budget, 1.0 / budget);
  if (dim == 2) {
    for (int k = 0; k < budget; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / budget;
      Vec u(2);
      u << std::cos(angle), std::sin(angle);
      grid.nodes.push_back(u);
    }
    grid.antipodal = budget % 2 == 0;
    if (grid.antipodal) {
      // exact negation so even integrands see identical values
      for (int k = budget / 2; k < budget; ++k) {
        grid.nodes[k] = -grid.nodes[k - budget / 2];
      }
    }
    return grid;
  }
  std::mt19937_64 rng(seed.value);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int fresh = budget % 2 == 0 ? budget / 2 : budget;
  for (int k = 0; k < fresh; ++k) {
    Vec u(dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) {
        u[i] = normal(rng);
      }
      norm = u.norm();
    } while (norm < 1e-12);
    grid.nodes.push_back(u / norm);
  }
  if (fresh != budget) {
    for (int k = 0; k < fresh; ++k) {
      grid.nodes.push_back(-grid.nodes[k]);
    }
    grid.antipodal = true;
  }
  return grid;
}

/// Two-point rule on S^0 = {+1, -1}, used for polar integration on lines.
inline SphereGrid sphere_grid_s0()
{
  SphereGrid grid;
  grid.dim = 1;
  grid.nodes = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  grid.weights = {0.5, 0.5};
  grid.antipodal = true;
  return grid;
}

/// Sum of w_i * F(u_i). For `even` integrands on an antipodal grid only half the nodes
/// are evaluated.
template <class F>
double sphere_mean(F&& f, const SphereGrid& grid, bool even = false)
{
  double acc = 0.0;
  if (even && grid.antipodal) {
    const std::size_t half = grid.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      acc += (grid.weights[i] + grid.weights[i + half]) * f(grid.nodes[i], i);
    }
    return acc;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc += grid.weights[i] * f(grid.nodes[i], i);
  }
  return acc;
}

inline double unit_ball_volume(int n)
{
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Star-body volume |B_2^n| * sum_i w_i rho(u_i)^n.
template <class Rho>
double radial_mean_pow(Rho&& rho, const SphereGrid& grid, int n, bool even = false)
{
  auto term = [&](const Vec& u, std::size_t i) {
    const double r = rho(u);
    if (!std::isfinite(r)) {
      throw EvaluationError("radial_mean_pow: non-finite radial value at node",
                            static_cast<double>(i));
    }
    return std::pow(r, n);
  };
  return unit_ball_volume(n) * sphere_mean(term, grid, even);
}

/// Finds r >= 0 with h(r) = target for nonincreasing h, to relative resolution `rel_res` in r.
template <class H>
double bisect_decreasing(H&& h, double target, double r_hi_hint, double rel_res = 1e-10,
                         double r_cap = 1e6)
{
  const double h0 = h(0.0);
  if (h0 < target) {
    throw NoRootError("bisect_decreasing: h(0) is below the target");
  }
  if (h0 == target) {
    return 0.0;
  }
  double lo = 0.0;
  double hi = r_hi_hint > 0.0 ? r_hi_hint : 1.0;
  double f_lo = h0 - target;
  double f_hi = h(hi) - target;
  while (f_hi >= 0.0) {
    if (f_hi == 0.0) {
      return hi;
    }
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (hi > r_cap) {
      throw DivergenceError("bisect_decreasing: no crossing before the cap");
    }
    f_hi = h(hi) - target;
  }
  auto tol = [rel_res](double a, double b) {
    return std::abs(b - a) <= rel_res * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      [&](double r) { return h(r) - target; }, lo, hi, f_lo, f_hi, tol, iterations);
  return 0.5 * (a + b);
}

/// Columns form an orthonormal basis of u's orthogonal complement (Householder reflection).
inline Mat orthocomplement_basis(const Vec& u)
{
  const double norm = u.norm();
  if (norm == 0.0) {
    throw DomainError("orthocomplement_basis: zero vector");
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    throw DomainError("orthocomplement_basis: u must be a unit vector");
  }
  const int n = static_cast<int>(u.size());
  Eigen::Index k = 0;
  u.cwiseAbs().maxCoeff(&k);
  Vec v = u;
  v[k] += u[k] >= 0.0 ? 1.0 : -1.0;
  const Mat reflector = Mat::Identity(n, n) - (2.0 / v.squaredNorm()) * v * v.transpose();
  Mat basis(n, n - 1);
  for (int j = 0, col = 0; j < n; ++j) {
    if (j != k) {
      basis.col(col++) = reflector.col(j);
    }
  }
  return basis;
}

}  // namespace logconvex
