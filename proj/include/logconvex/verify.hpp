#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "logconvex/bodies.hpp"
#include "logconvex/covariogram.hpp"
#include "logconvex/logconcave.hpp"
#include "logconvex/numkernel.hpp"
#include "logconvex/projbodies.hpp"

namespace logconvex {

enum class Verdict { holds, equality, violation };

inline const char* to_string(Verdict v)
{
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::equality:
      return "equality-within-tol";
    case Verdict::violation:
      return "VIOLATION";
  }
  return "holds";
}

/// For a claim lhs <= rhs with ratio = lhs / rhs.
inline Verdict classify(double ratio, double tol)
{
  if (!std::isfinite(ratio) || ratio > 1.0 + tol) {
    return Verdict::violation;
  }
  if (std::abs(ratio - 1.0) <= tol) {
    return Verdict::equality;
  }
  return Verdict::holds;
}

/// Default tolerance: 2% on deterministic planar grids, 5% on Monte Carlo spheres.
inline double default_tolerance(int n) { return n <= 2 ? 0.02 : 0.05; }

struct Budget
{
  QuadratureSpec quadrature;
  std::size_t sphere = 0;
};

struct VerificationReport
{
  std::string name;
  int dim = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::holds;
  std::uint64_t seed = 0;
  Budget budget;
  double ms = 0.0;

  bool violated() const { return verdict == Verdict::violation; }
};

struct VerifyOptions
{
  std::optional<double> tol;
  std::uint64_t seed = 0;  // recorded only; the grids are built by the caller
};

namespace detail {

class Stopwatch
{
 public:
  double elapsed_ms() const
  {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline VerificationReport finish(std::string name, int dim, double lhs, double rhs, double tol,
                                 const VerifyOptions& opts, Budget budget, const Stopwatch& clock)
{
  VerificationReport r;
  r.name = std::move(name);
  r.dim = dim;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = lhs / rhs;
  r.tol = tol;
  r.verdict = classify(r.ratio, tol);
  r.seed = opts.seed;
  r.budget = budget;
  r.ms = clock.elapsed_ms();
  return r;
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace detail

inline double binomial(int n, int k)
{
  return std::round(detail::factorial(n) / (detail::factorial(k) * detail::factorial(n - k)));
}

/// C(2n, n) / n^n.
inline double zhang_constant(int n) { return binomial(2 * n, n) / std::pow(n, n); }

/// (|B_2^n| / |B_2^{n-1}|)^n.
inline double petty_constant(int n)
{
  return std::pow(unit_ball_volume(n) / unit_ball_volume(n - 1), n);
}

/// |K|^{n-1} |Pi*(K)|.
inline double projection_volume_product(const ConvexBody& k, const SphereGrid& grid)
{
  const int n = k.dim();
  return std::pow(volume(k), n - 1) * pibody_volume(PolarProjectionBody::of_body(k), grid);
}

/// int int min{f(x), f(y)} <= 2^n n! ||f||_1^{n+1} |Pi*(f)|.
/// Both sides are linear in the height of f.
inline VerificationReport verify_zhang_functional(const LogConcaveFunction& f,
                                                  const QuadratureSpec& spec,
                                                  const SphereGrid& grid,
                                                  const VerifyOptions& opts = {})
{
  const detail::Stopwatch clock;
  const int n = f.dim();
  const double lhs = min_pair_integral(f, spec, grid);
  const double pi_volume = pibody_volume(PolarProjectionBody::of_function(f, spec), grid);
  const double rhs = std::pow(2.0, n) * detail::factorial(n) * std::pow(mass(f, spec), n + 1) * pi_volume;
  return detail::finish("zhang-functional", n, lhs, rhs, opts.tol.value_or(default_tolerance(n)),
                        opts, Budget{spec, grid.size()}, clock);
}

/// C(2n, n) / n^n <= |K|^{n-1} |Pi*(K)|; lhs is the constant, rhs the volume product.
inline VerificationReport verify_zhang_body(const ConvexBody& k, const SphereGrid& grid,
                                            const VerifyOptions& opts = {})
{
  const detail::Stopwatch clock;
  const int n = k.dim();
  if (k.is_empty() || !(volume(k) > 0.0)) {
    throw DegenerateBodyError("verify_zhang_body: body has no interior");
  }
  const double product = projection_volume_product(k, grid);
  return detail::finish("zhang-body", n, zhang_constant(n), product,
                        opts.tol.value_or(default_tolerance(n)), opts, Budget{{}, grid.size()},
                        clock);
}

/// |K|^{n-1} |Pi*(K)| <= (|B_2^n| / |B_2^{n-1}|)^n.
inline VerificationReport verify_petty_body(const ConvexBody& k, const SphereGrid& grid,
                                            const VerifyOptions& opts = {})
{
  const detail::Stopwatch clock;
  const int n = k.dim();
  if (k.is_empty() || !(volume(k) > 0.0)) {
    throw DegenerateBodyError("verify_petty_body: body has no interior");
  }
  const double product = projection_volume_product(k, grid);
  return detail::finish("petty-body", n, product, petty_constant(n),
                        opts.tol.value_or(default_tolerance(n)), opts, Budget{{}, grid.size()},
                        clock);
}

/// |K - K| <= C(2n, n) |K|, computed with exact polytope operations.
inline VerificationReport verify_rogers_shephard(const ConvexBody& k,
                                                 const VerifyOptions& opts = {})
{
  const detail::Stopwatch clock;
  if (!k.is_polytope()) {
    throw UnsupportedKindError("verify_rogers_shephard: polytopes only");
  }
  const int n = k.dim();
  const double diff = volume(difference_body(k));
  return detail::finish("rogers-shephard", n, diff, binomial(2 * n, n) * volume(k),
                        opts.tol.value_or(1e-9), opts, Budget{}, clock);
}

struct EqualityDiagnostics
{
  VerificationReport zhang;
  std::vector<double> deficits;  // per direction
  double max_deficit = 0.0;
  double deficit_tol = 0.02;
  double level = 3.0;  // x_u is taken on the boundary of K_level(g)

  bool loglinear() const { return max_deficit <= deficit_tol; }
  bool equality_case() const { return zhang.verdict == Verdict::equality && loglinear(); }
};

/// Side by side: the functional Zhang ratio and how far the covariogram is from log-linear
/// on rays, measured at points x_u with g(x_u) = e^{-level} g(0).
inline EqualityDiagnostics equality_diagnostics(const LogConcaveFunction& f,
                                                const QuadratureSpec& spec,
                                                const SphereGrid& grid,
                                                const SphereGrid& directions,
                                                std::span<const double> lambdas,
                                                const VerifyOptions& opts = {},
                                                double deficit_tol = 0.02)
{
  if (eval(f, Vec::Zero(f.dim())) < f.peak() * (1.0 - 1e-12)) {
    throw DomainError("equality_diagnostics: requires f(0) = ||f||_inf");
  }
  EqualityDiagnostics out;
  out.deficit_tol = deficit_tol;
  out.zhang = verify_zhang_functional(f, spec, grid, opts);
  const Covariogram g(f, spec);
  for (const Vec& u : directions.nodes) {
    const Vec x = g.level_radial(out.level, u) * u;
    const double d = ray_loglinearity_deficit(g, x, lambdas);
    out.deficits.push_back(d);
    out.max_deficit = std::max(out.max_deficit, d);
  }
  return out;
}

inline void write_csv_header(std::ostream& os)
{
  os << "name,dim,lhs,rhs,ratio,tol,verdict,seed,budget,ms\n";
}

inline void write_csv_row(std::ostream& os, const VerificationReport& r)
{
  const auto old = os.precision(17);
  os << r.name << ',' << r.dim << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ',' << r.tol
     << ',' << to_string(r.verdict) << ',' << r.seed << ',' << r.budget.sphere << ',' << r.ms
     << '\n';
  os.precision(old);
}

}  // namespace logconvex
