#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "logconvex/errors.hpp"
#include "logconvex/numkernel.hpp"

namespace logconvex {

/// Incidence tolerance for vertex/facet tests; coordinates are assumed O(1).
inline constexpr double kIncidenceTol = 1e-9;

/// The closed halfspace a.x <= b with |a| = 1.
struct Halfspace
{
  Vec a;
  double b = 0.0;
};

inline Halfspace normalized(Halfspace h)
{
  const double norm = h.a.norm();
  if (!(norm > 0.0)) {
    throw DomainError("halfspace with zero normal");
  }
  h.a /= norm;
  h.b /= norm;
  return h;
}

struct HullResult
{
  std::vector<Vec> vertices;
  std::vector<Halfspace> halfspaces;
  std::vector<std::vector<int>> facets;  ///< vertex indices incident to each halfspace
};

namespace detail {

inline double coordinate_scale(std::span<const Vec> pts)
{
  double scale = 1.0;
  for (const Vec& p : pts) {
    scale = std::max(scale, p.cwiseAbs().maxCoeff());
  }
  return scale;
}

inline std::vector<Vec> dedupe_points(std::span<const Vec> pts, double tol)
{
  std::vector<Vec> out;
  for (const Vec& p : pts) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Vec& q) {
      return (p - q).cwiseAbs().maxCoeff() <= tol;
    });
    if (!seen) {
      out.push_back(p);
    }
  }
  return out;
}

inline int rank_of(const Mat& m, double tol)
{
  if (m.rows() == 0 || m.cols() == 0) {
    return 0;
  }
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

inline int affine_rank(std::span<const Vec> pts, double tol)
{
  if (pts.size() < 2) {
    return 0;
  }
  Mat diffs(pts.size() - 1, pts[0].size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    diffs.row(i - 1) = (pts[i] - pts[0]).transpose();
  }
  return rank_of(diffs, tol);
}

template <class Fn>
void for_each_combination(int m, int k, Fn&& fn)
{
  if (k > m) {
    return;
  }
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(std::span<const int>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) {
      --i;
    }
    if (i < 0) {
      return;
    }
    ++idx[i];
    for (int j = i + 1; j < k; ++j) {
      idx[j] = idx[j - 1] + 1;
    }
  }
}

inline double cross2(const Vec& o, const Vec& a, const Vec& b)
{
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline HullResult hull_1d(std::span<const Vec> pts)
{
  double lo = pts[0][0], hi = pts[0][0];
  for (const Vec& p : pts) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  HullResult h;
  h.vertices = {Vec::Constant(1, lo), Vec::Constant(1, hi)};
  h.halfspaces = {Halfspace{Vec::Constant(1, -1.0), -lo}, Halfspace{Vec::Constant(1, 1.0), hi}};
  h.facets = {{0}, {1}};
  return h;
}

// Andrew's monotone chain; vertices come out counter-clockwise without collinear points.
inline HullResult hull_2d(std::span<const Vec> input, double tol)
{
  std::vector<Vec> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  std::vector<Vec> chain(2 * pts.size());
  std::size_t k = 0;
  const double eps = tol * tol;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(chain[k - 2], chain[k - 1], pts[i]) <= eps) {
      --k;
    }
    chain[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2(chain[k - 2], chain[k - 1], pts[i - 1]) <= eps) {
      --k;
    }
    chain[k++] = pts[i - 1];
  }
  chain.resize(k - 1);
  HullResult h;
  h.vertices = std::move(chain);
  const int m = static_cast<int>(h.vertices.size());
  for (int i = 0; i < m; ++i) {
    const Vec& p = h.vertices[i];
    const Vec& q = h.vertices[(i + 1) % m];
    Vec normal(2);
    normal << q[1] - p[1], p[0] - q[0];
    h.halfspaces.push_back(normalized(Halfspace{normal, normal.dot(p)}));
    h.facets.push_back({i, (i + 1) % m});
  }
  return h;
}

// Normal of the hyperplane through d points in R^d, if they are affinely independent.
inline std::optional<Vec> hyperplane_normal(std::span<const Vec> pts, std::span<const int> idx,
                                            double tol)
{
  const int d = static_cast<int>(pts[0].size());
  Mat diffs(d - 1, d);
  for (int i = 1; i < d; ++i) {
    diffs.row(i - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
  }
  Eigen::FullPivLU<Mat> lu(diffs);
  lu.setThreshold(tol);
  if (lu.rank() != d - 1) {
    return std::nullopt;
  }
  Vec normal = lu.kernel().col(0);
  return Vec(normal / normal.norm());
}

// Hull in R^3 and R^4 by facet enumeration over d-subsets; adequate for the few dozen
// points the library ever feeds it.
inline HullResult hull_nd(std::span<const Vec> pts, double tol)
{
  const int d = static_cast<int>(pts[0].size());
  const int m = static_cast<int>(pts.size());
  std::vector<Halfspace> planes;
  for_each_combination(m, d, [&](std::span<const int> idx) {
    const auto normal = hyperplane_normal(pts, idx, tol);
    if (!normal) {
      return;
    }
    const double b = normal->dot(pts[idx[0]]);
    double above = -std::numeric_limits<double>::infinity();
    double below = std::numeric_limits<double>::infinity();
    for (const Vec& p : pts) {
      const double s = normal->dot(p) - b;
      above = std::max(above, s);
      below = std::min(below, s);
      if (above > tol && below < -tol) {
        return;
      }
    }
    Halfspace h = above <= tol ? Halfspace{*normal, b} : Halfspace{-*normal, -b};
    const bool seen = std::any_of(planes.begin(), planes.end(), [&](const Halfspace& q) {
      return (q.a - h.a).cwiseAbs().maxCoeff() <= kIncidenceTol && std::abs(q.b - h.b) <= tol;
    });
    if (!seen) {
      planes.push_back(std::move(h));
    }
  });

  HullResult h;
  std::vector<int> vertex_of(m, -1);
  for (int i = 0; i < m; ++i) {
    Mat tight(0, d);
    for (const Halfspace& q : planes) {
      if (std::abs(q.a.dot(pts[i]) - q.b) <= tol) {
        tight.conservativeResize(tight.rows() + 1, Eigen::NoChange);
        tight.row(tight.rows() - 1) = q.a.transpose();
      }
    }
    if (rank_of(tight, 1e-9) == d) {
      vertex_of[i] = static_cast<int>(h.vertices.size());
      h.vertices.push_back(pts[i]);
    }
  }
  for (const Halfspace& q : planes) {
    std::vector<int> incident;
    for (int i = 0; i < m; ++i) {
      if (vertex_of[i] >= 0 && std::abs(q.a.dot(pts[i]) - q.b) <= tol) {
        incident.push_back(vertex_of[i]);
      }
    }
    h.halfspaces.push_back(q);
    h.facets.push_back(std::move(incident));
  }
  return h;
}

}  // namespace detail

/// Irredundant V- and H-representation of conv(points), dim <= 4.
inline HullResult convex_hull(std::span<const Vec> points)
{
  if (points.empty()) {
    throw DegenerateBodyError("convex_hull: no points");
  }
  const int d = static_cast<int>(points[0].size());
  if (d < 1 || d > 4) {
    throw DomainError("convex_hull: dimension must be between 1 and 4");
  }
  const double tol = kIncidenceTol * detail::coordinate_scale(points);
  const std::vector<Vec> pts = detail::dedupe_points(points, tol);
  if (static_cast<int>(pts.size()) < d + 1 || detail::affine_rank(pts, tol) < d) {
    throw DegenerateBodyError("convex_hull: points are affinely dependent");
  }
  if (d == 1) {
    return detail::hull_1d(pts);
  }
  if (d == 2) {
    return detail::hull_2d(pts, tol);
  }
  return detail::hull_nd(pts, tol);
}

/// Every feasible intersection of d bounding hyperplanes, deduplicated.
inline std::vector<Vec> enumerate_vertices(std::span<const Halfspace> hs, int d)
{
  std::vector<Vec> out;
  double scale = 1.0;
  for (const Halfspace& h : hs) {
    scale = std::max(scale, std::abs(h.b));
  }
  const double tol = kIncidenceTol * scale;
  detail::for_each_combination(static_cast<int>(hs.size()), d, [&](std::span<const int> idx) {
    Mat a(d, d);
    Vec b(d);
    for (int i = 0; i < d; ++i) {
      a.row(i) = hs[idx[i]].a.transpose();
      b[i] = hs[idx[i]].b;
    }
    Eigen::FullPivLU<Mat> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() < d) {
      return;
    }
    const Vec x = lu.solve(b);
    for (const Halfspace& h : hs) {
      if (h.a.dot(x) > h.b + tol) {
        return;
      }
    }
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Vec& q) {
      return (q - x).cwiseAbs().maxCoeff() <= tol;
    });
    if (!seen) {
      out.push_back(x);
    }
  });
  return out;
}

enum class BodyKind { polytope, ball, ellipsoid, empty };

/// A facet of a 3-polytope as an ordered vertex loop.
struct Face3
{
  Eigen::Vector3d normal;
  std::vector<Eigen::Vector3d> loop;
};

/// Bounded convex set in R^n: a polytope (V- and/or H-rep, converted lazily), a ball, an
/// ellipsoid {x : (x-c)^T E^{-1} (x-c) <= 1}, or the empty set. Immutable; copies share state.
class ConvexBody
{
 public:
  static ConvexBody from_vertices(std::vector<Vec> points)
  {
    if (points.empty()) {
      throw DegenerateBodyError("from_vertices: no points");
    }
    const int d = static_cast<int>(points[0].size());
    const double tol = kIncidenceTol * detail::coordinate_scale(points);
    if (static_cast<int>(points.size()) < d + 1 || detail::affine_rank(points, tol) < d) {
      throw DegenerateBodyError("from_vertices: points do not span a full-dimensional body");
    }
    auto impl = std::make_shared<Impl>(d, BodyKind::polytope);
    impl->raw_vertices = std::move(points);
    return ConvexBody(std::move(impl));
  }

  /// Bounded intersection of halfspaces. An infeasible or lower-dimensional system gives the
  /// empty body; an unbounded one throws.
  static ConvexBody from_halfspaces(int dim, std::vector<Halfspace> hs)
  {
    if (dim < 1) {
      throw DomainError("from_halfspaces: dimension must be positive");
    }
    for (Halfspace& h : hs) {
      if (h.a.size() != dim) {
        throw DomainError("from_halfspaces: normal has wrong dimension");
      }
      h = normalized(h);
    }
    if (!positively_spanning(dim, hs)) {
      throw DegenerateBodyError("from_halfspaces: halfspaces do not bound a body");
    }
    return from_bounded_halfspaces(dim, std::move(hs));
  }

  static ConvexBody ball(Vec center, double radius)
  {
    if (!(radius > 0.0)) {
      throw DomainError("ball: radius must be positive");
    }
    const int d = static_cast<int>(center.size());
    auto impl = std::make_shared<Impl>(d, BodyKind::ball);
    impl->radius = radius;
    impl->shape = Mat::Identity(d, d) * radius * radius;
    impl->cholesky = Mat::Identity(d, d) * radius;
    impl->center = std::move(center);
    return ConvexBody(std::move(impl));
  }

  static ConvexBody ellipsoid(Vec center, Mat shape)
  {
    const int d = static_cast<int>(center.size());
    if (shape.rows() != d || shape.cols() != d) {
      throw DomainError("ellipsoid: shape matrix has wrong size");
    }
    Eigen::LLT<Mat> llt(0.5 * (shape + shape.transpose()));
    if (llt.info() != Eigen::Success) {
      throw DomainError("ellipsoid: shape matrix must be symmetric positive definite");
    }
    auto impl = std::make_shared<Impl>(d, BodyKind::ellipsoid);
    impl->shape = 0.5 * (shape + shape.transpose());
    impl->cholesky = llt.matrixL();
    impl->center = std::move(center);
    return ConvexBody(std::move(impl));
  }

  static ConvexBody empty(int dim) { return ConvexBody(std::make_shared<Impl>(dim, BodyKind::empty)); }

  /// Axis-parallel box [lo, hi].
  static ConvexBody box(const Vec& lo, const Vec& hi)
  {
    const int d = static_cast<int>(lo.size());
    std::vector<Halfspace> hs;
    for (int i = 0; i < d; ++i) {
      hs.push_back({Vec::Unit(d, i), hi[i]});
      hs.push_back({-Vec::Unit(d, i), -lo[i]});
    }
    return from_halfspaces(d, std::move(hs));
  }

  int dim() const { return impl_->dim; }
  BodyKind kind() const { return impl_->kind; }
  bool is_polytope() const { return impl_->kind == BodyKind::polytope; }
  bool is_ellipsoidal() const
  {
    return impl_->kind == BodyKind::ball || impl_->kind == BodyKind::ellipsoid;
  }
  bool is_empty() const
  {
    return impl_->kind == BodyKind::empty || (is_polytope() && canonical().vertices.empty());
  }

  const std::vector<Vec>& vertices() const { return polytope_canonical().vertices; }
  const std::vector<Halfspace>& halfspaces() const { return polytope_canonical().halfspaces; }
  const std::vector<std::vector<int>>& facets() const { return polytope_canonical().facets; }

  const Vec& center() const { return ellipsoidal().center; }
  const Mat& shape() const { return ellipsoidal().shape; }
  /// Lower-triangular L with shape = L L^T.
  const Mat& shape_factor() const { return ellipsoidal().cholesky; }
  double radius() const
  {
    if (impl_->kind != BodyKind::ball) {
      throw UnsupportedKindError("radius() needs a ball");
    }
    return impl_->radius;
  }

  /// Facet loops of a 3-polytope (cached).
  const std::vector<Face3>& faces3() const
  {
    const Impl& impl = *impl_;
    std::call_once(impl.faces_once, [&impl, this] {
      if (impl.dim != 3) {
        return;
      }
      const HullResult& h = polytope_canonical();
      for (std::size_t f = 0; f < h.halfspaces.size(); ++f) {
        Face3 face;
        face.normal = h.halfspaces[f].a;
        for (int vi : h.facets[f]) {
          face.loop.emplace_back(h.vertices[vi]);
        }
        order_loop(face.loop, face.normal);
        impl.faces.push_back(std::move(face));
      }
    });
    return impl.faces;
  }

  /// Counter-clockwise vertices and edge halfspaces of a polygon (cached).
  std::pair<const std::vector<Eigen::Vector2d>&, const std::vector<std::pair<Eigen::Vector2d, double>>&>
  polygon2() const
  {
    const Impl& impl = *impl_;
    std::call_once(impl.polygon_once, [&impl, this] {
      if (impl.dim != 2) {
        return;
      }
      for (const Vec& v : polytope_canonical().vertices) {
        impl.polygon.emplace_back(v[0], v[1]);
      }
      for (const Halfspace& h : polytope_canonical().halfspaces) {
        impl.edges.emplace_back(Eigen::Vector2d(h.a[0], h.a[1]), h.b);
      }
    });
    return {impl.polygon, impl.edges};
  }

  /// Cached Lebesgue measure; see volume().
  template <class Compute>
  double cached_volume(Compute&& compute) const
  {
    const Impl& impl = *impl_;
    std::call_once(impl.volume_once, [&] { impl.volume = compute(); });
    return impl.volume;
  }

  /// Orders coplanar points by angle about their centroid in the plane with normal n.
  static void order_loop(std::vector<Eigen::Vector3d>& loop, const Eigen::Vector3d& n)
  {
    if (loop.size() < 3) {
      return;
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : loop) {
      centroid += p;
    }
    centroid /= static_cast<double>(loop.size());
    const Mat basis = orthocomplement_basis(Vec(n));
    const Eigen::Vector3d e1 = basis.col(0), e2 = basis.col(1);
    std::vector<std::pair<double, Eigen::Vector3d>> keyed;
    for (const auto& p : loop) {
      const Eigen::Vector3d q = p - centroid;
      keyed.emplace_back(std::atan2(q.dot(e2), q.dot(e1)), p);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      loop[i] = keyed[i].second;
    }
  }

 private:
  struct Impl
  {
    Impl(int d, BodyKind k)
        : dim(d)
        , kind(k)
    {
    }
    int dim;
    BodyKind kind;
    std::vector<Vec> raw_vertices;
    std::vector<Halfspace> raw_halfspaces;
    Vec center;
    Mat shape;
    Mat cholesky;
    double radius = 0.0;

    mutable std::once_flag canonical_once;
    mutable HullResult canonical;
    mutable std::once_flag faces_once;
    mutable std::vector<Face3> faces;
    mutable std::once_flag polygon_once;
    mutable std::vector<Eigen::Vector2d> polygon;
    mutable std::vector<std::pair<Eigen::Vector2d, double>> edges;
    mutable std::once_flag volume_once;
    mutable double volume = 0.0;
  };

  explicit ConvexBody(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl))
  {
  }

  static ConvexBody from_bounded_halfspaces(int dim, std::vector<Halfspace> hs)
  {
    auto impl = std::make_shared<Impl>(dim, BodyKind::polytope);
    impl->raw_halfspaces = std::move(hs);
    return ConvexBody(std::move(impl));
  }

  // Bounded iff the normals positively span R^d, i.e. 0 is interior to their hull.
  static bool positively_spanning(int dim, std::span<const Halfspace> hs)
  {
    std::vector<Vec> normals;
    for (const Halfspace& h : hs) {
      normals.push_back(h.a);
    }
    normals = detail::dedupe_points(normals, 1e-12);
    if (static_cast<int>(normals.size()) < dim + 1 ||
        detail::affine_rank(normals, 1e-12) < dim) {
      return false;
    }
    const HullResult hull = convex_hull(normals);
    return std::all_of(hull.halfspaces.begin(), hull.halfspaces.end(),
                       [](const Halfspace& h) { return h.b > 1e-12; });
  }

  const HullResult& canonical() const
  {
    const Impl& impl = *impl_;
    std::call_once(impl.canonical_once, [&impl] {
      if (!impl.raw_vertices.empty()) {
        impl.canonical = convex_hull(impl.raw_vertices);
        return;
      }
      const std::vector<Vec> pts = enumerate_vertices(impl.raw_halfspaces, impl.dim);
      const double tol = kIncidenceTol * detail::coordinate_scale(pts);
      if (static_cast<int>(pts.size()) < impl.dim + 1 || detail::affine_rank(pts, tol) < impl.dim) {
        return;  // empty or lower-dimensional: stays empty
      }
      impl.canonical = convex_hull(pts);
    });
    return impl.canonical;
  }

  const HullResult& polytope_canonical() const
  {
    if (!is_polytope()) {
      throw UnsupportedKindError("vertex/facet access needs a polytope");
    }
    return canonical();
  }

  const Impl& ellipsoidal() const
  {
    if (!is_ellipsoidal()) {
      throw UnsupportedKindError("center/shape access needs a ball or ellipsoid");
    }
    return *impl_;
  }

  friend ConvexBody intersect(const ConvexBody& k, const ConvexBody& l);

  std::shared_ptr<const Impl> impl_;
};

// --------------------------------------------------------------------------------------
// Queries

inline bool contains(const ConvexBody& k, const Vec& x, double tol = kIncidenceTol)
{
  if (k.is_empty()) {
    return false;
  }
  if (k.is_ellipsoidal()) {
    const Vec w = k.shape_factor().triangularView<Eigen::Lower>().solve(x - k.center());
    return w.squaredNorm() <= 1.0 + tol;
  }
  return std::all_of(k.halfspaces().begin(), k.halfspaces().end(),
                     [&](const Halfspace& h) { return h.a.dot(x) <= h.b + tol; });
}

/// Support function h_K(u) = max_{x in K} x.u.
inline double support(const ConvexBody& k, const Vec& u)
{
  if (k.is_ellipsoidal()) {
    return k.center().dot(u) + std::sqrt(u.dot(k.shape() * u));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& v : k.vertices()) {
    best = std::max(best, v.dot(u));
  }
  return best;
}

namespace detail {

// Whitened coordinates of an ellipsoidal body: x -> L^{-1} x.
inline Vec whiten(const ConvexBody& k, const Vec& x)
{
  return k.shape_factor().triangularView<Eigen::Lower>().solve(x);
}

// inf{lambda > 0 : x in lambda*B(c, 1)} for 0 in B(c, 1).
inline double unit_ball_gauge(const Vec& x, const Vec& c)
{
  const double xx = x.squaredNorm();
  if (xx == 0.0) {
    return 0.0;
  }
  const double xc = x.dot(c);
  const double a = 1.0 - c.squaredNorm();
  if (a > 1e-14) {
    return (xc + std::sqrt(xc * xc + a * xx)) / a;
  }
  return xc > 0.0 ? xx / (2.0 * xc) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Minkowski functional inf{lambda > 0 : x in lambda K}; +inf outside the cone of K.
inline double gauge(const ConvexBody& k, const Vec& x)
{
  if (k.is_empty()) {
    throw DomainError("gauge: empty body");
  }
  if (k.is_ellipsoidal()) {
    const Vec c = detail::whiten(k, k.center());
    if (c.squaredNorm() > 1.0 + kIncidenceTol) {
      throw DomainError("gauge: origin is not in the body");
    }
    return detail::unit_ball_gauge(detail::whiten(k, x), c);
  }
  double result = 0.0;
  for (const Halfspace& h : k.halfspaces()) {
    if (h.b < -kIncidenceTol) {
      throw DomainError("gauge: origin is not in the body");
    }
    const double s = h.a.dot(x);
    if (h.b <= kIncidenceTol) {
      if (s > kIncidenceTol * std::max(1.0, x.norm())) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    result = std::max(result, s / h.b);
  }
  return result;
}

inline bool origin_interior(const ConvexBody& k)
{
  if (k.is_empty()) {
    return false;
  }
  if (k.is_ellipsoidal()) {
    return detail::whiten(k, k.center()).squaredNorm() < 1.0 - kIncidenceTol;
  }
  return std::all_of(k.halfspaces().begin(), k.halfspaces().end(),
                     [](const Halfspace& h) { return h.b > kIncidenceTol; });
}

/// rho_K(u) = sup{lambda >= 0 : lambda u in K} = 1 / gauge(K, u).
inline double radial(const ConvexBody& k, const Vec& u)
{
  if (!origin_interior(k)) {
    throw DomainError("radial: origin is not interior to the body");
  }
  return 1.0 / gauge(k, u);
}

namespace detail {

inline double shoelace(std::span<const Vec> ccw)
{
  double area = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Vec& p = ccw[i];
    const Vec& q = ccw[(i + 1) % ccw.size()];
    area += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * area;
}

// Pyramid decomposition from the vertex centroid, recursing into facets.
inline double polytope_volume(const HullResult& h, int d)
{
  if (h.vertices.empty()) {
    return 0.0;
  }
  if (d == 1) {
    return h.vertices[1][0] - h.vertices[0][0];
  }
  if (d == 2) {
    return shoelace(h.vertices);
  }
  Vec centroid = Vec::Zero(d);
  for (const Vec& v : h.vertices) {
    centroid += v;
  }
  centroid /= static_cast<double>(h.vertices.size());
  double volume = 0.0;
  for (std::size_t f = 0; f < h.halfspaces.size(); ++f) {
    const Halfspace& face = h.halfspaces[f];
    const double height = face.b - face.a.dot(centroid);
    const Mat basis = orthocomplement_basis(face.a);
    std::vector<Vec> projected;
    for (int vi : h.facets[f]) {
      projected.push_back(basis.transpose() * (h.vertices[vi] - centroid));
    }
    volume += height * polytope_volume(convex_hull(projected), d - 1) / d;
  }
  return volume;
}

// Volume of the intersection of two unit n-balls whose centres are `dist` apart.
inline double unit_lens_volume(int n, double dist)
{
  if (dist >= 2.0) {
    return 0.0;
  }
  if (n == 2) {
    const double half = 0.5 * dist;
    return 2.0 * std::acos(half) - dist * std::sqrt(1.0 - half * half);
  }
  if (n == 3) {
    return std::numbers::pi * (4.0 + dist) * (2.0 - dist) * (2.0 - dist) / 12.0;
  }
  const double h = 1.0 - 0.5 * dist;
  const double x = std::min(1.0, 2.0 * h - h * h);
  const double cap = 0.5 * unit_ball_volume(n) * boost::math::ibeta(0.5 * (n + 1), 0.5, x);
  return 2.0 * cap;
}

}  // namespace detail

/// Lebesgue measure: exact for polytopes, closed form for balls and ellipsoids, 0 when empty.
inline double volume(const ConvexBody& k)
{
  if (k.is_empty()) {
    return 0.0;
  }
  return k.cached_volume([&k] {
    if (k.is_ellipsoidal()) {
      return unit_ball_volume(k.dim()) * k.shape_factor().diagonal().prod();
    }
    return detail::polytope_volume(HullResult{k.vertices(), k.halfspaces(), k.facets()}, k.dim());
  });
}

/// K intersect L for polytopes; an empty or lower-dimensional result is the empty body.
inline ConvexBody intersect(const ConvexBody& k, const ConvexBody& l)
{
  if (k.dim() != l.dim()) {
    throw DomainError("intersect: dimension mismatch");
  }
  if (k.is_empty() || l.is_empty()) {
    return ConvexBody::empty(k.dim());
  }
  if (!k.is_polytope() || !l.is_polytope()) {
    throw UnsupportedKindError("intersect: both bodies must be polytopes");
  }
  std::vector<Halfspace> hs = k.halfspaces();
  hs.insert(hs.end(), l.halfspaces().begin(), l.halfspaces().end());
  ConvexBody out = ConvexBody::from_bounded_halfspaces(k.dim(), std::move(hs));
  return out.is_empty() ? ConvexBody::empty(k.dim()) : out;
}

inline ConvexBody translate(const ConvexBody& k, const Vec& v)
{
  switch (k.kind()) {
    case BodyKind::empty:
      return k;
    case BodyKind::ball:
      return ConvexBody::ball(k.center() + v, k.radius());
    case BodyKind::ellipsoid:
      return ConvexBody::ellipsoid(k.center() + v, k.shape());
    case BodyKind::polytope:
      break;
  }
  std::vector<Vec> moved;
  for (const Vec& p : k.vertices()) {
    moved.push_back(p + v);
  }
  return ConvexBody::from_vertices(std::move(moved));
}

/// A K for invertible A.
inline ConvexBody linear_image(const ConvexBody& k, const Mat& a)
{
  const int d = k.dim();
  if (a.rows() != d || a.cols() != d) {
    throw DomainError("linear_image: matrix has wrong size");
  }
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12 * std::pow(a.norm(), d)) {
    throw DomainError("linear_image: matrix is singular");
  }
  if (k.is_empty()) {
    return k;
  }
  if (k.is_ellipsoidal()) {
    return ConvexBody::ellipsoid(a * k.center(), a * k.shape() * a.transpose());
  }
  std::vector<Vec> mapped;
  for (const Vec& p : k.vertices()) {
    mapped.push_back(a * p);
  }
  return ConvexBody::from_vertices(std::move(mapped));
}

/// K - K = {x - y : x, y in K}.
inline ConvexBody difference_body(const ConvexBody& k)
{
  switch (k.kind()) {
    case BodyKind::empty:
      return k;
    case BodyKind::ball:
      return ConvexBody::ball(Vec::Zero(k.dim()), 2.0 * k.radius());
    case BodyKind::ellipsoid:
      return ConvexBody::ellipsoid(Vec::Zero(k.dim()), 4.0 * k.shape());
    case BodyKind::polytope:
      break;
  }
  std::vector<Vec> diffs;
  for (const Vec& v : k.vertices()) {
    for (const Vec& w : k.vertices()) {
      diffs.push_back(v - w);
    }
  }
  return ConvexBody::from_vertices(std::move(diffs));
}

/// Orthogonal projection onto u-perp, in the coordinates of orthocomplement_basis(u).
inline ConvexBody shadow(const ConvexBody& k, const Vec& u)
{
  if (k.dim() < 2) {
    throw DomainError("shadow: body must have dimension >= 2");
  }
  const Mat basis = orthocomplement_basis(u);
  if (k.is_empty()) {
    return ConvexBody::empty(k.dim() - 1);
  }
  if (k.is_ellipsoidal()) {
    return ConvexBody::ellipsoid(basis.transpose() * k.center(),
                                 basis.transpose() * k.shape() * basis);
  }
  std::vector<Vec> projected;
  for (const Vec& v : k.vertices()) {
    projected.push_back(basis.transpose() * v);
  }
  return ConvexBody::from_vertices(std::move(projected));
}

/// |P_{u-perp} K| without materializing the shadow body where a shortcut exists.
inline double shadow_volume(const ConvexBody& k, const Vec& u)
{
  if (k.is_empty()) {
    return 0.0;
  }
  if (k.is_ellipsoidal()) {
    const Mat basis = orthocomplement_basis(u);
    const Mat projected = basis.transpose() * k.shape() * basis;
    return unit_ball_volume(k.dim() - 1) * std::sqrt(projected.determinant());
  }
  if (k.dim() == 2) {
    Vec w(2);
    w << -u[1], u[0];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& v : k.vertices()) {
      lo = std::min(lo, v.dot(w));
      hi = std::max(hi, v.dot(w));
    }
    return hi - lo;
  }
  return volume(shadow(k, u));
}

namespace detail {

inline double clipped_area(std::vector<Eigen::Vector2d> poly,
                           const std::vector<std::pair<Eigen::Vector2d, double>>& hs,
                           const Eigen::Vector2d& shift)
{
  std::vector<Eigen::Vector2d> next;
  next.reserve(poly.size() + hs.size());
  for (const auto& [a, b0] : hs) {
    const double b = b0 + a.dot(shift);
    next.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d& p = poly[i];
      const Eigen::Vector2d& q = poly[(i + 1) % n];
      const double dp = a.dot(p) - b;
      const double dq = a.dot(q) - b;
      if (dp <= 0.0) {
        next.push_back(p);
      }
      if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
        next.push_back(p + (q - p) * (dp / (dp - dq)));
      }
    }
    poly.swap(next);
    if (poly.size() < 3) {
      return 0.0;
    }
  }
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return std::max(0.0, 0.5 * area);
}

inline double newell_area(const std::vector<Eigen::Vector3d>& loop)
{
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    acc += loop[i].cross(loop[(i + 1) % loop.size()]);
  }
  return 0.5 * acc.norm();
}

// Face-list clipping of a 3-polytope by halfspaces a.x <= b + a.shift.
inline double clipped_volume_3d(std::vector<Face3> faces, std::span<const Halfspace> hs,
                                const Eigen::Vector3d& shift)
{
  constexpr double eps = 1e-13;
  std::vector<Face3> next;
  std::vector<Eigen::Vector3d> cut;
  for (const Halfspace& h : hs) {
    const Eigen::Vector3d a = h.a;
    const double b = h.b + a.dot(shift);
    bool any_out = false;
    bool any_in = false;
    for (const Face3& f : faces) {
      for (const auto& p : f.loop) {
        const double s = a.dot(p) - b;
        any_out = any_out || s > eps;
        any_in = any_in || s < -eps;
      }
    }
    if (!any_out) {
      continue;
    }
    if (!any_in) {
      return 0.0;
    }
    next.clear();
    cut.clear();
    for (const Face3& f : faces) {
      Face3 clipped{f.normal, {}};
      const std::size_t n = f.loop.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d& p = f.loop[i];
        const Eigen::Vector3d& q = f.loop[(i + 1) % n];
        double dp = a.dot(p) - b;
        double dq = a.dot(q) - b;
        if (std::abs(dp) <= eps) dp = 0.0;
        if (std::abs(dq) <= eps) dq = 0.0;
        if (dp <= 0.0) {
          clipped.loop.push_back(p);
          if (dp == 0.0) {
            cut.push_back(p);
          }
        }
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
          const Eigen::Vector3d x = p + (q - p) * (dp / (dp - dq));
          clipped.loop.push_back(x);
          cut.push_back(x);
        }
      }
      if (clipped.loop.size() >= 3) {
        next.push_back(std::move(clipped));
      }
    }
    if (cut.size() >= 3) {
      ConvexBody::order_loop(cut, a);
      Face3 cap{a, {}};
      for (const auto& p : cut) {
        if (cap.loop.empty() || (p - cap.loop.back()).norm() > 1e-12) {
          cap.loop.push_back(p);
        }
      }
      if (cap.loop.size() >= 3 && (cap.loop.front() - cap.loop.back()).norm() <= 1e-12) {
        cap.loop.pop_back();
      }
      if (cap.loop.size() >= 3) {
        next.push_back(std::move(cap));
      }
    }
    faces.swap(next);
    if (faces.size() < 4) {
      return 0.0;
    }
  }
  Eigen::Vector3d ref = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (const Face3& f : faces) {
    for (const auto& p : f.loop) {
      ref += p;
      ++count;
    }
  }
  ref /= static_cast<double>(count);
  double vol = 0.0;
  for (const Face3& f : faces) {
    vol += newell_area(f.loop) * std::max(0.0, f.normal.dot(f.loop.front() - ref)) / 3.0;
  }
  return vol;
}

}  // namespace detail

/// |K cap (y + K)|, the geometric covariogram of K at y.
inline double overlap_volume(const ConvexBody& k, const Vec& y)
{
  if (k.is_empty()) {
    return 0.0;
  }
  if (k.is_ellipsoidal()) {
    const double dist = detail::whiten(k, y).norm();
    return k.shape_factor().diagonal().prod() * detail::unit_lens_volume(k.dim(), dist);
  }
  if (k.dim() == 2) {
    const auto [poly, edges] = k.polygon2();
    return detail::clipped_area(poly, edges, Eigen::Vector2d(y[0], y[1]));
  }
  if (k.dim() == 3) {
    return detail::clipped_volume_3d(k.faces3(), k.halfspaces(), Eigen::Vector3d(y[0], y[1], y[2]));
  }
  return volume(intersect(k, translate(k, y)));
}

}  // namespace logconvex
