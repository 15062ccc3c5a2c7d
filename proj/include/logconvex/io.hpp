#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logconvex/bodies.hpp"
#include "logconvex/errors.hpp"
#include "logconvex/logconcave.hpp"
#include "logconvex/verify.hpp"

namespace logconvex::io {

using Json = nlohmann::json;

inline Json load_json(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

namespace detail {

inline const Json& field(const Json& j, const char* key)
{
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

inline double number(const Json& j)
{
  if (!j.is_number()) {
    throw InputError("expected a number, got " + j.dump());
  }
  return j.get<double>();
}

inline Vec vector(const Json& j)
{
  if (!j.is_array() || j.empty()) {
    throw InputError("expected a non-empty array of numbers, got " + j.dump());
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number(j[i]);
  }
  return v;
}

inline std::vector<Vec> points(const Json& j)
{
  if (!j.is_array() || j.empty()) {
    throw InputError("expected an array of points");
  }
  std::vector<Vec> out;
  for (const auto& p : j) {
    out.push_back(vector(p));
    if (out.back().size() != out.front().size()) {
      throw InputError("points of mixed dimension");
    }
  }
  return out;
}

inline Mat matrix(const Json& j)
{
  const std::vector<Vec> rows = points(j);
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (rows.front().size() != n) {
    throw InputError("expected a square matrix");
  }
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  }
  return m;
}

inline std::string kind(const Json& j)
{
  const Json& k = field(j, "kind");
  if (!k.is_string()) {
    throw InputError("\"kind\" must be a string");
  }
  return k.get<std::string>();
}

inline double peak(const Json& j)
{
  return j.contains("peak") ? number(j.at("peak")) : 1.0;
}

}  // namespace detail

/// vpolytope | hpolytope | ball | ellipsoid | simplex.
inline ConvexBody parse_body_unchecked(const Json& j)
{
  using namespace detail;
  const std::string k = kind(j);
  if (k == "vpolytope") {
    return ConvexBody::from_vertices(points(field(j, "vertices")));
  }
  if (k == "simplex") {
    std::vector<Vec> pts = points(field(j, "vertices"));
    if (pts.size() != static_cast<std::size_t>(pts.front().size()) + 1) {
      throw InputError("simplex needs dim + 1 vertices");
    }
    return ConvexBody::from_vertices(std::move(pts));
  }
  if (k == "hpolytope") {
    const Json& list = field(j, "halfspaces");
    if (!list.is_array() || list.empty()) {
      throw InputError("\"halfspaces\" must be a non-empty array");
    }
    std::vector<Halfspace> hs;
    for (const auto& h : list) {
      hs.push_back(Halfspace{vector(field(h, "a")), number(field(h, "b"))});
      if (hs.back().a.size() != hs.front().a.size()) {
        throw InputError("halfspaces of mixed dimension");
      }
    }
    const int dim = static_cast<int>(hs.front().a.size());
    return ConvexBody::from_halfspaces(dim, std::move(hs));
  }
  if (k == "ball") {
    return ConvexBody::ball(vector(field(j, "center")), number(field(j, "radius")));
  }
  if (k == "ellipsoid") {
    return ConvexBody::ellipsoid(vector(field(j, "center")), matrix(field(j, "shape")));
  }
  throw InputError("unknown body kind \"" + k + "\"");
}

// Geometric rejections of a document (degenerate hull, 0 outside K, ...) are input errors.
template <class Parse>
auto rethrow_as_input(Parse&& parse)
{
  try {
    return parse();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  } catch (const DegenerateBodyError& e) {
    throw InputError(e.what());
  } catch (const Json::exception& e) {
    throw InputError(e.what());
  }
}

inline ConvexBody parse_body(const Json& j)
{
  return rethrow_as_input([&] { return parse_body_unchecked(j); });
}

/// characteristic | exp_gauge | gaussian.
inline LogConcaveFunction parse_function_unchecked(const Json& j)
{
  using namespace detail;
  const std::string k = kind(j);
  if (k == "characteristic") {
    return LogConcaveFunction::characteristic(parse_body(field(j, "body")), peak(j));
  }
  if (k == "exp_gauge") {
    std::optional<Vec> apex;
    if (j.contains("apex")) {
      apex = vector(j.at("apex"));
    }
    return LogConcaveFunction::exp_gauge(parse_body(field(j, "body")), peak(j), apex);
  }
  if (k == "gaussian") {
    return LogConcaveFunction::gaussian(vector(field(j, "center")), matrix(field(j, "shape")),
                                        peak(j));
  }
  throw InputError("unknown function kind \"" + k + "\"");
}

inline LogConcaveFunction parse_function(const Json& j)
{
  return rethrow_as_input([&] { return parse_function_unchecked(j); });
}

inline ConvexBody load_body(const std::filesystem::path& path)
{
  return parse_body(load_json(path));
}

inline LogConcaveFunction load_function(const std::filesystem::path& path)
{
  return parse_function(load_json(path));
}

/// `ms` is written as 0 unless `timing` is set, so that reruns produce identical bytes.
inline Json to_json(const VerificationReport& r, bool timing = false)
{
  Json budget = {{"sphere", r.budget.sphere},
                 {"t_max", r.budget.quadrature.t_max},
                 {"panels", r.budget.quadrature.panels},
                 {"rel_tol", r.budget.quadrature.rel_tol}};
  return Json{{"name", r.name},
              {"dim", r.dim},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"ratio", r.ratio},
              {"tol", r.tol},
              {"verdict", to_string(r.verdict)},
              {"seed", r.seed},
              {"budget", std::move(budget)},
              {"ms", timing ? r.ms : 0.0}};
}

inline Verdict parse_verdict(const std::string& s)
{
  for (Verdict v : {Verdict::holds, Verdict::equality, Verdict::violation}) {
    if (s == to_string(v)) {
      return v;
    }
  }
  throw InputError("unknown verdict \"" + s + "\"");
}

inline VerificationReport report_from_json(const Json& j)
{
  using namespace detail;
  try {
    VerificationReport r;
    r.name = field(j, "name").get<std::string>();
    r.dim = field(j, "dim").get<int>();
    r.lhs = number(field(j, "lhs"));
    r.rhs = number(field(j, "rhs"));
    r.ratio = number(field(j, "ratio"));
    r.tol = number(field(j, "tol"));
    r.verdict = parse_verdict(field(j, "verdict").get<std::string>());
    r.seed = field(j, "seed").get<std::uint64_t>();
    const Json& b = field(j, "budget");
    r.budget.sphere = field(b, "sphere").get<std::size_t>();
    r.budget.quadrature.t_max = number(field(b, "t_max"));
    r.budget.quadrature.panels = field(b, "panels").get<int>();
    r.budget.quadrature.rel_tol = number(field(b, "rel_tol"));
    r.ms = number(field(j, "ms"));
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("report schema mismatch: ") + e.what());
  }
}

}  // namespace logconvex::io
