#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "logconvex/io.hpp"
#include "logconvex/verify.hpp"

using namespace logconvex;
namespace fs = std::filesystem;

namespace {

const fs::path kData{LOGCONVEX_DATA};

}  // namespace

TEST(Io, ParsesEveryBodyKind)
{
  using io::Json;
  const auto v = io::parse_body(Json::parse(R"({"kind":"vpolytope","vertices":[[0,0],[1,0],[0,1]]})"));
  EXPECT_NEAR(volume(v), 0.5, 1e-15);
  const auto h = io::parse_body(Json::parse(
      R"({"kind":"hpolytope","halfspaces":[{"a":[1,0],"b":1},{"a":[-1,0],"b":1},{"a":[0,1],"b":1},{"a":[0,-1],"b":1}]})"));
  EXPECT_NEAR(volume(h), 4.0, 1e-12);
  const auto b = io::parse_body(Json::parse(R"({"kind":"ball","center":[0,0,0],"radius":2})"));
  EXPECT_EQ(b.dim(), 3);
  EXPECT_NEAR(volume(b), 32.0 * std::numbers::pi / 3.0, 1e-12);
  const auto e = io::parse_body(Json::parse(R"({"kind":"ellipsoid","center":[1,0],"shape":[[4,0],[0,1]]})"));
  EXPECT_NEAR(volume(e), 2.0 * std::numbers::pi, 1e-12);
  const auto s = io::parse_body(Json::parse(R"({"kind":"simplex","vertices":[[1,0],[0,1],[-1,-1]]})"));
  EXPECT_NEAR(volume(s), 1.5, 1e-15);
}

TEST(Io, ParsesEveryFunctionKind)
{
  using io::Json;
  const auto c = io::parse_function(
      Json::parse(R"({"kind":"characteristic","body":{"kind":"ball","center":[0,0],"radius":1},"peak":2})"));
  EXPECT_EQ(c.kind(), FunctionKind::characteristic);
  EXPECT_EQ(c.peak(), 2.0);
  const auto g = io::parse_function(Json::parse(R"({"kind":"gaussian","center":[0,0],"shape":[[1,0],[0,1]]})"));
  EXPECT_EQ(g.kind(), FunctionKind::gaussian);
  EXPECT_EQ(g.peak(), 1.0);
  const auto apex = io::parse_function(Json::parse(
      R"({"kind":"exp_gauge","body":{"kind":"ball","center":[0,0],"radius":1},"apex":[0.5,0]})"));
  Vec x(2);
  x << 0.5, 0.0;
  EXPECT_NEAR(eval(apex, x), 1.0, 1e-15);
}

TEST(Io, DataDirectoryLoads)
{
  int functions = 0;
  int bodies = 0;
  for (const auto& entry : fs::directory_iterator(kData)) {
    const io::Json j = io::load_json(entry.path());
    const std::string kind = j.at("kind");
    if (kind == "characteristic" || kind == "exp_gauge" || kind == "gaussian") {
      EXPECT_NO_THROW(io::load_function(entry.path())) << entry.path();
      ++functions;
    } else {
      EXPECT_NO_THROW(io::load_body(entry.path())) << entry.path();
      ++bodies;
    }
  }
  EXPECT_GT(functions, 0);
  EXPECT_GT(bodies, 0);
  EXPECT_NEAR(volume(io::load_body(kData / "pentagon_h.json")), 2.5 * std::sin(2.0 * std::numbers::pi / 5.0) /
                                                                       std::pow(std::cos(std::numbers::pi / 5.0), 2),
              1e-6);
}

TEST(Io, MalformedInputsAreInputErrors)
{
  using io::Json;
  EXPECT_THROW(io::load_json(kData / "no_such_file.json"), InputError);
  const fs::path bad = fs::temp_directory_path() / "logconvex_bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_THROW(io::load_json(bad), InputError);
  fs::remove(bad);

  const char* docs[] = {
      R"({"vertices":[[0,0],[1,0],[0,1]]})",
      R"({"kind":"prism"})",
      R"({"kind":"vpolytope","vertices":[[0,0],[1,1]]})",
      R"({"kind":"vpolytope","vertices":[[0,0],[1,0,0],[0,1]]})",
      R"({"kind":"simplex","vertices":[[0,0],[1,0],[0,1],[1,1]]})",
      R"({"kind":"ball","center":[0,0],"radius":-1})",
      R"({"kind":"ball","center":[0,0],"radius":"one"})",
      R"({"kind":"ellipsoid","center":[0,0],"shape":[[1,2],[2,1]]})",
      R"({"kind":"hpolytope","halfspaces":[{"a":[1,0],"b":1}]})",
  };
  for (const char* d : docs) {
    EXPECT_THROW(io::parse_body(Json::parse(d)), InputError) << d;
  }
  const char* fns[] = {
      R"({"kind":"exp_gauge","body":{"kind":"ball","center":[3,0],"radius":1}})",
      R"({"kind":"gaussian","center":[0,0]})",
      R"({"kind":"characteristic","body":{"kind":"ball","center":[0,0],"radius":1},"peak":0})",
      R"({"kind":"wavelet"})",
  };
  for (const char* d : fns) {
    EXPECT_THROW(io::parse_function(Json::parse(d)), InputError) << d;
  }
}

TEST(Io, ReportRoundTrip)
{
  VerificationReport r;
  r.name = "zhang-body";
  r.dim = 2;
  r.lhs = 1.5;
  r.rhs = 1.5000123;
  r.ratio = r.lhs / r.rhs;
  r.tol = 0.02;
  r.verdict = Verdict::equality;
  r.seed = 77;
  r.budget.sphere = 360;
  r.ms = 12.5;
  const io::Json j = io::to_json(r, true);
  const VerificationReport back = io::report_from_json(j);
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.dim, r.dim);
  EXPECT_EQ(back.lhs, r.lhs);
  EXPECT_EQ(back.rhs, r.rhs);
  EXPECT_EQ(back.ratio, r.ratio);
  EXPECT_EQ(back.verdict, r.verdict);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.budget.sphere, r.budget.sphere);
  EXPECT_EQ(back.budget.quadrature.t_max, r.budget.quadrature.t_max);
  EXPECT_EQ(back.ms, 12.5);
  EXPECT_EQ(io::to_json(r).at("ms"), 0.0);
}

TEST(Io, ReportSchemaMismatch)
{
  io::Json j = io::to_json(VerificationReport{});
  j.erase("ratio");
  EXPECT_THROW(io::report_from_json(j), InputError);
  io::Json k = io::to_json(VerificationReport{});
  k["verdict"] = "fine";
  EXPECT_THROW(io::report_from_json(k), InputError);
  io::Json l = io::to_json(VerificationReport{});
  l["dim"] = "two";
  EXPECT_THROW(io::report_from_json(l), InputError);
}
