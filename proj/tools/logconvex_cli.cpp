#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logconvex/io.hpp"
#include "logconvex/logconvex.hpp"

namespace fs = std::filesystem;
using namespace logconvex;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct RunConfig
{
  std::optional<int> dim;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tmax;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  bool timing = false;

  std::uint64_t base_seed() const
  {
    if (seed) {
      return *seed;
    }
    if (const char* env = std::getenv("LOGCONVEX_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw InputError("LOGCONVEX_SEED is not an unsigned integer");
      }
    }
    return 0;
  }

  QuadratureSpec quadrature() const
  {
    QuadratureSpec spec;
    if (tmax) {
      spec.t_max = *tmax;
    }
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
    return spec;
  }

  int budget(int n) const { return samples.value_or(n == 2 ? 360 : 2000); }

  SphereGrid grid(int n, std::uint64_t run_seed) const
  {
    return sphere_grid(n, budget(n), Seed{run_seed}.derive(0));
  }

  void check_dim(int n) const
  {
    if (dim && *dim != n) {
      throw InputError("input has dimension " + std::to_string(n) + ", --dim says " +
                       std::to_string(*dim));
    }
  }
};

struct Sink
{
  explicit Sink(const std::string& path)
  {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw InputError("cannot write " + path);
      }
    }
  }

  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec parse_point(const std::string& text)
{
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw InputError("--x: cannot parse \"" + item + "\"");
    }
  }
  if (values.empty()) {
    throw InputError("--x: empty point");
  }
  return Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// FNV-1a of the file name, so per-run seeds do not depend on the directory location.
std::uint64_t stable_hash(const std::string& s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

void emit(const RunConfig& cfg, const std::vector<VerificationReport>& reports, bool as_array)
{
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  if (cfg.format == "csv") {
    write_csv_header(os);
    for (auto r : reports) {
      if (!cfg.timing) {
        r.ms = 0.0;
      }
      write_csv_row(os, r);
    }
    return;
  }
  io::Json doc = io::Json::array();
  for (const auto& r : reports) {
    doc.push_back(io::to_json(r, cfg.timing));
  }
  os << (as_array ? doc : doc.front()).dump(2) << '\n';
}

int exit_for(const std::vector<VerificationReport>& reports)
{
  const bool bad = std::any_of(reports.begin(), reports.end(),
                               [](const VerificationReport& r) { return r.violated(); });
  return bad ? kExitViolation : 0;
}

void write_rows(const std::string& path, const auto& report)
{
  if (path.empty()) {
    return;
  }
  std::ofstream os(path);
  if (!os) {
    throw InputError("cannot write " + path);
  }
  report.write_csv(os);
}

// ---- eval -------------------------------------------------------------------------------

struct EvalArgs
{
  std::string fn;
  std::string x;
  bool covariogram = false;
  bool pibody_norm = false;
};

int cmd_eval(const RunConfig& cfg, const EvalArgs& args)
{
  const LogConcaveFunction f = io::load_function(args.fn);
  cfg.check_dim(f.dim());
  const Vec x = parse_point(args.x);
  if (x.size() != f.dim()) {
    throw InputError("--x has the wrong dimension");
  }
  const QuadratureSpec spec = cfg.quadrature();
  Sink sink(cfg.out);
  std::ostream& os = sink.stream();
  const bool plain = !args.covariogram && !args.pibody_norm;
  if (cfg.format == "json") {
    io::Json doc{{"x", std::vector<double>(x.data(), x.data() + x.size())}};
    if (plain) {
      doc["f"] = eval(f, x);
    }
    if (args.covariogram) {
      doc["g"] = g_eval(Covariogram(f, spec), x);
    }
    if (args.pibody_norm) {
      doc["pibody_norm"] = pibody_norm_fn(f, x, spec);
    }
    os << doc.dump(2) << '\n';
    return 0;
  }
  if (plain) {
    os << format_double(eval(f, x)) << '\n';
  }
  if (args.covariogram) {
    os << format_double(g_eval(Covariogram(f, spec), x)) << '\n';
  }
  if (args.pibody_norm) {
    os << format_double(pibody_norm_fn(f, x, spec)) << '\n';
  }
  return 0;
}

// ---- verify -----------------------------------------------------------------------------

struct VerifyArgs
{
  std::string fn;
  std::string body;
  std::string dir;
  std::string rows;
  std::optional<double> p;
  std::string profile = "covariogram";
  double lambda_min = 1e-3;
};

VerifyOptions options(const RunConfig& cfg, std::uint64_t seed)
{
  return VerifyOptions{cfg.tol, seed};
}

VerificationReport run_zhang_functional(const RunConfig& cfg, const LogConcaveFunction& f,
                                        std::uint64_t seed)
{
  cfg.check_dim(f.dim());
  return verify_zhang_functional(f, cfg.quadrature(), cfg.grid(f.dim(), seed),
                                 options(cfg, seed));
}

std::vector<VerificationReport> run_body(const RunConfig& cfg, const std::string& check,
                                         const ConvexBody& k, std::uint64_t seed)
{
  cfg.check_dim(k.dim());
  std::vector<VerificationReport> out;
  if (check == "zhang-body" || check == "corpus") {
    out.push_back(verify_zhang_body(k, cfg.grid(k.dim(), seed), options(cfg, seed)));
  }
  if (check == "petty-body" || check == "corpus") {
    out.push_back(verify_petty_body(k, cfg.grid(k.dim(), seed), options(cfg, seed)));
  }
  if (check == "rogers-shephard" || (check == "corpus" && k.is_polytope())) {
    VerifyOptions opts{cfg.tol.value_or(1e-9), seed};
    out.push_back(verify_rogers_shephard(k, opts));
  }
  return out;
}

template <RayProfile G>
VerificationReport run_inclusion(const RunConfig& cfg, const VerifyArgs& args, const G& g,
                                 std::uint64_t seed)
{
  const auto start = std::chrono::steady_clock::now();
  const int n = g.dim();
  const double p = args.p.value_or(n);
  const double tol = cfg.tol.value_or(3.0 * cfg.quadrature().rel_tol);
  const std::vector<double> ts = default_t_grid(p);
  const InclusionReport rep = check_inclusion_lemma(g, p, ts, cfg.grid(n, seed), tol);
  write_rows(args.rows, rep);
  // the claim is lhs <= rhs row by row; report the tightest row
  const auto worst = std::min_element(rep.rows.begin(), rep.rows.end(),
                                      [](const auto& a, const auto& b) { return a.margin < b.margin; });
  VerificationReport r;
  r.name = "inclusion";
  r.dim = n;
  r.lhs = worst->lhs;
  r.rhs = worst->rhs;
  r.ratio = worst->lhs / worst->rhs;
  r.tol = tol;
  r.verdict = rep.failed ? Verdict::violation : classify(r.ratio, tol);
  r.seed = seed;
  r.budget = Budget{cfg.quadrature(), static_cast<std::size_t>(cfg.budget(n))};
  r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

VerificationReport run_levelset_limit(const RunConfig& cfg, const VerifyArgs& args,
                                      const LogConcaveFunction& f, std::uint64_t seed)
{
  const auto start = std::chrono::steady_clock::now();
  const int n = f.dim();
  const QuadratureSpec spec = cfg.quadrature();
  const double tol = cfg.tol.value_or(3.0 * spec.rel_tol);
  if (!(args.lambda_min > 0.0) || !(args.lambda_min < 0.5)) {
    throw InputError("--lambda-min must lie in (0, 0.5)");
  }
  // geometric grid from lambda_min up to 0.5
  std::vector<double> lambdas;
  for (double l = 0.5; l > args.lambda_min * (1.0 - 1e-12); l /= 2.0) {
    lambdas.push_back(l);
  }
  lambdas.push_back(args.lambda_min);
  const LevelsetLimitReport rep =
      check_levelset_limit(f, spec, lambdas, cfg.grid(n, seed), tol, 0.03);
  write_rows(args.rows, rep);
  VerificationReport r;
  r.name = "levelset-limit";
  r.dim = n;
  r.lhs = 1.0;
  r.rhs = 1.0 + rep.min_margin;
  r.ratio = r.lhs / r.rhs;
  r.tol = tol;
  r.verdict = rep.containment_ok ? classify(r.ratio, tol) : Verdict::violation;
  r.seed = seed;
  r.budget = Budget{spec, static_cast<std::size_t>(cfg.budget(n))};
  r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!rep.limit_ok) {
    std::cerr << "levelset-limit: infimum over lambda exceeds the target by "
              << rep.limit_residual << '\n';
  }
  return r;
}

bool is_function_document(const io::Json& j)
{
  const auto kind = j.value("kind", std::string());
  return kind == "characteristic" || kind == "exp_gauge" || kind == "gaussian";
}

std::vector<VerificationReport> run_corpus(const RunConfig& cfg, const std::string& dir)
{
  if (!fs::is_directory(dir)) {
    throw InputError("not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw InputError("no .json inputs in " + dir);
  }
  std::vector<VerificationReport> out;
  for (const auto& path : files) {
    const std::uint64_t seed = cfg.base_seed() + stable_hash(path.filename().string());
    const io::Json doc = io::load_json(path);
    if (cfg.dim) {
      // corpus runs skip inputs of other dimensions instead of failing
      const int n = is_function_document(doc) ? io::parse_function(doc).dim()
                                              : io::parse_body(doc).dim();
      if (n != *cfg.dim) {
        continue;
      }
    }
    if (is_function_document(doc)) {
      auto r = run_zhang_functional(cfg, io::parse_function(doc), seed);
      r.name += ":" + path.stem().string();
      out.push_back(std::move(r));
    } else {
      for (auto& r : run_body(cfg, "corpus", io::parse_body(doc), seed)) {
        r.name += ":" + path.stem().string();
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

int cmd_verify(const RunConfig& cfg, const std::string& check, const VerifyArgs& args)
{
  const std::uint64_t seed = cfg.base_seed();
  auto need = [](const std::string& value, const char* flag) {
    if (value.empty()) {
      throw InputError(std::string("missing ") + flag);
    }
  };
  std::vector<VerificationReport> reports;
  bool as_array = false;
  if (check == "corpus") {
    need(args.dir, "--dir");
    reports = run_corpus(cfg, args.dir);
    as_array = true;
  } else if (check == "zhang-body" || check == "petty-body" || check == "rogers-shephard") {
    need(args.body, "--body");
    reports = run_body(cfg, check, io::load_body(args.body), seed);
  } else {
    need(args.fn, "--fn");
    const LogConcaveFunction f = io::load_function(args.fn);
    cfg.check_dim(f.dim());
    if (check == "zhang-functional") {
      reports.push_back(run_zhang_functional(cfg, f, seed));
    } else if (check == "inclusion") {
      if (args.profile == "function") {
        reports.push_back(run_inclusion(cfg, args, FunctionProfile(f), seed));
      } else {
        reports.push_back(run_inclusion(cfg, args, Covariogram(f, cfg.quadrature()), seed));
      }
    } else if (check == "levelset-limit") {
      reports.push_back(run_levelset_limit(cfg, args, f, seed));
    } else if (check == "equality") {
      const int n = f.dim();
      const std::vector<double> lambdas = default_lambda_grid();
      const auto diag = equality_diagnostics(f, cfg.quadrature(), cfg.grid(n, seed),
                                             sphere_grid(n, 64, Seed{seed}.derive(1)), lambdas,
                                             options(cfg, seed));
      auto r = diag.zhang;
      r.name = "equality";
      Sink sink(cfg.out);
      std::ostream& os = sink.stream();
      if (cfg.format == "csv") {
        os << "name,dim,ratio,verdict,max_deficit,loglinear,equality_case\n"
           << r.name << ',' << r.dim << ',' << format_double(r.ratio) << ','
           << to_string(r.verdict) << ',' << format_double(diag.max_deficit) << ','
           << diag.loglinear() << ',' << diag.equality_case() << '\n';
      } else {
        io::Json doc = io::to_json(r, cfg.timing);
        doc["max_deficit"] = diag.max_deficit;
        doc["loglinear"] = diag.loglinear();
        doc["equality_case"] = diag.equality_case();
        os << doc.dump(2) << '\n';
      }
      return r.violated() ? kExitViolation : 0;
    } else {
      throw InputError("unknown check \"" + check + "\"");
    }
  }
  emit(cfg, reports, as_array);
  return exit_for(reports);
}

// ---- report -----------------------------------------------------------------------------

int cmd_report(const RunConfig& cfg, const std::string& dir)
{
  if (!fs::is_directory(dir)) {
    throw InputError("not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<VerificationReport> reports;
  for (const auto& path : files) {
    const io::Json doc = io::load_json(path);
    try {
      if (doc.is_array()) {
        for (const auto& item : doc) {
          reports.push_back(io::report_from_json(item));
        }
      } else {
        reports.push_back(io::report_from_json(doc));
      }
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  if (reports.empty()) {
    throw InputError("no reports found in " + dir);
  }
  Sink sink(cfg.out);
  write_csv_header(sink.stream());
  for (const auto& r : reports) {
    write_csv_row(sink.stream(), r);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Numerical checks of Zhang-type inequalities for log-concave functions"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "Expected dimension of the inputs");
    sub->add_option("--seed", cfg.seed, "Base seed (falls back to LOGCONVEX_SEED, then 0)");
    sub->add_option("--samples", cfg.samples, "Sphere budget (default 360 for n=2, 2000 otherwise)")
        ->check(CLI::Range(64, 10000000));
    sub->add_option("--tmax", cfg.tmax, "Upper limit of the layer-cake integrals");
    sub->add_option("--tol", cfg.tol, "Verdict tolerance override");
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", cfg.timing, "Record wall time in reports (otherwise ms = 0)");
  };

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate f, its covariogram or the Pi* norm at a point");
  add_common(eval_cmd);
  eval_cmd->add_option("--fn", eval_args.fn, "Function JSON")->required();
  eval_cmd->add_option("--x", eval_args.x, "Point as comma-separated coordinates")->required();
  eval_cmd->add_flag("--covariogram", eval_args.covariogram, "Print g(x)");
  eval_cmd->add_flag("--pibody-norm", eval_args.pibody_norm, "Print ||x|| of Pi*(f)");

  VerifyArgs verify_args;
  std::string check;
  auto* verify_cmd = app.add_subcommand("verify", "Run one verification and emit its report");
  add_common(verify_cmd);
  verify_cmd->add_option("check", check, "Which check to run")
      ->required()
      ->check(CLI::IsMember({"zhang-functional", "zhang-body", "petty-body", "rogers-shephard",
                             "inclusion", "levelset-limit", "equality", "corpus"}));
  verify_cmd->add_option("--fn", verify_args.fn, "Function JSON");
  verify_cmd->add_option("--body", verify_args.body, "Body JSON");
  verify_cmd->add_option("--dir", verify_args.dir, "Corpus directory");
  verify_cmd->add_option("--p", verify_args.p, "Exponent of the ball body (default n)");
  verify_cmd->add_option("--profile", verify_args.profile, "Use the covariogram of f or f itself")
      ->check(CLI::IsMember({"covariogram", "function"}));
  verify_cmd->add_option("--lambda-min", verify_args.lambda_min, "Smallest lambda of the limit grid");
  verify_cmd->add_option("--rows", verify_args.rows, "Write per-row CSV for inclusion/levelset-limit");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Merge report JSON files into one CSV table");
  add_common(report_cmd);
  report_cmd->add_option("--dir", report_dir, "Directory of report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*eval_cmd) {
      return cmd_eval(cfg, eval_args);
    }
    if (*verify_cmd) {
      return cmd_verify(cfg, check, verify_args);
    }
    return cmd_report(cfg, report_dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}
