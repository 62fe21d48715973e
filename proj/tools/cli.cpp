// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffem/mms.hpp"
#include "ffem/parallel.hpp"
#include "ffem/solver.hpp"
#include "ffem/suites.hpp"

namespace ffem::cli
{

namespace
{

using nlohmann::json;

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  int k = 3;
  int n = 1;
  std::string levels = "1:5";
  std::string field = "default";
  std::string method = "direct";
  double tol = 1e-10;
  double inner_tol = 1e-12;
  int max_iterations = 50000;
  std::string suite;
  std::string modes;
  double delta = 0.1;
  int eta_degree = 1;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;
  std::string json_path;
  std::string config;
  bool no_timing = false;
};

std::pair<int, int> ParseLevels(const std::string &s)
{
  const auto colon = s.find(':');
  try
  {
    size_t used = 0;
    if (colon == std::string::npos)
    {
      const int l = std::stoi(s, &used);
      if (used != s.size())
        throw std::invalid_argument(s);
      return {l, l};
    }
    const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    const int lo = std::stoi(a, &used);
    if (used != a.size())
      throw std::invalid_argument(s);
    const int hi = std::stoi(b, &used);
    if (used != b.size())
      throw std::invalid_argument(s);
    return {lo, hi};
  }
  catch (const std::logic_error &)
  {
    throw UsageError("--levels expects a:b, got '" + s + "'");
  }
}

// "1,2,3" or "a:b" or "a:b:step".
std::vector<int> ParseIntList(const std::string &s, const std::string &flag)
{
  std::vector<int> out;
  try
  {
    if (s.find(':') != std::string::npos)
    {
      std::vector<int> parts;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ':'))
        parts.push_back(std::stoi(item));
      if (parts.size() < 2 || parts.size() > 3)
        throw std::invalid_argument(s);
      const int step = parts.size() == 3 ? parts[2] : 1;
      if (step <= 0)
        throw std::invalid_argument(s);
      for (int v = parts[0]; v <= parts[1]; v += step)
        out.push_back(v);
    }
    else
    {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ','))
        out.push_back(std::stoi(item));
    }
  }
  catch (const std::logic_error &)
  {
    throw UsageError(flag + " expects a list like 1,2,3 or a:b:step, got '" + s + "'");
  }
  if (out.empty())
    throw UsageError(flag + " is empty");
  return out;
}

std::string Num(double v, const char *fmt)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string Opt(const std::optional<double> &v, const char *fmt)
{
  return v ? Num(*v, fmt) : std::string();
}

json OptJson(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

// Writes to the named file, or to `out` when the name is empty or "-".
void Emit(const std::string &path, const std::string &text, std::ostream &out)
{
  if (path.empty() || path == "-")
  {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot write " + path);
  f << text;
}

SolverOptions MakeSolverOptions(const RunConfig &cfg)
{
  SolverOptions o;
  try
  {
    o.method = ParseSolveMethod(cfg.method);
  }
  catch (const std::invalid_argument &e)
  {
    throw UsageError(e.what());
  }
  o.tol = cfg.tol;
  o.inner_tol = cfg.inner_tol;
  o.max_iterations = cfg.max_iterations;
  return o;
}

json ConfigJson(const RunConfig &c, const std::string &command)
{
  json j = {{"command", command}, {"method", c.method}, {"tol", c.tol},
            {"inner_tol", c.inner_tol}, {"max_iterations", c.max_iterations},
            {"seed", c.seed}, {"threads", c.threads}};
  if (command == "solve" || command == "nsweep")
  {
    j["k"] = command == "nsweep" ? 1 : c.k;
    j["levels"] = c.levels;
  }
  if (command == "solve")
  {
    j["n"] = c.n;
    j["field"] = c.field;
  }
  if (command == "nsweep")
    j["modes"] = c.modes;
  if (command == "verify")
  {
    j["suite"] = c.suite;
    j["levels"] = c.levels;
    j["modes"] = c.modes;
    j["delta"] = c.delta;
    j["eta_degree"] = c.eta_degree;
  }
  return j;
}

int CmdSolve(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  const SolverOptions opts = MakeSolverOptions(c);
  const auto [first, last] = ParseLevels(c.levels);
  if (first < 1 || last < first || last > 10)
    throw UsageError("--levels must satisfy 1 <= a <= b <= 10");
  std::string field = c.field;
  if (c.k == 0 && field == "default")
    field = "r_sin_z";
  ManufacturedCase mc;
  try
  {
    mc = BuiltinCase(c.k, c.n, field);
  }
  catch (const std::invalid_argument &e)
  {
    std::string names;
    for (const auto &s : BuiltinFieldNames(c.k))
      names += " " + s;
    throw UsageError(std::string(e.what()) + "; fields for this k:" + names);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ConvergenceRow> rows = ConvergenceStudy(mc, first, last, opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream csv;
  csv << "level,err_u,rate_u,err_sigma,rate_sigma\n";
  json jrows = json::array();
  for (const ConvergenceRow &r : rows)
  {
    csv << r.level << "," << Num(r.err_u, "%.6e") << "," << Opt(r.rate_u, "%.4f") << ","
        << Opt(r.err_sigma, "%.6e") << "," << Opt(r.rate_sigma, "%.4f") << "\n";
    json e = {{"level", r.level},
              {"err_u", r.err_u},
              {"rate_u", OptJson(r.rate_u)},
              {"err_sigma", OptJson(r.err_sigma)},
              {"rate_sigma", OptJson(r.rate_sigma)},
              {"dofs", r.stats.dofs},
              {"method", r.stats.method},
              {"outer_iterations", r.stats.outer_iterations},
              {"inner_iterations", r.stats.inner_iterations},
              {"relative_residual", r.stats.relative_residual}};
    if (!c.no_timing)
      e["seconds"] = r.stats.seconds;
    jrows.push_back(e);
  }
  Emit(c.out, csv.str(), out);
  if (!c.json_path.empty())
  {
    json j = {{"schema", 1}, {"config", ConfigJson(c, "solve")}, {"case", mc.name},
              {"rows", jrows}};
    if (!mc.notes.empty())
      j["case_notes"] = mc.notes;
    if (!c.no_timing)
      j["wall_seconds"] = wall;
    Emit(c.json_path, j.dump(2) + "\n", out);
  }
  err << "solve: k=" << c.k << " n=" << c.n << " field=" << field << " levels " << first << ":"
      << last << " done in " << Num(wall, "%.2f") << " s\n";
  return kPass;
}

int CmdVerify(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  const auto &names = SuiteNames();
  if (std::find(names.begin(), names.end(), c.suite) == names.end())
    throw UsageError("--suite must be one of exactness, commuting, adjoint, inverse-ineq, "
                     "projection");
  SuiteOptions so;
  so.seed = c.seed;
  so.delta = c.delta;
  so.eta_degree = c.eta_degree;
  if (!(c.delta > 0.0))
    throw UsageError("--delta must be positive");
  if (c.eta_degree < 0 || c.eta_degree > 3)
    throw UsageError("--eta-degree must be in 0..3");
  if (!c.levels.empty())
  {
    const auto [a, b] = ParseLevels(c.levels);
    if (a < 1 || b < a || b > 8)
      throw UsageError("--levels must satisfy 1 <= a <= b <= 8");
    so.first_level = a;
    so.last_level = b;
  }
  if (!c.modes.empty())
  {
    so.modes = ParseIntList(c.modes, "--modes");
    for (int n : so.modes)
      if (n < 1)
        throw UsageError("--modes entries must be >= 1");
  }
  SuiteReport rep;
  try
  {
    rep = RunSuite(c.suite, so);
  }
  catch (const SolverError &)
  {
    throw;
  }
  catch (const std::invalid_argument &)
  {
    throw;
  }
  catch (const std::runtime_error &e)
  {
    err << "verify " << c.suite << ": check failed: " << e.what() << "\n";
    json j = {{"schema", 1}, {"suite", c.suite}, {"pass", false}, {"error", e.what()},
              {"config", ConfigJson(c, "verify")}};
    Emit(c.json_path, j.dump(2) + "\n", out);
    return kCheckFail;
  }
  json j = rep.ToJson();
  j["config"] = ConfigJson(c, "verify");
  Emit(c.json_path, j.dump(2) + "\n", out);
  for (const CheckRecord &r : rep.checks)
    if (!r.pass)
      err << "FAIL " << r.name << ": " << r.value << " (threshold " << r.threshold << ")"
          << (r.note.empty() ? "" : " " + r.note) << "\n";
  for (const std::string &n : rep.notes)
    err << "note: " << n << "\n";
  err << "verify " << c.suite << ": " << rep.checks.size() - rep.Failures() << "/"
      << rep.checks.size() << " checks pass\n";
  return rep.Pass() ? kPass : kCheckFail;
}

int CmdNsweep(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  const SolverOptions opts = MakeSolverOptions(c);
  const auto [first, last] = ParseLevels(c.levels);
  (void)first;
  if (last < 3)
    throw UsageError("nsweep needs a top level of at least 3 (three consecutive solves)");
  if (last > 9)
    throw UsageError("--levels top must be <= 9");
  const std::vector<int> modes = ParseIntList(c.modes.empty() ? "2:60:2" : c.modes, "--modes");
  for (int n : modes)
    if (n < 1)
      throw UsageError("--modes entries must be >= 1");
  std::ostringstream csv;
  csv << "n,consecutive_rate\n";
  json entries = json::array();
  std::vector<double> rates;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : modes)
  {
    const SweepEntry e = ConsecutiveRate(n, last, opts);
    rates.push_back(e.rate);
    csv << n << "," << Num(e.rate, "%.4f") << "\n";
    entries.push_back({{"n", n},
                       {"consecutive_rate", e.rate},
                       {"diff_coarse", e.diff_coarse},
                       {"diff_fine", e.diff_fine}});
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double max_increase = 0.0;
  for (size_t i = 1; i < rates.size(); i++)
    max_increase = std::max(max_increase, rates[i] - rates[i - 1]);
  Emit(c.out, csv.str(), out);
  if (!c.json_path.empty())
  {
    json j = {{"schema", 1},
              {"config", ConfigJson(c, "nsweep")},
              {"top_level", last},
              {"entries", entries},
              {"max_increase", max_increase},
              {"nonincreasing_within_0_03", max_increase <= 0.03}};
    if (!c.no_timing)
      j["wall_seconds"] = wall;
    Emit(c.json_path, j.dump(2) + "\n", out);
  }
  err << "nsweep: " << modes.size() << " modes at top level " << last
      << ", largest increase between consecutive modes " << Num(max_increase, "%.4f") << "\n";
  return kPass;
}

bool HasFlag(const std::vector<std::string> &args, const std::string &key)
{
  const std::string flag = "--" + key;
  for (const std::string &a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0)
      return true;
  return false;
}

}  // namespace

std::vector<std::string> MergeConfigFile(const std::vector<std::string> &args)
{
  std::string path;
  for (size_t i = 0; i < args.size(); i++)
  {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty())
    return args;
  std::ifstream f(path);
  if (!f)
    throw UsageError("cannot read config file " + path);
  std::vector<std::string> merged = args;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line))
  {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config")
      continue;
    if (!HasFlag(args, key))
      merged.push_back("--" + key + "=" + value);
  }
  return merged;
}

int RunCli(const std::vector<std::string> &raw, std::ostream &out, std::ostream &err)
{
  RunConfig c;
  CLI::App app{"Fourier finite element de Rham complex: solves, convergence studies and "
               "verification suites"};
  app.name("ffem");
  app.require_subcommand(1);

  auto common = [&c](CLI::App *s)
  {
    s->add_option("--config", c.config, "key=value file; explicit flags take precedence");
    s->add_option("--seed", c.seed, "seed for randomized checks")->capture_default_str();
    s->add_option("--threads", c.threads, "worker threads for element-parallel sections")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    s->add_option("--json", c.json_path, "JSON summary path ('-' for standard output)");
  };
  auto solver_flags = [&c](CLI::App *s)
  {
    s->add_option("--method", c.method, "direct | schur_cg")
        ->check(CLI::IsMember({"direct", "schur_cg"}))
        ->capture_default_str();
    s->add_option("--tol", c.tol, "outer relative residual (schur_cg)")->capture_default_str();
    s->add_option("--inner-tol", c.inner_tol, "mass solves inside the Schur operator")
        ->capture_default_str();
    s->add_option("--max-iter", c.max_iterations, "iteration cap")->capture_default_str();
    s->add_flag("--no-timing", c.no_timing, "omit wall times from the JSON summary");
  };

  CLI::App *solve = app.add_subcommand("solve", "convergence study of a manufactured case");
  solve->add_option("--k", c.k, "form degree 0..3")->check(CLI::Range(0, 3))->capture_default_str();
  solve->add_option("--n", c.n, "Fourier mode")->check(CLI::Range(1, 1000))->capture_default_str();
  solve->add_option("--levels", c.levels, "mesh levels a:b, h = 2^-level")->capture_default_str();
  solve->add_option("--field", c.field,
                    "manufactured case: default | bubble (k=2) | r_half | r_two_thirds | "
                    "r_five_sixths | r_sin_z (k=0)")
      ->capture_default_str();
  solve->add_option("--out", c.out, "CSV path (default standard output)");
  common(solve);
  solver_flags(solve);

  CLI::App *verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", c.suite, "exactness | commuting | adjoint | inverse-ineq | projection")
      ->required();
  verify->add_option("--levels", c.levels, "level range a:b (suite default when omitted)");
  verify->add_option("--modes", c.modes, "Fourier modes, e.g. 1,2,3 (default 1,2,3)");
  verify->add_option("--delta", c.delta, "smoothing parameter")->capture_default_str();
  verify->add_option("--eta-degree", c.eta_degree, "degree of eta")->capture_default_str();
  common(verify);

  CLI::App *nsweep = app.add_subcommand("nsweep", "sigma rate over Fourier modes, k = 1");
  nsweep->add_option("--levels", c.levels, "a:b; b is the top level (>= 3)")->capture_default_str();
  nsweep->add_option("--modes", c.modes, "modes, e.g. 2:60:2 (default) or 2,10,20")
      ->capture_default_str();
  nsweep->add_option("--out", c.out, "CSV path (default standard output)");
  common(nsweep);
  solver_flags(nsweep);

  try
  {
    std::vector<std::string> args = MergeConfigFile(raw);
    if (args.size() >= 2 && (args[1] == "verify"))
    {
      // Verify uses suite defaults unless levels are given.
      if (!HasFlag(args, "levels"))
        c.levels.clear();
    }
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return kPass;
  }
  catch (const CLI::CallForAllHelp &)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  }
  catch (const CLI::ParseError &e)
  {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  catch (const UsageError &e)
  {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try
  {
    SetThreadCount(c.threads);
    if (solve->parsed())
      return CmdSolve(c, out, err);
    if (verify->parsed())
      return CmdVerify(c, out, err);
    return CmdNsweep(c, out, err);
  }
  catch (const UsageError &e)
  {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  catch (const SolverError &e)
  {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFail;
  }
  catch (const std::invalid_argument &e)
  {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << "\n";
    return kSolverFail;
  }
}

}  // namespace ffem::cli
