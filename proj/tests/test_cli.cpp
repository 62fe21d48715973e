// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using ffem::cli::RunCli;

namespace
{
struct CliRun
{
  int code = 0;
  std::string out, err;
};

CliRun Call(std::vector<std::string> args)
{
  args.insert(args.begin(), "ffem");
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> Lines(const std::string &s)
{
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);)
    v.push_back(line);
  return v;
}

std::string TempPath(const std::string &name)
{
  return (std::filesystem::temp_directory_path() / ("ffem_test_" + name)).string();
}
}  // namespace

TEST(Cli, UsageErrors)
{
  EXPECT_EQ(Call({}).code, 2);
  EXPECT_EQ(Call({"solve", "--k", "9"}).code, 2);
  EXPECT_EQ(Call({"solve", "--bogus"}).code, 2);
  EXPECT_EQ(Call({"solve", "--levels", "3:1"}).code, 2);
  EXPECT_EQ(Call({"nsweep", "--levels", "1:2"}).code, 2);
  EXPECT_EQ(Call({"verify", "--suite", "nonexistent"}).code, 2);
  EXPECT_EQ(Call({"solve", "--method", "gmres"}).code, 2);
  EXPECT_EQ(Call({"solve", "--threads", "0"}).code, 2);
}

TEST(Cli, SolveCsv)
{
  const CliRun r = Call({"solve", "--k", "3", "--levels", "1:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "level,err_u,rate_u,err_sigma,rate_sigma");
  EXPECT_EQ(lines[1].rfind("1,", 0), 0u);
  EXPECT_NE(lines[1].find(",,"), std::string::npos);
  EXPECT_EQ(std::count(lines[3].begin(), lines[3].end(), ','), 4);
}

TEST(Cli, ScalarCaseLeavesSigmaBlank)
{
  const CliRun r = Call({"solve", "--k", "0", "--field", "r_sin_z", "--levels", "1:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2].substr(lines[2].size() - 2), ",,");
}

TEST(Cli, SolveJsonDeterministic)
{
  const std::vector<std::string> args = {"solve", "--k", "2", "--n", "3", "--levels", "1:2", "--no-timing",
                                         "--json", "-"};
  const CliRun a = Call(args), b = Call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, VerifyJson)
{
  const std::string path = TempPath("verify.json");
  const CliRun r = Call({"verify", "--suite", "exactness", "--levels", "1:2", "--json", path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path);
  const nlohmann::json j = nlohmann::json::parse(f);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["suite"], "exactness");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_FALSE(j["checks"].empty());
  EXPECT_EQ(j["config"]["levels"], "1:2");
  std::remove(path.c_str());
}

TEST(Cli, ConfigFilePrecedence)
{
  const std::string cfg = TempPath("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# comment\nmethod = schur_cg\nk=1\ninner_tol=1e-13  # trailing\n";
  }
  const std::string json = TempPath("run.json");
  const CliRun r = Call({"solve", "--config", cfg, "--k", "3", "--levels", "1:2", "--no-timing",
                      "--json", json});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(json);
  const nlohmann::json j = nlohmann::json::parse(f);
  EXPECT_EQ(j["config"]["k"], 3);
  EXPECT_EQ(j["config"]["method"], "schur_cg");
  EXPECT_DOUBLE_EQ(j["config"]["inner_tol"].get<double>(), 1e-13);
  std::remove(cfg.c_str());
  std::remove(json.c_str());
}

TEST(Cli, MalformedConfigIsUsageError)
{
  const std::string cfg = TempPath("bad.cfg");
  {
    std::ofstream f(cfg);
    f << "this line has no equals sign\n";
  }
  EXPECT_EQ(Call({"solve", "--config", cfg}).code, 2);
  std::remove(cfg.c_str());
}

TEST(Cli, SolverFailureExitCode)
{
  const CliRun r = Call({"solve", "--k", "3", "--levels", "3:3", "--method", "schur_cg",
                      "--max-iter", "1"});
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, HelpSucceeds)
{
  const CliRun r = Call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}
