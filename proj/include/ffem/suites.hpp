// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_SUITES_HPP
#define FFEM_SUITES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ffem/projlab.hpp"
#include "ffem/solver.hpp"

namespace ffem
{

struct SuiteOptions
{
  int first_level = -1;  // -1 keeps the suite default
  int last_level = -1;
  std::vector<int> modes = {1, 2, 3};
  std::uint64_t seed = 42;
  double delta = 0.1;
  int eta_degree = 1;
  int inverse_degree = 2;
  int inverse_samples = 200;
};

struct SuiteReport
{
  std::string suite;
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  bool Pass() const;
  int Failures() const;
  // value <= threshold
  CheckRecord &AddAtMost(const std::string &name, double value, double threshold,
                         const std::string &note = "");
  // value >= threshold
  CheckRecord &AddAtLeast(const std::string &name, double value, double threshold,
                          const std::string &note = "");
  // lo <= value <= hi; threshold records the centre
  CheckRecord &AddBand(const std::string &name, double value, double lo, double hi,
                       const std::string &note = "");
  CheckRecord &AddEqual(const std::string &name, double value, double expected,
                        const std::string &note = "");
  void Metric(const std::string &name, double value) { metrics.emplace_back(name, value); }
  const CheckRecord *Find(const std::string &name) const;

  // {"schema": 1, "suite", "pass", "checks": [...], "metrics": {...}, "notes": [...]}
  nlohmann::json ToJson() const;
};

const std::vector<std::string> &SuiteNames();
SuiteReport RunSuite(const std::string &name, const SuiteOptions &opts = {});

// C G = 0 and D C = 0 (levels 1-5), ranks on levels 1-2, discrete Poincare constants on
// levels 1-4.
SuiteReport RunExactnessSuite(const SuiteOptions &opts = {});
// D_k I_k u = I_{k+1} d u on a seeded smooth field suite, levels 1-4.
SuiteReport RunCommutingSuite(const SuiteOptions &opts = {});
// (d u, v)_r = (u, delta v)_r with v vanishing on Gamma_1, three pairs per k, level 3.
SuiteReport RunAdjointSuite(const SuiteOptions &opts = {});
// Drift of the inverse-inequality ratio maxima over levels 2-5.
SuiteReport RunInverseSuite(const SuiteOptions &opts = {});
// Smoothed projections: moments, commutation, projector identities, norms of J,
// delta scaling and level stability (levels 2-4).
SuiteReport RunProjectionSuite(const SuiteOptions &opts = {});

// max/min of positive values.
double Drift(const std::vector<double> &values);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(const std::vector<double> &x, const std::vector<double> &y);

// ||sigma_h||_V + ||u_h||_V for the mixed problem with right-hand side f per level.
std::vector<double> StabilityProxy(int k, int n, const AnalyticField &f, int first, int last,
                                   const SolverOptions &opts = {});

}  // namespace ffem

#endif  // FFEM_SUITES_HPP
