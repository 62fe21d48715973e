// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_SOLVER_HPP
#define FFEM_SOLVER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ffem/assembly.hpp"
#include "ffem/mms.hpp"

namespace ffem
{

enum class SolveMethod
{
  Direct,
  SchurCg
};

SolveMethod ParseSolveMethod(const std::string &name);
const char *SolveMethodName(SolveMethod m);

struct SolverOptions
{
  SolveMethod method = SolveMethod::Direct;
  double tol = 1e-10;        // outer relative residual
  double inner_tol = 1e-12;  // mass solves inside the Schur operator
  int max_iterations = 50000;
  int mass_degree = 6;
  int load_degree = 10;
};

struct SolveStats
{
  std::string method;
  int outer_iterations = 0;
  long inner_iterations = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
  int dofs = 0;
};

// Solver failure (non-convergence or singular system).
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Blocks of the mixed Hodge Laplacian at form degree k in 1..3:
//   M_{k-1} sigma - B^T u = 0,   B sigma + S u = F,
// with B = M_k D_{k-1} and S = D_k^T M_{k+1} D_k (S = 0 for k = 3).
struct MixedSystem
{
  int k = 1;
  int n = 1;
  SpaceHandle sigma_space;
  SpaceHandle u_space;
  SparseMatrix mass_sigma;  // M_{k-1}
  SparseMatrix mass_u;      // M_k
  SparseMatrix mass_next;   // M_{k+1}, empty for k = 3
  SparseMatrix d_sigma;     // D_{k-1}
  SparseMatrix d_u;         // D_k, empty for k = 3
  SparseMatrix b;
  SparseMatrix stiffness;
  Eigen::VectorXd load;

  // Symmetric form [M, -B^T; -B, -S].
  SparseMatrix Symmetrized() const;
  double SymmetryError() const;
  // Residuals of the two equations relative to max(|F|, 1).
  std::array<double, 2> EquationResiduals(const Eigen::VectorXd &sigma,
                                          const Eigen::VectorXd &u) const;
};

MixedSystem BuildMixedSystem(std::shared_ptr<const Mesh> mesh, int k, int n,
                             const AnalyticField &f, const SolverOptions &opts = {});

struct MixedSolution
{
  Field sigma;
  Field u;
  SolveStats stats;
};

MixedSolution SolveMixed(const MixedSystem &sys, const SolverOptions &opts = {});
MixedSolution SolveMixed(std::shared_ptr<const Mesh> mesh, int k, int n, const AnalyticField &f,
                         const SolverOptions &opts = {});

// Counts of positive, negative and near-zero eigenvalues of the symmetrized saddle
// matrix (dense; coarse meshes only).
struct Inertia
{
  int positive = 0;
  int negative = 0;
  int zero = 0;
};
Inertia SaddleInertia(const MixedSystem &sys, double zero_tol = 1e-12);

struct ScalarSolution
{
  Field u;
  SolveStats stats;
};

// Primal k = 0 problem G^T M_1 G u = (f, v)_r.
ScalarSolution SolveK0(std::shared_ptr<const Mesh> mesh, int n, const AnalyticField &f,
                       const SolverOptions &opts = {});

// Gradient projection: (grad Q u, grad v)_r = (grad u, grad v)_r; the right-hand side
// uses a degree `rhs_degree` rule on the closed-form gradient of u.
ScalarSolution QhProjection(std::shared_ptr<const Mesh> mesh, int n, const AnalyticField &u,
                            const SolverOptions &opts = {}, int rhs_degree = 12);

// Preconditioned CG with a diagonal preconditioner for an operator given as a callback.
struct CgResult
{
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};
CgResult JacobiCg(const std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &)> &apply,
                  const Eigen::VectorXd &inv_diag, const Eigen::VectorXd &rhs, Eigen::VectorXd &x,
                  double tol, int max_iterations);

struct ConvergenceRow
{
  int level = 0;
  double err_u = 0.0;
  std::optional<double> rate_u;
  std::optional<double> err_sigma;
  std::optional<double> rate_sigma;
  SolveStats stats;
};

// Errors in L^2_r on GenerateUnitSquare(level) for level in [first, last]; k = 0 runs
// the gradient projection of u.
std::vector<ConvergenceRow> ConvergenceStudy(const ManufacturedCase &mc, int first, int last,
                                             const SolverOptions &opts = {});

// Rate log2(|s_{l-1} - s_{l-2}| / |s_l - s_{l-1}|) of consecutive sigma differences at
// level `top` for the k = 1 problem with f = (0, r, 0).
struct SweepEntry
{
  int n = 0;
  double diff_coarse = 0.0;
  double diff_fine = 0.0;
  double rate = 0.0;
};
SweepEntry ConsecutiveRate(int n, int top, const SolverOptions &opts = {});

}  // namespace ffem

#endif  // FFEM_SOLVER_HPP
