// SPDX-License-Identifier: Apache-2.0

#include "ffem/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "ffem/interp.hpp"
#include "ffem/quadrature.hpp"

namespace ffem
{

namespace
{

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd InverseDiagonal(const SparseMatrix &a)
{
  Eigen::VectorXd d = a.diagonal();
  for (int i = 0; i < d.size(); i++)
  {
    d[i] = (d[i] != 0.0) ? 1.0 / d[i] : 1.0;
  }
  return d;
}

SparseMatrix Stack(const SparseMatrix &a11, const SparseMatrix &a12, const SparseMatrix &a21,
                   const SparseMatrix &a22)
{
  const int n1 = a11.rows(), n2 = a21.rows();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a11.nonZeros() + a12.nonZeros() + a21.nonZeros() + a22.nonZeros());
  auto add = [&](const SparseMatrix &m, int r0, int c0)
  {
    for (int j = 0; j < m.outerSize(); j++)
    {
      for (SparseMatrix::InnerIterator it(m, j); it; ++it)
      {
        trip.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      }
    }
  };
  add(a11, 0, 0);
  add(a12, 0, n1);
  add(a21, n1, 0);
  if (a22.size() > 0)
  {
    add(a22, n1, n1);
  }
  SparseMatrix s(n1 + n2, n1 + n2);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

// Weighted load (g, d(phi_i))_r for a vector field g and the derivative images of the
// basis of `space`.
Eigen::VectorXd DerivativeLoad(const SpaceHandle &space, const AnalyticField &g, int degree)
{
  const Mesh &mesh = space.GetMesh();
  const int nc = NumComponents(NextSpace(space).Kind());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.DofCount());
  const QuadRule &ref = TriangleRule(degree);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const LocalBasis basis = BuildLocalBasis(space, t);
    const QuadRule rule =
        MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    space.LocalDofs(t, idx, sgn);
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      const Vec3 gv = g.value(p[0], p[1]);
      const BasisValues bv = EvalBasis(basis, p, true);
      const double w = rule.weights[q] * p[0];
      for (int i = 0; i < basis.size; i++)
      {
        double dot = 0.0;
        for (int c = 0; c < nc; c++)
        {
          dot += gv[c] * bv.dphys[i][c];
        }
        b[idx[i]] += sgn[i] * w * dot;
      }
    }
  }
  return b;
}

ScalarSolution SolveGradSystem(const SpaceHandle &space, const Eigen::VectorXd &rhs,
                               const SolverOptions &opts, Clock::time_point t0)
{
  const SparseMatrix g = DerivativeMatrix(space).mat;
  const SparseMatrix m1 = MassMatrix(NextSpace(space), opts.mass_degree).mat;
  const SparseMatrix k = SparseMatrix(g.transpose() * m1 * g);
  ScalarSolution out{Field(space), {}};
  out.stats.dofs = space.DofCount();
  out.stats.method = SolveMethodName(opts.method);
  if (opts.method == SolveMethod::Direct)
  {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
    if (ldlt.info() != Eigen::Success)
    {
      throw SolverError("factorization of the k=0 stiffness matrix failed");
    }
    out.u.coeffs = ldlt.solve(rhs);
  }
  else
  {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    const CgResult cg = JacobiCg([&](const Eigen::VectorXd &v, Eigen::VectorXd &y) { y = k * v; },
                                 InverseDiagonal(k), rhs, x, opts.tol, opts.max_iterations);
    if (!cg.converged)
    {
      throw SolverError("CG did not converge for the k=0 problem (residual " +
                        std::to_string(cg.relative_residual) + ")");
    }
    out.stats.outer_iterations = cg.iterations;
    out.u.coeffs = x;
  }
  const double fn = std::max(rhs.norm(), 1e-300);
  out.stats.relative_residual = (k * out.u.coeffs - rhs).norm() / fn;
  out.stats.seconds = Seconds(t0);
  return out;
}

}  // namespace

SolveMethod ParseSolveMethod(const std::string &name)
{
  if (name == "direct")
    return SolveMethod::Direct;
  if (name == "schur_cg")
    return SolveMethod::SchurCg;
  throw std::invalid_argument("unknown solver method '" + name + "'");
}

const char *SolveMethodName(SolveMethod m)
{
  return m == SolveMethod::Direct ? "direct" : "schur_cg";
}

CgResult JacobiCg(const std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &)> &apply,
                  const Eigen::VectorXd &inv_diag, const Eigen::VectorXd &rhs, Eigen::VectorXd &x,
                  double tol, int max_iterations)
{
  CgResult res;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0)
  {
    x.setZero();
    res.converged = true;
    return res;
  }
  Eigen::VectorXd ax(rhs.size());
  apply(x, ax);
  Eigen::VectorXd r = rhs - ax;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(rhs.size());
  double rz = r.dot(z);
  res.relative_residual = r.norm() / bnorm;
  while (res.relative_residual > tol && res.iterations < max_iterations)
  {
    apply(p, ap);
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    res.iterations++;
    res.relative_residual = r.norm() / bnorm;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.converged = res.relative_residual <= tol;
  return res;
}

SparseMatrix MixedSystem::Symmetrized() const
{
  SparseMatrix bt = b.transpose();
  SparseMatrix s = (stiffness.size() > 0) ? SparseMatrix(-stiffness) : SparseMatrix();
  return Stack(mass_sigma, -bt, -b, s);
}

double MixedSystem::SymmetryError() const
{
  const SparseMatrix a = Symmetrized();
  const SparseMatrix diff = a - SparseMatrix(a.transpose());
  double m = 0.0;
  for (int j = 0; j < diff.outerSize(); j++)
  {
    for (SparseMatrix::InnerIterator it(diff, j); it; ++it)
    {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

std::array<double, 2> MixedSystem::EquationResiduals(const Eigen::VectorXd &sigma,
                                                     const Eigen::VectorXd &u) const
{
  const double scale = std::max(load.norm(), 1.0);
  Eigen::VectorXd r2 = b * sigma - load;
  if (stiffness.size() > 0)
  {
    r2 += stiffness * u;
  }
  return {(mass_sigma * sigma - b.transpose() * u).norm() / scale, r2.norm() / scale};
}

MixedSystem BuildMixedSystem(std::shared_ptr<const Mesh> mesh, int k, int n,
                             const AnalyticField &f, const SolverOptions &opts)
{
  if (k < 1 || k > 3)
  {
    throw std::invalid_argument("mixed system needs k in 1..3");
  }
  MixedSystem sys;
  sys.k = k;
  sys.n = n;
  sys.sigma_space = BuildSpace(mesh, KindOfDegree(k - 1), n);
  sys.u_space = NextSpace(sys.sigma_space);
  sys.mass_sigma = MassMatrix(sys.sigma_space, opts.mass_degree).mat;
  sys.mass_u = MassMatrix(sys.u_space, opts.mass_degree).mat;
  sys.d_sigma = DerivativeMatrix(sys.sigma_space).mat;
  sys.b = sys.mass_u * sys.d_sigma;
  if (k < 3)
  {
    const SpaceHandle next = NextSpace(sys.u_space);
    sys.mass_next = MassMatrix(next, opts.mass_degree).mat;
    sys.d_u = DerivativeMatrix(sys.u_space).mat;
    sys.stiffness = SparseMatrix(sys.d_u.transpose() * sys.mass_next * sys.d_u);
  }
  sys.load = LoadVector(sys.u_space, f, opts.load_degree);
  return sys;
}

MixedSolution SolveMixed(const MixedSystem &sys, const SolverOptions &opts)
{
  const auto t0 = Clock::now();
  const int ns = sys.sigma_space.DofCount(), nu = sys.u_space.DofCount();
  MixedSolution out{Field(sys.sigma_space), Field(sys.u_space), {}};
  out.stats.method = SolveMethodName(opts.method);
  out.stats.dofs = ns + nu;
  if (opts.method == SolveMethod::Direct)
  {
    const SparseMatrix a = sys.Symmetrized();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ns + nu);
    rhs.tail(nu) = -sys.load;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success)
    {
      throw SolverError("saddle-point factorization failed: " + lu.lastErrorMessage());
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    out.sigma.coeffs = x.head(ns);
    out.u.coeffs = x.tail(nu);
  }
  else
  {
    const Eigen::VectorXd minv = InverseDiagonal(sys.mass_sigma);
    long inner = 0;
    auto mass_solve = [&](const Eigen::VectorXd &rhs, Eigen::VectorXd &x)
    {
      x = Eigen::VectorXd::Zero(ns);
      const CgResult r = JacobiCg([&](const Eigen::VectorXd &v, Eigen::VectorXd &y)
                                  { y = sys.mass_sigma * v; },
                                  minv, rhs, x, opts.inner_tol, opts.max_iterations);
      if (!r.converged)
      {
        throw SolverError("inner mass CG did not converge (residual " +
                          std::to_string(r.relative_residual) + ")");
      }
      inner += r.iterations;
    };
    const SparseMatrix bt = sys.b.transpose();
    auto schur = [&](const Eigen::VectorXd &v, Eigen::VectorXd &y)
    {
      Eigen::VectorXd s;
      mass_solve(bt * v, s);
      y = sys.b * s;
      if (sys.stiffness.size() > 0)
      {
        y += sys.stiffness * v;
      }
    };
    // Jacobi preconditioner from diag(B diag(M)^{-1} B^T + S).
    Eigen::VectorXd pdiag = Eigen::VectorXd::Zero(nu);
    for (int j = 0; j < sys.b.outerSize(); j++)
    {
      for (SparseMatrix::InnerIterator it(sys.b, j); it; ++it)
      {
        pdiag[it.row()] += it.value() * it.value() * minv[it.col()];
      }
    }
    if (sys.stiffness.size() > 0)
    {
      pdiag += sys.stiffness.diagonal();
    }
    for (int i = 0; i < nu; i++)
    {
      pdiag[i] = pdiag[i] > 0.0 ? 1.0 / pdiag[i] : 1.0;
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
    const CgResult outer = JacobiCg(schur, pdiag, sys.load, u, opts.tol, opts.max_iterations);
    if (!outer.converged)
    {
      throw SolverError("outer Schur CG did not converge (residual " +
                        std::to_string(outer.relative_residual) + ")");
    }
    Eigen::VectorXd sigma;
    mass_solve(bt * u, sigma);
    out.sigma.coeffs = sigma;
    out.u.coeffs = u;
    out.stats.outer_iterations = outer.iterations;
    out.stats.inner_iterations = inner;
  }
  const auto res = sys.EquationResiduals(out.sigma.coeffs, out.u.coeffs);
  out.stats.relative_residual = std::max(res[0], res[1]);
  out.stats.seconds = Seconds(t0);
  return out;
}

MixedSolution SolveMixed(std::shared_ptr<const Mesh> mesh, int k, int n, const AnalyticField &f,
                         const SolverOptions &opts)
{
  return SolveMixed(BuildMixedSystem(std::move(mesh), k, n, f, opts), opts);
}

Inertia SaddleInertia(const MixedSystem &sys, double zero_tol)
{
  const Eigen::MatrixXd a = Eigen::MatrixXd(sys.Symmetrized());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Inertia in;
  for (int i = 0; i < ev.size(); i++)
  {
    if (std::abs(ev[i]) <= zero_tol * scale)
      in.zero++;
    else if (ev[i] > 0)
      in.positive++;
    else
      in.negative++;
  }
  return in;
}

ScalarSolution SolveK0(std::shared_ptr<const Mesh> mesh, int n, const AnalyticField &f,
                       const SolverOptions &opts)
{
  const auto t0 = Clock::now();
  const SpaceHandle a = BuildSpace(std::move(mesh), SpaceKind::A, n);
  return SolveGradSystem(a, LoadVector(a, f, opts.load_degree), opts, t0);
}

ScalarSolution QhProjection(std::shared_ptr<const Mesh> mesh, int n, const AnalyticField &u,
                            const SolverOptions &opts, int rhs_degree)
{
  const auto t0 = Clock::now();
  const SpaceHandle a = BuildSpace(std::move(mesh), SpaceKind::A, n);
  const AnalyticField g = ApplyContinuousOperator(ContinuousOp::Grad, n, u);
  return SolveGradSystem(a, DerivativeLoad(a, g, rhs_degree), opts, t0);
}

std::vector<ConvergenceRow> ConvergenceStudy(const ManufacturedCase &mc, int first, int last,
                                             const SolverOptions &opts)
{
  if (first < 1 || last < first)
  {
    throw std::invalid_argument("levels must be increasing and start at 1 or above");
  }
  std::vector<ConvergenceRow> rows;
  const int err_degree = (mc.k == 0) ? 12 : 10;
  for (int level = first; level <= last; level++)
  {
    auto mesh = std::make_shared<const Mesh>(GenerateUnitSquare(level));
    ConvergenceRow row;
    row.level = level;
    if (mc.k == 0)
    {
      const ScalarSolution sol = QhProjection(mesh, mc.n, mc.u, opts);
      row.err_u = L2rError(sol.u, mc.u, err_degree);
      row.stats = sol.stats;
    }
    else
    {
      const MixedSolution sol = SolveMixed(mesh, mc.k, mc.n, mc.f, opts);
      row.err_u = L2rError(sol.u, mc.u, err_degree);
      row.err_sigma = L2rError(sol.sigma, mc.sigma, err_degree);
      row.stats = sol.stats;
    }
    if (!rows.empty())
    {
      const ConvergenceRow &prev = rows.back();
      row.rate_u = std::log2(prev.err_u / row.err_u);
      if (row.err_sigma && prev.err_sigma)
      {
        row.rate_sigma = std::log2(*prev.err_sigma / *row.err_sigma);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

SweepEntry ConsecutiveRate(int n, int top, const SolverOptions &opts)
{
  if (top < 3)
  {
    throw std::invalid_argument("consecutive-difference rate needs a top level of at least 3");
  }
  const AnalyticField f = SweepRhs();
  std::vector<Field> sig;
  for (int level = top - 2; level <= top; level++)
  {
    auto mesh = std::make_shared<const Mesh>(GenerateUnitSquare(level));
    sig.push_back(SolveMixed(mesh, 1, n, f, opts).sigma);
  }
  SweepEntry e;
  e.n = n;
  e.diff_coarse = L2rDifference(sig[1], sig[0]);
  e.diff_fine = L2rDifference(sig[2], sig[1]);
  e.rate = std::log2(e.diff_coarse / e.diff_fine);
  return e;
}

}  // namespace ffem
