// SPDX-License-Identifier: Apache-2.0

#include "ffem/suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ffem/interp.hpp"

namespace ffem
{

namespace
{

const SpaceKind kKinds[4] = {SpaceKind::A, SpaceKind::B, SpaceKind::C, SpaceKind::D};

std::string Tag(const std::string &base, int level, int n)
{
  std::ostringstream os;
  os << base << "_L" << level << "_n" << n;
  return os.str();
}

int Pick(int value, int fallback) { return value >= 0 ? value : fallback; }

std::shared_ptr<const Mesh> Square(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}

int NumericalRank(const Eigen::MatrixXd &a)
{
  if (a.size() == 0)
    return 0;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto &s = svd.singularValues();
  const double tol = 1e-10 * s[0] * std::max(a.rows(), a.cols());
  int rank = 0;
  for (int i = 0; i < s.size(); i++)
    rank += s[i] > tol;
  return rank;
}

// Physical field from jets of its components.
AnalyticField JetField(int components, std::array<JetFn, 3> fns)
{
  AnalyticField f;
  f.components = components;
  auto eval = [fns, components](double r, double z)
  {
    std::array<Jet, 3> out{};
    for (int c = 0; c < components; c++)
      out[c] = fns[c](Jet::VarR(r), Jet::VarZ(z));
    return out;
  };
  f.value = [eval](double r, double z)
  {
    const auto j = eval(r, z);
    return Vec3{j[0].v, j[1].v, j[2].v};
  };
  f.partials = [eval](double r, double z)
  {
    const auto j = eval(r, z);
    return std::array<Vec3, 2>{Vec3{j[0].r, j[1].r, j[2].r}, Vec3{j[0].z, j[1].z, j[2].z}};
  };
  return f;
}

Jet Bump(const Jet &r, const Jet &z)
{
  const Jet b = (1.0 - r) * z * (1.0 - z);
  return b * b;
}

SmoothForm FormFromPotentials(SpaceKind kind, int n, std::array<JetFn, 3> pot)
{
  SmoothForm f;
  f.kind = kind;
  f.n = n;
  f.pot = std::move(pot);
  return f;
}

// Seeded smooth field suite in regular variables.
std::vector<SmoothForm> CommutingFields(SpaceKind kind, int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  double c[9];
  for (double &x : c)
    x = amp(rng);
  std::vector<SmoothForm> out;
  out.push_back(FormFromPotentials(
      kind, n,
      {[a = c[0]](const Jet &r, const Jet &z) { return a * r * z * z; },
       [a = c[1]](const Jet &r, const Jet &z) { return a * r * r * z; },
       [a = c[2]](const Jet &, const Jet &z) { return a * z * z * z; }}));
  out.push_back(FormFromPotentials(
      kind, n,
      {[a = c[3]](const Jet &r, const Jet &z) { return a * r * sin(z); },
       [a = c[4]](const Jet &r, const Jet &z) { return cos(a * r) * z; },
       [a = c[5]](const Jet &r, const Jet &z) { return r * exp(a * z); }}));
  out.push_back(FormFromPotentials(
      kind, n,
      {[a = c[6]](const Jet &r, const Jet &z) { return exp(a * z) * r * r; },
       [a = c[7]](const Jet &r, const Jet &z) { return sin(a * r * z); },
       [a = c[8]](const Jet &r, const Jet &z) { return r * exp(-a * z) + z; }}));
  return out;
}

double Norm(const Eigen::MatrixXd &mass, const Eigen::VectorXd &x)
{
  return std::sqrt(std::max(x.dot(mass * x), 0.0));
}

Eigen::VectorXd RandomCoefficients(int size, std::mt19937_64 &rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(size);
  for (int i = 0; i < size; i++)
    x[i] = normal(rng);
  return x;
}

// DOFs whose entity touches Gamma_1.
std::vector<char> BoundaryDofMask(const SpaceHandle &space)
{
  const Mesh &mesh = space.GetMesh();
  std::vector<char> mask(space.DofCount(), 0);
  const SpaceKind kind = space.Kind();
  if (kind == SpaceKind::A || kind == SpaceKind::B)
    for (int v = 0; v < mesh.NumVertices(); v++)
      mask[space.VertexDof(v)] = mesh.vertex_on_gamma1[v];
  if (kind == SpaceKind::B || kind == SpaceKind::C)
    for (int e = 0; e < mesh.NumEdges(); e++)
      mask[space.EdgeDof(e)] =
          mesh.vertex_on_gamma1[mesh.edges[e][0]] || mesh.vertex_on_gamma1[mesh.edges[e][1]];
  if (kind == SpaceKind::C || kind == SpaceKind::D)
    for (int t = 0; t < mesh.NumTriangles(); t++)
    {
      bool b = false;
      for (int i = 0; i < 3; i++)
        b = b || mesh.vertex_on_gamma1[mesh.triangles[t][i]];
      mask[space.TriangleDof(t)] = b;
    }
  return mask;
}

std::array<double, 2> SplitMax(const Eigen::VectorXd &v, const std::vector<char> &mask)
{
  std::array<double, 2> m = {0.0, 0.0};  // interior, boundary
  for (int i = 0; i < v.size(); i++)
  {
    double &slot = mask[i] ? m[1] : m[0];
    slot = std::max(slot, std::abs(v[i]));
  }
  return m;
}

std::string Fmt(double v)
{
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

// -----------------------------------------------------------------------------------------

bool SuiteReport::Pass() const { return Failures() == 0; }

int SuiteReport::Failures() const
{
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const CheckRecord &c) { return !c.pass; }));
}

CheckRecord &SuiteReport::AddAtMost(const std::string &name, double value, double threshold,
                                    const std::string &note)
{
  checks.push_back({name, value, threshold, value <= threshold, note});
  return checks.back();
}

CheckRecord &SuiteReport::AddAtLeast(const std::string &name, double value, double threshold,
                                     const std::string &note)
{
  checks.push_back({name, value, threshold, value >= threshold, note});
  return checks.back();
}

CheckRecord &SuiteReport::AddBand(const std::string &name, double value, double lo, double hi,
                                  const std::string &note)
{
  std::string n = "within [" + Fmt(lo) + ", " + Fmt(hi) + "]";
  if (!note.empty())
    n += "; " + note;
  checks.push_back({name, value, 0.5 * (lo + hi), value >= lo && value <= hi, n});
  return checks.back();
}

CheckRecord &SuiteReport::AddEqual(const std::string &name, double value, double expected,
                                   const std::string &note)
{
  checks.push_back({name, value, expected, value == expected, note.empty() ? "exact" : note});
  return checks.back();
}

const CheckRecord *SuiteReport::Find(const std::string &name) const
{
  for (const CheckRecord &c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

nlohmann::json SuiteReport::ToJson() const
{
  nlohmann::json j;
  j["schema"] = 1;
  j["suite"] = suite;
  j["pass"] = Pass();
  j["failures"] = Failures();
  j["checks"] = nlohmann::json::array();
  for (const CheckRecord &c : checks)
  {
    nlohmann::json e = {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                        {"pass", c.pass}};
    if (!c.note.empty())
      e["note"] = c.note;
    j["checks"].push_back(e);
  }
  j["metrics"] = nlohmann::json::object();
  for (const auto &[k, v] : metrics)
    j["metrics"][k] = v;
  j["notes"] = notes;
  return j;
}

const std::vector<std::string> &SuiteNames()
{
  static const std::vector<std::string> names = {"exactness", "commuting", "adjoint",
                                                 "inverse-ineq", "projection"};
  return names;
}

SuiteReport RunSuite(const std::string &name, const SuiteOptions &opts)
{
  if (name == "exactness")
    return RunExactnessSuite(opts);
  if (name == "commuting")
    return RunCommutingSuite(opts);
  if (name == "adjoint")
    return RunAdjointSuite(opts);
  if (name == "inverse-ineq")
    return RunInverseSuite(opts);
  if (name == "projection")
    return RunProjectionSuite(opts);
  throw std::invalid_argument("unknown suite: " + name);
}

double Drift(const std::vector<double> &values)
{
  if (values.empty())
    return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0))
    return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

double LogLogSlope(const std::vector<double> &x, const std::vector<double> &y)
{
  const int m = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; i++)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SuiteReport RunExactnessSuite(const SuiteOptions &opts)
{
  SuiteReport rep;
  rep.suite = "exactness";
  const int first = Pick(opts.first_level, 1), last = Pick(opts.last_level, 5);
  for (int level = first; level <= last; level++)
  {
    const auto mesh = Square(level);
    for (int n : opts.modes)
    {
      const SpaceHandle a(mesh, SpaceKind::A, n), b(mesh, SpaceKind::B, n),
          c(mesh, SpaceKind::C, n);
      const SparseMatrix g = DerivativeMatrix(a).mat;
      const SparseMatrix cu = DerivativeMatrix(b).mat;
      const SparseMatrix dv = DerivativeMatrix(c).mat;
      const SparseMatrix cg = cu * g, dc = dv * cu;
      auto max_abs = [](const SparseMatrix &m)
      {
        double s = 0.0;
        for (int j = 0; j < m.outerSize(); j++)
          for (SparseMatrix::InnerIterator it(m, j); it; ++it)
            s = std::max(s, std::abs(it.value()));
        return s;
      };
      rep.AddAtMost(Tag("curl_grad_zero", level, n), max_abs(cg), 1e-12);
      rep.AddAtMost(Tag("div_curl_zero", level, n), max_abs(dc), 1e-12);
      if (level <= 2)
      {
        const Eigen::MatrixXd gd(g), cd(cu), dd(dv);
        const int dof_a = a.DofCount(), dof_b = b.DofCount(),
                  dof_d = SpaceHandle(mesh, SpaceKind::D, n).DofCount();
        const int rank_g = NumericalRank(gd), rank_c = NumericalRank(cd),
                  rank_d = NumericalRank(dd);
        rep.AddEqual(Tag("rank_G_eq_dofA", level, n), rank_g, dof_a);
        rep.AddEqual(Tag("null_C_eq_dofA", level, n), dof_b - rank_c, dof_a);
        rep.AddEqual(Tag("rank_C_eq_dofB_minus_dofA", level, n), rank_c, dof_b - dof_a);
        rep.AddEqual(Tag("rank_D_eq_dofD", level, n), rank_d, dof_d);
      }
    }
  }
  // Smallest nonzero singular value of d_k relative to the mass matrices.
  const int p_last = std::min(last, 4);
  if (p_last - first >= 1)
  {
    for (int n : opts.modes)
    {
      for (int k = 0; k < 3; k++)
      {
        std::vector<double> sig;
        for (int level = first; level <= p_last; level++)
        {
          const auto mesh = Square(level);
          const SpaceHandle from(mesh, kKinds[k], n), to(mesh, kKinds[k + 1], n);
          const Eigen::MatrixXd d(DerivativeMatrix(from).mat);
          const Eigen::MatrixXd mf(MassMatrix(from).mat), mt(MassMatrix(to).mat);
          const Eigen::MatrixXd s = d.transpose() * mt * d;
          const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
              s, mf, Eigen::EigenvaluesOnly);
          const auto &ev = eig.eigenvalues();
          const double top = ev.maxCoeff();
          double low = std::numeric_limits<double>::infinity();
          for (int i = 0; i < ev.size(); i++)
            if (ev[i] > 1e-10 * top)
              low = std::min(low, ev[i]);
          sig.push_back(std::sqrt(low));
          rep.Metric(Tag("poincare_k" + std::to_string(k), level, n), sig.back());
        }
        rep.AddAtMost("poincare_drift_k" + std::to_string(k) + "_n" + std::to_string(n),
                      Drift(sig), 1.25,
                      "levels " + std::to_string(first) + "-" + std::to_string(p_last));
      }
    }
  }
  return rep;
}

SuiteReport RunCommutingSuite(const SuiteOptions &opts)
{
  SuiteReport rep;
  rep.suite = "commuting";
  const int first = Pick(opts.first_level, 1), last = Pick(opts.last_level, 4);
  for (int level = first; level <= last; level++)
  {
    const auto mesh = Square(level);
    for (int n : opts.modes)
    {
      for (int k = 0; k < 3; k++)
      {
        const SpaceHandle space(mesh, kKinds[k], n);
        const auto fields = CommutingFields(kKinds[k], n, opts.seed + 17 * k + n);
        for (size_t i = 0; i < fields.size(); i++)
        {
          const double res = CommutingDiagramResidual(space, fields[i]);
          rep.AddAtMost(Tag("k" + std::to_string(k) + "_field" + std::to_string(i), level, n),
                        res, 1e-9);
        }
      }
    }
  }
  return rep;
}

SuiteReport RunAdjointSuite(const SuiteOptions &opts)
{
  SuiteReport rep;
  rep.suite = "adjoint";
  const int level = Pick(opts.first_level, 3);
  const auto mesh = Square(level);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  for (int n : opts.modes)
  {
    for (int k = 0; k < 3; k++)
    {
      const int vc = NumComponents(kKinds[k + 1]);
      for (int pair = 0; pair < 3; pair++)
      {
        const double a = amp(rng), b = amp(rng), c = amp(rng);
        const auto fields = CommutingFields(kKinds[k], n, opts.seed + 31 * pair + 7 * k + n);
        const AnalyticField u = fields[pair].Analytic();
        std::array<JetFn, 3> g;
        switch (pair)
        {
          case 0:
            g = {[a](const Jet &r, const Jet &z) { return a * Bump(r, z); },
                 [b](const Jet &r, const Jet &z) { return b * r * Bump(r, z); },
                 [c](const Jet &r, const Jet &z) { return c * z * Bump(r, z); }};
            break;
          case 1:
            g = {[a](const Jet &r, const Jet &z) { return a * sin(r + z) * Bump(r, z); },
                 [b](const Jet &r, const Jet &z) { return b * Bump(r, z); },
                 [c](const Jet &r, const Jet &z) { return c * r * r * Bump(r, z); }};
            break;
          default:
            g = {[a](const Jet &r, const Jet &z) { return a * r * z * Bump(r, z); },
                 [b](const Jet &r, const Jet &z) { return b * exp(z) * Bump(r, z); },
                 [c](const Jet &r, const Jet &z) { return c * cos(r) * Bump(r, z); }};
            break;
        }
        const AnalyticField v = JetField(vc, g);
        const double res = AdjointCheck(k, n, *mesh, u, v);
        rep.AddAtMost(Tag("k" + std::to_string(k) + "_pair" + std::to_string(pair), level, n),
                      res, 1e-8);
      }
      // Negative control: v with nonzero traces on Gamma_1.
      const AnalyticField u = CommutingFields(kKinds[k], n, opts.seed)[0].Analytic();
      const AnalyticField v = JetField(
          vc, {[](const Jet &r, const Jet &z) { return 1.0 + r * z; },
               [](const Jet &r, const Jet &) { return 1.0 + r; },
               [](const Jet &, const Jet &z) { return 1.0 + z; }});
      rep.AddAtLeast(Tag("k" + std::to_string(k) + "_negative_control", level, n),
                     AdjointCheck(k, n, *mesh, u, v), 1e-4,
                     "traces on Gamma_1 do not vanish; residual must be large");
    }
  }
  return rep;
}

SuiteReport RunInverseSuite(const SuiteOptions &opts)
{
  SuiteReport rep;
  rep.suite = "inverse-ineq";
  const int first = Pick(opts.first_level, 2), last = Pick(opts.last_level, 5);
  std::vector<double> v1, v2, v3, v4;
  for (int level = first; level <= last; level++)
  {
    const Mesh mesh = GenerateUnitSquare(level);
    const InverseRatios r =
        MeasureInverseRatios(mesh, opts.inverse_degree, opts.inverse_samples, opts.seed);
    v1.push_back(r.inv1);
    v2.push_back(r.inv2);
    v3.push_back(r.inv3);
    v4.push_back(r.inv4);
    const std::string l = "_L" + std::to_string(level);
    rep.Metric("inv1_max" + l, r.inv1);
    rep.Metric("inv2_max" + l, r.inv2);
    rep.Metric("inv3_max" + l, r.inv3);
    rep.Metric("inv4_max" + l, r.inv4);
  }
  const std::string span = "levels " + std::to_string(first) + "-" + std::to_string(last);
  rep.AddAtMost("inv1_drift", Drift(v1), 1.5, span);
  rep.AddAtMost("inv2_drift", Drift(v2), 1.5, span);
  rep.AddAtMost("inv3_drift", Drift(v3), 1.5, span);
  rep.AddAtMost("inv4_drift", Drift(v4), 1.5, span);
  rep.AddAtMost("inv3_reference_constant", std::abs(ReferenceInv3ConstantRatio() - 12.0), 1e-12,
                "v = 1 on the unit reference triangle with h_K its diameter gives 12");
  return rep;
}

// Builds the configuration and all four projections, halving delta until the Neumann
// condition holds for every space.
static SmoothingConfig NeumannConfig(std::shared_ptr<const Mesh> mesh, const SuiteOptions &opts,
                              int n, std::vector<ProjectionOperator> &ops, SuiteReport &rep,
                              const std::string &where)
{
  SmoothingOptions so;
  so.delta = opts.delta;
  so.eta_degree = opts.eta_degree;
  for (int attempt = 0;; attempt++)
  {
    SmoothingConfig cfg = BuildSmoothingConfig(mesh, so);
    if (attempt == 0)
    {
      for (const std::string &v : cfg.violations_at_request)
        rep.notes.push_back(where + ": delta " + Fmt(so.delta) + ": " + v);
      if (cfg.halvings > 0)
        rep.notes.push_back(where + ": delta halved " + std::to_string(cfg.halvings) +
                            " time(s) to " + Fmt(cfg.delta) + " by the selection rules");
    }
    ops.clear();
    double worst = 0.0;
    for (SpaceKind kind : kKinds)
    {
      ops.push_back(BuildProjection(SpaceHandle(mesh, kind, n), cfg));
      worst = std::max(worst, ops.back().neumann);
    }
    if (worst < 1.0)
      return cfg;
    rep.notes.push_back(where + ": Neumann condition fails at delta " + Fmt(cfg.delta) +
                        " (|R - I|_M = " + Fmt(worst) + "); halving");
    if (attempt >= 8)
      throw std::runtime_error("Neumann condition not reached by halving delta");
    so.delta = cfg.delta * 0.5;
  }
}

SuiteReport RunProjectionSuite(const SuiteOptions &opts)
{
  SuiteReport rep;
  rep.suite = "projection";
  const int first = Pick(opts.first_level, 2), last = Pick(opts.last_level, 4);
  std::mt19937_64 rng(opts.seed);

  // Per-kind ratio histories for level stability (n = first mode).
  std::array<std::vector<double>, 4> ratio_r, ratio_pi, ratio_rel;

  for (int level = first; level <= last; level++)
  {
    const auto mesh = Square(level);
    const std::vector<int> modes =
        level == first ? opts.modes : std::vector<int>{opts.modes.front()};
    for (int n : modes)
    {
      const std::string where = "L" + std::to_string(level) + " n" + std::to_string(n);
      std::vector<ProjectionOperator> ops;
      const SmoothingConfig cfg = NeumannConfig(mesh, opts, n, ops, rep, where);
      const std::string tail = "_L" + std::to_string(level) + "_n" + std::to_string(n);
      rep.Metric("delta" + tail, cfg.delta);

      if (level == first)
      {
        double moments = 0.0, refined = 0.0, abs_mass = 0.0, cond = 0.0;
        for (const VertexDisk &d : cfg.disks)
        {
          moments = std::max(moments, EtaMomentError(d, cfg.eta_degree));
          refined = std::max(refined, EtaMomentError(d, cfg.eta_degree, true));
          double s = 0.0;
          for (double m : d.mu)
            s += std::abs(m);
          abs_mass = std::max(abs_mass, s);
          cond = std::max(cond, d.gram_condition);
        }
        rep.AddAtMost("eta_moments" + tail, moments, 1e-10, "includes unit mass");
        rep.AddAtMost("eta_moments_refined" + tail, refined, 1e-10, "doubled disk rule");
        rep.Metric("kappa_abs_mass_max" + tail, abs_mass);
        rep.Metric("gram_condition_max" + tail, cond);

        // Reduced and literal vertex DOFs.
        std::uniform_int_distribution<int> pick(0, mesh->NumVertices() - 1);
        double lit = 0.0;
        for (SpaceKind kind : {SpaceKind::A, SpaceKind::B})
        {
          const SpaceHandle space(mesh, kind, n);
          const SmoothForm u = SmoothTestForm(kind, n);
          const Eigen::VectorXd red = SmoothedDofs(space, u, cfg);
          for (int i = 0; i < 5; i++)
          {
            const int v = pick(rng);
            lit = std::max(lit, std::abs(LiteralVertexDof(space, u, cfg, v) -
                                         red[space.VertexDof(v)]));
          }
        }
        rep.AddAtMost("literal_vertex_dof" + tail, lit, 1e-8, "5 random vertices, A and B");

        // w = 1 reproduces unit vertex DOFs.
        {
          const SpaceHandle space(mesh, SpaceKind::A, n);
          SmoothForm one;
          one.kind = SpaceKind::A;
          one.n = n;
          one.pot = {[](const Jet &, const Jet &) { return Jet::Constant(1.0); },
                     [](const Jet &, const Jet &) { return Jet::Constant(0.0); },
                     [](const Jet &, const Jet &) { return Jet::Constant(0.0); }};
          const Eigen::VectorXd d = SmoothedDofs(space, one, cfg);
          rep.AddAtMost("unit_mass_vertex_dof" + tail,
                        (d.array() - 1.0).abs().maxCoeff(), 1e-10);
        }

        for (int k = 0; k < 4; k++)
        {
          const ProjectionOperator &p = ops[k];
          const std::string kt = std::string("_") + KindName(kKinds[k]) + tail;
          const int ndof = p.space.DofCount();
          rep.AddAtMost("J_mass_norm" + kt, p.j_norm, 2.0);
          rep.AddAtMost("neumann" + kt, p.neumann, 1.0 - 1e-12, "|R_h - I|_M < 1");
          rep.AddAtMost("J_inverse" + kt, p.inverse_error, 1e-8);
          const Eigen::VectorXd uh = RandomCoefficients(ndof, rng);
          rep.AddAtMost("reproduction" + kt, (p.ApplyDiscrete(uh) - uh).cwiseAbs().maxCoeff(),
                        1e-8);
          const SmoothForm u = SmoothTestForm(kKinds[k], n);
          const Eigen::VectorXd pu = p.Apply(u);
          rep.AddAtMost("idempotence" + kt, (p.ApplyDiscrete(pu) - pu).cwiseAbs().maxCoeff(),
                        1e-8);
          if (k < 3)
          {
            const ProjectionOperator &q = ops[k + 1];
            const Eigen::MatrixXd d(DerivativeMatrix(p.space).mat);
            const std::vector<char> mask = BoundaryDofMask(q.space);
            // Matrix level on V_h.
            const Eigen::MatrixXd comm = q.r * d - d * p.r;
            double in = 0.0, bd = 0.0;
            for (int i = 0; i < comm.rows(); i++)
            {
              double &slot = mask[i] ? bd : in;
              slot = std::max(slot, comm.row(i).cwiseAbs().maxCoeff());
            }
            rep.AddAtMost("R_commutes_interior" + kt, in, 1e-7);
            rep.AddAtMost("R_commutes_boundary" + kt, bd, 1e-7, "DOFs touching Gamma_1");
            // Smooth fields: D R u = R d u and D Pi u = Pi d u.
            const SmoothForm pu_form = PolynomialTestForm(kKinds[k], n);
            const SmoothForm du_form = pu_form.Derivative();
            const Eigen::VectorXd ru = SmoothedDofs(p.space, pu_form, cfg);
            const Eigen::VectorXd rdu = SmoothedDofs(q.space, du_form, cfg);
            const auto r_split = SplitMax(d * ru - rdu, mask);
            rep.AddAtMost("R_commutes_smooth_interior" + kt, r_split[0], 1e-7);
            rep.AddAtMost("R_commutes_smooth_boundary" + kt, r_split[1], 1e-7,
                          "DOFs touching Gamma_1");
            const auto pi_split = SplitMax(d * (p.j * ru) - q.j * rdu, mask);
            rep.AddAtMost("Pi_commutes_interior" + kt, pi_split[0], 1e-7);
            rep.AddAtMost("Pi_commutes_boundary" + kt, pi_split[1], 1e-7,
                          "DOFs touching Gamma_1");
          }
        }

        if (n == opts.modes.front())
        {
          // delta scaling of |R u_h - u_h| / |u_h| on a fixed random u_h.
          const std::vector<double> deltas = {0.2, 0.1, 0.05};
          for (int k = 0; k < 4; k++)
          {
            const SpaceHandle space(mesh, kKinds[k], n);
            const Eigen::MatrixXd &mass = ops[k].mass;
            std::mt19937_64 local(opts.seed);
            const Eigen::VectorXd uh = RandomCoefficients(space.DofCount(), local);
            std::vector<double> rel, neu;
            for (double dl : deltas)
            {
              SmoothingOptions so;
              so.delta = dl;
              so.eta_degree = opts.eta_degree;
              so.auto_shrink = false;
              const SmoothingConfig c = BuildSmoothingConfig(mesh, so);
              const Eigen::MatrixXd r(SmoothedDofMatrix(space, c));
              const Eigen::VectorXd diff = r * uh - uh;
              rel.push_back(Norm(mass, diff) / Norm(mass, uh));
              neu.push_back(MassNorm(mass, r - Eigen::MatrixXd::Identity(r.rows(), r.cols())));
            }
            const std::string kt = std::string("_") + KindName(kKinds[k]) + tail;
            for (size_t i = 0; i < deltas.size(); i++)
            {
              rep.Metric("R_minus_I_rel_delta" + Fmt(deltas[i]) + kt, rel[i]);
              rep.Metric("neumann_delta" + Fmt(deltas[i]) + kt, neu[i]);
            }
            rep.AddBand("delta_slope" + kt, LogLogSlope(deltas, rel), 0.7, 1.3);
            rep.AddAtLeast("neumann_monotone" + kt,
                           std::min(neu[0] - neu[1], neu[1] - neu[2]), 0.0,
                           "decreasing over delta = 0.2, 0.1, 0.05");
          }
        }
      }

      if (n == opts.modes.front())
      {
        for (int k = 0; k < 4; k++)
        {
          const ProjectionOperator &p = ops[k];
          const SmoothForm u = SmoothTestForm(kKinds[k], n);
          const double un = L2rError(*mesh, ZeroField(NumComponents(kKinds[k])), u.Analytic());
          const Eigen::VectorXd ru = SmoothedDofs(p.space, u, cfg);
          const double rn = L2rNorm(Field(p.space, ru));
          const double pn = L2rNorm(Field(p.space, p.j * ru));
          std::mt19937_64 local(opts.seed + 1000 * level + k);
          const Eigen::VectorXd uh = RandomCoefficients(p.space.DofCount(), local);
          const double rel = Norm(p.mass, p.r * uh - uh) / Norm(p.mass, uh) / cfg.delta;
          ratio_r[k].push_back(rn / un);
          ratio_pi[k].push_back(pn / un);
          ratio_rel[k].push_back(rel);
          const std::string kt = std::string("_") + KindName(kKinds[k]) + tail;
          rep.Metric("R_ratio" + kt, rn / un);
          rep.Metric("Pi_ratio" + kt, pn / un);
          rep.Metric("R_minus_I_over_delta" + kt, rel);
        }
      }
    }
  }
  if (last > first)
  {
    const std::string span = "levels " + std::to_string(first) + "-" + std::to_string(last);
    for (int k = 0; k < 4; k++)
    {
      const std::string kt = std::string("_") + KindName(kKinds[k]);
      rep.AddAtMost("R_ratio_drift" + kt, Drift(ratio_r[k]), 1.5, span);
      rep.AddAtMost("Pi_ratio_drift" + kt, Drift(ratio_pi[k]), 1.5, span);
      rep.AddAtMost("R_minus_I_over_delta_drift" + kt, Drift(ratio_rel[k]), 1.5, span);
    }
  }
  return rep;
}

std::vector<double> StabilityProxy(int k, int n, const AnalyticField &f, int first, int last,
                                   const SolverOptions &opts)
{
  std::vector<double> out;
  for (int level = first; level <= last; level++)
  {
    const MixedSystem sys = BuildMixedSystem(Square(level), k, n, f, opts);
    const MixedSolution sol = SolveMixed(sys, opts);
    const Eigen::VectorXd &s = sol.sigma.coeffs, &u = sol.u.coeffs;
    const Eigen::VectorXd ds = sys.d_sigma * s;
    double vs = s.dot(sys.mass_sigma * s) + ds.dot(sys.mass_u * ds);
    double vu = u.dot(sys.mass_u * u);
    if (k < 3)
    {
      const Eigen::VectorXd du = sys.d_u * u;
      vu += du.dot(sys.mass_next * du);
    }
    out.push_back(std::sqrt(vs) + std::sqrt(vu));
  }
  return out;
}

}  // namespace ffem
