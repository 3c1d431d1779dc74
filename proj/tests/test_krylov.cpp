#include <vector>

#include <gtest/gtest.h>

#include "hmg/krylov.hpp"

using namespace hmg;

namespace
{

struct Setup
{
  std::shared_ptr<const StructuredMesh> mesh;
  CoefficientField coef;
  std::vector<double> f;
};

Setup setup(const std::string &id, int nelem, int p)
{
  const auto pr = problem(id);
  Setup s{build_mesh(pr.dim, nelem, p, pr.warp), pr.coefficient, {}};
  s.f = standard_rhs(*s.mesh);
  return s;
}

SolveReport solve(const Setup &s, const SmootherSpec &spec, SolveMode mode,
                  const IterationControl &ctl = {})
{
  auto h = build_h_hierarchy(s.mesh, 3, s.coef, spec);
  std::vector<double> u(s.f.size(), 0.0);
  return mg_solve(h, mode, s.f, u, ctl);
}

}  // namespace

TEST(StandardRhs, OneInsideZeroOnBoundary)
{
  const auto s = setup("2d-const", 2, 2);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < s.f.size(); ++i)
  {
    EXPECT_EQ(s.f[i], s.mesh->is_boundary(i) ? 0.0 : 1.0);
    ones += s.f[i] == 1.0;
  }
  EXPECT_EQ(ones, 9u);
}

TEST(CostModel, MultigridAndLowOrderForms)
{
  SolveReport rep;
  rep.iterations = 10;
  const double n = 1000.0, gp = 50.0, g1 = 18.0;
  for (auto k : {SmootherKind::jacobi, SmootherKind::chebyshev, SmootherKind::ssor})
  {
    const auto c = cost_report(rep, n, gp, g1, SmootherSpec::standard(k));
    EXPECT_DOUBLE_EQ(c.per_iteration, 7.0 * n * gp) << to_string(k);
    EXPECT_DOUBLE_EQ(c.total, 70.0 * n * gp);
  }
  const auto lo = cost_report(rep, n, gp, g1, SmootherSpec::standard(SmootherKind::jacobi), true);
  EXPECT_DOUBLE_EQ(lo.per_iteration, n * (g1 + 6.0 * gp));
  EXPECT_DOUBLE_EQ(lo.sparsified_per_iteration, n * (gp + 6.0 * g1));
  auto s = SmootherSpec::standard(SmootherKind::jacobi);
  s.pre_steps = 1;
  s.post_steps = 2;
  EXPECT_DOUBLE_EQ(cost_report(rep, n, gp, g1, s).per_iteration, 4.0 * n * gp);
}

TEST(MgSolve, ReportsFineMatvecsAndCost)
{
  const auto s = setup("2d-const", 16, 2);
  const auto spec = SmootherSpec::standard(SmootherKind::jacobi);
  const auto rep = solve(s, spec, SolveMode::solver);
  ASSERT_TRUE(rep.converged);
  // Seven per V-cycle plus one residual per iteration and the initial residual.
  EXPECT_EQ(rep.fine_matvecs, 8LL * rep.iterations + 1);
  EXPECT_EQ(rep.residual_history.size(), static_cast<std::size_t>(rep.iterations) + 1);
  EXPECT_LE(rep.residual_history.back(), 1e-8 * rep.residual_history.front());
  EXPECT_GT(rep.residual_history[rep.iterations - 1], 1e-8 * rep.residual_history.front());
  EXPECT_GT(rep.cost_model_flops, 0.0);
}

TEST(MgSolve, PcgNeedsNoMoreIterationsThanSolver)
{
  const auto s = setup("2d-var", 16, 3);
  for (auto k : {SmootherKind::jacobi, SmootherKind::chebyshev, SmootherKind::ssor})
  {
    const auto spec = SmootherSpec::standard(k);
    const auto a = solve(s, spec, SolveMode::solver);
    const auto b = solve(s, spec, SolveMode::pcg);
    ASSERT_TRUE(b.converged);
    if (a.converged)
    {
      EXPECT_LE(b.iterations, a.iterations) << to_string(k);
    }
  }
}

TEST(MgSolve, DeterministicForFixedSeed)
{
  const auto s = setup("2d-var", 8, 4);
  const auto spec = SmootherSpec::standard(SmootherKind::chebyshev);
  const auto a = solve(s, spec, SolveMode::pcg);
  const auto b = solve(s, spec, SolveMode::pcg);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.residual_history, b.residual_history);
}

TEST(MgSolve, OverdampedJacobiDivergesAndIsReported)
{
  const auto s = setup("2d-const", 8, 4);
  auto spec = SmootherSpec::standard(SmootherKind::jacobi);
  spec.omega = 1.9;
  const auto rep = solve(s, spec, SolveMode::solver);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.status, SolveStatus::diverged);
  EXPECT_LT(rep.iterations, 200);
  EXPECT_GT(rep.residual_history.back(), 10.0 * rep.residual_history.front());
}

TEST(MgSolve, IterationCap)
{
  const auto s = setup("2d-const", 8, 2);
  IterationControl ctl;
  ctl.max_iter = 2;
  const auto rep = solve(s, SmootherSpec::standard(SmootherKind::jacobi), SolveMode::solver, ctl);
  EXPECT_EQ(rep.status, SolveStatus::max_iter);
  EXPECT_EQ(rep.iterations, 2);
}

TEST(LowOrder, ReferenceCountOrderTwo)
{
  const auto s = setup("2d-const", 32, 2);
  std::vector<double> u(s.f.size(), 0.0);
  const auto rep = low_order_pcg(s.mesh, s.coef, s.f, u);
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.iterations, 14, 3);
}

TEST(LowOrder, InnerIterativeSolveWhenFactorTooLarge)
{
  const auto s = setup("2d-var", 8, 3);
  std::vector<double> u1(s.f.size(), 0.0), u2(s.f.size(), 0.0);
  const auto a = low_order_pcg(s.mesh, s.coef, s.f, u1);
  const auto b = low_order_pcg(s.mesh, s.coef, s.f, u2, {}, 70000);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_TRUE(a.note.empty());
  EXPECT_FALSE(b.note.empty());
  EXPECT_NEAR(a.iterations, b.iterations, 1);
}

TEST(LowOrder, RejectsOrderOne)
{
  const auto s = setup("2d-const", 4, 1);
  std::vector<double> u(s.f.size(), 0.0);
  try
  {
    (void)low_order_pcg(s.mesh, s.coef, s.f, u);
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.code(), Errc::no_op);
  }
}
