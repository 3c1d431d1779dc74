#ifndef HMG_KRYLOV_HPP
#define HMG_KRYLOV_HPP

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hmg/direct_solver.hpp"
#include "hmg/multigrid.hpp"
#include "hmg/operator.hpp"
#include "hmg/pcg.hpp"

namespace hmg
{

enum class SolveMode
{
  solver,
  pcg,
};

/// Right-hand side used by the iteration-count experiments: 1 at interior DOFs, 0 on
/// the boundary.
inline std::vector<double> standard_rhs(const StructuredMesh &mesh)
{
  std::vector<double> f(mesh.n_dofs(), 1.0);
  const auto &mask = mesh.boundary_mask();
  for (std::size_t i = 0; i < f.size(); ++i)
  {
    if (mask[i])
    {
      f[i] = 0.0;
    }
  }
  return f;
}

struct CostReport
{
  double n = 0.0;    // unknowns on the finest level
  double g_p = 0.0;  // flops per unknown of the fine operator
  double g_1 = 0.0;  // flops per unknown of the low-order operator
  int m = 1;
  int s_pre = 0;
  int s_post = 0;
  double per_iteration = 0.0;
  double total = 0.0;
  // Low-order path only: N (g_p + g_1 m (s_pre + s_post)), the sparsified-residual form.
  double sparsified_per_iteration = 0.0;
};

/// Cost model per iteration: N g_p (1 + m (s_pre + s_post)) for multigrid; for the
/// low-order path N (g_1 + 6 g_p), with the alternative sparsified-residual tally
/// N (g_p + 6 g_1) reported alongside.
inline CostReport cost_report(const SolveReport &rep, double n, double g_p, double g_1,
                              const SmootherSpec &spec, bool low_order = false)
{
  CostReport c;
  c.n = n;
  c.g_p = g_p;
  c.g_1 = g_1;
  c.m = spec.matvecs_per_step();
  c.s_pre = spec.pre_steps;
  c.s_post = spec.post_steps;
  const double work = c.m * (c.s_pre + c.s_post);
  if (low_order)
  {
    c.per_iteration = n * (g_1 + work * g_p);
    c.sparsified_per_iteration = n * (g_p + work * g_1);
  }
  else
  {
    c.per_iteration = n * g_p * (1.0 + work);
  }
  c.total = c.per_iteration * rep.iterations;
  return c;
}

/// Multigrid as a stationary solver (u <- u + V(0, f - A u)) or as the preconditioner
/// of CG, from the initial guess in u. Iterations count v-cycles.
inline SolveReport mg_solve(MgHierarchy &h, SolveMode mode, std::span<const double> f,
                            std::span<double> u, const IterationControl &ctl = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto &op = *h.finest().op;
  const std::size_t n = op.n_dofs();
  h.reset_counters();
  SolveReport rep;
  if (mode == SolveMode::pcg)
  {
    const LinearMap a = [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); };
    const LinearMap m = [&](std::span<const double> r, std::span<double> z)
    {
      std::fill(z.begin(), z.end(), 0.0);
      h.vcycle(z, r);
    };
    try
    {
      rep = pcg(a, m, f, u, ctl);
    }
    catch (const Error &e)
    {
      if (e.code() != Errc::breakdown)
      {
        throw;
      }
      rep.status = SolveStatus::diverged;
      rep.note = e.what();
    }
  }
  else
  {
    std::vector<double> r(n), e(n);
    auto residual = [&]()
    {
      op.apply(u, r);
      ++rep.fine_matvecs;
      for (std::size_t i = 0; i < n; ++i)
      {
        r[i] = f[i] - r[i];
      }
      return norm2(r);
    };
    const double r0 = residual();
    rep.residual_history.push_back(r0);
    if (r0 == 0.0)
    {
      rep.converged = true;
      rep.status = SolveStatus::converged;
    }
    for (int k = 1; k <= ctl.max_iter && !rep.converged; ++k)
    {
      std::fill(e.begin(), e.end(), 0.0);
      h.vcycle(e, r);
      axpy(1.0, e, u);
      const double rn = residual();
      rep.residual_history.push_back(rn);
      rep.iterations = k;
      if (rn <= ctl.rel_tol * r0)
      {
        rep.converged = true;
        rep.status = SolveStatus::converged;
        break;
      }
      if (!(rn <= ctl.divergence_factor * r0))
      {
        rep.status = SolveStatus::diverged;
        break;
      }
    }
  }
  rep.fine_matvecs += h.counters().matvecs[0];
  rep.cost_model_flops = cost_report(rep, static_cast<double>(n), op.flops_per_dof(), 0.0,
                                     h.spec())
                             .total;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Exact (or tightly iterated) solver for the low-order overlay operator.
class LowOrderPreconditioner
{
public:
  LowOrderPreconditioner(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coef,
                         std::size_t budget_bytes = default_budget_bytes)
  {
    auto overlay = assemble_low_order_overlay(mesh, coef, budget_bytes);
    op_ = std::make_shared<const DiscreteOperator>(mesh, coef, std::move(overlay));
    solver_ = std::make_unique<CoarseSolver>(op_, budget_bytes, 1e-12);
  }

  const DiscreteOperator &op() const noexcept { return *op_; }
  bool is_direct() const noexcept { return solver_->is_direct(); }

  void apply(std::span<const double> r, std::span<double> z) const { solver_->solve(r, z); }

private:
  std::shared_ptr<const DiscreteOperator> op_;
  std::unique_ptr<CoarseSolver> solver_;
};

/// CG on the high-order operator preconditioned by a solve with the low-order overlay.
inline SolveReport low_order_pcg(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coef,
                                 std::span<const double> f, std::span<double> u,
                                 const IterationControl &ctl = {},
                                 std::size_t budget_bytes = default_budget_bytes)
{
  const auto t0 = std::chrono::steady_clock::now();
  DiscreteOperator::Options opt;
  opt.budget_bytes = budget_bytes;
  const DiscreteOperator op(mesh, coef, opt);
  const LowOrderPreconditioner pre(mesh, coef, budget_bytes);
  const LinearMap a = [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); };
  const LinearMap m = [&](std::span<const double> r, std::span<double> z) { pre.apply(r, z); };
  SolveReport rep;
  try
  {
    rep = pcg(a, m, f, u, ctl);
  }
  catch (const Error &e)
  {
    if (e.code() != Errc::breakdown)
    {
      throw;
    }
    rep.status = SolveStatus::diverged;
    rep.note = e.what();
  }
  if (!pre.is_direct())
  {
    rep.note = "low-order system solved by inner CG";
  }
  const auto spec = SmootherSpec::standard(SmootherKind::jacobi);
  rep.cost_model_flops = cost_report(rep, static_cast<double>(op.n_dofs()), op.flops_per_dof(),
                                     pre.op().flops_per_dof(), spec, true)
                             .total;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace hmg

#endif  // HMG_KRYLOV_HPP
