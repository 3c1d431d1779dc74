#ifndef HMG_MULTIGRID_HPP
#define HMG_MULTIGRID_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmg/direct_solver.hpp"
#include "hmg/error.hpp"
#include "hmg/mesh.hpp"
#include "hmg/operator.hpp"
#include "hmg/smoothers.hpp"
#include "hmg/transfer.hpp"

namespace hmg
{

struct HierarchyOptions
{
  std::size_t budget_bytes = default_budget_bytes;
  std::uint64_t seed = 42;
};

struct MgLevel
{
  std::shared_ptr<const StructuredMesh> mesh;
  std::shared_ptr<const DiscreteOperator> op;
  std::unique_ptr<LevelSmoother> smoother;          // empty on the coarsest level
  std::optional<Transfer> prolongation_to_finer;   // empty on the finest level
  bool is_coarsest = false;
};

/// Per-level operator-application tallies accumulated by vcycle().
struct CycleCounters
{
  std::vector<long long> matvecs;
  long long vcycles = 0;
  long long coarse_solves = 0;

  void reset()
  {
    std::fill(matvecs.begin(), matvecs.end(), 0);
    vcycles = 0;
    coarse_solves = 0;
  }
};

class MgHierarchy
{
public:
  MgHierarchy(std::vector<MgLevel> levels, SmootherSpec spec, std::size_t budget_bytes)
    : levels_(std::move(levels)), spec_(spec)
  {
    require(!levels_.empty(), Errc::hierarchy_depth, "hierarchy needs at least one level");
    levels_.back().is_coarsest = true;
    coarse_ = std::make_unique<CoarseSolver>(levels_.back().op, budget_bytes);
    counters_.matvecs.assign(levels_.size(), 0);
  }

  std::size_t n_levels() const noexcept { return levels_.size(); }
  const MgLevel &level(std::size_t l) const { return levels_.at(l); }
  const MgLevel &finest() const { return levels_.front(); }
  const SmootherSpec &spec() const noexcept { return spec_; }
  const CoarseSolver &coarse_solver() const noexcept { return *coarse_; }
  const CycleCounters &counters() const noexcept { return counters_; }
  void reset_counters() { counters_.reset(); }

  /// One V(pre,post) cycle on A u = f at the finest level; u is updated in place.
  void vcycle(std::span<double> u, std::span<const double> f)
  {
    ++counters_.vcycles;
    cycle(0, u, f);
  }

  /// Exact solve with the coarsest operator.
  void coarse_solve(std::span<const double> f, std::span<double> u)
  {
    ++counters_.coarse_solves;
    coarse_->solve(f, u);
  }

  /// Returns P v for the link between level l+1 (coarse) and level l (fine).
  std::vector<double> prolong(std::size_t coarse_level, std::span<const double> vc) const
  {
    require(coarse_level >= 1 && coarse_level < levels_.size(), Errc::shape_mismatch,
            "no finer level to prolong to");
    std::vector<double> vf(levels_[coarse_level - 1].op->n_dofs());
    levels_[coarse_level].prolongation_to_finer->prolong(vc, vf);
    return vf;
  }

  std::vector<double> restrict_to(std::size_t coarse_level, std::span<const double> rf) const
  {
    require(coarse_level >= 1 && coarse_level < levels_.size(), Errc::shape_mismatch,
            "no finer level to restrict from");
    std::vector<double> rc(levels_[coarse_level].op->n_dofs());
    levels_[coarse_level].prolongation_to_finer->restrict_to_coarse(rf, rc);
    return rc;
  }

  /// Smoothing on level l, counted.
  void smooth(std::size_t l, std::span<double> u, std::span<const double> f, int steps)
  {
    require(levels_.at(l).smoother != nullptr, Errc::configuration, "level has no smoother");
    counters_.matvecs[l] += levels_[l].smoother->smooth(u, f, steps);
  }

private:
  void cycle(std::size_t l, std::span<double> u, std::span<const double> f)
  {
    if (levels_[l].is_coarsest)
    {
      coarse_solve(f, u);
      return;
    }
    const auto &lev = levels_[l];
    const std::size_t n = lev.op->n_dofs();
    smooth(l, u, f, spec_.pre_steps);

    std::vector<double> r(n);
    lev.op->apply(u, r);
    ++counters_.matvecs[l];
    const auto &mask = lev.mesh->boundary_mask();
    for (std::size_t i = 0; i < n; ++i)
    {
      r[i] = mask[i] ? 0.0 : f[i] - r[i];
    }

    const auto &next = levels_[l + 1];
    std::vector<double> rc(next.op->n_dofs()), ec(next.op->n_dofs(), 0.0);
    next.prolongation_to_finer->restrict_to_coarse(r, rc);
    const auto &cmask = next.mesh->boundary_mask();
    for (std::size_t i = 0; i < rc.size(); ++i)
    {
      if (cmask[i])
      {
        rc[i] = 0.0;
      }
    }
    cycle(l + 1, ec, rc);
    next.prolongation_to_finer->prolong(ec, r);
    for (std::size_t i = 0; i < n; ++i)
    {
      u[i] += r[i];
    }
    smooth(l, u, f, spec_.post_steps);
  }

  std::vector<MgLevel> levels_;
  SmootherSpec spec_;
  std::unique_ptr<CoarseSolver> coarse_;
  CycleCounters counters_;
};

namespace detail
{

inline std::shared_ptr<const DiscreteOperator>
make_level_operator(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coef,
                    bool smoothed, bool coarsest, const SmootherSpec &spec,
                    std::size_t budget_bytes)
{
  DiscreteOperator::Options opt;
  opt.budget_bytes = budget_bytes;
  if (smoothed && spec.needs_assembly())
  {
    opt.assemble = true;
    opt.matrix_free = false;
    return std::make_shared<const DiscreteOperator>(mesh, coef, opt);
  }
  if (coarsest)
  {
    const std::size_t bytes = stiffness_nnz(*mesh) * CsrMatrix::bytes_per_entry;
    if (bytes <= budget_bytes)
    {
      opt.assemble = true;
      opt.matrix_free = false;
      return std::make_shared<const DiscreteOperator>(mesh, coef, opt);
    }
  }
  opt.assemble = false;
  opt.matrix_free = true;
  return std::make_shared<const DiscreteOperator>(mesh, coef, opt);
}

inline MgHierarchy assemble_hierarchy(std::vector<std::shared_ptr<const StructuredMesh>> meshes,
                                      CoefficientField coef, const SmootherSpec &spec,
                                      const HierarchyOptions &opt)
{
  spec.validate();
  std::vector<MgLevel> levels(meshes.size());
  for (std::size_t l = 0; l < meshes.size(); ++l)
  {
    const bool coarsest = l + 1 == meshes.size();
    levels[l].mesh = meshes[l];
    levels[l].op =
        make_level_operator(meshes[l], coef, !coarsest, coarsest, spec, opt.budget_bytes);
    if (!coarsest)
    {
      levels[l].smoother =
          std::make_unique<LevelSmoother>(levels[l].op, spec, opt.seed, opt.budget_bytes);
    }
    if (l > 0)
    {
      levels[l].prolongation_to_finer = Transfer::between(*meshes[l], *meshes[l - 1]);
    }
  }
  return MgHierarchy(std::move(levels), spec, opt.budget_bytes);
}

}  // namespace detail

/// Geometric hierarchy: n_levels meshes obtained by repeated halving, all at the fine
/// order, each with its own rediscretized operator.
inline MgHierarchy build_h_hierarchy(std::shared_ptr<const StructuredMesh> fine, int n_levels,
                                     CoefficientField coef, const SmootherSpec &spec,
                                     const HierarchyOptions &opt = {})
{
  require(n_levels >= 1, Errc::hierarchy_depth, "need at least one level");
  require(fine->nelem() >= (1 << (n_levels - 1)), Errc::hierarchy_depth,
          std::to_string(fine->nelem()) + " elements per direction cannot be coarsened " +
              std::to_string(n_levels - 1) + " times");
  std::vector<std::shared_ptr<const StructuredMesh>> meshes{fine};
  for (int l = 1; l < n_levels; ++l)
  {
    meshes.push_back(coarsen_mesh(*meshes.back()));
  }
  return detail::assemble_hierarchy(std::move(meshes), coef, spec, opt);
}

/// Polynomial hierarchy p, p/2, ..., 1 on the fine element grid followed by
/// n_h_levels - 1 geometric coarsenings at order 1.
inline MgHierarchy build_p_hierarchy(std::shared_ptr<const StructuredMesh> fine, int n_h_levels,
                                     CoefficientField coef, const SmootherSpec &spec,
                                     const HierarchyOptions &opt = {})
{
  const int p = fine->order();
  require((p & (p - 1)) == 0, Errc::invalid_p_hierarchy,
          "p-hierarchy needs a power-of-2 order, got " + std::to_string(p));
  require(n_h_levels >= 1 && fine->nelem() >= (1 << (n_h_levels - 1)), Errc::hierarchy_depth,
          "not enough elements for the requested h-levels");
  std::vector<std::shared_ptr<const StructuredMesh>> meshes{fine};
  while (meshes.back()->order() > 1)
  {
    meshes.push_back(reduce_order_mesh(*meshes.back()));
  }
  for (int l = 1; l < n_h_levels; ++l)
  {
    meshes.push_back(coarsen_mesh(*meshes.back()));
  }
  return detail::assemble_hierarchy(std::move(meshes), coef, spec, opt);
}

}  // namespace hmg

#endif  // HMG_MULTIGRID_HPP
