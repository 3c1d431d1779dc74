#ifndef HMG_SMOOTHERS_HPP
#define HMG_SMOOTHERS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"
#include "hmg/operator.hpp"
#include "hmg/pcg.hpp"

namespace hmg
{

enum class SmootherKind
{
  jacobi,
  chebyshev,
  ssor,
  block_jacobi,
  l1_jacobi,
};

inline std::string_view to_string(SmootherKind k)
{
  switch (k)
  {
    case SmootherKind::jacobi: return "jacobi";
    case SmootherKind::chebyshev: return "chebyshev";
    case SmootherKind::ssor: return "ssor";
    case SmootherKind::block_jacobi: return "block-jacobi";
    case SmootherKind::l1_jacobi: return "l1-jacobi";
  }
  return "?";
}

inline SmootherKind parse_smoother_kind(std::string_view s)
{
  if (s == "jacobi" || s == "pt")
  {
    return SmootherKind::jacobi;
  }
  if (s == "chebyshev" || s == "cheb")
  {
    return SmootherKind::chebyshev;
  }
  if (s == "ssor")
  {
    return SmootherKind::ssor;
  }
  if (s == "block-jacobi" || s == "block" || s == "blk")
  {
    return SmootherKind::block_jacobi;
  }
  if (s == "l1-jacobi" || s == "l1")
  {
    return SmootherKind::l1_jacobi;
  }
  throw Error(Errc::configuration, "unknown smoother '" + std::string(s) + "'");
}

/// How overlapping block corrections are combined.
enum class BlockWeighting
{
  additive,      // plain sum of the local corrections
  multiplicity,  // each DOF's correction divided by the number of blocks containing it
};

struct SmootherSpec
{
  SmootherKind kind = SmootherKind::jacobi;
  int pre_steps = 3;
  int post_steps = 3;
  double omega = 2.0 / 3.0;
  std::optional<double> cheb_lambda_max;
  double cheb_interval_fraction = 0.25;
  double cheb_safety = 1.0;
  int lanczos_iters = 10;
  BlockWeighting block_weighting = BlockWeighting::additive;

  /// Jacobi(3,3), Cheb(3,3), SSOR(2,1) and the Jacobi variants with the defaults used in
  /// the benchmark tables.
  static SmootherSpec standard(SmootherKind kind)
  {
    SmootherSpec s;
    s.kind = kind;
    if (kind == SmootherKind::ssor)
    {
      s.pre_steps = 2;
      s.post_steps = 1;
      s.omega = 1.0;
    }
    return s;
  }

  /// Matrix-vector products per smoothing step.
  int matvecs_per_step() const noexcept { return kind == SmootherKind::ssor ? 2 : 1; }

  bool needs_assembly() const noexcept
  {
    return kind == SmootherKind::ssor || kind == SmootherKind::l1_jacobi;
  }

  void validate() const
  {
    require(pre_steps >= 0 && post_steps >= 0 && pre_steps + post_steps >= 1,
            Errc::configuration, "smoother needs at least one step");
    require(omega > 0.0 && omega < 2.0, Errc::configuration, "damping must lie in (0, 2)");
    require(cheb_interval_fraction > 0.0 && cheb_interval_fraction < 1.0, Errc::configuration,
            "Chebyshev interval fraction must lie in (0, 1)");
  }

  std::string label() const
  {
    return std::string(to_string(kind)) + "(" + std::to_string(pre_steps) + "," +
           std::to_string(post_steps) + ")";
  }
};

/// Smoother state for one level (inverse diagonals, eigenvalue estimate, block factors).
/// Boundary DOFs are never updated.
class LevelSmoother
{
public:
  struct Block
  {
    std::vector<std::int32_t> dofs;
    DenseCholesky factor;
  };

  LevelSmoother(std::shared_ptr<const DiscreteOperator> op, const SmootherSpec &spec,
                std::uint64_t seed = 42, std::size_t budget_bytes = default_budget_bytes)
    : op_(std::move(op)), spec_(spec)
  {
    spec_.validate();
    const auto &mask = op_->mesh().boundary_mask();
    const std::size_t n = op_->n_dofs();
    switch (spec_.kind)
    {
      case SmootherKind::jacobi:
      case SmootherKind::chebyshev:
      {
        const auto d = op_->diagonal();
        inv_diag_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
          inv_diag_[i] = mask[i] ? 0.0 : 1.0 / d[i];
        }
        if (spec_.kind == SmootherKind::chebyshev)
        {
          if (spec_.cheb_lambda_max)
          {
            lambda_max_ = *spec_.cheb_lambda_max;
          }
          else
          {
            const LinearMap a = [this](std::span<const double> x, std::span<double> y)
            { op_->apply(x, y); };
            lambda_max_ = spec_.cheb_safety *
                          estimate_lambda_max(a, d, mask, spec_.lanczos_iters, seed);
          }
        }
        break;
      }
      case SmootherKind::l1_jacobi:
      {
        const auto d = op_->l1_diagonal();
        inv_diag_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
          inv_diag_[i] = mask[i] ? 0.0 : 1.0 / d[i];
        }
        break;
      }
      case SmootherKind::ssor:
        require(op_->has_matrix(), Errc::requires_assembly, "SSOR needs an assembled operator");
        break;
      case SmootherKind::block_jacobi:
        build_blocks(budget_bytes);
        break;
    }
  }

  const SmootherSpec &spec() const noexcept { return spec_; }
  double lambda_max() const noexcept { return lambda_max_; }
  const std::vector<Block> &blocks() const noexcept { return blocks_; }

  /// Runs `steps` smoothing steps on A u = f. Returns the number of operator
  /// applications (SSOR counts each Gauss-Seidel sweep as one).
  long long smooth(std::span<double> u, std::span<const double> f, int steps) const
  {
    if (steps <= 0)
    {
      return 0;
    }
    const std::size_t n = op_->n_dofs();
    const auto &mask = op_->mesh().boundary_mask();
    std::vector<double> r(n);
    auto residual = [&]()
    {
      op_->apply(u, r);
      for (std::size_t i = 0; i < n; ++i)
      {
        r[i] = mask[i] ? 0.0 : f[i] - r[i];
      }
    };
    long long mv = 0;
    switch (spec_.kind)
    {
      case SmootherKind::jacobi:
      case SmootherKind::l1_jacobi:
        for (int s = 0; s < steps; ++s)
        {
          residual();
          ++mv;
          for (std::size_t i = 0; i < n; ++i)
          {
            u[i] += spec_.omega * inv_diag_[i] * r[i];
          }
        }
        break;
      case SmootherKind::chebyshev:
      {
        const double lmax = lambda_max_;
        const double lmin = spec_.cheb_interval_fraction * lmax;
        const double theta = 0.5 * (lmax + lmin);
        const double delta = 0.5 * (lmax - lmin);
        const double sigma = theta / delta;
        double rho = 1.0 / sigma;
        std::vector<double> d(n);
        residual();
        ++mv;
        for (std::size_t i = 0; i < n; ++i)
        {
          d[i] = inv_diag_[i] * r[i] / theta;
          u[i] += d[i];
        }
        for (int s = 1; s < steps; ++s)
        {
          residual();
          ++mv;
          const double rho_new = 1.0 / (2.0 * sigma - rho);
          const double c1 = rho_new * rho;
          const double c2 = 2.0 * rho_new / delta;
          for (std::size_t i = 0; i < n; ++i)
          {
            d[i] = c1 * d[i] + c2 * inv_diag_[i] * r[i];
            u[i] += d[i];
          }
          rho = rho_new;
        }
        break;
      }
      case SmootherKind::ssor:
      {
        const auto &a = op_->matrix();
        for (int s = 0; s < steps; ++s)
        {
          a.gauss_seidel_sweep(u, f, mask, true);
          a.gauss_seidel_sweep(u, f, mask, false);
          mv += 2;
        }
        break;
      }
      case SmootherKind::block_jacobi:
      {
        std::vector<double> c(n), local;
        for (int s = 0; s < steps; ++s)
        {
          residual();
          ++mv;
          std::fill(c.begin(), c.end(), 0.0);
          for (const auto &b : blocks_)
          {
            local.resize(b.dofs.size());
            for (std::size_t l = 0; l < b.dofs.size(); ++l)
            {
              local[l] = r[b.dofs[l]];
            }
            b.factor.solve_in_place(local);
            for (std::size_t l = 0; l < b.dofs.size(); ++l)
            {
              c[b.dofs[l]] += local[l];
            }
          }
          for (std::size_t i = 0; i < n; ++i)
          {
            u[i] += spec_.omega * block_weight_[i] * c[i];
          }
        }
        break;
      }
    }
    return mv;
  }

private:
  // One block per element: the assembled principal submatrix of A on the element's
  // non-boundary DOFs, accumulated from the element matrices of all neighbours.
  void build_blocks(std::size_t budget_bytes)
  {
    const auto &mesh = op_->mesh();
    const int dim = mesh.dim();
    const int p = mesh.order();
    const int ne = mesh.nelem();
    const auto &mask = mesh.boundary_mask();

    std::size_t bytes = 0;
    std::vector<std::vector<std::int32_t>> block_dofs(mesh.n_elements());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
    {
      for (auto g : mesh.element_dofs(e))
      {
        if (!mask[g])
        {
          block_dofs[e].push_back(g);
        }
      }
      bytes += block_dofs[e].size() * block_dofs[e].size() * sizeof(double);
    }
    require(bytes <= budget_bytes, Errc::element_too_large,
            "block smoother needs " + std::to_string(bytes) + " bytes, budget is " +
                std::to_string(budget_bytes));

    std::shared_ptr<const MatrixFreeOperator> kernel;
    if (op_->kernel())
    {
      kernel = std::shared_ptr<const MatrixFreeOperator>(op_, op_->kernel());
    }
    else
    {
      kernel = std::make_shared<const MatrixFreeOperator>(op_->mesh_ptr(), op_->coefficient());
    }

    std::vector<Matrix> mats(mesh.n_elements());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
    {
      mats[e] = Matrix(block_dofs[e].size(), block_dofs[e].size());
    }
    // Position of a lattice point inside element e's block, or -1.
    auto block_index = [&](std::size_t e, const std::array<int, 3> &c) -> int
    {
      const auto ec = mesh.element_index(e);
      for (int k = 0; k < dim; ++k)
      {
        if (c[k] < ec[k] * p || c[k] > (ec[k] + 1) * p)
        {
          return -1;
        }
      }
      const auto g = static_cast<std::int32_t>(mesh.global_index(c));
      const auto &bd = block_dofs[e];
      const auto it = std::lower_bound(bd.begin(), bd.end(), g);
      return (it != bd.end() && *it == g) ? static_cast<int>(it - bd.begin()) : -1;
    };
    const int nloc = mesh.nodes_per_element();
    std::vector<std::array<int, 3>> lat(nloc);
    std::vector<int> pos(nloc);
    for (std::size_t e2 = 0; e2 < mesh.n_elements(); ++e2)
    {
      const Matrix k = kernel->element_matrix(e2);
      const auto dofs = mesh.element_dofs(e2);
      for (int l = 0; l < nloc; ++l)
      {
        lat[l] = mesh.lattice_index(dofs[l]);
      }
      const auto c2 = mesh.element_index(e2);
      const int span3 = dim == 3 ? 1 : 0;
      for (int dz = -span3; dz <= span3; ++dz)
      {
        for (int dy = -1; dy <= 1; ++dy)
        {
          for (int dx = -1; dx <= 1; ++dx)
          {
            const std::array<int, 3> c{c2[0] + dx, c2[1] + dy, c2[2] + dz};
            bool inside = true;
            for (int kk = 0; kk < dim; ++kk)
            {
              inside = inside && c[kk] >= 0 && c[kk] < ne;
            }
            if (!inside)
            {
              continue;
            }
            std::size_t e = 0;
            for (int kk = dim - 1; kk >= 0; --kk)
            {
              e = e * ne + c[kk];
            }
            for (int l = 0; l < nloc; ++l)
            {
              pos[l] = block_index(e, lat[l]);
            }
            Matrix &m = mats[e];
            for (int i = 0; i < nloc; ++i)
            {
              if (pos[i] < 0)
              {
                continue;
              }
              for (int j = 0; j < nloc; ++j)
              {
                if (pos[j] >= 0)
                {
                  m(pos[i], pos[j]) += k(i, j);
                }
              }
            }
          }
        }
      }
    }

    block_weight_.assign(op_->n_dofs(), 1.0);
    if (spec_.block_weighting == BlockWeighting::multiplicity)
    {
      std::vector<int> count(op_->n_dofs(), 0);
      for (const auto &bd : block_dofs)
      {
        for (auto g : bd)
        {
          ++count[g];
        }
      }
      for (std::size_t i = 0; i < count.size(); ++i)
      {
        block_weight_[i] = count[i] > 0 ? 1.0 / count[i] : 0.0;
      }
    }
    blocks_.reserve(mesh.n_elements());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
    {
      blocks_.push_back(Block{std::move(block_dofs[e]), DenseCholesky(std::move(mats[e]))});
    }
  }

  std::shared_ptr<const DiscreteOperator> op_;
  SmootherSpec spec_;
  std::vector<double> inv_diag_;
  double lambda_max_ = 0.0;
  std::vector<Block> blocks_;
  std::vector<double> block_weight_;
};

}  // namespace hmg

#endif  // HMG_SMOOTHERS_HPP
