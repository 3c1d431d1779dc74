#ifndef HMG_DIRECT_SOLVER_HPP
#define HMG_DIRECT_SOLVER_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "hmg/error.hpp"
#include "hmg/operator.hpp"
#include "hmg/pcg.hpp"
#include "hmg/sparse.hpp"

namespace hmg
{

namespace detail
{

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// A symmetric CSR matrix read as CSC is the same matrix.
inline EigenSparse to_eigen(const CsrMatrix &a)
{
  require(a.nnz() < static_cast<std::size_t>(INT32_MAX), Errc::assembly_too_large,
          "matrix too large for the direct solver");
  EigenSparse m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  m.resizeNonZeros(static_cast<Eigen::Index>(a.nnz()));
  const auto rp = a.row_ptr();
  for (std::size_t i = 0; i <= a.rows(); ++i)
  {
    m.outerIndexPtr()[i] = static_cast<int>(rp[i]);
  }
  std::copy(a.col().begin(), a.col().end(), m.innerIndexPtr());
  std::copy(a.values().begin(), a.values().end(), m.valuePtr());
  return m;
}

}  // namespace detail

/// Number of nonzeros of the Cholesky factor of a symmetric matrix under the AMD
/// ordering, from the elimination tree (no numeric work, O(n) extra memory beyond the
/// permuted pattern).
inline std::size_t cholesky_fill(const CsrMatrix &a)
{
  const auto m = detail::to_eigen(a);
  const int n = static_cast<int>(a.rows());
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
  Eigen::AMDOrdering<int> amd;
  amd(m.selfadjointView<Eigen::Lower>(), pinv);
  const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm = pinv.inverse();
  const int *pi = perm.indices().data();

  // Upper-triangular pattern of the permuted matrix, grouped by column.
  std::vector<std::int64_t> start(n + 1, 0);
  const auto rp = a.row_ptr();
  const auto col = a.col();
  for (int i = 0; i < n; ++i)
  {
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      const int r = pi[i], c = pi[col[k]];
      if (r < c)
      {
        ++start[c + 1];
      }
    }
  }
  for (int c = 0; c < n; ++c)
  {
    start[c + 1] += start[c];
  }
  std::vector<int> rows(start[n]);
  std::vector<std::int64_t> fillpos(start.begin(), start.end() - 1);
  for (int i = 0; i < n; ++i)
  {
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      const int r = pi[i], c = pi[col[k]];
      if (r < c)
      {
        rows[fillpos[c]++] = r;
      }
    }
  }
  std::vector<int> parent(n, -1), tag(n, -1);
  std::size_t total = n;
  for (int k = 0; k < n; ++k)
  {
    tag[k] = k;
    for (auto q = start[k]; q < start[k + 1]; ++q)
    {
      for (int i = rows[q]; tag[i] != k; i = parent[i])
      {
        if (parent[i] == -1)
        {
          parent[i] = k;
        }
        ++total;
        tag[i] = k;
      }
    }
  }
  return total;
}

/// Sparse Cholesky factorization (Eigen SimplicialLLT with AMD ordering).
class SparseCholesky
{
public:
  explicit SparseCholesky(const CsrMatrix &a) : n_(a.rows())
  {
    const auto m = detail::to_eigen(a);
    llt_ = std::make_unique<Solver>();
    llt_->compute(m);
    require(llt_->info() == Eigen::Success, Errc::factorization,
            "sparse Cholesky failed (matrix not positive definite)");
  }

  void solve(std::span<const double> b, std::span<double> x) const
  {
    require(b.size() == n_ && x.size() == n_, Errc::shape_mismatch,
            "direct solve dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(n_));
    xm = llt_->solve(bm);
  }

private:
  using Solver = Eigen::SimplicialLLT<detail::EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>>;
  std::size_t n_;
  std::unique_ptr<Solver> llt_;
};

/// Solver for the coarsest level: sparse Cholesky when the operator is assembled and the
/// predicted factor fits the budget, otherwise Jacobi-preconditioned CG to a tight
/// relative tolerance.
class CoarseSolver
{
public:
  CoarseSolver(std::shared_ptr<const DiscreteOperator> op,
               std::size_t budget_bytes = default_budget_bytes, double cg_tol = 1e-13)
    : op_(std::move(op)), cg_tol_(cg_tol)
  {
    if (op_->has_matrix())
    {
      const std::size_t fill = cholesky_fill(op_->matrix());
      if (fill * CsrMatrix::bytes_per_entry <= budget_bytes)
      {
        direct_ = std::make_unique<SparseCholesky>(op_->matrix());
        return;
      }
    }
    diag_ = op_->diagonal();
  }

  bool is_direct() const noexcept { return direct_ != nullptr; }

  void solve(std::span<const double> f, std::span<double> u) const
  {
    if (direct_)
    {
      direct_->solve(f, u);
      return;
    }
    std::fill(u.begin(), u.end(), 0.0);
    const LinearMap a = [this](std::span<const double> x, std::span<double> y)
    { op_->apply(x, y); };
    const LinearMap m = [this](std::span<const double> x, std::span<double> y)
    {
      for (std::size_t i = 0; i < x.size(); ++i)
      {
        y[i] = x[i] / diag_[i];
      }
    };
    IterationControl ctl;
    ctl.rel_tol = cg_tol_;
    ctl.max_iter = 100000;
    ctl.divergence_factor = 1e300;
    const auto rep = pcg(a, m, f, u, ctl);
    require(rep.converged, Errc::factorization, "coarse CG did not converge");
  }

private:
  std::shared_ptr<const DiscreteOperator> op_;
  double cg_tol_;
  std::unique_ptr<SparseCholesky> direct_;
  std::vector<double> diag_;
};

}  // namespace hmg

#endif  // HMG_DIRECT_SOLVER_HPP
