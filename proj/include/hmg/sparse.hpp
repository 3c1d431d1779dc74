#ifndef HMG_SPARSE_HPP
#define HMG_SPARSE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"

namespace hmg
{

/// Compressed sparse row matrix with sorted column indices per row.
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> row_ptr,
            std::vector<std::int32_t> col, std::vector<double> val)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_(std::move(col)),
      val_(std::move(val))
  {
    require(row_ptr_.size() == rows_ + 1 && col_.size() == val_.size() &&
                static_cast<std::size_t>(row_ptr_.back()) == col_.size(),
            Errc::shape_mismatch, "inconsistent CSR arrays");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return val_.size(); }

  std::span<const std::int64_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::int32_t> col() const noexcept { return col_; }
  std::span<const double> values() const noexcept { return val_; }
  std::span<double> values() noexcept { return val_; }

  /// Bytes of value plus column-index storage for nnz entries.
  static constexpr std::size_t bytes_per_entry = sizeof(double) + sizeof(std::int32_t);

  void apply(std::span<const double> x, std::span<double> y) const
  {
    require(x.size() == cols_ && y.size() == rows_, Errc::shape_mismatch,
            "CSR apply dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i)
    {
      double s = 0.0;
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        s += val_[k] * x[col_[k]];
      }
      y[i] = s;
    }
  }

  /// y = A^T x
  void apply_transpose(std::span<const double> x, std::span<double> y) const
  {
    require(x.size() == rows_ && y.size() == cols_, Errc::shape_mismatch,
            "CSR transpose apply dimension mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
    {
      const double xi = x[i];
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        y[col_[k]] += val_[k] * xi;
      }
    }
  }

  double at(std::size_t i, std::size_t j) const
  {
    const auto *first = col_.data() + row_ptr_[i];
    const auto *last = col_.data() + row_ptr_[i + 1];
    const auto *it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
    if (it != last && *it == static_cast<std::int32_t>(j))
    {
      return val_[it - col_.data()];
    }
    return 0.0;
  }

  std::vector<double> diagonal() const
  {
    std::vector<double> d(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
    {
      d[i] = at(i, i);
    }
    return d;
  }

  /// d_i = A_ii + sum_{j != i} |A_ij|
  std::vector<double> l1_diagonal() const
  {
    std::vector<double> d(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
    {
      double s = 0.0;
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        s += static_cast<std::size_t>(col_[k]) == i ? val_[k] : std::abs(val_[k]);
      }
      d[i] = s;
    }
    return d;
  }

  /// One Gauss-Seidel sweep in increasing (forward) or decreasing row order, skipping
  /// rows flagged in `skip`.
  void gauss_seidel_sweep(std::span<double> u, std::span<const double> f,
                          std::span<const std::uint8_t> skip, bool forward) const
  {
    auto relax = [&](std::size_t i)
    {
      if (!skip.empty() && skip[i])
      {
        return;
      }
      double s = f[i];
      double diag = 0.0;
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        const auto j = static_cast<std::size_t>(col_[k]);
        if (j == i)
        {
          diag = val_[k];
        }
        else
        {
          s -= val_[k] * u[j];
        }
      }
      u[i] = s / diag;
    };
    if (forward)
    {
      for (std::size_t i = 0; i < rows_; ++i)
      {
        relax(i);
      }
    }
    else
    {
      for (std::size_t i = rows_; i-- > 0;)
      {
        relax(i);
      }
    }
  }

  Matrix to_dense() const
  {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
    {
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        m(i, col_[k]) += val_[k];
      }
    }
    return m;
  }

  /// Replaces rows and columns flagged in `mask` by identity rows/columns.
  void project_identity(std::span<const std::uint8_t> mask)
  {
    for (std::size_t i = 0; i < rows_; ++i)
    {
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
        const auto j = static_cast<std::size_t>(col_[k]);
        if (mask[i] || mask[j])
        {
          val_[k] = (i == j) ? 1.0 : 0.0;
        }
      }
    }
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> col_;
  std::vector<double> val_;
};

/// Sparsity pattern of an operator on a structured lattice whose coupling set is a tensor
/// product of per-direction contiguous ranges: node (i0,i1,i2) couples to every node in
/// [lo(i0),hi(i0)] x [lo(i1),hi(i1)] x [lo(i2),hi(i2)]. Both the high-order stiffness
/// (union of neighbouring elements) and the Q1 overlay (3-point stencil) have this form.
class TensorPattern
{
public:
  TensorPattern(int dim, std::vector<std::pair<int, int>> ranges)
    : dim_(dim), ranges_(std::move(ranges))
  {
  }

  /// Ranges for order-p elements on nelem elements per direction.
  static TensorPattern element_coupling(int dim, int nelem, int p)
  {
    const int n1 = nelem * p + 1;
    std::vector<std::pair<int, int>> r(n1);
    for (int i = 0; i < n1; ++i)
    {
      const int e_lo = (i == 0) ? 0 : (i - 1) / p;
      const int e_hi = (i == n1 - 1) ? nelem - 1 : i / p;
      r[i] = {e_lo * p, (e_hi + 1) * p};
    }
    return TensorPattern(dim, std::move(r));
  }

  /// Ranges of the nearest-neighbour (3-point per direction) stencil on n1 lattice lines.
  static TensorPattern nearest_neighbour(int dim, int n1)
  {
    std::vector<std::pair<int, int>> r(n1);
    for (int i = 0; i < n1; ++i)
    {
      r[i] = {std::max(i - 1, 0), std::min(i + 1, n1 - 1)};
    }
    return TensorPattern(dim, std::move(r));
  }

  int n1() const noexcept { return static_cast<int>(ranges_.size()); }
  int width(int i) const noexcept { return ranges_[i].second - ranges_[i].first + 1; }

  std::size_t rows() const noexcept
  {
    std::size_t n = 1;
    for (int k = 0; k < dim_; ++k)
    {
      n *= ranges_.size();
    }
    return n;
  }

  std::size_t nnz() const noexcept
  {
    std::size_t s = 0;
    for (int i = 0; i < n1(); ++i)
    {
      s += width(i);
    }
    std::size_t n = 1;
    for (int k = 0; k < dim_; ++k)
    {
      n *= s;
    }
    return n;
  }

  /// Position of column lattice index `c` inside the CSR row of lattice index `r`.
  std::int64_t offset_in_row(const std::array<int, 3> &r, const std::array<int, 3> &c) const
  {
    std::int64_t off = 0;
    for (int k = dim_ - 1; k >= 0; --k)
    {
      off = off * width(r[k]) + (c[k] - ranges_[r[k]].first);
    }
    return off;
  }

  /// Allocates a zero-valued CSR matrix with this pattern. Throws if the storage would
  /// exceed `budget_bytes`.
  CsrMatrix allocate(std::size_t budget_bytes) const
  {
    const std::size_t entries = nnz();
    const std::size_t bytes = entries * CsrMatrix::bytes_per_entry;
    require(bytes <= budget_bytes, Errc::assembly_too_large,
            "sparse matrix needs " + std::to_string(bytes) + " bytes (" +
                std::to_string(entries) + " nonzeros), budget is " +
                std::to_string(budget_bytes));
    require(entries < static_cast<std::size_t>(INT64_MAX), Errc::assembly_too_large,
            "nonzero count overflow");
    const int n = n1();
    const std::size_t nrows = rows();
    std::vector<std::int64_t> row_ptr(nrows + 1, 0);
    std::vector<std::int32_t> col(entries);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < nrows; ++g)
    {
      std::array<int, 3> r{0, 0, 0};
      std::size_t rem = g;
      for (int k = 0; k < dim_; ++k)
      {
        r[k] = static_cast<int>(rem % n);
        rem /= n;
      }
      const auto [lo0, hi0] = ranges_[r[0]];
      const auto [lo1, hi1] = dim_ >= 2 ? ranges_[r[1]] : std::pair{0, 0};
      const auto [lo2, hi2] = dim_ >= 3 ? ranges_[r[2]] : std::pair{0, 0};
      for (int c2 = lo2; c2 <= hi2; ++c2)
      {
        for (int c1 = lo1; c1 <= hi1; ++c1)
        {
          const std::int64_t base =
              (static_cast<std::int64_t>(c2) * n + c1) * n;
          for (int c0 = lo0; c0 <= hi0; ++c0)
          {
            col[pos++] = static_cast<std::int32_t>(base + c0);
          }
        }
      }
      row_ptr[g + 1] = static_cast<std::int64_t>(pos);
    }
    return CsrMatrix(nrows, nrows, std::move(row_ptr), std::move(col),
                     std::vector<double>(entries, 0.0));
  }

private:
  int dim_;
  std::vector<std::pair<int, int>> ranges_;
};

}  // namespace hmg

#endif  // HMG_SPARSE_HPP
