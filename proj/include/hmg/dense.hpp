#ifndef HMG_DENSE_HPP
#define HMG_DENSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmg/error.hpp"

namespace hmg
{

/// Row-major dense matrix. Small utility type: element matrices, 1D basis factors and
/// the dense spectral experiments all use it.
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, value)
  {
  }

  static Matrix identity(std::size_t n)
  {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
      m(i, i) = 1.0;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double *row(std::size_t i) { return data_.data() + i * cols_; }
  const double *row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const
  {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
    {
      for (std::size_t j = 0; j < cols_; ++j)
      {
        t(j, i) = (*this)(i, j);
      }
    }
    return t;
  }

  /// y = M x
  void mult(std::span<const double> x, std::span<double> y) const
  {
    require(x.size() == cols_ && y.size() == rows_, Errc::shape_mismatch,
            "dense mult dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i)
    {
      const double *r = row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j)
      {
        s += r[j] * x[j];
      }
      y[i] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const
  {
    std::vector<double> y(rows_);
    mult(x, y);
    return y;
  }

  friend Matrix operator*(const Matrix &a, const Matrix &b)
  {
    require(a.cols_ == b.rows_, Errc::shape_mismatch, "dense matmul dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
    {
      double *ci = c.row(i);
      for (std::size_t k = 0; k < a.cols_; ++k)
      {
        const double aik = a(i, k);
        if (aik == 0.0)
        {
          continue;
        }
        const double *bk = b.row(k);
        for (std::size_t j = 0; j < b.cols_; ++j)
        {
          ci[j] += aik * bk[j];
        }
      }
    }
    return c;
  }

  friend Matrix operator-(const Matrix &a, const Matrix &b)
  {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, Errc::shape_mismatch,
            "dense subtract dimension mismatch");
    Matrix c = a;
    for (std::size_t k = 0; k < c.data_.size(); ++k)
    {
      c.data_[k] -= b.data_[k];
    }
    return c;
  }

  double frobenius_norm() const
  {
    double s = 0.0;
    for (double v : data_)
    {
      s += v * v;
    }
    return std::sqrt(s);
  }

  double max_asymmetry() const
  {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
    {
      for (std::size_t j = i + 1; j < cols_; ++j)
      {
        m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
      }
    }
    return m;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Dense Cholesky factorization A = L L^T of a symmetric positive definite matrix.
class DenseCholesky
{
public:
  DenseCholesky() = default;

  /// Factors in place; the upper triangle of the stored factor is zeroed.
  explicit DenseCholesky(Matrix a) : l_(std::move(a))
  {
    require(l_.rows() == l_.cols(), Errc::shape_mismatch, "Cholesky needs a square matrix");
    const std::size_t n = l_.rows();
    for (std::size_t j = 0; j < n; ++j)
    {
      const double *lj = l_.row(j);
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k)
      {
        d -= lj[k] * lj[k];
      }
      if (!(d > 0.0))
      {
        throw Error(Errc::factorization,
                    "matrix not positive definite at pivot " + std::to_string(j));
      }
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i)
      {
        const double *li = l_.row(i);
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k)
        {
          s -= li[k] * lj[k];
        }
        l_(i, j) = s / ljj;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      for (std::size_t j = i + 1; j < n; ++j)
      {
        l_(i, j) = 0.0;
      }
    }
  }

  std::size_t size() const noexcept { return l_.rows(); }

  /// Solves A x = b in place.
  void solve_in_place(std::span<double> b) const
  {
    const std::size_t n = l_.rows();
    require(b.size() == n, Errc::shape_mismatch, "Cholesky solve dimension mismatch");
    for (std::size_t i = 0; i < n; ++i)
    {
      const double *li = l_.row(i);
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k)
      {
        s -= li[k] * b[k];
      }
      b[i] = s / li[i];
    }
    for (std::size_t ii = n; ii-- > 0;)
    {
      const double *li = l_.row(ii);
      const double x = b[ii] / li[ii];
      b[ii] = x;
      for (std::size_t k = 0; k < ii; ++k)
      {
        b[k] -= li[k] * x;
      }
    }
  }

  std::vector<double> solve(std::span<const double> b) const
  {
    std::vector<double> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
  }

  const Matrix &factor() const noexcept { return l_; }

private:
  Matrix l_;
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// y += alpha x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] += alpha * x[i];
  }
}

}  // namespace hmg

#endif  // HMG_DENSE_HPP
