#ifndef HMG_SYMMETRIC_EIGEN_HPP
#define HMG_SYMMETRIC_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"

namespace hmg
{

struct SymmetricEigen
{
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

namespace detail
{

// Householder reduction to tridiagonal form. On exit v holds the accumulated orthogonal
// transformation, d the diagonal and e the subdiagonal (e[0] unused).
inline void tridiagonalize(Matrix &v, std::vector<double> &d, std::vector<double> &e)
{
  const int n = static_cast<int>(v.rows());
  for (int j = 0; j < n; ++j)
  {
    d[j] = v(n - 1, j);
  }

  for (int i = n - 1; i > 0; --i)
  {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k)
    {
      scale += std::abs(d[k]);
    }
    if (scale == 0.0)
    {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j)
      {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    }
    else
    {
      for (int k = 0; k < i; ++k)
      {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0)
      {
        g = -g;
      }
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j)
      {
        e[j] = 0.0;
      }

      for (int j = 0; j < i; ++j)
      {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (int k = j + 1; k <= i - 1; ++k)
        {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j)
      {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j)
      {
        e[j] -= hh * d[j];
      }
      for (int j = 0; j < i; ++j)
      {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k)
        {
          v(k, j) -= (f * e[k] + g * d[k]);
        }
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (int i = 0; i < n - 1; ++i)
  {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0)
    {
      for (int k = 0; k <= i; ++k)
      {
        d[k] = v(k, i + 1) / h;
      }
      for (int j = 0; j <= i; ++j)
      {
        double g = 0.0;
        for (int k = 0; k <= i; ++k)
        {
          g += v(k, i + 1) * v(k, j);
        }
        for (int k = 0; k <= i; ++k)
        {
          v(k, j) -= g * d[k];
        }
      }
    }
    for (int k = 0; k <= i; ++k)
    {
      v(k, i + 1) = 0.0;
    }
  }
  for (int j = 0; j < n; ++j)
  {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL iteration on the tridiagonal matrix, accumulating rotations into the rows
// of vt (the transpose of the tridiagonalizing transformation).
inline void tridiagonal_ql(Matrix &vt, std::vector<double> &d, std::vector<double> &e)
{
  const int n = static_cast<int>(vt.rows());
  for (int i = 1; i < n; ++i)
  {
    e[i - 1] = e[i];
  }
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (int l = 0; l < n; ++l)
  {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n)
    {
      if (std::abs(e[m]) <= eps * tst1)
      {
        break;
      }
      ++m;
    }

    if (m > l)
    {
      int iter = 0;
      do
      {
        if (++iter > 64)
        {
          throw Error(Errc::factorization, "tridiagonal QL iteration did not converge");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0)
        {
          r = -r;
        }
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i)
        {
          d[i] -= h;
        }
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i)
        {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          double *vi = vt.row(i);
          double *vi1 = vt.row(i + 1);
          for (int k = 0; k < n; ++k)
          {
            h = vi1[k];
            vi1[k] = s * vi[k] + c * h;
            vi[k] = c * vi[k] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace detail

/// Eigendecomposition of a dense symmetric matrix by Householder tridiagonalization
/// followed by implicit QL. Eigenvalues are returned in ascending order with
/// orthonormal eigenvectors.
inline SymmetricEigen dense_symmetric_eig(const Matrix &a, std::size_t max_dim = 4096,
                                          double symmetry_tol = 1e-10)
{
  require(a.rows() == a.cols(), Errc::shape_mismatch, "eigensolver needs a square matrix");
  const std::size_t n = a.rows();
  require(n <= max_dim, Errc::budget_exceeded,
          "dense eigenproblem of size " + std::to_string(n) + " exceeds budget " +
              std::to_string(max_dim));
  double scale = 0.0;
  for (double x : a.data())
  {
    scale = std::max(scale, std::abs(x));
  }
  require(a.max_asymmetry() <= symmetry_tol * std::max(scale, 1.0), Errc::asymmetric_input,
          "matrix is not symmetric");

  SymmetricEigen out;
  if (n == 0)
  {
    return out;
  }
  Matrix v = a;
  std::vector<double> d(n), e(n);
  detail::tridiagonalize(v, d, e);
  Matrix vt = v.transpose();
  detail::tridiagonal_ql(vt, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k)
  {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i)
    {
      out.vectors(i, k) = vt(order[k], i);
    }
  }
  return out;
}

}  // namespace hmg

#endif  // HMG_SYMMETRIC_EIGEN_HPP
