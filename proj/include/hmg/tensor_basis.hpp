#ifndef HMG_TENSOR_BASIS_HPP
#define HMG_TENSOR_BASIS_HPP

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"

namespace hmg
{

inline constexpr int max_order = 16;

namespace detail
{

// Legendre polynomial P_n(x) and its first derivative via the three-term recurrence.
inline std::array<double, 2> legendre(int n, double x)
{
  if (n == 0)
  {
    return {1.0, 0.0};
  }
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  for (int k = 2; k <= n; ++k)
  {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    const double d2 = d0 + (2 * k - 1) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

}  // namespace detail

/// Legendre-Gauss-Lobatto points on [-1,1] in ascending order: the endpoints together
/// with the roots of P'_p. Newton iteration from Chebyshev-Gauss-Lobatto guesses; only
/// the left half is iterated and the right half is mirrored, so the result is exactly
/// symmetric.
inline std::vector<double> lgl_nodes(int p)
{
  require(p >= 1, Errc::invalid_order, "LGL order must be >= 1, got " + std::to_string(p));
  std::vector<double> x(p + 1);
  x[0] = -1.0;
  x[p] = 1.0;
  for (int i = 1; 2 * i < p; ++i)
  {
    double xi = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < 100; ++it)
    {
      // P'' from the Legendre ODE: (1-x^2) P'' = 2x P' - p(p+1) P.
      const auto [pp, dp] = detail::legendre(p, xi);
      const double ddp = (2.0 * xi * dp - p * (p + 1.0) * pp) / (1.0 - xi * xi);
      const double dx = dp / ddp;
      xi -= dx;
      if (std::abs(dx) < 1e-14)
      {
        break;
      }
    }
    x[i] = xi;
    x[p - i] = -xi;
  }
  if (p % 2 == 0)
  {
    x[p / 2] = 0.0;
  }
  return x;
}

/// Gauss-Lobatto quadrature weights matching lgl_nodes(p).
inline std::vector<double> lgl_weights(int p)
{
  const auto x = lgl_nodes(p);
  std::vector<double> w(p + 1);
  for (int i = 0; i <= p; ++i)
  {
    const double pp = detail::legendre(p, x[i])[0];
    w[i] = 2.0 / (p * (p + 1.0) * pp * pp);
  }
  return w;
}

struct QuadratureRule
{
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1,1], exact for polynomials of degree 2n-1.
inline QuadratureRule gauss_quadrature(int n)
{
  require(n >= 1, Errc::invalid_order, "quadrature size must be >= 1, got " + std::to_string(n));
  QuadratureRule q{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; 2 * i < n; ++i)
  {
    double xi = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it)
    {
      const auto pd = detail::legendre(n, xi);
      dp = pd[1];
      const double dx = pd[0] / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15)
      {
        break;
      }
    }
    dp = detail::legendre(n, xi)[1];
    const double w = 2.0 / ((1.0 - xi * xi) * dp * dp);
    q.points[i] = xi;
    q.points[n - 1 - i] = -xi;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
  {
    q.points[n / 2] = 0.0;
  }
  return q;
}

namespace detail
{

inline void check_distinct(std::span<const double> nodes)
{
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
    {
      require(nodes[i] != nodes[j], Errc::degenerate_basis,
              "duplicate interpolation node " + std::to_string(nodes[i]));
    }
  }
}

inline double lagrange_unchecked(std::span<const double> nodes, std::size_t j, double x)
{
  double v = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m)
  {
    if (m != j)
    {
      v *= (x - nodes[m]) / (nodes[j] - nodes[m]);
    }
  }
  return v;
}

inline double lagrange_derivative_unchecked(std::span<const double> nodes, std::size_t j,
                                            double x)
{
  double sum = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m)
  {
    if (m == j)
    {
      continue;
    }
    double term = 1.0 / (nodes[j] - nodes[m]);
    for (std::size_t k = 0; k < nodes.size(); ++k)
    {
      if (k != j && k != m)
      {
        term *= (x - nodes[k]) / (nodes[j] - nodes[k]);
      }
    }
    sum += term;
  }
  return sum;
}

}  // namespace detail

/// Value of the j-th Lagrange cardinal polynomial on `nodes` at x.
inline double lagrange_eval(std::span<const double> nodes, std::size_t j, double x)
{
  detail::check_distinct(nodes);
  require(j < nodes.size(), Errc::shape_mismatch, "Lagrange index out of range");
  return detail::lagrange_unchecked(nodes, j, x);
}

/// One-dimensional building blocks for a tensorized nodal basis of order p on LGL points.
/// Matrices are (quadrature points) x (basis functions), row-major.
struct TensorBasis1D
{
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> quad_points;
  std::vector<double> quad_weights;
  Matrix eval_at_quad;   // phi_j(q_a)
  Matrix deriv_at_quad;  // phi_j'(q_a)

  explicit TensorBasis1D(int p, int n_quad = -1) : order(p), nodes(lgl_nodes(p))
  {
    const auto q = gauss_quadrature(n_quad > 0 ? n_quad : p + 1);
    quad_points = q.points;
    quad_weights = q.weights;
    const std::size_t nq = quad_points.size();
    eval_at_quad = Matrix(nq, p + 1);
    deriv_at_quad = Matrix(nq, p + 1);
    for (std::size_t a = 0; a < nq; ++a)
    {
      for (int j = 0; j <= p; ++j)
      {
        eval_at_quad(a, j) = detail::lagrange_unchecked(nodes, j, quad_points[a]);
        deriv_at_quad(a, j) = detail::lagrange_derivative_unchecked(nodes, j, quad_points[a]);
      }
    }
  }

  int n_basis() const noexcept { return order + 1; }
  int n_quad() const noexcept { return static_cast<int>(quad_points.size()); }
};

/// Cached basis for order p with the default p+1 Gauss points. The returned reference
/// stays valid for the lifetime of the program.
inline const TensorBasis1D &tensor_basis(int p)
{
  require(p >= 1 && p <= max_order, Errc::invalid_order,
          "order must be in [1, 16], got " + std::to_string(p));
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TensorBasis1D>> cache;
  std::lock_guard lock(mutex);
  auto &slot = cache[p];
  if (!slot)
  {
    slot = std::make_unique<TensorBasis1D>(p);
  }
  return *slot;
}

/// M[i][j] = phi_j(to_points[i]) for the nodal basis of `from`.
inline Matrix interp_matrix_1d(const TensorBasis1D &from, std::span<const double> to_points)
{
  Matrix m(to_points.size(), from.nodes.size());
  for (std::size_t i = 0; i < to_points.size(); ++i)
  {
    for (std::size_t j = 0; j < from.nodes.size(); ++j)
    {
      m(i, j) = detail::lagrange_unchecked(from.nodes, j, to_points[i]);
    }
  }
  return m;
}

}  // namespace hmg

#endif  // HMG_TENSOR_BASIS_HPP
