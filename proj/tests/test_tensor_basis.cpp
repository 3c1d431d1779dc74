#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hmg/tensor_basis.hpp"

using namespace hmg;

// Oracle values first: roots of P3'(x) = (15x^2 - 3)/2 are +-1/sqrt(5).
TEST(LglNodes, OrderThreeMatchesDerivativeRoots)
{
  const auto x = lgl_nodes(3);
  ASSERT_EQ(x.size(), 4u);
  EXPECT_DOUBLE_EQ(x[0], -1.0);
  EXPECT_NEAR(x[1], -0.4472136, 1e-7);
  EXPECT_NEAR(x[2], 0.4472136, 1e-7);
  EXPECT_NEAR(x[1], -1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_DOUBLE_EQ(x[3], 1.0);
}

TEST(LglNodes, LowOrders)
{
  EXPECT_EQ(lgl_nodes(1), (std::vector<double>{-1.0, 1.0}));
  const auto x = lgl_nodes(2);
  EXPECT_DOUBLE_EQ(x[0], -1.0);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_DOUBLE_EQ(x[2], 1.0);
}

TEST(LglNodes, SortedSymmetricWithExactEndpoints)
{
  for (int p = 1; p <= max_order; ++p)
  {
    const auto x = lgl_nodes(p);
    ASSERT_EQ(x.size(), static_cast<std::size_t>(p + 1));
    EXPECT_EQ(x.front(), -1.0);
    EXPECT_EQ(x.back(), 1.0);
    for (int i = 0; i < p; ++i)
    {
      EXPECT_LT(x[i], x[i + 1]);
      EXPECT_EQ(x[i], -x[p - i]) << "p=" << p << " i=" << i;
    }
  }
}

TEST(LglNodes, RejectsInvalidOrder)
{
  for (int p : {0, -1})
  {
    try
    {
      (void)lgl_nodes(p);
      FAIL() << "p=" << p;
    }
    catch (const Error &e)
    {
      EXPECT_EQ(e.code(), Errc::invalid_order);
    }
  }
  try
  {
    (void)tensor_basis(max_order + 1);
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.code(), Errc::invalid_order);
  }
}

TEST(LglWeights, ExactForDegreeUpTo2pMinus1)
{
  for (int p = 1; p <= 8; ++p)
  {
    const auto x = lgl_nodes(p);
    const auto w = lgl_weights(p);
    for (int k = 0; k <= 2 * p - 1; ++k)
    {
      double s = 0.0;
      for (int i = 0; i <= p; ++i)
      {
        s += w[i] * std::pow(x[i], k);
      }
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-12) << "p=" << p << " k=" << k;
    }
  }
}

// Two-point rule from exactness on 1, x, x^2, x^3: points +-1/sqrt(3), weights 1.
TEST(GaussQuadrature, TwoPointRule)
{
  const auto q = gauss_quadrature(2);
  ASSERT_EQ(q.points.size(), 2u);
  EXPECT_NEAR(q.points[0], -0.57735027, 1e-8);
  EXPECT_NEAR(q.points[1], 0.57735027, 1e-8);
  EXPECT_NEAR(q.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(q.weights[1], 1.0, 1e-15);
}

TEST(GaussQuadrature, ExactForDegreeUpTo2nMinus1)
{
  for (int n = 1; n <= 17; ++n)
  {
    const auto q = gauss_quadrature(n);
    for (int k = 0; k <= 2 * n - 1; ++k)
    {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
      {
        s += q.weights[i] * std::pow(q.points[i], k);
      }
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Lagrange, CardinalAndPartitionOfUnity)
{
  for (int p : {1, 2, 5, 16})
  {
    const auto x = lgl_nodes(p);
    for (int j = 0; j <= p; ++j)
    {
      for (int i = 0; i <= p; ++i)
      {
        EXPECT_NEAR(lagrange_eval(x, j, x[i]), i == j ? 1.0 : 0.0, 1e-12);
      }
    }
    for (double t : {-0.93, -0.2, 0.11, 0.77})
    {
      double s = 0.0;
      for (int j = 0; j <= p; ++j)
      {
        s += lagrange_eval(x, j, t);
      }
      EXPECT_NEAR(s, 1.0, 1e-11);
    }
  }
}

TEST(Lagrange, RejectsRepeatedNodes)
{
  const std::vector<double> x{-1.0, 0.0, 0.0, 1.0};
  try
  {
    (void)lagrange_eval(x, 1, 0.5);
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.code(), Errc::degenerate_basis);
  }
}

// Interpolating x^p and differentiating must reproduce p x^(p-1) at the quadrature points.
TEST(TensorBasis, DerivativeMatrixIsExactOnPolynomials)
{
  for (int p : {1, 3, 8, 16})
  {
    const auto &b = tensor_basis(p);
    EXPECT_EQ(b.n_quad(), p + 1);
    for (int a = 0; a < b.n_quad(); ++a)
    {
      double v = 0.0, d = 0.0;
      for (int j = 0; j <= p; ++j)
      {
        v += b.eval_at_quad(a, j) * std::pow(b.nodes[j], p);
        d += b.deriv_at_quad(a, j) * std::pow(b.nodes[j], p);
      }
      const double q = b.quad_points[a];
      EXPECT_NEAR(v, std::pow(q, p), 1e-11);
      EXPECT_NEAR(d, p * std::pow(q, p - 1), 1e-9 * p * p);
    }
  }
}

TEST(TensorBasis, CachedInstanceIsStable)
{
  const auto *a = &tensor_basis(4);
  const auto *b = &tensor_basis(4);
  EXPECT_EQ(a, b);
}

TEST(TensorBasis, InterpolationMatrixReproducesQuadratics)
{
  const auto &b = tensor_basis(2);
  const std::vector<double> pts{-0.5, 0.25, 0.9};
  const auto m = interp_matrix_1d(b, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
  {
    double s = 0.0;
    for (int j = 0; j <= 2; ++j)
    {
      s += m(i, j) * (b.nodes[j] * b.nodes[j] + 3.0);
    }
    EXPECT_NEAR(s, pts[i] * pts[i] + 3.0, 1e-14);
  }
}
