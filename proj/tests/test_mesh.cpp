#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "hmg/mesh.hpp"
#include "hmg/tensor_basis.hpp"

using namespace hmg;

// 3x3 vertex lattice: 9 nodes, all but the centre on the boundary.
TEST(Mesh, TwoByTwoLinear)
{
  const auto m = build_mesh(2, 2, 1, {WarpId::identity_2d});
  EXPECT_EQ(m->n_dofs(), 9u);
  EXPECT_EQ(m->n_boundary(), 8u);
  EXPECT_FALSE(m->is_boundary(4));
  EXPECT_EQ(m->n_elements(), 4u);
  EXPECT_EQ(m->nodes_per_element(), 4);
}

TEST(Mesh, CountsInTwoAndThreeDimensions)
{
  for (int p : {1, 2, 5})
  {
    const auto m2 = build_mesh(2, 4, p, {WarpId::identity_2d});
    const std::size_t n1 = 4 * p + 1;
    EXPECT_EQ(m2->n_dofs(), n1 * n1);
    EXPECT_EQ(m2->n_boundary(), n1 * n1 - (n1 - 2) * (n1 - 2));
    const auto m3 = build_mesh(3, 2, p, {WarpId::identity_3d});
    const std::size_t k1 = 2 * p + 1;
    EXPECT_EQ(m3->n_dofs(), k1 * k1 * k1);
    EXPECT_EQ(m3->n_boundary(), k1 * k1 * k1 - (k1 - 2) * (k1 - 2) * (k1 - 2));
  }
}

TEST(Mesh, LatticeFollowsLglNodesPerElement)
{
  const auto m = build_mesh(2, 4, 3, {WarpId::identity_2d});
  const auto &lat = m->lattice();
  const auto x = lgl_nodes(3);
  EXPECT_EQ(lat.front(), 0.0);
  EXPECT_EQ(lat.back(), 1.0);
  for (int e = 0; e < 4; ++e)
  {
    for (int j = 0; j <= 3; ++j)
    {
      EXPECT_NEAR(lat[e * 3 + j], (e + 0.5 * (x[j] + 1.0)) / 4.0, 1e-15);
    }
  }
}

TEST(Mesh, ElementsShareFaceNodes)
{
  const auto m = build_mesh(2, 2, 2, {WarpId::identity_2d});
  const auto a = m->element_dofs(0);
  const auto b = m->element_dofs(1);
  std::set<int> sa(a.begin(), a.end()), shared;
  for (auto g : b)
  {
    if (sa.count(g))
    {
      shared.insert(g);
    }
  }
  EXPECT_EQ(shared.size(), 3u);
}

TEST(Mesh, IndexRoundTrip)
{
  const auto m = build_mesh(3, 2, 3, {WarpId::identity_3d});
  for (std::size_t g = 0; g < m->n_dofs(); g += 7)
  {
    EXPECT_EQ(m->global_index(m->lattice_index(g)), g);
  }
}

TEST(Mesh, RejectsBadInput)
{
  auto code_of = [](auto &&f)
  {
    try
    {
      f();
    }
    catch (const Error &e)
    {
      return e.code();
    }
    return Errc::io;
  };
  EXPECT_EQ(code_of([] { build_mesh(2, 3, 1, {WarpId::identity_2d}); }), Errc::invalid_mesh);
  EXPECT_EQ(code_of([] { build_mesh(3, 2, 1, {WarpId::identity_2d}); }), Errc::invalid_mesh);
  EXPECT_EQ(code_of([] { build_mesh(2, 2, 17, {WarpId::identity_2d}); }), Errc::invalid_order);
  EXPECT_EQ(code_of([] { coarsen_mesh(*build_mesh(2, 1, 2, {WarpId::identity_2d})); }),
            Errc::cannot_coarsen);
  EXPECT_EQ(code_of([] { reduce_order_mesh(*build_mesh(2, 2, 3, {WarpId::identity_2d})); }),
            Errc::cannot_p_coarsen);
  EXPECT_EQ(code_of([] { problem("4d-const"); }), Errc::configuration);
}

TEST(Mesh, CoarseningAndOrderReduction)
{
  const auto m = build_mesh(2, 8, 4, {WarpId::warp_2d});
  const auto c = coarsen_mesh(*m);
  EXPECT_EQ(c->nelem(), 4);
  EXPECT_EQ(c->order(), 4);
  EXPECT_EQ(c->warp().id, WarpId::warp_2d);
  const auto r = reduce_order_mesh(*m);
  EXPECT_EQ(r->nelem(), 8);
  EXPECT_EQ(r->order(), 2);
}

TEST(Warp, BoundaryMapsToBoundary)
{
  for (auto id : {WarpId::warp_2d, WarpId::warp_3d})
  {
    const WarpMap w{id};
    for (double t : {0.0, 0.13, 0.5, 0.91, 1.0})
    {
      for (int k = 0; k < w.dim(); ++k)
      {
        for (double side : {0.0, 1.0})
        {
          Point s{t, 0.37, 0.71};
          s[k] = side;
          EXPECT_NEAR(w.map(s)[k], side, 1e-15);
        }
      }
    }
  }
}

TEST(Warp, JacobianMatchesFiniteDifferences)
{
  for (auto id : {WarpId::warp_2d, WarpId::warp_3d})
  {
    const WarpMap w{id};
    const Point s{0.31, 0.62, 0.17};
    const auto j = w.jacobian(s);
    const double h = 1e-6;
    for (int c = 0; c < w.dim(); ++c)
    {
      Point a = s, b = s;
      a[c] += h;
      b[c] -= h;
      const auto fa = w.map(a), fb = w.map(b);
      for (int r = 0; r < w.dim(); ++r)
      {
        EXPECT_NEAR(j[r][c], (fa[r] - fb[r]) / (2 * h), 1e-8);
      }
    }
  }
}

TEST(Warp, DeterminantPositiveOnSampleGrid)
{
  const int n = 24;
  for (auto id : {WarpId::warp_2d, WarpId::warp_3d})
  {
    const WarpMap w{id};
    const int nz = w.dim() == 3 ? n : 0;
    double dmin = 1e300;
    for (int i = 0; i <= n; ++i)
    {
      for (int jj = 0; jj <= n; ++jj)
      {
        for (int k = 0; k <= nz; ++k)
        {
          const Point s{double(i) / n, double(jj) / n, nz ? double(k) / n : 0.0};
          dmin = std::min(dmin, determinant(w.jacobian(s), w.dim()));
        }
      }
    }
    EXPECT_GT(dmin, 0.2);
  }
}

TEST(Problems, Registry)
{
  EXPECT_EQ(problem("2d-const").dim, 2);
  EXPECT_TRUE(problem("2d-const").coefficient.is_constant());
  EXPECT_EQ(problem("3d-var").dim, 3);
  EXPECT_EQ(problem("3d-var").warp.id, WarpId::warp_3d);
  EXPECT_FALSE(problem("2d-var'").coefficient.is_constant());
  const auto mu = coefficient_field("2d-var");
  EXPECT_NEAR(mu.eval({0.25, 0.25, 0.0}), 1.0, 1e-9);
  EXPECT_NEAR(mu.eval({0.0, 0.0, 0.0}), 1.0 + 2e6, 1e-6);
}
