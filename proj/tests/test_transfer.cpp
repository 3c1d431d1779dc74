#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hmg/operator.hpp"
#include "hmg/pcg.hpp"
#include "hmg/transfer.hpp"

using namespace hmg;

namespace
{

struct Pair
{
  std::shared_ptr<const StructuredMesh> coarse, fine;
};

std::vector<Pair> pairs()
{
  std::vector<Pair> out;
  for (int dim : {2, 3})
  {
    const WarpMap w{dim == 2 ? WarpId::warp_2d : WarpId::warp_3d};
    for (int p : {1, 2, 3, 4})
    {
      const auto f = build_mesh(dim, 4, p, w);
      out.push_back({coarsen_mesh(*f), f});
    }
    for (int p : {2, 4, 8})
    {
      if (dim == 3 && p == 8)
      {
        continue;
      }
      const auto f = build_mesh(dim, 2, p, w);
      out.push_back({reduce_order_mesh(*f), f});
    }
  }
  return out;
}

std::string name(const Pair &q)
{
  return std::to_string(q.fine->dim()) + "d " + std::to_string(q.coarse->nelem()) + "/p" +
         std::to_string(q.coarse->order()) + " -> " + std::to_string(q.fine->nelem()) + "/p" +
         std::to_string(q.fine->order());
}

// Interpolant of a polynomial of total degree `deg` at the reference coordinates.
std::vector<double> sample(const StructuredMesh &m, int deg)
{
  std::vector<double> v(m.n_dofs());
  for (std::size_t g = 0; g < v.size(); ++g)
  {
    const auto x = m.reference_point(g);
    double s = 0.3;
    for (int k = 0; k < m.dim(); ++k)
    {
      s += (k + 1) * std::pow(x[k], std::max(0, deg - k)) + 0.5 * std::pow(x[k], std::max(0, deg - 1));
    }
    v[g] = s;
  }
  return v;
}

}  // namespace

TEST(Transfer1DTest, HTransferRowsSumToOne)
{
  for (int p : {1, 3, 8, 16})
  {
    const auto t = h_transfer_1d(4, p);
    EXPECT_EQ(t.n_coarse, 4 * p + 1);
    EXPECT_EQ(t.n_fine, 8 * p + 1);
    for (int r = 0; r < t.n_fine; ++r)
    {
      double s = 0.0;
      for (int k = t.row_start[r]; k < t.row_start[r + 1]; ++k)
      {
        s += t.row_val[k];
      }
      EXPECT_NEAR(s, 1.0, 1e-13);
    }
  }
}

TEST(Transfer1DTest, NodesShared)
{
  // Coarse p=1 nodes reappear on the fine p=2 lattice with weight one.
  const auto t = p_transfer_1d(2, 1, 2);
  EXPECT_DOUBLE_EQ(t.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.at(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(t.at(1, 1), 0.5);
}

TEST(TransferTest, ProlongsConstants)
{
  for (const auto &q : pairs())
  {
    const auto t = Transfer::between(*q.coarse, *q.fine);
    std::vector<double> c(q.coarse->n_dofs(), 1.0), f(q.fine->n_dofs());
    t.prolong(c, f);
    for (double x : f)
    {
      ASSERT_NEAR(x, 1.0, 1e-13) << name(q);
    }
  }
}

TEST(TransferTest, RestrictionIsAdjoint)
{
  for (const auto &q : pairs())
  {
    const auto t = Transfer::between(*q.coarse, *q.fine);
    const auto vc = random_vector(q.coarse->n_dofs(), 1);
    const auto vf = random_vector(q.fine->n_dofs(), 2);
    std::vector<double> pvc(vf.size()), rvf(vc.size());
    t.prolong(vc, pvc);
    t.restrict_to_coarse(vf, rvf);
    const double a = dot(pvc, vf), b = dot(vc, rvf);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << name(q);
  }
}

TEST(TransferTest, ExactOnCoarsePolynomials)
{
  for (const auto &q : pairs())
  {
    const auto t = Transfer::between(*q.coarse, *q.fine);
    const int deg = q.coarse->order();
    const auto c = sample(*q.coarse, deg);
    const auto want = sample(*q.fine, deg);
    std::vector<double> f(want.size());
    t.prolong(c, f);
    for (std::size_t i = 0; i < f.size(); ++i)
    {
      ASSERT_NEAR(f[i], want[i], 1e-10) << name(q) << " dof " << i;
    }
  }
}

TEST(TransferTest, CsrMatchesMatrixFreeApplication)
{
  const auto f = build_mesh(2, 4, 3, {WarpId::identity_2d});
  const auto c = coarsen_mesh(*f);
  const auto t = Transfer::between(*c, *f);
  const auto p = t.to_csr();
  EXPECT_EQ(p.rows(), f->n_dofs());
  EXPECT_EQ(p.cols(), c->n_dofs());
  const auto v = random_vector(c->n_dofs(), 3);
  std::vector<double> a(f->n_dofs()), b(f->n_dofs());
  t.prolong(v, a);
  p.apply(v, b);
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    EXPECT_NEAR(a[i], b[i], 1e-14);
  }
}

// With affine geometry and a constant coefficient the quadrature is exact, so the
// rediscretized coarse operator equals the Galerkin product.
TEST(TransferTest, GalerkinIdentityOnAffineMeshes)
{
  for (int dim : {2, 3})
  {
    const WarpMap w{dim == 2 ? WarpId::identity_2d : WarpId::identity_3d};
    for (bool h : {true, false})
    {
      const auto f = build_mesh(dim, 2, 4, w);
      const auto c = h ? coarsen_mesh(*f) : reduce_order_mesh(*f);
      const auto af = assemble_stiffness(f, {}, default_budget_bytes, false).to_dense();
      const auto ac = assemble_stiffness(c, {}, default_budget_bytes, false).to_dense();
      const auto p = Transfer::between(*c, *f).to_csr().to_dense();
      const Matrix g = p.transpose() * (af * p);
      EXPECT_LT((g - ac).frobenius_norm(), 1e-10 * ac.frobenius_norm())
          << dim << "d " << (h ? "h" : "p");
    }
  }
}

TEST(TransferTest, RejectsUnrelatedMeshes)
{
  const auto a = build_mesh(2, 4, 2, {WarpId::identity_2d});
  const auto b = build_mesh(2, 4, 3, {WarpId::identity_2d});
  const auto c = build_mesh(2, 8, 3, {WarpId::identity_2d});
  const auto d = build_mesh(3, 8, 2, {WarpId::identity_3d});
  for (auto [x, y] : {std::pair{b, a}, std::pair{a, c}, std::pair{a, d}, std::pair{c, a}})
  {
    try
    {
      (void)Transfer::between(*x, *y);
      FAIL();
    }
    catch (const Error &e)
    {
      EXPECT_EQ(e.code(), Errc::shape_mismatch);
    }
  }
}
