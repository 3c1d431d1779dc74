#ifndef HMG_OPERATOR_HPP
#define HMG_OPERATOR_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"
#include "hmg/mesh.hpp"
#include "hmg/sparse.hpp"
#include "hmg/tensor_basis.hpp"

namespace hmg
{

inline constexpr std::size_t default_budget_bytes = std::size_t{2} << 30;

namespace detail
{

// Contracts a 1D matrix along one axis of a tensor stored with axis 0 fastest.
// m is (rows x cols) row-major; with `transpose` the contraction uses m^T. The input
// extent along `axis` must equal the contracted dimension; the output extent becomes
// the other one. Returns the flop count.
inline std::size_t contract(const Matrix &m, bool transpose, const double *in, double *out,
                            const std::array<int, 3> &ext, int axis, bool accumulate = false)
{
  const int n_in = transpose ? static_cast<int>(m.rows()) : static_cast<int>(m.cols());
  const int n_out = transpose ? static_cast<int>(m.cols()) : static_cast<int>(m.rows());
  int inner = 1, outer = 1;
  for (int k = 0; k < axis; ++k)
  {
    inner *= ext[k];
  }
  for (int k = axis + 1; k < 3; ++k)
  {
    outer *= ext[k];
  }
  const std::size_t mc = m.cols();
  const double *md = m.data().data();
  for (int o = 0; o < outer; ++o)
  {
    const double *src = in + static_cast<std::size_t>(o) * n_in * inner;
    double *dst = out + static_cast<std::size_t>(o) * n_out * inner;
    for (int a = 0; a < n_out; ++a)
    {
      double *d = dst + static_cast<std::size_t>(a) * inner;
      if (!accumulate)
      {
        for (int k = 0; k < inner; ++k)
        {
          d[k] = 0.0;
        }
      }
      for (int i = 0; i < n_in; ++i)
      {
        const double c = transpose ? md[i * mc + a] : md[a * mc + i];
        const double *s = src + static_cast<std::size_t>(i) * inner;
        for (int k = 0; k < inner; ++k)
        {
          d[k] += c * s[k];
        }
      }
    }
  }
  return 2u * static_cast<std::size_t>(outer) * n_out * n_in * inner;
}

inline Mat3 inverse(const Mat3 &j, int dim, double det)
{
  Mat3 r{};
  if (dim == 2)
  {
    r[0][0] = j[1][1] / det;
    r[0][1] = -j[0][1] / det;
    r[1][0] = -j[1][0] / det;
    r[1][1] = j[0][0] / det;
    return r;
  }
  r[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det;
  r[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
  r[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
  r[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det;
  r[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
  r[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
  r[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det;
  r[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
  r[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;
  return r;
}

}  // namespace detail

enum class KernelKind
{
  stiffness,
  mass,
};

/// Tensorized (sum-factorized) element kernel for the stiffness or mass bilinear form.
/// Geometry factors are computed once per quadrature point: for the stiffness the
/// symmetric d x d matrix w * detJ * mu * J^{-1} J^{-T}, for the mass w * detJ.
class MatrixFreeOperator
{
public:
  MatrixFreeOperator(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coefficient,
                     KernelKind kind = KernelKind::stiffness)
    : mesh_(std::move(mesh)), coefficient_(coefficient), kind_(kind),
      basis_(tensor_basis(mesh_->order()))
  {
    const int dim = mesh_->dim();
    const int nq = basis_.n_quad();
    nq_total_ = 1;
    for (int k = 0; k < dim; ++k)
    {
      nq_total_ *= nq;
    }
    n_sym_ = kind_ == KernelKind::mass ? 1 : (dim == 2 ? 3 : 6);
    geo_.resize(mesh_->n_elements() * nq_total_ * n_sym_);

    const double h = 1.0 / mesh_->nelem();
    for (std::size_t e = 0; e < mesh_->n_elements(); ++e)
    {
      const auto ec = mesh_->element_index(e);
      double *g = geo_.data() + e * nq_total_ * n_sym_;
      for (std::size_t q = 0; q < nq_total_; ++q)
      {
        Point s{0.0, 0.0, 0.0};
        double w = 1.0;
        std::size_t rem = q;
        for (int k = 0; k < dim; ++k)
        {
          const int a = static_cast<int>(rem % nq);
          rem /= nq;
          s[k] = (ec[k] + 0.5 * (basis_.quad_points[a] + 1.0)) * h;
          w *= basis_.quad_weights[a];
        }
        // Reference element [-1,1]^d -> unit-cube cell (scale h/2) -> warp.
        Mat3 jac = mesh_->warp().jacobian(s);
        for (int r = 0; r < dim; ++r)
        {
          for (int c = 0; c < dim; ++c)
          {
            jac[r][c] *= 0.5 * h;
          }
        }
        const double det = determinant(jac, dim);
        require(det > 0.0, Errc::degenerate_geometry, "non-positive Jacobian determinant");
        if (kind_ == KernelKind::mass)
        {
          g[q] = w * det;
          continue;
        }
        const double mu = coefficient_.eval(mesh_->warp().map(s));
        const Mat3 inv = detail::inverse(jac, dim, det);
        const double scale = w * det * mu;
        double *gq = g + q * n_sym_;
        int idx = 0;
        for (int r = 0; r < dim; ++r)
        {
          for (int c = r; c < dim; ++c)
          {
            double v = 0.0;
            for (int k = 0; k < dim; ++k)
            {
              v += inv[r][k] * inv[c][k];
            }
            gq[idx++] = scale * v;
          }
        }
      }
    }

    // Flop count of one element application.
    std::vector<double> u(nodes()), v(nodes());
    Scratch scratch(*this);
    flops_per_element_ = element_apply(0, u.data(), v.data(), scratch);
  }

  const StructuredMesh &mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const StructuredMesh> mesh_ptr() const noexcept { return mesh_; }
  const CoefficientField &coefficient() const noexcept { return coefficient_; }
  KernelKind kind() const noexcept { return kind_; }
  std::size_t n_dofs() const noexcept { return mesh_->n_dofs(); }

  /// Flops of one global application (element kernels plus scatter-add).
  double flops_per_apply() const noexcept
  {
    return static_cast<double>(mesh_->n_elements()) *
           static_cast<double>(flops_per_element_ + nodes());
  }

  /// v = A u. With `project`, boundary DOFs act as identity rows/columns.
  void apply(std::span<const double> u, std::span<double> v, bool project = true) const
  {
    require(u.size() == n_dofs() && v.size() == n_dofs(), Errc::shape_mismatch,
            "operator apply dimension mismatch");
    const int nloc = nodes();
    std::vector<double> ue(nloc), ve(nloc);
    Scratch scratch(*this);
    std::fill(v.begin(), v.end(), 0.0);
    const auto &bnd = mesh_->boundary_mask();
    for (std::size_t e = 0; e < mesh_->n_elements(); ++e)
    {
      const auto dofs = mesh_->element_dofs(e);
      for (int l = 0; l < nloc; ++l)
      {
        const auto g = dofs[l];
        ue[l] = (project && bnd[g]) ? 0.0 : u[g];
      }
      element_apply(e, ue.data(), ve.data(), scratch);
      for (int l = 0; l < nloc; ++l)
      {
        v[dofs[l]] += ve[l];
      }
    }
    if (project)
    {
      for (std::size_t g = 0; g < n_dofs(); ++g)
      {
        if (bnd[g])
        {
          v[g] = u[g];
        }
      }
    }
  }

  /// Unassembled element matrix (no boundary projection), built column by column.
  Matrix element_matrix(std::size_t e) const
  {
    const int nloc = nodes();
    Matrix k(nloc, nloc);
    std::vector<double> u(nloc, 0.0), v(nloc);
    Scratch scratch(*this);
    for (int j = 0; j < nloc; ++j)
    {
      u[j] = 1.0;
      element_apply(e, u.data(), v.data(), scratch);
      u[j] = 0.0;
      for (int i = 0; i < nloc; ++i)
      {
        k(i, j) = v[i];
      }
    }
    for (int i = 0; i < nloc; ++i)
    {
      for (int j = i + 1; j < nloc; ++j)
      {
        const double s = 0.5 * (k(i, j) + k(j, i));
        k(i, j) = s;
        k(j, i) = s;
      }
    }
    return k;
  }

  /// Exact diagonal of the projected operator, element by element (boundary entries 1).
  std::vector<double> diagonal() const
  {
    const int dim = mesh_->dim();
    const int np = basis_.n_basis();
    const int nq = basis_.n_quad();
    const int nloc = nodes();
    const Matrix &b = basis_.eval_at_quad;
    const Matrix &d = basis_.deriv_at_quad;
    auto hadamard = [&](const Matrix &x, const Matrix &y)
    {
      Matrix h(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.rows(); ++i)
      {
        for (std::size_t j = 0; j < x.cols(); ++j)
        {
          h(i, j) = x(i, j) * y(i, j);
        }
      }
      return h;
    };
    const Matrix bb = hadamard(b, b), bd = hadamard(b, d), dd = hadamard(d, d);

    std::vector<double> diag(n_dofs(), 0.0);
    std::vector<double> field(nq_total_), t1(nq_total_), t2(nq_total_), out(nloc), last(nloc);
    const auto &bnd = mesh_->boundary_mask();
    for (std::size_t e = 0; e < mesh_->n_elements(); ++e)
    {
      const double *g = geo_.data() + e * nq_total_ * n_sym_;
      std::fill(out.begin(), out.end(), 0.0);
      int idx = 0;
      const int n_pairs = kind_ == KernelKind::mass ? 1 : dim;
      for (int r = 0; r < n_pairs; ++r)
      {
        for (int c = r; c < n_pairs; ++c, ++idx)
        {
          const double mult = (r == c) ? 1.0 : 2.0;
          for (std::size_t q = 0; q < nq_total_; ++q)
          {
            field[q] = mult * g[q * n_sym_ + idx];
          }
          // Factor along axis a: product of the two 1D factors for components r and c.
          auto factor = [&](int a) -> const Matrix &
          {
            if (kind_ == KernelKind::mass)
            {
              return bb;
            }
            const int nd = (a == r) + (a == c);
            return nd == 0 ? bb : (nd == 1 ? bd : dd);
          };
          std::array<int, 3> ext{nq, dim >= 2 ? nq : 1, dim >= 3 ? nq : 1};
          const double *src = field.data();
          double *bufs[2] = {t1.data(), t2.data()};
          for (int a = 0; a < dim; ++a)
          {
            double *dst = (a == dim - 1) ? last.data() : bufs[a % 2];
            detail::contract(factor(a), true, src, dst, ext, a);
            ext[a] = np;
            src = dst;
          }
          for (int l = 0; l < nloc; ++l)
          {
            out[l] += last[l];
          }
        }
      }
      const auto dofs = mesh_->element_dofs(e);
      for (int l = 0; l < nloc; ++l)
      {
        diag[dofs[l]] += out[l];
      }
    }
    if (kind_ == KernelKind::stiffness)
    {
      for (std::size_t gi = 0; gi < n_dofs(); ++gi)
      {
        if (bnd[gi])
        {
          diag[gi] = 1.0;
        }
      }
    }
    return diag;
  }

  int nodes() const noexcept { return mesh_->nodes_per_element(); }

private:
  struct Scratch
  {
    std::vector<double> a, b, c, d, e, f, g;
    explicit Scratch(const MatrixFreeOperator &op)
    {
      const int n = std::max(op.basis_.n_quad(), op.basis_.n_basis());
      std::size_t size = 1;
      for (int k = 0; k < op.mesh_->dim(); ++k)
      {
        size *= n;
      }
      for (auto *v : {&a, &b, &c, &d, &e, &f, &g})
      {
        v->assign(size, 0.0);
      }
    }
  };

  // v_e = K_e u_e for element e. Returns flops.
  std::size_t element_apply(std::size_t e, const double *u, double *v, Scratch &s) const
  {
    const int dim = mesh_->dim();
    const int np = basis_.n_basis();
    const int nq = basis_.n_quad();
    const Matrix &B = basis_.eval_at_quad;
    const Matrix &D = basis_.deriv_at_quad;
    const double *g = geo_.data() + e * nq_total_ * n_sym_;
    std::size_t flops = 0;
    using detail::contract;

    if (kind_ == KernelKind::mass)
    {
      // v = B^T W B u, one axis at a time.
      std::array<int, 3> ext{np, dim >= 2 ? np : 1, dim >= 3 ? np : 1};
      const double *src = u;
      double *bufs[2] = {s.a.data(), s.b.data()};
      for (int a = 0; a < dim; ++a)
      {
        flops += contract(B, false, src, bufs[a % 2], ext, a);
        ext[a] = nq;
        src = bufs[a % 2];
      }
      double *w = const_cast<double *>(src);
      for (std::size_t q = 0; q < nq_total_; ++q)
      {
        w[q] *= g[q];
      }
      flops += nq_total_;
      for (int a = 0; a < dim; ++a)
      {
        double *dst = (a == dim - 1) ? v : (src == s.a.data() ? s.b.data() : s.a.data());
        flops += contract(B, true, src, dst, ext, a);
        ext[a] = np;
        src = dst;
      }
      return flops;
    }

    if (dim == 2)
    {
      std::array<int, 3> ext{np, np, 1};
      // Axis 1 first, then axis 0.
      flops += contract(B, false, u, s.a.data(), ext, 1);  // tB
      flops += contract(D, false, u, s.b.data(), ext, 1);  // tD
      ext = {np, nq, 1};
      double *g0 = s.c.data();
      double *g1 = s.d.data();
      flops += contract(D, false, s.a.data(), g0, ext, 0);
      flops += contract(B, false, s.b.data(), g1, ext, 0);
      for (std::size_t q = 0; q < nq_total_; ++q)
      {
        const double *gq = g + 3 * q;
        const double x0 = g0[q], x1 = g1[q];
        g0[q] = gq[0] * x0 + gq[1] * x1;
        g1[q] = gq[1] * x0 + gq[2] * x1;
      }
      flops += 6 * nq_total_;
      ext = {nq, nq, 1};
      flops += contract(D, true, g0, s.a.data(), ext, 0);
      flops += contract(B, true, g1, s.b.data(), ext, 0);
      ext = {np, nq, 1};
      flops += contract(B, true, s.a.data(), v, ext, 1);
      flops += contract(D, true, s.b.data(), v, ext, 1, true);
      return flops;
    }

    // 3D: axis 2, then axis 1, then axis 0.
    std::array<int, 3> ext{np, np, np};
    double *tB = s.a.data();
    double *tD = s.b.data();
    flops += contract(B, false, u, tB, ext, 2);
    flops += contract(D, false, u, tD, ext, 2);
    ext = {np, np, nq};
    double *tBB = s.c.data();
    double *tBD = s.d.data();
    double *tDB = s.e.data();
    flops += contract(B, false, tB, tBB, ext, 1);
    flops += contract(D, false, tB, tBD, ext, 1);
    flops += contract(B, false, tD, tDB, ext, 1);
    ext = {np, nq, nq};
    double *g0 = s.a.data();
    double *g1 = s.b.data();
    double *g2 = s.f.data();
    flops += contract(D, false, tBB, g0, ext, 0);
    flops += contract(B, false, tBD, g1, ext, 0);
    flops += contract(B, false, tDB, g2, ext, 0);
    for (std::size_t q = 0; q < nq_total_; ++q)
    {
      const double *gq = g + 6 * q;
      const double x0 = g0[q], x1 = g1[q], x2 = g2[q];
      g0[q] = gq[0] * x0 + gq[1] * x1 + gq[2] * x2;
      g1[q] = gq[1] * x0 + gq[3] * x1 + gq[4] * x2;
      g2[q] = gq[2] * x0 + gq[4] * x1 + gq[5] * x2;
    }
    flops += 15 * nq_total_;
    ext = {nq, nq, nq};
    // Back along axis 0.
    flops += contract(D, true, g0, tBB, ext, 0);
    flops += contract(B, true, g1, tBD, ext, 0);
    flops += contract(B, true, g2, tDB, ext, 0);
    ext = {np, nq, nq};
    // Along axis 1: combine into two streams for the final axis-2 contraction.
    double *sB = s.g.data();
    flops += contract(B, true, tBB, sB, ext, 1);
    flops += contract(D, true, tBD, sB, ext, 1, true);
    double *sD = s.a.data();
    flops += contract(B, true, tDB, sD, ext, 1);
    ext = {np, np, nq};
    flops += contract(B, true, sB, v, ext, 2);
    flops += contract(D, true, sD, v, ext, 2, true);
    return flops;
  }

  std::shared_ptr<const StructuredMesh> mesh_;
  CoefficientField coefficient_;
  KernelKind kind_;
  const TensorBasis1D &basis_;
  std::size_t nq_total_ = 0;
  int n_sym_ = 0;
  std::vector<double> geo_;
  std::size_t flops_per_element_ = 0;
};

/// Number of nonzeros of the assembled order-p operator on `mesh`.
inline std::size_t stiffness_nnz(const StructuredMesh &mesh)
{
  return TensorPattern::element_coupling(mesh.dim(), mesh.nelem(), mesh.order()).nnz();
}

namespace detail
{

inline CsrMatrix assemble_from_kernel(const MatrixFreeOperator &kernel, std::size_t budget_bytes)
{
  const auto &mesh = kernel.mesh();
  const auto pattern = TensorPattern::element_coupling(mesh.dim(), mesh.nelem(), mesh.order());
  CsrMatrix a = pattern.allocate(budget_bytes);
  auto vals = a.values();
  const auto row_ptr = a.row_ptr();
  const int nloc = mesh.nodes_per_element();
  std::vector<std::array<int, 3>> lat(nloc);
  for (std::size_t e = 0; e < mesh.n_elements(); ++e)
  {
    const Matrix k = kernel.element_matrix(e);
    const auto dofs = mesh.element_dofs(e);
    for (int l = 0; l < nloc; ++l)
    {
      lat[l] = mesh.lattice_index(dofs[l]);
    }
    for (int i = 0; i < nloc; ++i)
    {
      const auto base = row_ptr[dofs[i]];
      for (int j = 0; j < nloc; ++j)
      {
        vals[base + pattern.offset_in_row(lat[i], lat[j])] += k(i, j);
      }
    }
  }
  return a;
}

}  // namespace detail

/// Sparse stiffness matrix with identity-projected boundary rows/columns (unless
/// `project` is false).
inline CsrMatrix assemble_stiffness(std::shared_ptr<const StructuredMesh> mesh,
                                    CoefficientField coefficient,
                                    std::size_t budget_bytes = default_budget_bytes,
                                    bool project = true)
{
  const std::size_t bytes = stiffness_nnz(*mesh) * CsrMatrix::bytes_per_entry;
  require(bytes <= budget_bytes, Errc::assembly_too_large,
          "stiffness needs " + std::to_string(bytes) + " bytes, budget is " +
              std::to_string(budget_bytes));
  MatrixFreeOperator kernel(mesh, coefficient);
  CsrMatrix a = detail::assemble_from_kernel(kernel, budget_bytes);
  if (project)
  {
    a.project_identity(mesh->boundary_mask());
  }
  return a;
}

/// Sparse mass matrix (no boundary projection).
inline CsrMatrix assemble_mass(std::shared_ptr<const StructuredMesh> mesh,
                               std::size_t budget_bytes = default_budget_bytes)
{
  const std::size_t bytes = stiffness_nnz(*mesh) * CsrMatrix::bytes_per_entry;
  require(bytes <= budget_bytes, Errc::assembly_too_large,
          "mass matrix needs " + std::to_string(bytes) + " bytes, budget is " +
              std::to_string(budget_bytes));
  MatrixFreeOperator kernel(mesh, CoefficientField{}, KernelKind::mass);
  return detail::assemble_from_kernel(kernel, budget_bytes);
}

/// Unassembled element stiffness matrices (no boundary projection).
inline std::vector<Matrix> element_matrices(std::shared_ptr<const StructuredMesh> mesh,
                                            CoefficientField coefficient,
                                            std::size_t budget_bytes = default_budget_bytes)
{
  const std::size_t nloc = mesh->nodes_per_element();
  const std::size_t bytes = mesh->n_elements() * nloc * nloc * sizeof(double);
  require(bytes <= budget_bytes, Errc::element_too_large,
          "element matrices need " + std::to_string(bytes) + " bytes, budget is " +
              std::to_string(budget_bytes));
  MatrixFreeOperator kernel(mesh, coefficient);
  std::vector<Matrix> out;
  out.reserve(mesh->n_elements());
  for (std::size_t e = 0; e < mesh->n_elements(); ++e)
  {
    out.push_back(kernel.element_matrix(e));
  }
  return out;
}

/// Q1 stiffness on straight-sided sub-elements whose vertices are the (warped) lattice
/// nodes of `mesh`, on the same global DOFs. 2-point Gauss rule per direction with the
/// coefficient evaluated at the mapped quadrature points.
inline CsrMatrix assemble_low_order_overlay(std::shared_ptr<const StructuredMesh> mesh,
                                            CoefficientField coefficient,
                                            std::size_t budget_bytes = default_budget_bytes,
                                            bool project = true)
{
  require(mesh->order() >= 2, Errc::no_op, "order-1 overlay equals the operator itself");
  const int dim = mesh->dim();
  const int n1 = mesh->n1();
  const auto pattern = TensorPattern::nearest_neighbour(dim, n1);
  CsrMatrix a = pattern.allocate(budget_bytes);
  auto vals = a.values();
  const auto row_ptr = a.row_ptr();

  const double gq = 1.0 / std::sqrt(3.0);
  const int nv = dim == 2 ? 4 : 8;
  const int nqp = nv;
  // Reference vertex signs and Q1 shape values/gradients at the quadrature points.
  std::vector<std::array<int, 3>> vtx(nv);
  for (int v = 0; v < nv; ++v)
  {
    vtx[v] = {v & 1, (v >> 1) & 1, (v >> 2) & 1};
  }
  struct QData
  {
    std::array<double, 8> n;
    std::array<std::array<double, 3>, 8> dn;
  };
  std::vector<QData> qd(nqp);
  for (int q = 0; q < nqp; ++q)
  {
    const std::array<double, 3> xi{(q & 1) ? gq : -gq, ((q >> 1) & 1) ? gq : -gq,
                                   ((q >> 2) & 1) ? gq : -gq};
    for (int v = 0; v < nv; ++v)
    {
      std::array<double, 3> f{}, df{};
      for (int k = 0; k < 3; ++k)
      {
        const double sgn = vtx[v][k] ? 1.0 : -1.0;
        f[k] = k < dim ? 0.5 * (1.0 + sgn * xi[k]) : 1.0;
        df[k] = k < dim ? 0.5 * sgn : 0.0;
      }
      qd[q].n[v] = f[0] * f[1] * f[2];
      for (int k = 0; k < dim; ++k)
      {
        double d = df[k];
        for (int m = 0; m < dim; ++m)
        {
          if (m != k)
          {
            d *= f[m];
          }
        }
        qd[q].dn[v][k] = d;
      }
    }
  }

  std::vector<Point> x(mesh->n_dofs());
  for (std::size_t g = 0; g < mesh->n_dofs(); ++g)
  {
    x[g] = mesh->physical_point(g);
  }

  const int ns = n1 - 1;
  std::size_t n_sub = 1;
  for (int k = 0; k < dim; ++k)
  {
    n_sub *= ns;
  }
  std::vector<std::array<int, 3>> lat(nv);
  std::vector<std::size_t> gid(nv);
  Matrix ke(nv, nv);
  for (std::size_t sidx = 0; sidx < n_sub; ++sidx)
  {
    std::array<int, 3> c0{0, 0, 0};
    std::size_t rem = sidx;
    for (int k = 0; k < dim; ++k)
    {
      c0[k] = static_cast<int>(rem % ns);
      rem /= ns;
    }
    for (int v = 0; v < nv; ++v)
    {
      lat[v] = {c0[0] + vtx[v][0], c0[1] + vtx[v][1], dim == 3 ? c0[2] + vtx[v][2] : 0};
      gid[v] = mesh->global_index(lat[v]);
    }
    for (auto &val : ke.data())
    {
      val = 0.0;
    }
    for (int q = 0; q < nqp; ++q)
    {
      Mat3 jac{};
      Point xq{0.0, 0.0, 0.0};
      for (int v = 0; v < nv; ++v)
      {
        for (int r = 0; r < dim; ++r)
        {
          xq[r] += qd[q].n[v] * x[gid[v]][r];
          for (int c = 0; c < dim; ++c)
          {
            jac[r][c] += x[gid[v]][r] * qd[q].dn[v][c];
          }
        }
      }
      const double det = determinant(jac, dim);
      require(det > 0.0, Errc::degenerate_geometry, "inverted overlay sub-element");
      const Mat3 inv = detail::inverse(jac, dim, det);
      const double scale = det * coefficient.eval(xq);
      std::array<std::array<double, 3>, 8> grad{};
      for (int v = 0; v < nv; ++v)
      {
        for (int r = 0; r < dim; ++r)
        {
          double s = 0.0;
          for (int k = 0; k < dim; ++k)
          {
            s += inv[k][r] * qd[q].dn[v][k];
          }
          grad[v][r] = s;
        }
      }
      for (int i = 0; i < nv; ++i)
      {
        for (int j = 0; j < nv; ++j)
        {
          double s = 0.0;
          for (int r = 0; r < dim; ++r)
          {
            s += grad[i][r] * grad[j][r];
          }
          ke(i, j) += scale * s;
        }
      }
    }
    for (int i = 0; i < nv; ++i)
    {
      const auto base = row_ptr[gid[i]];
      for (int j = 0; j < nv; ++j)
      {
        vals[base + pattern.offset_in_row(lat[i], lat[j])] += ke(i, j);
      }
    }
  }
  if (project)
  {
    a.project_identity(mesh->boundary_mask());
  }
  return a;
}

/// Linear operator on the DOF vector of one mesh: matrix-free kernel, assembled CSR, or
/// both. Apply uses the CSR matrix when present.
class DiscreteOperator
{
public:
  enum class Mode
  {
    matrix_free,
    assembled,
  };

  struct Options
  {
    bool assemble = false;
    bool matrix_free = true;
    std::size_t budget_bytes = default_budget_bytes;
  };

  DiscreteOperator(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coefficient,
                   Options opt)
    : mesh_(std::move(mesh)), coefficient_(coefficient)
  {
    require(opt.assemble || opt.matrix_free, Errc::configuration,
            "operator needs at least one realization");
    if (opt.assemble)
    {
      matrix_ = assemble_stiffness(mesh_, coefficient_, opt.budget_bytes);
    }
    if (opt.matrix_free || !opt.assemble)
    {
      kernel_ = std::make_shared<const MatrixFreeOperator>(mesh_, coefficient_);
    }
  }

  /// Wraps an already assembled matrix (e.g. the low-order overlay).
  DiscreteOperator(std::shared_ptr<const StructuredMesh> mesh, CoefficientField coefficient,
                   CsrMatrix matrix)
    : mesh_(std::move(mesh)), coefficient_(coefficient), matrix_(std::move(matrix))
  {
  }

  Mode mode() const noexcept { return matrix_ ? Mode::assembled : Mode::matrix_free; }
  const StructuredMesh &mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const StructuredMesh> mesh_ptr() const noexcept { return mesh_; }
  const CoefficientField &coefficient() const noexcept { return coefficient_; }
  std::size_t n_dofs() const noexcept { return mesh_->n_dofs(); }

  bool has_matrix() const noexcept { return matrix_.has_value(); }
  const CsrMatrix &matrix() const
  {
    require(matrix_.has_value(), Errc::requires_assembly, "operator is not assembled");
    return *matrix_;
  }
  const MatrixFreeOperator *kernel() const noexcept { return kernel_.get(); }

  void apply(std::span<const double> u, std::span<double> v) const
  {
    if (matrix_)
    {
      matrix_->apply(u, v);
    }
    else
    {
      kernel_->apply(u, v);
    }
  }

  /// Flops of one application in the active mode.
  double flops_per_apply() const
  {
    if (matrix_)
    {
      return 2.0 * static_cast<double>(matrix_->nnz());
    }
    return kernel_->flops_per_apply();
  }

  /// Flops per unknown of one application (g_p).
  double flops_per_dof() const { return flops_per_apply() / static_cast<double>(n_dofs()); }

  std::vector<double> diagonal() const
  {
    if (matrix_)
    {
      return matrix_->diagonal();
    }
    return kernel_->diagonal();
  }

  std::vector<double> l1_diagonal() const
  {
    require(matrix_.has_value(), Errc::requires_assembly, "l1 diagonal needs row access");
    return matrix_->l1_diagonal();
  }

private:
  std::shared_ptr<const StructuredMesh> mesh_;
  CoefficientField coefficient_;
  std::optional<CsrMatrix> matrix_;
  std::shared_ptr<const MatrixFreeOperator> kernel_;
};

inline std::vector<double> operator_diagonal(const DiscreteOperator &op) { return op.diagonal(); }
inline std::vector<double> l1_diagonal(const DiscreteOperator &op) { return op.l1_diagonal(); }

}  // namespace hmg

#endif  // HMG_OPERATOR_HPP
