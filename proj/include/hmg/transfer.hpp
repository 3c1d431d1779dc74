#ifndef HMG_TRANSFER_HPP
#define HMG_TRANSFER_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hmg/error.hpp"
#include "hmg/mesh.hpp"
#include "hmg/sparse.hpp"
#include "hmg/tensor_basis.hpp"

namespace hmg
{

/// Sparse 1D interpolation matrix between two node lattices, stored by rows and by
/// columns.
struct Transfer1D
{
  int n_fine = 0;
  int n_coarse = 0;
  std::vector<int> row_start, row_col;
  std::vector<double> row_val;
  std::vector<int> col_start, col_row;
  std::vector<double> col_val;

  void finalize()
  {
    col_start.assign(n_coarse + 1, 0);
    for (int c : row_col)
    {
      ++col_start[c + 1];
    }
    for (int c = 0; c < n_coarse; ++c)
    {
      col_start[c + 1] += col_start[c];
    }
    col_row.resize(row_col.size());
    col_val.resize(row_col.size());
    std::vector<int> pos(col_start.begin(), col_start.end() - 1);
    for (int r = 0; r < n_fine; ++r)
    {
      for (int k = row_start[r]; k < row_start[r + 1]; ++k)
      {
        const int c = row_col[k];
        col_row[pos[c]] = r;
        col_val[pos[c]] = row_val[k];
        ++pos[c];
      }
    }
  }

  double at(int r, int c) const
  {
    for (int k = row_start[r]; k < row_start[r + 1]; ++k)
    {
      if (row_col[k] == c)
      {
        return row_val[k];
      }
    }
    return 0.0;
  }
};

namespace detail
{

// Rows for fine element-local nodes given their coordinates in the parent reference
// element; `coarse_base` is the global index of the parent's first coarse node.
inline void append_rows(Transfer1D &t, const std::vector<double> &coarse_nodes, int coarse_base,
                        std::span<const double> parent_coords)
{
  for (double x : parent_coords)
  {
    for (std::size_t j = 0; j < coarse_nodes.size(); ++j)
    {
      const double w = lagrange_unchecked(coarse_nodes, j, x);
      if (w != 0.0)
      {
        t.row_col.push_back(coarse_base + static_cast<int>(j));
        t.row_val.push_back(w);
      }
    }
    t.row_start.push_back(static_cast<int>(t.row_col.size()));
  }
}

}  // namespace detail

/// 1D h-prolongation at order p from nelem_coarse parent elements to their 2 children.
inline Transfer1D h_transfer_1d(int nelem_coarse, int p)
{
  const auto &nodes = tensor_basis(p).nodes;
  Transfer1D t;
  t.n_coarse = nelem_coarse * p + 1;
  t.n_fine = 2 * nelem_coarse * p + 1;
  t.row_start.push_back(0);
  std::vector<double> coords;
  for (int ef = 0; ef < 2 * nelem_coarse; ++ef)
  {
    const int parent = ef / 2;
    const double shift = (ef % 2 == 0) ? -1.0 : 1.0;
    coords.clear();
    for (int j = (ef == 0 ? 0 : 1); j <= p; ++j)
    {
      coords.push_back(0.5 * (nodes[j] + shift));
    }
    detail::append_rows(t, nodes, parent * p, coords);
  }
  t.finalize();
  return t;
}

/// 1D p-prolongation from order pc to order pf on nelem elements.
inline Transfer1D p_transfer_1d(int nelem, int pc, int pf)
{
  const auto &cn = tensor_basis(pc).nodes;
  const auto &fn = tensor_basis(pf).nodes;
  Transfer1D t;
  t.n_coarse = nelem * pc + 1;
  t.n_fine = nelem * pf + 1;
  t.row_start.push_back(0);
  std::vector<double> coords;
  for (int e = 0; e < nelem; ++e)
  {
    coords.assign(fn.begin() + (e == 0 ? 0 : 1), fn.end());
    detail::append_rows(t, cn, e * pc, coords);
  }
  t.finalize();
  return t;
}

/// Tensor-product prolongation P = T (x) T (x) T between two lattices (restriction is
/// P^T), applied one axis at a time.
class Transfer
{
public:
  Transfer(int dim, Transfer1D t) : dim_(dim), t_(std::move(t)) {}

  static Transfer between(const StructuredMesh &coarse, const StructuredMesh &fine)
  {
    require(coarse.dim() == fine.dim(), Errc::shape_mismatch, "transfer dimension mismatch");
    if (coarse.order() == fine.order() && 2 * coarse.nelem() == fine.nelem())
    {
      return Transfer(fine.dim(), h_transfer_1d(coarse.nelem(), coarse.order()));
    }
    if (coarse.nelem() == fine.nelem() && coarse.order() < fine.order())
    {
      return Transfer(fine.dim(), p_transfer_1d(fine.nelem(), coarse.order(), fine.order()));
    }
    throw Error(Errc::shape_mismatch, "meshes are not related by one h- or p-coarsening");
  }

  int dim() const noexcept { return dim_; }
  const Transfer1D &factor() const noexcept { return t_; }
  std::size_t fine_size() const noexcept { return power(t_.n_fine); }
  std::size_t coarse_size() const noexcept { return power(t_.n_coarse); }

  /// v_fine = P v_coarse
  void prolong(std::span<const double> vc, std::span<double> vf) const
  {
    require(vc.size() == coarse_size() && vf.size() == fine_size(), Errc::shape_mismatch,
            "prolongation dimension mismatch");
    apply(vc, vf, false);
  }

  /// r_coarse = P^T r_fine
  void restrict_to_coarse(std::span<const double> rf, std::span<double> rc) const
  {
    require(rf.size() == fine_size() && rc.size() == coarse_size(), Errc::shape_mismatch,
            "restriction dimension mismatch");
    apply(rf, rc, true);
  }

  /// Explicit sparse P (fine rows, coarse columns).
  CsrMatrix to_csr() const
  {
    const int nf = t_.n_fine, nc = t_.n_coarse;
    const std::size_t rows = fine_size();
    std::vector<std::int64_t> rp(rows + 1, 0);
    std::vector<std::int32_t> col;
    std::vector<double> val;
    for (std::size_t g = 0; g < rows; ++g)
    {
      std::array<int, 3> c{0, 0, 0};
      std::size_t rem = g;
      for (int k = 0; k < dim_; ++k)
      {
        c[k] = static_cast<int>(rem % nf);
        rem /= nf;
      }
      const int r2 = dim_ == 3 ? c[2] : -1;
      auto range = [&](int r) { return std::pair{t_.row_start[r], t_.row_start[r + 1]}; };
      const auto [a0, b0] = range(c[0]);
      const auto [a1, b1] = range(c[1]);
      const auto [a2, b2] = dim_ == 3 ? range(r2) : std::pair{0, 1};
      for (int k2 = a2; k2 < b2; ++k2)
      {
        const double w2 = dim_ == 3 ? t_.row_val[k2] : 1.0;
        const std::int64_t j2 = dim_ == 3 ? t_.row_col[k2] : 0;
        for (int k1 = a1; k1 < b1; ++k1)
        {
          const double w1 = t_.row_val[k1] * w2;
          const std::int64_t j1 = t_.row_col[k1];
          for (int k0 = a0; k0 < b0; ++k0)
          {
            col.push_back(static_cast<std::int32_t>((j2 * nc + j1) * nc + t_.row_col[k0]));
            val.push_back(t_.row_val[k0] * w1);
          }
        }
      }
      rp[g + 1] = static_cast<std::int64_t>(col.size());
    }
    return CsrMatrix(rows, coarse_size(), std::move(rp), std::move(col), std::move(val));
  }

private:
  std::size_t power(int n) const
  {
    std::size_t s = 1;
    for (int k = 0; k < dim_; ++k)
    {
      s *= n;
    }
    return s;
  }

  // Applies T (or T^T) along each axis in turn.
  void apply(std::span<const double> in, std::span<double> out, bool transpose) const
  {
    const int n_in = transpose ? t_.n_fine : t_.n_coarse;
    const int n_out = transpose ? t_.n_coarse : t_.n_fine;
    const auto &start = transpose ? t_.col_start : t_.row_start;
    const auto &idx = transpose ? t_.col_row : t_.row_col;
    const auto &val = transpose ? t_.col_val : t_.row_val;

    std::array<int, 3> ext{n_in, dim_ >= 2 ? n_in : 1, dim_ >= 3 ? n_in : 1};
    std::vector<double> a(in.begin(), in.end()), b;
    for (int axis = 0; axis < dim_; ++axis)
    {
      int inner = 1, outer = 1;
      for (int k = 0; k < axis; ++k)
      {
        inner *= ext[k];
      }
      for (int k = axis + 1; k < 3; ++k)
      {
        outer *= ext[k];
      }
      b.assign(static_cast<std::size_t>(outer) * n_out * inner, 0.0);
      for (int o = 0; o < outer; ++o)
      {
        const double *src = a.data() + static_cast<std::size_t>(o) * n_in * inner;
        double *dst = b.data() + static_cast<std::size_t>(o) * n_out * inner;
        for (int r = 0; r < n_out; ++r)
        {
          double *d = dst + static_cast<std::size_t>(r) * inner;
          for (int k = start[r]; k < start[r + 1]; ++k)
          {
            const double w = val[k];
            const double *s = src + static_cast<std::size_t>(idx[k]) * inner;
            for (int i = 0; i < inner; ++i)
            {
              d[i] += w * s[i];
            }
          }
        }
      }
      ext[axis] = n_out;
      a.swap(b);
    }
    std::copy(a.begin(), a.end(), out.begin());
  }

  int dim_;
  Transfer1D t_;
};

}  // namespace hmg

#endif  // HMG_TRANSFER_HPP
