#ifndef HMG_SPECTRAL_LAB_HPP
#define HMG_SPECTRAL_LAB_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"
#include "hmg/mesh.hpp"
#include "hmg/multigrid.hpp"
#include "hmg/operator.hpp"
#include "hmg/smoothers.hpp"
#include "hmg/symmetric_eigen.hpp"
#include "hmg/transfer.hpp"

namespace hmg
{

enum class SpectrumMode
{
  smooth_only,
  two_grid,
};

inline std::string_view to_string(SpectrumMode m)
{
  return m == SpectrumMode::smooth_only ? "smooth" : "two-grid";
}

inline SpectrumMode parse_spectrum_mode(std::string_view s)
{
  if (s == "smooth" || s == "smooth-only")
  {
    return SpectrumMode::smooth_only;
  }
  if (s == "two-grid" || s == "twogrid")
  {
    return SpectrumMode::two_grid;
  }
  throw Error(Errc::configuration, "unknown spectrum mode '" + std::string(s) + "'");
}

/// Modes used to expand the error: eigenvectors of A, or the D-orthonormal eigenvectors
/// of D^-1 A (A w = mu D w), in which point Jacobi acts diagonally.
enum class SpectrumBasis
{
  stiffness,
  jacobi,
};

inline std::string_view to_string(SpectrumBasis b)
{
  return b == SpectrumBasis::stiffness ? "stiffness" : "jacobi";
}

inline SpectrumBasis parse_spectrum_basis(std::string_view s)
{
  if (s == "stiffness" || s == "a")
  {
    return SpectrumBasis::stiffness;
  }
  if (s == "jacobi" || s == "dinv-a")
  {
    return SpectrumBasis::jacobi;
  }
  throw Error(Errc::configuration, "unknown spectrum basis '" + std::string(s) + "'");
}

struct SpectrumExperiment
{
  std::string problem = "2d-const";
  int order = 1;
  int nelem = 0;  // 0: 32 / order elements per direction, at least 2
  SmootherKind smoother = SmootherKind::jacobi;
  SpectrumMode mode = SpectrumMode::smooth_only;
  SpectrumBasis basis = SpectrumBasis::stiffness;
  std::uint64_t seed = 42;
  std::size_t max_dim = 4096;

  int resolved_nelem() const { return nelem > 0 ? nelem : std::max(2, 32 / order); }

  /// Smoothing steps on their own: six operator applications (three SSOR double sweeps).
  int smooth_steps() const { return smoother == SmootherKind::ssor ? 3 : 6; }

  std::string label() const
  {
    std::string s = problem + "_p" + std::to_string(order) + "_" +
                    std::string(to_string(smoother)) + "_" + std::string(to_string(mode));
    if (basis == SpectrumBasis::jacobi)
    {
      s += "_jacobi-basis";
    }
    return s;
  }
};

struct SpectrumRow
{
  std::size_t index = 0;
  double eigenvalue = 0.0;
  double coefficient = 0.0;
};

struct SpectrumResult
{
  SpectrumExperiment experiment;
  std::size_t n_dofs = 0;
  std::vector<SpectrumRow> rows;
  double max_coefficient = 0.0;
};

/// Interior (non-boundary) DOFs of a mesh in ascending order.
inline std::vector<std::size_t> interior_dofs(const StructuredMesh &mesh)
{
  std::vector<std::size_t> out;
  const auto &mask = mesh.boundary_mask();
  for (std::size_t i = 0; i < mask.size(); ++i)
  {
    if (!mask[i])
    {
      out.push_back(i);
    }
  }
  return out;
}

/// Dense restriction of a sparse matrix to the given rows and columns.
inline Matrix dense_block(const CsrMatrix &a, const std::vector<std::size_t> &rows,
                          const std::vector<std::size_t> &cols)
{
  std::vector<std::int64_t> pos(a.cols(), -1);
  for (std::size_t j = 0; j < cols.size(); ++j)
  {
    pos[cols[j]] = static_cast<std::int64_t>(j);
  }
  Matrix m(rows.size(), cols.size());
  const auto rp = a.row_ptr();
  const auto ci = a.col();
  const auto v = a.values();
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    for (auto k = rp[rows[i]]; k < rp[rows[i] + 1]; ++k)
    {
      if (pos[ci[k]] >= 0)
      {
        m(i, static_cast<std::size_t>(pos[ci[k]])) = v[k];
      }
    }
  }
  return m;
}

/// E = S_post (I - P Ac^-1 P^T A) S_pre from explicit dense factors.
inline Matrix two_grid_error_matrix(const Matrix &a, const Matrix &p, const Matrix &ac,
                                    const Matrix &s_pre, const Matrix &s_post)
{
  const std::size_t n = a.rows();
  require(p.rows() == n && ac.rows() == p.cols() && s_pre.rows() == n && s_post.rows() == n,
          Errc::shape_mismatch, "two-grid factor dimension mismatch");
  const DenseCholesky acf(ac);
  Matrix ptA = p.transpose() * a;  // coarse x fine
  // Solve Ac X = P^T A column by column.
  std::vector<double> col(ac.rows());
  for (std::size_t j = 0; j < n; ++j)
  {
    for (std::size_t i = 0; i < ac.rows(); ++i)
    {
      col[i] = ptA(i, j);
    }
    acf.solve_in_place(col);
    for (std::size_t i = 0; i < ac.rows(); ++i)
    {
      ptA(i, j) = col[i];
    }
  }
  Matrix c = Matrix::identity(n) - p * ptA;
  return s_post * (c * s_pre);
}

/// Largest eigenvalue magnitude of a general square matrix.
inline double spectral_radius(const Matrix &m)
{
  require(m.rows() == m.cols(), Errc::shape_mismatch, "spectral radius needs a square matrix");
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
    {
      e(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(e, false);
  require(es.info() == Eigen::Success, Errc::factorization, "eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail
{

inline std::shared_ptr<const StructuredMesh> spectrum_mesh(const SpectrumExperiment &x)
{
  const auto pr = problem(x.problem);
  require(pr.dim == 2, Errc::configuration, "spectral experiments are two-dimensional");
  return build_mesh(pr.dim, x.resolved_nelem(), x.order, pr.warp);
}

inline std::shared_ptr<const DiscreteOperator> assembled_operator(
    std::shared_ptr<const StructuredMesh> mesh, CoefficientField coef)
{
  DiscreteOperator::Options opt;
  opt.assemble = true;
  opt.matrix_free = false;
  return std::make_shared<const DiscreteOperator>(std::move(mesh), coef, opt);
}

// Dense matrix of the linear map u -> S u on the interior, with f = 0.
inline Matrix smoother_matrix(const LevelSmoother &s, std::size_t n,
                              const std::vector<std::size_t> &interior, int steps)
{
  const std::size_t m = interior.size();
  Matrix out(m, m);
  std::vector<double> u(n), f(n, 0.0);
  for (std::size_t j = 0; j < m; ++j)
  {
    std::fill(u.begin(), u.end(), 0.0);
    u[interior[j]] = 1.0;
    s.smooth(u, f, steps);
    for (std::size_t i = 0; i < m; ++i)
    {
      out(i, j) = u[interior[i]];
    }
  }
  return out;
}

}  // namespace detail

/// Explicit two-grid error operator on the interior DOFs for one h-coarsening of `fine`,
/// smoothing with `spec`, exact coarse solve.
inline Matrix two_grid_error_operator(std::shared_ptr<const StructuredMesh> fine,
                                      CoefficientField coef, const SmootherSpec &spec,
                                      std::uint64_t seed = 42, std::size_t max_dim = 4096)
{
  const auto coarse = coarsen_mesh(*fine);
  const auto fi = interior_dofs(*fine);
  const auto ci = interior_dofs(*coarse);
  require(fi.size() <= max_dim, Errc::budget_exceeded,
          "two-grid operator of size " + std::to_string(fi.size()) + " exceeds dense budget");
  const auto op = detail::assembled_operator(fine, coef);
  const auto opc = detail::assembled_operator(coarse, coef);
  const Matrix a = dense_block(op->matrix(), fi, fi);
  const Matrix ac = dense_block(opc->matrix(), ci, ci);
  const Matrix p = dense_block(Transfer::between(*coarse, *fine).to_csr(), fi, ci);
  const LevelSmoother s(op, spec, seed);
  const Matrix s_pre = detail::smoother_matrix(s, fine->n_dofs(), fi, spec.pre_steps);
  const Matrix s_post = detail::smoother_matrix(s, fine->n_dofs(), fi, spec.post_steps);
  return two_grid_error_matrix(a, p, ac, s_pre, s_post);
}

/// Predicted Jacobi decay |1 - omega mu_i|^steps, mu_i the eigenvalues of D^-1 A
/// (ascending), from the generalized problem A v = mu D v.
inline std::vector<double> jacobi_decay_prediction(const Matrix &a, std::span<const double> d,
                                                   double omega, int steps)
{
  const std::size_t n = a.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = 0; j < n; ++j)
    {
      s(i, j) = a(i, j) / std::sqrt(d[i] * d[j]);
    }
  }
  const auto eig = dense_symmetric_eig(s);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    out[k] = std::pow(std::abs(1.0 - omega * eig.values[k]), steps);
  }
  return out;
}

/// Eigenmode decay experiment: start from the sum of all basis vectors (all unit
/// coefficients), apply smoothing or one two-grid cycle with f = 0, and report the
/// magnitude of each coefficient afterwards. Eigenvalues are those of A or of D^-1 A,
/// ascending.
inline SpectrumResult run_spectrum_experiment(const SpectrumExperiment &x)
{
  const auto mesh = detail::spectrum_mesh(x);
  const auto coef = problem(x.problem).coefficient;
  const auto interior = interior_dofs(*mesh);
  require(interior.size() <= x.max_dim, Errc::budget_exceeded,
          "dense eigenproblem of size " + std::to_string(interior.size()) + " exceeds budget " +
              std::to_string(x.max_dim));
  const auto op = detail::assembled_operator(mesh, coef);
  Matrix a = dense_block(op->matrix(), interior, interior);
  const std::size_t m = interior.size();
  const std::size_t n = mesh->n_dofs();

  // With the Jacobi basis, eigenvectors z of D^-1/2 A D^-1/2 give modes w = D^-1/2 z and
  // coefficients z^T D^1/2 u.
  std::vector<double> scale(m, 1.0);
  if (x.basis == SpectrumBasis::jacobi)
  {
    const auto d = op->diagonal();
    for (std::size_t i = 0; i < m; ++i)
    {
      scale[i] = std::sqrt(d[interior[i]]);
    }
    for (std::size_t i = 0; i < m; ++i)
    {
      for (std::size_t j = 0; j < m; ++j)
      {
        a(i, j) /= scale[i] * scale[j];
      }
    }
  }
  const auto eig = dense_symmetric_eig(a, x.max_dim);

  std::vector<double> u(n, 0.0), f(n, 0.0);
  for (std::size_t k = 0; k < m; ++k)
  {
    for (std::size_t i = 0; i < m; ++i)
    {
      u[interior[i]] += eig.vectors(i, k) / scale[i];
    }
  }

  auto spec = SmootherSpec::standard(x.smoother);
  if (x.mode == SpectrumMode::smooth_only)
  {
    const LevelSmoother s(op, spec, x.seed);
    s.smooth(u, f, x.smooth_steps());
  }
  else
  {
    HierarchyOptions hopt;
    hopt.seed = x.seed;
    auto h = build_h_hierarchy(mesh, 2, coef, spec, hopt);
    h.vcycle(u, f);
  }

  SpectrumResult out;
  out.experiment = x;
  out.n_dofs = m;
  out.rows.resize(m);
  for (std::size_t k = 0; k < m; ++k)
  {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
      c += eig.vectors(i, k) * scale[i] * u[interior[i]];
    }
    out.rows[k] = {k, eig.values[k], std::abs(c)};
    out.max_coefficient = std::max(out.max_coefficient, std::abs(c));
  }
  return out;
}

inline void write_spectrum_csv(std::ostream &os, const SpectrumResult &r)
{
  os << "index,eigenvalue,coefficient_after\n";
  char buf[96];
  for (const auto &row : r.rows)
  {
    std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e\n", row.index, row.eigenvalue,
                  row.coefficient);
    os << buf;
  }
}

}  // namespace hmg

#endif  // HMG_SPECTRAL_LAB_HPP
