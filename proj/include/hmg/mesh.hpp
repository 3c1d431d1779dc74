#ifndef HMG_MESH_HPP
#define HMG_MESH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "hmg/error.hpp"
#include "hmg/tensor_basis.hpp"

namespace hmg
{

using Point = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class WarpId
{
  identity_2d,
  identity_3d,
  warp_2d,
  warp_3d,
};

/// Smooth diffeomorphism of the unit square/cube onto the physical domain. Both warps
/// fix the boundary of [0,1]^d setwise.
struct WarpMap
{
  WarpId id = WarpId::identity_2d;

  int dim() const noexcept
  {
    return (id == WarpId::identity_2d || id == WarpId::warp_2d) ? 2 : 3;
  }

  Point map(const Point &s) const
  {
    constexpr double pi = std::numbers::pi;
    const double x = s[0], y = s[1], z = s[2];
    switch (id)
    {
      case WarpId::identity_2d:
        return {x, y, 0.0};
      case WarpId::identity_3d:
        return {x, y, z};
      case WarpId::warp_2d:
        return {x + 0.1 * std::sin(pi * x) * std::sin(2 * pi * y),
                y + 0.1 * std::sin(2 * pi * x) * std::sin(pi * y), 0.0};
      case WarpId::warp_3d:
        return {x + 0.05 * std::sin(pi * x) * (std::sin(2 * pi * y) + std::sin(2 * pi * z)),
                y + 0.05 * std::sin(pi * y) * (std::sin(2 * pi * z) + std::sin(2 * pi * x)),
                z + 0.05 * std::sin(pi * z) * (std::sin(2 * pi * x) + std::sin(2 * pi * y))};
    }
    return s;
  }

  /// d(map)/d(s), row i = component, column j = derivative direction.
  Mat3 jacobian(const Point &s) const
  {
    constexpr double pi = std::numbers::pi;
    const double x = s[0], y = s[1], z = s[2];
    Mat3 j{};
    switch (id)
    {
      case WarpId::identity_2d:
        j[0][0] = j[1][1] = 1.0;
        break;
      case WarpId::identity_3d:
        j[0][0] = j[1][1] = j[2][2] = 1.0;
        break;
      case WarpId::warp_2d:
        j[0][0] = 1.0 + 0.1 * pi * std::cos(pi * x) * std::sin(2 * pi * y);
        j[0][1] = 0.2 * pi * std::sin(pi * x) * std::cos(2 * pi * y);
        j[1][0] = 0.2 * pi * std::cos(2 * pi * x) * std::sin(pi * y);
        j[1][1] = 1.0 + 0.1 * pi * std::sin(2 * pi * x) * std::cos(pi * y);
        break;
      case WarpId::warp_3d:
      {
        const double sx = std::sin(pi * x), sy = std::sin(pi * y), sz = std::sin(pi * z);
        const double cx = std::cos(pi * x), cy = std::cos(pi * y), cz = std::cos(pi * z);
        const double s2x = std::sin(2 * pi * x), s2y = std::sin(2 * pi * y),
                     s2z = std::sin(2 * pi * z);
        const double c2x = std::cos(2 * pi * x), c2y = std::cos(2 * pi * y),
                     c2z = std::cos(2 * pi * z);
        j[0][0] = 1.0 + 0.05 * pi * cx * (s2y + s2z);
        j[0][1] = 0.1 * pi * sx * c2y;
        j[0][2] = 0.1 * pi * sx * c2z;
        j[1][0] = 0.1 * pi * sy * c2x;
        j[1][1] = 1.0 + 0.05 * pi * cy * (s2z + s2x);
        j[1][2] = 0.1 * pi * sy * c2z;
        j[2][0] = 0.1 * pi * sz * c2x;
        j[2][1] = 0.1 * pi * sz * c2y;
        j[2][2] = 1.0 + 0.05 * pi * cz * (s2x + s2y);
        break;
      }
    }
    return j;
  }
};

inline std::string_view to_string(WarpId id)
{
  switch (id)
  {
    case WarpId::identity_2d: return "identity-2d";
    case WarpId::identity_3d: return "identity-3d";
    case WarpId::warp_2d: return "warp-2d";
    case WarpId::warp_3d: return "warp-3d";
  }
  return "?";
}

enum class CoefficientId
{
  const_1,
  var_2d,
  var_2d_prime,
  var_3d,
};

/// Scalar diffusion coefficient mu(x) >= 1, evaluated at physical coordinates.
struct CoefficientField
{
  CoefficientId id = CoefficientId::const_1;

  double eval(const Point &x) const
  {
    constexpr double pi = std::numbers::pi;
    auto c2 = [](double v) { return v * v; };
    switch (id)
    {
      case CoefficientId::const_1:
        return 1.0;
      case CoefficientId::var_2d:
        return 1.0 + 1e6 * (c2(std::cos(2 * pi * x[0])) + c2(std::cos(2 * pi * x[1])));
      case CoefficientId::var_2d_prime:
        return 1.0 + 1e6 * (c2(std::cos(10 * pi * x[0])) + c2(std::cos(10 * pi * x[1])));
      case CoefficientId::var_3d:
        return 1.0 + 1e6 * (c2(std::cos(2 * pi * x[0])) + c2(std::cos(2 * pi * x[1])) +
                            c2(std::cos(2 * pi * x[2])));
    }
    return 1.0;
  }

  bool is_constant() const noexcept { return id == CoefficientId::const_1; }
};

/// One of the benchmark problems: dimension, domain warp and coefficient.
struct Problem
{
  std::string id;
  int dim = 2;
  WarpMap warp;
  CoefficientField coefficient;
};

/// Looks up a benchmark problem by id: 2d-const, 2d-var, 2d-var' (alias 2d-var-prime),
/// 3d-const, 3d-var.
inline Problem problem(std::string_view id)
{
  if (id == "2d-const")
  {
    return {"2d-const", 2, {WarpId::identity_2d}, {CoefficientId::const_1}};
  }
  if (id == "2d-var")
  {
    return {"2d-var", 2, {WarpId::warp_2d}, {CoefficientId::var_2d}};
  }
  if (id == "2d-var'" || id == "2d-var-prime")
  {
    return {"2d-var'", 2, {WarpId::warp_2d}, {CoefficientId::var_2d_prime}};
  }
  if (id == "3d-const")
  {
    return {"3d-const", 3, {WarpId::identity_3d}, {CoefficientId::const_1}};
  }
  if (id == "3d-var")
  {
    return {"3d-var", 3, {WarpId::warp_3d}, {CoefficientId::var_3d}};
  }
  throw Error(Errc::configuration, "unknown problem id '" + std::string(id) + "'");
}

inline CoefficientField coefficient_field(std::string_view problem_id)
{
  return problem(problem_id).coefficient;
}

/// Structured conforming mesh of nelem^dim elements of order p on [0,1]^dim. Global DOFs
/// are numbered lexicographically over the (nelem*p+1)^dim node lattice, x fastest.
class StructuredMesh
{
public:
  StructuredMesh(int dim, int nelem, int order, WarpMap warp)
    : dim_(dim), nelem_(nelem), order_(order), warp_(warp)
  {
    n1_ = nelem_ * order_ + 1;
    n_dofs_ = 1;
    n_elements_ = 1;
    for (int k = 0; k < dim_; ++k)
    {
      n_dofs_ *= n1_;
      n_elements_ *= nelem_;
    }
    const auto &basis = tensor_basis(order_);
    lattice_.resize(n1_);
    for (int e = 0; e < nelem_; ++e)
    {
      for (int j = 0; j <= order_; ++j)
      {
        lattice_[e * order_ + j] = (e + 0.5 * (basis.nodes[j] + 1.0)) / nelem_;
      }
    }
    lattice_[0] = 0.0;
    lattice_[n1_ - 1] = 1.0;

    boundary_.assign(n_dofs_, 0);
    for (std::size_t g = 0; g < n_dofs_; ++g)
    {
      const auto c = lattice_index(g);
      for (int k = 0; k < dim_; ++k)
      {
        if (c[k] == 0 || c[k] == n1_ - 1)
        {
          boundary_[g] = 1;
        }
      }
    }

    const int nloc = nodes_per_element();
    elem_to_dof_.resize(n_elements_ * nloc);
    for (std::size_t e = 0; e < n_elements_; ++e)
    {
      const auto ec = element_index(e);
      for (int l = 0; l < nloc; ++l)
      {
        std::array<int, 3> c{0, 0, 0};
        int rem = l;
        for (int k = 0; k < dim_; ++k)
        {
          c[k] = ec[k] * order_ + rem % (order_ + 1);
          rem /= (order_ + 1);
        }
        elem_to_dof_[e * nloc + l] = static_cast<std::int32_t>(global_index(c));
      }
    }
  }

  int dim() const noexcept { return dim_; }
  int nelem() const noexcept { return nelem_; }
  int order() const noexcept { return order_; }
  const WarpMap &warp() const noexcept { return warp_; }
  /// Nodes per direction of the global lattice.
  int n1() const noexcept { return n1_; }
  std::size_t n_dofs() const noexcept { return n_dofs_; }
  std::size_t n_elements() const noexcept { return n_elements_; }
  int nodes_per_element() const noexcept
  {
    int n = 1;
    for (int k = 0; k < dim_; ++k)
    {
      n *= order_ + 1;
    }
    return n;
  }

  /// Reference coordinate in [0,1] of lattice line i.
  const std::vector<double> &lattice() const noexcept { return lattice_; }

  std::span<const std::int32_t> element_dofs(std::size_t e) const
  {
    const int nloc = nodes_per_element();
    return {elem_to_dof_.data() + e * nloc, static_cast<std::size_t>(nloc)};
  }

  const std::vector<std::uint8_t> &boundary_mask() const noexcept { return boundary_; }
  bool is_boundary(std::size_t g) const { return boundary_[g] != 0; }

  std::size_t n_boundary() const
  {
    std::size_t n = 0;
    for (auto b : boundary_)
    {
      n += b;
    }
    return n;
  }

  std::array<int, 3> lattice_index(std::size_t g) const
  {
    std::array<int, 3> c{0, 0, 0};
    for (int k = 0; k < dim_; ++k)
    {
      c[k] = static_cast<int>(g % n1_);
      g /= n1_;
    }
    return c;
  }

  std::size_t global_index(const std::array<int, 3> &c) const
  {
    std::size_t g = 0;
    for (int k = dim_ - 1; k >= 0; --k)
    {
      g = g * n1_ + c[k];
    }
    return g;
  }

  std::array<int, 3> element_index(std::size_t e) const
  {
    std::array<int, 3> c{0, 0, 0};
    for (int k = 0; k < dim_; ++k)
    {
      c[k] = static_cast<int>(e % nelem_);
      e /= nelem_;
    }
    return c;
  }

  Point reference_point(std::size_t g) const
  {
    const auto c = lattice_index(g);
    Point s{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k)
    {
      s[k] = lattice_[c[k]];
    }
    return s;
  }

  Point physical_point(std::size_t g) const { return warp_.map(reference_point(g)); }

private:
  int dim_, nelem_, order_;
  WarpMap warp_;
  int n1_ = 0;
  std::size_t n_dofs_ = 0, n_elements_ = 0;
  std::vector<double> lattice_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::int32_t> elem_to_dof_;
};

inline double determinant(const Mat3 &j, int dim)
{
  if (dim == 2)
  {
    return j[0][0] * j[1][1] - j[0][1] * j[1][0];
  }
  return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

/// Builds the mesh and checks that the warp Jacobian is positive at every quadrature
/// point.
inline std::shared_ptr<const StructuredMesh> build_mesh(int dim, int nelem, int order,
                                                        WarpMap warp)
{
  require(dim == 2 || dim == 3, Errc::invalid_mesh, "dimension must be 2 or 3");
  require(warp.dim() == dim, Errc::invalid_mesh, "warp dimension does not match mesh");
  require(order >= 1 && order <= max_order, Errc::invalid_order,
          "order must be in [1, 16], got " + std::to_string(order));
  require(nelem >= 1 && (nelem & (nelem - 1)) == 0, Errc::invalid_mesh,
          "elements per dimension must be a power of 2, got " + std::to_string(nelem));
  auto mesh = std::make_shared<const StructuredMesh>(dim, nelem, order, warp);

  const auto &basis = tensor_basis(order);
  const int nq = basis.n_quad();
  std::vector<double> q1d;
  q1d.reserve(static_cast<std::size_t>(nelem) * nq);
  for (int e = 0; e < nelem; ++e)
  {
    for (int a = 0; a < nq; ++a)
    {
      q1d.push_back((e + 0.5 * (basis.quad_points[a] + 1.0)) / nelem);
    }
  }
  const std::size_t m = q1d.size();
  const std::size_t mz = dim == 3 ? m : 1;
  for (std::size_t iz = 0; iz < mz; ++iz)
  {
    for (std::size_t iy = 0; iy < m; ++iy)
    {
      for (std::size_t ix = 0; ix < m; ++ix)
      {
        const Point s{q1d[ix], q1d[iy], dim == 3 ? q1d[iz] : 0.0};
        const double det = determinant(warp.jacobian(s), dim);
        require(det > 0.0, Errc::degenerate_geometry,
                "non-positive warp Jacobian determinant at quadrature point");
      }
    }
  }
  return mesh;
}

inline std::shared_ptr<const StructuredMesh> coarsen_mesh(const StructuredMesh &mesh)
{
  require(mesh.nelem() >= 2, Errc::cannot_coarsen, "mesh with one element cannot be coarsened");
  return build_mesh(mesh.dim(), mesh.nelem() / 2, mesh.order(), mesh.warp());
}

inline std::shared_ptr<const StructuredMesh> reduce_order_mesh(const StructuredMesh &mesh)
{
  require(mesh.order() % 2 == 0, Errc::cannot_p_coarsen,
          "odd order " + std::to_string(mesh.order()) + " cannot be halved");
  return build_mesh(mesh.dim(), mesh.nelem(), mesh.order() / 2, mesh.warp());
}

}  // namespace hmg

#endif  // HMG_MESH_HPP
