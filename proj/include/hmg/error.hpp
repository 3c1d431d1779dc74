#ifndef HMG_ERROR_HPP
#define HMG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmg
{

enum class Errc
{
  invalid_order,
  degenerate_basis,
  invalid_mesh,
  degenerate_geometry,
  configuration,
  cannot_coarsen,
  cannot_p_coarsen,
  shape_mismatch,
  assembly_too_large,
  requires_assembly,
  element_too_large,
  no_op,
  hierarchy_depth,
  invalid_p_hierarchy,
  requires_element_matrices,
  factorization,
  breakdown,
  seed,
  budget_exceeded,
  asymmetric_input,
  io,
};

constexpr std::string_view to_string(Errc code)
{
  switch (code)
  {
    case Errc::invalid_order: return "invalid-order";
    case Errc::degenerate_basis: return "degenerate-basis";
    case Errc::invalid_mesh: return "invalid-mesh";
    case Errc::degenerate_geometry: return "degenerate-geometry";
    case Errc::configuration: return "configuration";
    case Errc::cannot_coarsen: return "cannot-coarsen";
    case Errc::cannot_p_coarsen: return "cannot-p-coarsen";
    case Errc::shape_mismatch: return "shape";
    case Errc::assembly_too_large: return "assembly-too-large";
    case Errc::requires_assembly: return "requires-assembly";
    case Errc::element_too_large: return "element-too-large";
    case Errc::no_op: return "no-op";
    case Errc::hierarchy_depth: return "hierarchy-depth";
    case Errc::invalid_p_hierarchy: return "invalid-p-hierarchy";
    case Errc::requires_element_matrices: return "requires-element-matrices";
    case Errc::factorization: return "factorization";
    case Errc::breakdown: return "breakdown";
    case Errc::seed: return "seed";
    case Errc::budget_exceeded: return "budget-exceeded";
    case Errc::asymmetric_input: return "asymmetric-input";
    case Errc::io: return "io";
  }
  return "unknown";
}

/// Library exception; `code()` identifies the failure class so callers (e.g. the table
/// runner) can turn budget failures into skipped cells instead of aborting.
class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string &what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
  {
  }

  Errc code() const noexcept { return code_; }

  /// True for failures caused by the memory budget rather than by bad input.
  bool is_budget() const noexcept
  {
    return code_ == Errc::assembly_too_large || code_ == Errc::element_too_large ||
           code_ == Errc::budget_exceeded;
  }

private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string &what)
{
  if (!cond)
  {
    throw Error(code, what);
  }
}

}  // namespace hmg

#endif  // HMG_ERROR_HPP
