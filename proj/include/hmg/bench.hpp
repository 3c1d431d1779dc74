#ifndef HMG_BENCH_HPP
#define HMG_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hmg/error.hpp"
#include "hmg/krylov.hpp"
#include "hmg/mesh.hpp"
#include "hmg/multigrid.hpp"
#include "hmg/operator.hpp"
#include "hmg/smoothers.hpp"

namespace hmg
{

enum class HierarchyKind
{
  h,
  p,
  low_order,
};

inline std::string_view to_string(HierarchyKind k)
{
  switch (k)
  {
    case HierarchyKind::h: return "h";
    case HierarchyKind::p: return "p";
    case HierarchyKind::low_order: return "low-order";
  }
  return "?";
}

inline HierarchyKind parse_hierarchy_kind(std::string_view s)
{
  if (s == "h")
  {
    return HierarchyKind::h;
  }
  if (s == "p")
  {
    return HierarchyKind::p;
  }
  if (s == "low-order" || s == "low_order" || s == "lo")
  {
    return HierarchyKind::low_order;
  }
  throw Error(Errc::configuration, "unknown hierarchy '" + std::string(s) + "'");
}

inline std::string_view to_string(SolveMode m) { return m == SolveMode::solver ? "solver" : "pcg"; }

inline SolveMode parse_solve_mode(std::string_view s)
{
  if (s == "solver" || s == "mg")
  {
    return SolveMode::solver;
  }
  if (s == "pcg")
  {
    return SolveMode::pcg;
  }
  throw Error(Errc::configuration, "unknown mode '" + std::string(s) + "'");
}

struct ExperimentConfig
{
  std::string name;
  std::string problem = "2d-const";
  int order = 1;
  int nelem = 0;  // 0: 32 in 2D, 8 in 3D
  HierarchyKind hierarchy = HierarchyKind::h;
  int levels = 3;
  SmootherSpec smoother = SmootherSpec::standard(SmootherKind::jacobi);
  SolveMode mode = SolveMode::solver;
  double rel_tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 42;
  std::size_t budget_bytes = default_budget_bytes;

  int resolved_nelem() const
  {
    if (nelem > 0)
    {
      return nelem;
    }
    return problem_dim() == 3 ? 8 : 32;
  }

  int problem_dim() const { return hmg::problem(problem).dim; }

  void validate() const
  {
    (void)hmg::problem(problem);
    require(order >= 1 && order <= max_order, Errc::invalid_order,
            "order must be in [1, 16], got " + std::to_string(order));
    require(levels >= 1, Errc::hierarchy_depth, "levels must be at least 1");
    require(rel_tol > 0.0 && rel_tol < 1.0, Errc::configuration, "rel_tol must be in (0, 1)");
    require(max_iter >= 1, Errc::configuration, "max_iter must be positive");
    if (hierarchy == HierarchyKind::p)
    {
      require((order & (order - 1)) == 0, Errc::invalid_p_hierarchy,
              "p-hierarchy needs a power-of-2 order, got " + std::to_string(order));
    }
    if (hierarchy == HierarchyKind::low_order)
    {
      require(mode == SolveMode::pcg, Errc::configuration, "low-order hierarchy implies mode = pcg");
      require(order >= 2, Errc::no_op, "low-order preconditioner needs order >= 2");
    }
    smoother.validate();
  }

  std::string label() const
  {
    if (!name.empty())
    {
      return name;
    }
    std::string s = problem + "/p" + std::to_string(order) + "/" + std::string(to_string(hierarchy));
    if (hierarchy != HierarchyKind::low_order)
    {
      s += "/" + smoother.label();
    }
    return s + "/" + std::string(to_string(mode));
  }
};

namespace detail
{

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
  {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

template <class T>
T parse_number(const std::string &key, const std::string &value)
{
  std::istringstream in(value);
  T out{};
  in >> out;
  require(!in.fail() && in.peek() == std::char_traits<char>::eof(), Errc::configuration,
          "bad value '" + value + "' for key '" + key + "'");
  return out;
}

inline void set_key(ExperimentConfig &c, const std::string &key, const std::string &value)
{
  auto &s = c.smoother;
  if (key == "name")
  {
    c.name = value;
  }
  else if (key == "problem")
  {
    (void)problem(value);
    c.problem = value;
  }
  else if (key == "order")
  {
    c.order = parse_number<int>(key, value);
  }
  else if (key == "nelem")
  {
    c.nelem = parse_number<int>(key, value);
  }
  else if (key == "hierarchy")
  {
    c.hierarchy = parse_hierarchy_kind(value);
  }
  else if (key == "levels")
  {
    c.levels = parse_number<int>(key, value);
  }
  else if (key == "smoother")
  {
    s = SmootherSpec::standard(parse_smoother_kind(value));
  }
  else if (key == "pre_steps")
  {
    s.pre_steps = parse_number<int>(key, value);
  }
  else if (key == "post_steps")
  {
    s.post_steps = parse_number<int>(key, value);
  }
  else if (key == "omega")
  {
    s.omega = parse_number<double>(key, value);
  }
  else if (key == "cheb_lambda_max")
  {
    s.cheb_lambda_max = parse_number<double>(key, value);
  }
  else if (key == "cheb_interval_fraction")
  {
    s.cheb_interval_fraction = parse_number<double>(key, value);
  }
  else if (key == "cheb_safety")
  {
    s.cheb_safety = parse_number<double>(key, value);
  }
  else if (key == "lanczos_iters")
  {
    s.lanczos_iters = parse_number<int>(key, value);
  }
  else if (key == "block_weighting")
  {
    require(value == "additive" || value == "multiplicity", Errc::configuration,
            "block_weighting must be additive or multiplicity");
    s.block_weighting =
        value == "additive" ? BlockWeighting::additive : BlockWeighting::multiplicity;
  }
  else if (key == "mode")
  {
    c.mode = parse_solve_mode(value);
  }
  else if (key == "rel_tol")
  {
    c.rel_tol = parse_number<double>(key, value);
  }
  else if (key == "max_iter")
  {
    c.max_iter = parse_number<int>(key, value);
  }
  else if (key == "seed")
  {
    c.seed = parse_number<std::uint64_t>(key, value);
  }
  else if (key == "budget_bytes")
  {
    c.budget_bytes = parse_number<std::size_t>(key, value);
  }
  else
  {
    throw Error(Errc::configuration, "unknown key '" + key + "'");
  }
}

}  // namespace detail

/// Parses flat `key = value` text. Lines before the first `[[experiment]]` header set
/// defaults shared by every experiment; without headers the file is one experiment.
/// `#` starts a comment. Keys are applied in file order, so `smoother` resets the step
/// counts and should precede `pre_steps`/`post_steps`.
inline std::vector<ExperimentConfig> parse_config(std::istream &in,
                                                  const ExperimentConfig &defaults = {})
{
  std::vector<std::pair<std::string, std::string>> shared;
  std::vector<std::vector<std::pair<std::string, std::string>>> sections;
  std::vector<std::pair<std::string, std::string>> *cur = &shared;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = detail::trim(line.substr(0, hash));
    if (t.empty())
    {
      continue;
    }
    if (t == "[[experiment]]")
    {
      sections.emplace_back();
      cur = &sections.back();
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, Errc::configuration,
            "line " + std::to_string(lineno) + ": expected key = value");
    cur->emplace_back(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    require(!cur->back().first.empty(), Errc::configuration,
            "line " + std::to_string(lineno) + ": empty key");
  }
  if (sections.empty())
  {
    sections.emplace_back();
  }
  std::vector<ExperimentConfig> out;
  for (const auto &sec : sections)
  {
    ExperimentConfig c = defaults;
    for (const auto &[k, v] : shared)
    {
      detail::set_key(c, k, v);
    }
    for (const auto &[k, v] : sec)
    {
      detail::set_key(c, k, v);
    }
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<ExperimentConfig> parse_config_file(const std::string &path,
                                                       const ExperimentConfig &defaults = {})
{
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open config '" + path + "'");
  return parse_config(in, defaults);
}

/// Runs one experiment from a zero initial guess with the standard right-hand side.
inline SolveReport run_config(const ExperimentConfig &c)
{
  try
  {
    c.validate();
    const auto pr = problem(c.problem);
    const auto mesh = build_mesh(pr.dim, c.resolved_nelem(), c.order, pr.warp);
    const auto f = standard_rhs(*mesh);
    std::vector<double> u(mesh->n_dofs(), 0.0);
    IterationControl ctl;
    ctl.rel_tol = c.rel_tol;
    ctl.max_iter = c.max_iter;
    if (c.hierarchy == HierarchyKind::low_order)
    {
      return low_order_pcg(mesh, pr.coefficient, f, u, ctl, c.budget_bytes);
    }
    HierarchyOptions opt;
    opt.budget_bytes = c.budget_bytes;
    opt.seed = c.seed;
    auto h = c.hierarchy == HierarchyKind::h
                 ? build_h_hierarchy(mesh, c.levels, pr.coefficient, c.smoother, opt)
                 : build_p_hierarchy(mesh, c.levels, pr.coefficient, c.smoother, opt);
    return mg_solve(h, c.mode, f, u, ctl);
  }
  catch (const Error &e)
  {
    throw Error(e.code(), std::string(e.what()) + " [experiment " + c.label() + "]");
  }
}

enum class CellStatus
{
  converged,
  diverged,
  skipped,
};

inline std::string_view to_string(CellStatus s)
{
  switch (s)
  {
    case CellStatus::converged: return "converged";
    case CellStatus::diverged: return "diverged";
    case CellStatus::skipped: return "skipped";
  }
  return "?";
}

struct Cell
{
  std::string row;
  std::string col;
  std::string value;  // iteration count, "-" (no convergence), "*" (budget) or ""
  CellStatus status = CellStatus::skipped;
  int iterations = -1;
  std::string note;

  bool converged() const noexcept { return status == CellStatus::converged; }
};

struct Table
{
  std::string id;
  std::string title;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<Cell> cells;

  const Cell *find(std::string_view row, std::string_view col) const
  {
    for (const auto &c : cells)
    {
      if (c.row == row && c.col == col)
      {
        return &c;
      }
    }
    return nullptr;
  }
};

struct RunOptions
{
  std::uint64_t seed = 42;
  int max_iter = 200;
  std::size_t budget_bytes = default_budget_bytes;
  std::vector<int> orders;         // empty: all orders of the table
  std::vector<std::string> columns;  // empty: all columns
  std::vector<int> meshes;         // mesh-independence sweeps only; empty: 4..256
  std::function<void(const Cell &, double seconds)> on_cell;
};

namespace detail
{

inline bool wanted(const std::vector<std::string> &cols, const std::string &c)
{
  return cols.empty() || std::find(cols.begin(), cols.end(), c) != cols.end();
}

inline bool wanted_order(const std::vector<int> &orders, int p)
{
  return orders.empty() || std::find(orders.begin(), orders.end(), p) != orders.end();
}

inline Cell cell_from_report(const std::string &row, const std::string &col, const SolveReport &r)
{
  Cell c{row, col, "-", CellStatus::diverged, r.iterations, r.note};
  if (r.converged)
  {
    c.value = std::to_string(r.iterations);
    c.status = CellStatus::converged;
  }
  return c;
}

inline Cell skipped_cell(const std::string &row, const std::string &col, std::string value,
                         std::string note)
{
  return Cell{row, col, std::move(value), CellStatus::skipped, -1, std::move(note)};
}

inline Cell error_cell(const std::string &row, const std::string &col, const Error &e)
{
  if (e.is_budget())
  {
    return skipped_cell(row, col, "*", e.what());
  }
  if (e.code() == Errc::breakdown || e.code() == Errc::factorization)
  {
    return Cell{row, col, "-", CellStatus::diverged, -1, e.what()};
  }
  return skipped_cell(row, col, "err", e.what());
}

// Cells that need an assembled high-order operator or a low-order factorization in 3D at
// order 16 are not attempted.
inline bool skipped_by_policy(int dim, int p, bool needs_assembly)
{
  return dim == 3 && p == 16 && needs_assembly;
}

class CellRecorder
{
public:
  CellRecorder(Table &t, const RunOptions &opt) : t_(t), opt_(opt) {}

  template <class F>
  void run(const std::string &row, const std::string &col, F &&f)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Cell c;
    try
    {
      c = f();
    }
    catch (const Error &e)
    {
      c = error_cell(row, col, e);
    }
    add(std::move(c), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  void add(Cell c, double seconds = 0.0)
  {
    if (opt_.on_cell)
    {
      opt_.on_cell(c, seconds);
    }
    t_.cells.push_back(std::move(c));
  }

private:
  Table &t_;
  const RunOptions &opt_;
};

struct SmootherColumn
{
  SmootherKind kind;
  const char *tag;
};

inline constexpr SmootherColumn table_smoothers[] = {
    {SmootherKind::jacobi, "jacobi"},
    {SmootherKind::chebyshev, "cheb"},
    {SmootherKind::ssor, "ssor"},
};

}  // namespace detail

/// Column labels of the iteration-count tables: solver|pcg / jacobi|cheb|ssor / h|p, then
/// the low-order column.
inline std::vector<std::string> iteration_table_columns()
{
  std::vector<std::string> cols;
  for (const char *mode : {"solver", "pcg"})
  {
    for (const auto &s : detail::table_smoothers)
    {
      for (const char *hk : {"h", "p"})
      {
        cols.push_back(std::string(mode) + "/" + s.tag + "/" + hk);
      }
    }
  }
  cols.push_back("low-order/pcg");
  return cols;
}

/// Iteration counts for one problem: every smoother with h- and p-hierarchies, as solver
/// and as CG preconditioner, plus CG with the low-order preconditioner.
inline Table run_iteration_table(std::string id, const std::string &problem_id,
                                 const RunOptions &opt = {})
{
  const auto pr = problem(problem_id);
  const int nelem = pr.dim == 3 ? 8 : 32;
  Table t;
  t.id = std::move(id);
  t.title = "Iteration counts, " + problem_id + ", " + std::to_string(nelem) + "^" +
            std::to_string(pr.dim) + " elements, 3 levels";
  t.cols = iteration_table_columns();
  detail::CellRecorder rec(t, opt);
  IterationControl ctl;
  ctl.max_iter = opt.max_iter;
  HierarchyOptions hopt;
  hopt.budget_bytes = opt.budget_bytes;
  hopt.seed = opt.seed;

  for (int p : {1, 2, 3, 4, 5, 6, 7, 8, 16})
  {
    if (!detail::wanted_order(opt.orders, p))
    {
      continue;
    }
    const std::string row = std::to_string(p);
    t.rows.push_back(row);
    std::shared_ptr<const StructuredMesh> mesh;
    std::vector<double> f;
    auto ensure_mesh = [&]
    {
      if (!mesh)
      {
        mesh = build_mesh(pr.dim, nelem, p, pr.warp);
        f = standard_rhs(*mesh);
      }
    };
    for (const auto &sm : detail::table_smoothers)
    {
      const auto spec = SmootherSpec::standard(sm.kind);
      for (const char *hk : {"h", "p"})
      {
        const bool is_p = hk[0] == 'p';
        std::vector<std::pair<SolveMode, std::string>> todo;
        for (auto mode : {SolveMode::solver, SolveMode::pcg})
        {
          const std::string col = std::string(to_string(mode)) + "/" + sm.tag + "/" + hk;
          if (detail::wanted(opt.columns, col))
          {
            todo.emplace_back(mode, col);
          }
        }
        if (todo.empty())
        {
          continue;
        }
        if (is_p && (p == 1 || (p & (p - 1)) != 0))
        {
          for (const auto &[mode, col] : todo)
          {
            rec.add(detail::skipped_cell(row, col, "", "not a power-of-2 order above 1"));
          }
          continue;
        }
        if (detail::skipped_by_policy(pr.dim, p, spec.needs_assembly()))
        {
          for (const auto &[mode, col] : todo)
          {
            rec.add(detail::skipped_cell(row, col, "*", "assembly at this size skipped"));
          }
          continue;
        }
        std::optional<MgHierarchy> h;
        for (const auto &[mode, col] : todo)
        {
          rec.run(row, col,
                  [&]
                  {
                    ensure_mesh();
                    if (!h)
                    {
                      h.emplace(is_p ? build_p_hierarchy(mesh, 3, pr.coefficient, spec, hopt)
                                     : build_h_hierarchy(mesh, 3, pr.coefficient, spec, hopt));
                    }
                    std::vector<double> u(mesh->n_dofs(), 0.0);
                    return detail::cell_from_report(row, col, mg_solve(*h, mode, f, u, ctl));
                  });
        }
      }
    }
    const std::string col = "low-order/pcg";
    if (detail::wanted(opt.columns, col))
    {
      if (p == 1)
      {
        rec.add(detail::skipped_cell(row, col, "-", "not applicable at order 1"));
      }
      else if (detail::skipped_by_policy(pr.dim, p, true))
      {
        rec.add(detail::skipped_cell(row, col, "*", "low-order factorization at this size skipped"));
      }
      else
      {
        rec.run(row, col,
                [&]
                {
                  ensure_mesh();
                  std::vector<double> u(mesh->n_dofs(), 0.0);
                  return detail::cell_from_report(
                      row, col, low_order_pcg(mesh, pr.coefficient, f, u, ctl, opt.budget_bytes));
                });
      }
    }
  }
  return t;
}

/// SSOR(2,1)-preconditioned CG on meshes of growing size over a fixed 2x2 coarsest grid.
inline Table run_mesh_independence(const std::string &problem_id, const RunOptions &opt = {},
                                   std::string id = "T8")
{
  const auto pr = problem(problem_id);
  require(pr.dim == 2, Errc::configuration, "mesh-independence sweeps are two-dimensional");
  const std::vector<int> meshes =
      opt.meshes.empty() ? std::vector<int>{4, 8, 16, 32, 64, 128, 256} : opt.meshes;
  for (int m : meshes)
  {
    require(m >= 2 && (m & (m - 1)) == 0, Errc::configuration,
            "mesh sizes must be powers of 2, got " + std::to_string(m));
  }
  Table t;
  t.id = std::move(id);
  t.title = "SSOR(2,1) pCG iterations, " + problem_id + ", coarsest grid 2x2";
  for (int m : meshes)
  {
    t.cols.push_back(problem_id + "/" + std::to_string(m));
  }
  detail::CellRecorder rec(t, opt);
  IterationControl ctl;
  ctl.max_iter = opt.max_iter;
  HierarchyOptions hopt;
  hopt.budget_bytes = opt.budget_bytes;
  hopt.seed = opt.seed;
  const auto spec = SmootherSpec::standard(SmootherKind::ssor);
  const std::vector<int> orders = opt.orders.empty() ? std::vector<int>{1, 2, 4, 8, 16} : opt.orders;
  for (int p : orders)
  {
    const std::string row = std::to_string(p);
    t.rows.push_back(row);
    for (int m : meshes)
    {
      const std::string col = problem_id + "/" + std::to_string(m);
      if (!detail::wanted(opt.columns, col))
      {
        continue;
      }
      const auto nnz = TensorPattern::element_coupling(2, m, p).nnz();
      if (nnz * CsrMatrix::bytes_per_entry > opt.budget_bytes)
      {
        rec.add(detail::skipped_cell(row, col, "*",
                                     "assembled operator needs " +
                                         std::to_string(nnz * CsrMatrix::bytes_per_entry) +
                                         " bytes"));
        continue;
      }
      rec.run(row, col,
              [&]
              {
                int levels = 1;
                for (int k = m; k > 2; k /= 2)
                {
                  ++levels;
                }
                const auto mesh = build_mesh(2, m, p, pr.warp);
                const auto f = standard_rhs(*mesh);
                auto h = build_h_hierarchy(mesh, levels, pr.coefficient, spec, hopt);
                std::vector<double> u(mesh->n_dofs(), 0.0);
                return detail::cell_from_report(row, col, mg_solve(h, SolveMode::pcg, f, u, ctl));
              });
    }
  }
  return t;
}

/// Point, block and l1 Jacobi smoothing (3,3), h-hierarchy, as solver and as
/// preconditioner, at orders 8 and 16.
inline Table run_jacobi_variants_table(const RunOptions &opt = {}, std::string id = "T9")
{
  struct Variant
  {
    const char *tag;
    SmootherKind kind;
  };
  const Variant variants[] = {
      {"pt", SmootherKind::jacobi}, {"blk", SmootherKind::block_jacobi}, {"l1", SmootherKind::l1_jacobi}};
  const char *problems[] = {"2d-const", "2d-var", "3d-var"};
  Table t;
  t.id = std::move(id);
  t.title = "Point, block and l1 Jacobi (3,3), h-hierarchy, 3 levels";
  for (const char *pid : problems)
  {
    for (const char *mode : {"mg", "pcg"})
    {
      for (const auto &v : variants)
      {
        t.cols.push_back(std::string(pid) + "/" + mode + "/" + v.tag);
      }
    }
  }
  detail::CellRecorder rec(t, opt);
  IterationControl ctl;
  ctl.max_iter = opt.max_iter;
  HierarchyOptions hopt;
  hopt.budget_bytes = opt.budget_bytes;
  hopt.seed = opt.seed;
  for (int p : {8, 16})
  {
    if (!detail::wanted_order(opt.orders, p))
    {
      continue;
    }
    const std::string row = std::to_string(p);
    t.rows.push_back(row);
    for (const char *pid : problems)
    {
      const auto pr = problem(pid);
      const int nelem = pr.dim == 3 ? 8 : 32;
      std::shared_ptr<const StructuredMesh> mesh;
      std::vector<double> f;
      for (const auto &v : variants)
      {
        SmootherSpec spec = SmootherSpec::standard(v.kind);
        spec.pre_steps = spec.post_steps = 3;
        spec.omega = 2.0 / 3.0;
        const bool needs = v.kind != SmootherKind::jacobi;
        std::optional<MgHierarchy> h;
        for (auto mode : {SolveMode::solver, SolveMode::pcg})
        {
          const std::string col = std::string(pid) + "/" +
                                  (mode == SolveMode::solver ? "mg" : "pcg") + "/" + v.tag;
          if (!detail::wanted(opt.columns, col))
          {
            continue;
          }
          if (detail::skipped_by_policy(pr.dim, p, needs))
          {
            rec.add(detail::skipped_cell(row, col, "*", "assembly at this size skipped"));
            continue;
          }
          rec.run(row, col,
                  [&]
                  {
                    if (!mesh)
                    {
                      mesh = build_mesh(pr.dim, nelem, p, pr.warp);
                      f = standard_rhs(*mesh);
                    }
                    if (!h)
                    {
                      h.emplace(build_h_hierarchy(mesh, 3, pr.coefficient, spec, hopt));
                    }
                    std::vector<double> u(mesh->n_dofs(), 0.0);
                    return detail::cell_from_report(row, col, mg_solve(*h, mode, f, u, ctl));
                  });
        }
      }
    }
  }
  return t;
}

/// Table ids T1..T5, T8, T9. T6 and T7 have no defined content.
inline Table run_table(std::string_view id, const RunOptions &opt = {})
{
  static const std::map<std::string, std::string, std::less<>> problems = {
      {"T1", "2d-const"}, {"T2", "2d-var"}, {"T3", "2d-var'"}, {"T4", "3d-const"}, {"T5", "3d-var"}};
  if (const auto it = problems.find(id); it != problems.end())
  {
    return run_iteration_table(std::string(id), it->second, opt);
  }
  if (id == "T8")
  {
    Table t = run_mesh_independence("2d-const", opt);
    const Table v = run_mesh_independence("2d-var", opt);
    t.title = "SSOR(2,1) pCG iterations, coarsest grid 2x2";
    t.cols.insert(t.cols.end(), v.cols.begin(), v.cols.end());
    t.cells.insert(t.cells.end(), v.cells.begin(), v.cells.end());
    return t;
  }
  if (id == "T9")
  {
    return run_jacobi_variants_table(opt);
  }
  if (id == "T6" || id == "T7")
  {
    throw Error(Errc::configuration, "table " + std::string(id) + " has no defined experiment");
  }
  throw Error(Errc::configuration, "unknown table '" + std::string(id) + "'");
}

namespace detail
{

inline std::string csv_field(const std::string &s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
  {
    return s;
  }
  std::string out = "\"";
  for (char ch : s)
  {
    if (ch == '"')
    {
      out += '"';
    }
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

/// One line per cell in row/column order; no timings, so reruns are byte-identical.
inline void write_csv(std::ostream &os, const Table &t, bool header = true)
{
  if (header)
  {
    os << "table,row_label,col_label,value,status\n";
  }
  for (const auto &r : t.rows)
  {
    for (const auto &c : t.cols)
    {
      if (const Cell *cell = t.find(r, c))
      {
        os << detail::csv_field(t.id) << ',' << detail::csv_field(r) << ','
           << detail::csv_field(c) << ',' << detail::csv_field(cell->value) << ','
           << to_string(cell->status) << '\n';
      }
    }
  }
}

inline void write_markdown(std::ostream &os, const Table &t)
{
  os << "### " << t.id << ": " << t.title << "\n\n| order |";
  for (const auto &c : t.cols)
  {
    os << ' ' << c << " |";
  }
  os << "\n|---|";
  for (std::size_t k = 0; k < t.cols.size(); ++k)
  {
    os << "---|";
  }
  os << '\n';
  for (const auto &r : t.rows)
  {
    os << "| " << r << " |";
    for (const auto &c : t.cols)
    {
      const Cell *cell = t.find(r, c);
      os << ' ' << (cell ? cell->value : std::string()) << " |";
    }
    os << '\n';
  }
}

}  // namespace hmg

#endif  // HMG_BENCH_HPP
