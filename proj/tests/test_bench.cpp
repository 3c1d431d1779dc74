#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hmg/bench.hpp"

using namespace hmg;

namespace
{

std::vector<ExperimentConfig> parse(const std::string &text)
{
  std::istringstream in(text);
  return parse_config(in);
}

Errc parse_error(const std::string &text)
{
  try
  {
    (void)parse(text);
  }
  catch (const Error &e)
  {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return Errc::io;
}

std::string csv(const Table &t)
{
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

TEST(Config, SingleExperimentWithoutHeader)
{
  const auto c = parse("# comment\nproblem = 2d-var\norder = 4  # trailing\nhierarchy = p\n"
                       "smoother = cheb\nmode = pcg\nrel_tol = 1e-6\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].problem, "2d-var");
  EXPECT_EQ(c[0].order, 4);
  EXPECT_EQ(c[0].hierarchy, HierarchyKind::p);
  EXPECT_EQ(c[0].smoother.kind, SmootherKind::chebyshev);
  EXPECT_EQ(c[0].mode, SolveMode::pcg);
  EXPECT_EQ(c[0].rel_tol, 1e-6);
  EXPECT_EQ(c[0].resolved_nelem(), 32);
  EXPECT_EQ(c[0].label(), "2d-var/p4/p/chebyshev(3,3)/pcg");
}

TEST(Config, SharedDefaultsAndSections)
{
  const auto c = parse("problem = 3d-const\nsmoother = ssor\n"
                       "[[experiment]]\nname = \"first\"\norder = 2\n"
                       "[[experiment]]\norder = 3\nsmoother = jacobi\npre_steps = 1\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].name, "first");
  EXPECT_EQ(c[0].label(), "first");
  EXPECT_EQ(c[0].smoother.label(), "ssor(2,1)");
  EXPECT_EQ(c[0].resolved_nelem(), 8);
  EXPECT_EQ(c[1].smoother.label(), "jacobi(1,3)");
  EXPECT_EQ(c[1].problem, "3d-const");
}

TEST(Config, Errors)
{
  EXPECT_EQ(parse_error("colour = blue\n"), Errc::configuration);
  EXPECT_EQ(parse_error("order\n"), Errc::configuration);
  EXPECT_EQ(parse_error("order = four\n"), Errc::configuration);
  EXPECT_EQ(parse_error("order = 3\nhierarchy = p\n"), Errc::invalid_p_hierarchy);
  EXPECT_EQ(parse_error("order = 3\nhierarchy = low-order\n"), Errc::configuration);
  EXPECT_EQ(parse_error("order = 1\nhierarchy = low-order\nmode = pcg\n"), Errc::no_op);
  EXPECT_EQ(parse_error("order = 17\n"), Errc::invalid_order);
  EXPECT_EQ(parse_error("problem = 4d-const\n"), Errc::configuration);
  EXPECT_EQ(parse_error("smoother = gmres\n"), Errc::configuration);
  EXPECT_EQ(parse_error("omega = 2.5\n"), Errc::configuration);
  EXPECT_THROW((void)parse_config_file("/nonexistent/config.cfg"), Error);
}

TEST(RunConfig, SmallExperimentConverges)
{
  const auto c = parse("problem = 2d-const\norder = 1\nnelem = 16\nsmoother = jacobi\n");
  const auto rep = run_config(c[0]);
  EXPECT_TRUE(rep.converged);
  EXPECT_GE(rep.iterations, 4);
  EXPECT_LE(rep.iterations, 8);
  EXPECT_GT(rep.cost_model_flops, 0.0);
}

TEST(RunConfig, ErrorsCarryExperimentLabel)
{
  auto c = parse("problem = 2d-const\norder = 2\nnelem = 4\nlevels = 5\n")[0];
  try
  {
    (void)run_config(c);
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.code(), Errc::hierarchy_depth);
    EXPECT_NE(std::string(e.what()).find("2d-const/p2/h"), std::string::npos);
  }
}

TEST(Tables, UndefinedAndUnknownIds)
{
  for (const char *id : {"T6", "T7", "T10", "X"})
  {
    try
    {
      (void)run_table(id);
      FAIL() << id;
    }
    catch (const Error &e)
    {
      EXPECT_EQ(e.code(), Errc::configuration);
    }
  }
}

TEST(Tables, ColumnLabels)
{
  const auto cols = iteration_table_columns();
  ASSERT_EQ(cols.size(), 13u);
  EXPECT_EQ(cols.front(), "solver/jacobi/h");
  EXPECT_EQ(cols[5], "solver/ssor/p");
  EXPECT_EQ(cols[6], "pcg/jacobi/h");
  EXPECT_EQ(cols.back(), "low-order/pcg");
}

TEST(Tables, CellStatusMapping)
{
  const auto b = detail::error_cell("1", "c", Error(Errc::assembly_too_large, "x"));
  EXPECT_EQ(b.value, "*");
  EXPECT_EQ(b.status, CellStatus::skipped);
  const auto d = detail::error_cell("1", "c", Error(Errc::breakdown, "x"));
  EXPECT_EQ(d.value, "-");
  EXPECT_EQ(d.status, CellStatus::diverged);
  const auto o = detail::error_cell("1", "c", Error(Errc::io, "x"));
  EXPECT_EQ(o.value, "err");
  SolveReport r;
  r.iterations = 200;
  r.status = SolveStatus::max_iter;
  EXPECT_EQ(detail::cell_from_report("1", "c", r).value, "-");
  r.iterations = 7;
  r.converged = true;
  r.status = SolveStatus::converged;
  const auto ok = detail::cell_from_report("1", "c", r);
  EXPECT_EQ(ok.value, "7");
  EXPECT_EQ(ok.iterations, 7);
  EXPECT_TRUE(ok.converged());
}

TEST(Tables, OrderOneRowIsDeterministic)
{
  RunOptions opt;
  opt.orders = {1};
  opt.columns = {"solver/jacobi/h", "solver/jacobi/p", "pcg/ssor/h", "low-order/pcg"};
  const auto a = run_table("T1", opt);
  const auto b = run_table("T1", opt);
  EXPECT_EQ(csv(a), csv(b));
  ASSERT_EQ(a.rows, std::vector<std::string>{"1"});
  const Cell *j = a.find("1", "solver/jacobi/h");
  ASSERT_NE(j, nullptr);
  EXPECT_TRUE(j->converged());
  EXPECT_NEAR(j->iterations, 6, 1);
  const Cell *ssor = a.find("1", "pcg/ssor/h");
  ASSERT_NE(ssor, nullptr);
  EXPECT_NEAR(ssor->iterations, 4, 1);
  EXPECT_EQ(a.find("1", "solver/jacobi/p")->value, "");
  EXPECT_EQ(a.find("1", "low-order/pcg")->value, "-");
  EXPECT_EQ(a.find("1", "pcg/jacobi/h"), nullptr);
}

TEST(Tables, MeshIndependenceBudgetCells)
{
  RunOptions opt;
  opt.orders = {2};
  opt.meshes = {4, 8, 16};
  opt.budget_bytes = 40000;
  const auto t = run_mesh_independence("2d-const", opt);
  EXPECT_EQ(t.find("2", "2d-const/4")->value, "4");
  EXPECT_EQ(t.find("2", "2d-const/16")->value, "*");
  EXPECT_EQ(t.find("2", "2d-const/16")->status, CellStatus::skipped);
}

TEST(Csv, HeaderQuotingAndOrder)
{
  Table t;
  t.id = "X";
  t.rows = {"2", "1"};
  t.cols = {"a", "b,c"};
  t.cells = {{"1", "a", "5", CellStatus::converged, 5, {}},
             {"2", "b,c", "-", CellStatus::diverged, -1, {}},
             {"2", "a", "*", CellStatus::skipped, -1, {}}};
  EXPECT_EQ(csv(t), "table,row_label,col_label,value,status\n"
                    "X,2,a,*,skipped\n"
                    "X,2,\"b,c\",-,diverged\n"
                    "X,1,a,5,converged\n");
}
