#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "connie/eval.hpp"
#include "connie/generators.hpp"
#include "connie/simulate.hpp"
#include "test_util.hpp"

using namespace connie;

TEST_CASE("precision and recall") {
  Network truth(6, {{0, 1, 0.5}, {1, 2, 0.7}, {2, 3, 0.9}, {3, 4, 0.4}});

  SECTION("perfect recovery") {
    auto [p, r] = precision_recall(truth, truth);
    CHECK(p == 1.0);
    CHECK(r == 1.0);
  }
  SECTION("all true edges plus as many false ones") {
    Network inferred(6, {{0, 1, 0.5},
                         {1, 2, 0.7},
                         {2, 3, 0.9},
                         {3, 4, 0.4},
                         {1, 0, 0.2},
                         {2, 1, 0.2},
                         {3, 2, 0.2},
                         {4, 3, 0.2}});
    auto [p, r] = precision_recall(truth, inferred);
    CHECK(p == 0.5);
    CHECK(r == 1.0);
  }
  SECTION("disjoint nonempty networks") {
    Network inferred(6, {{5, 0, 0.3}, {4, 0, 0.3}});
    auto [p, r] = precision_recall(truth, inferred);
    CHECK(p == 0.0);
    CHECK(r == 0.0);
  }
  SECTION("0/0 conventions") {
    Network empty(6, {});
    auto [p1, r1] = precision_recall(truth, empty);
    CHECK(p1 == 1.0); // nothing inferred, nothing wrong
    CHECK(r1 == 0.0);
    auto [p2, r2] = precision_recall(empty, truth);
    CHECK(r2 == 1.0); // empty truth
    auto [p3, r3] = precision_recall(empty, empty);
    CHECK(p3 == 1.0);
    CHECK(r3 == 1.0);
  }
  SECTION("node-count mismatch") {
    Network other(5, {});
    CHECK_THROWS_AS(precision_recall(truth, other), std::invalid_argument);
  }
}

TEST_CASE("mean squared edge-weight error") {
  SECTION("identical networks") {
    Network truth(4, {{0, 1, 0.6}, {1, 2, 0.3}});
    CHECK(mse(truth, truth) == 0.0);
  }
  SECTION("missed edge contributes its full squared weight") {
    Network truth(4, {{0, 1, 0.6}});
    Network empty(4, {});
    CHECK(mse(truth, empty) == Catch::Approx(0.36));
  }
  SECTION("union of positions includes spurious edges") {
    Network truth(4, {{0, 1, 0.5}});
    Network inferred(4, {{0, 1, 0.5}, {1, 2, 0.3}});
    CHECK(mse(truth, inferred) == Catch::Approx(0.045)); // (0 + 0.09) / 2
  }
  SECTION("two empty networks") {
    Network a(4, {}), b(4, {});
    CHECK(mse(a, b) == 0.0);
  }
  SECTION("bounded by one and independent of edge-list order") {
    Network truth(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    Network inferred(4, {{3, 2, 1.0}, {1, 0, 1.0}});
    double v = mse(truth, inferred);
    CHECK(v <= 1.0);
    Network inferred2(4, {{1, 0, 1.0}, {3, 2, 1.0}});
    CHECK(mse(truth, inferred2) == v);
  }
  SECTION("node-count mismatch") {
    CHECK_THROWS_AS(mse(Network(4, {}), Network(3, {})), std::invalid_argument);
  }
}

TEST_CASE("default rho grid") {
  std::vector<double> grid = default_rho_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == 0.0);
  CHECK(grid[1] == Catch::Approx(0.01));
  CHECK(grid.back() == Catch::Approx(1000.0));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  // log spacing: constant ratio between consecutive nonzero points
  for (std::size_t i = 2; i < grid.size(); ++i)
    CHECK(grid[i] / grid[i - 1] == Catch::Approx(grid[2] / grid[1]).epsilon(1e-9));
}

TEST_CASE("sweep over the sparsity parameter") {
  // Small, well-covered instance: a 3-node chain with a shortcut.
  Network truth(3, {{0, 1, 0.8}, {0, 2, 0.6}, {1, 2, 0.7}});
  TransmissionModel model = Exponential{1.0};
  CascadeSet cs;
  cs.n = 3;
  for (int attempt = 0; attempt < 600; ++attempt) {
    rng_t rng = make_stream(99, attempt);
    std::uniform_int_distribution<int> seeds(0, 2);
    Cascade c = simulate_cascade(truth, model, seeds(rng), rng);
    if (c.records.size() < 2) continue;
    c.id = static_cast<long long>(cs.cascades.size());
    cs.cascades.push_back(std::move(c));
  }
  REQUIRE(cs.cascades.size() > 300);

  SolverOptions opts;
  std::vector<double> grid{0.0, 0.1, 1.0, 10.0, 100.0, 1000.0};
  EvalReport report = pr_sweep(cs, model, truth, grid, opts);

  SECTION("perfect recovery at some sweep point") {
    REQUIRE(report.curve.size() == grid.size());
    CHECK(report.break_even == 1.0);
    CHECK_FALSE(report.extrapolated);
    // Weights on tiny networks carry the discard-rule selection bias, so
    // the MSE floor is sampling-limited rather than solver-limited.
    CHECK(report.mse_at_true_edge_count < 0.05);
  }
  SECTION("curve bookkeeping") {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(report.curve[i].rho == grid[i]);
      CHECK(report.curve[i].precision >= 0.0);
      CHECK(report.curve[i].precision <= 1.0);
      CHECK(report.curve[i].recall >= 0.0);
      CHECK(report.curve[i].recall <= 1.0);
    }
    // inferred edge count does not grow with the penalty
    for (std::size_t i = 1; i < report.curve.size(); ++i)
      CHECK(report.curve[i].edges_inferred <= report.curve[i - 1].edges_inferred);
    // break-even lies within the observed precision/recall range
    double lo = 1.0, hi = 0.0;
    for (const PRPoint& p : report.curve) {
      lo = std::min({lo, p.precision, p.recall});
      hi = std::max({hi, p.precision, p.recall});
    }
    CHECK(report.break_even >= lo);
    CHECK(report.break_even <= hi);
  }
  SECTION("sweep is deterministic") {
    EvalReport again = pr_sweep(cs, model, truth, grid, opts);
    REQUIRE(again.curve.size() == report.curve.size());
    for (std::size_t i = 0; i < report.curve.size(); ++i) {
      CHECK(again.curve[i].precision == report.curve[i].precision);
      CHECK(again.curve[i].recall == report.curve[i].recall);
      CHECK(again.curve[i].edges_inferred == report.curve[i].edges_inferred);
    }
    CHECK(again.break_even == report.break_even);
    CHECK(again.mse_at_true_edge_count == report.mse_at_true_edge_count);
  }
  SECTION("csv export") {
    std::string path =
        (std::filesystem::temp_directory_path() / "connie_test_curve.csv").string();
    write_pr_curve_csv(report, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "rho,precision,recall,edges_inferred");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(report.curve.size()));
    std::remove(path.c_str());
  }
  SECTION("grid validation") {
    CHECK_THROWS_AS(pr_sweep(cs, model, truth, {}, opts), std::invalid_argument);
    CHECK_THROWS_AS(pr_sweep(cs, model, truth, {1.0, 0.5}, opts), std::invalid_argument);
    CHECK_THROWS_AS(pr_sweep(cs, model, truth, {-1.0, 0.5}, opts), std::invalid_argument);
  }
}

TEST_CASE("break-even interpolation") {
  // Synthetic check of the interpolation rule on a hand-made curve via a
  // corpus engineered to cross: not practical here, so exercise the helper
  // indirectly through its contract on the real sweep above plus the
  // degenerate single-point case.
  Network truth(2, {{0, 1, 1.0}});
  TransmissionModel model = Exponential{1.0};
  CascadeSet cs;
  cs.n = 2;
  for (int attempt = 0; attempt < 40; ++attempt) {
    rng_t rng = make_stream(7, attempt);
    std::uniform_int_distribution<int> seeds(0, 1);
    Cascade c = simulate_cascade(truth, model, seeds(rng), rng);
    if (c.records.size() < 2) continue;
    c.id = static_cast<long long>(cs.cascades.size());
    cs.cascades.push_back(std::move(c));
  }
  SolverOptions opts;
  EvalReport report = pr_sweep(cs, model, truth, {0.0}, opts);
  REQUIRE(report.curve.size() == 1);
  // single certain edge, always recovered: p = r = 1 at rho = 0
  CHECK(report.break_even == 1.0);
}
