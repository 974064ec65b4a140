// Edge-recovery metrics against a ground-truth network: precision/recall,
// weight MSE, and the sweep over the sparsity parameter that traces a
// precision-recall curve and its break-even point.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "connie/io.hpp"
#include "connie/network.hpp"
#include "connie/solver.hpp"

namespace connie {

struct PRPoint {
  double rho = 0.0;
  double precision = 1.0;
  double recall = 1.0;
  long long edges_inferred = 0;
};

struct EvalReport {
  std::vector<PRPoint> curve; // sorted by rho
  double break_even = 1.0;
  bool extrapolated = false; // precision - recall never changed sign on the grid
  double mse_at_true_edge_count = 0.0;
  double mse_rho = 0.0; // the rho at which that MSE was measured
};

/// Precision = correctly inferred edges / inferred edges; recall = correctly
/// inferred edges / true edges. An edge is present when its weight is > 0.
/// Empty denominators count as perfect (0/0 := 1).
inline std::pair<double, double> precision_recall(const Network& truth,
                                                  const Network& inferred) {
  if (truth.nodes() != inferred.nodes())
    throw std::invalid_argument("precision_recall: node counts differ");

  long long true_edges = 0, inferred_edges = 0, correct = 0;
  for (const Edge& e : truth.edges()) true_edges += (e.weight > 0.0);
  for (const Edge& e : inferred.edges()) {
    if (e.weight <= 0.0) continue;
    ++inferred_edges;
    correct += (truth.weight(e.src, e.dst) > 0.0);
  }
  double precision = inferred_edges == 0 ? 1.0
                                         : static_cast<double>(correct) / inferred_edges;
  double recall = true_edges == 0 ? 1.0 : static_cast<double>(correct) / true_edges;
  return {precision, recall};
}

/// Mean squared weight error over the union of edge positions present in
/// either network; a position absent from one side contributes that side's
/// weight as 0. Two empty networks give 0.
inline double mse(const Network& truth, const Network& inferred) {
  if (truth.nodes() != inferred.nodes())
    throw std::invalid_argument("mse: node counts differ");

  double sum = 0.0;
  long long positions = 0;
  for (const Edge& e : truth.edges()) {
    if (e.weight <= 0.0) continue;
    double d = e.weight - inferred.weight(e.src, e.dst);
    sum += d * d;
    ++positions;
  }
  for (const Edge& e : inferred.edges()) {
    if (e.weight <= 0.0) continue;
    if (truth.weight(e.src, e.dst) > 0.0) continue; // already counted
    sum += e.weight * e.weight;
    ++positions;
  }
  return positions == 0 ? 0.0 : sum / positions;
}

/// The default sweep grid: 20 logarithmically spaced penalty weights in
/// [0.01, 1000], plus rho = 0.
inline std::vector<double> default_rho_grid() {
  std::vector<double> grid{0.0};
  const double lo = std::log10(0.01), hi = std::log10(1000.0);
  const int k = 20;
  for (int i = 0; i < k; ++i)
    grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (k - 1)));
  return grid;
}

/// Runs inference once per penalty weight and records the resulting
/// precision-recall curve, the interpolated break-even point, and the weight
/// MSE at the sweep point whose edge count is nearest the truth's.
inline EvalReport pr_sweep(const CascadeSet& cs, const TransmissionModel& model,
                           const Network& truth, const std::vector<double>& rho_grid,
                           const SolverOptions& opts) {
  if (rho_grid.empty()) throw std::invalid_argument("pr_sweep: empty rho grid");
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (rho_grid[i] < 0.0) throw std::invalid_argument("pr_sweep: rho must be >= 0");
    if (i > 0 && rho_grid[i] < rho_grid[i - 1])
      throw std::invalid_argument("pr_sweep: rho grid must be sorted ascending");
  }
  if (truth.nodes() != cs.n)
    throw std::invalid_argument("pr_sweep: truth and cascades disagree on node count");

  // Evidence does not depend on rho; extract it once.
  std::vector<NodeSubproblem> sps = build_all_subproblems(cs, model, opts.threads);

  EvalReport report;
  long long true_edges = static_cast<long long>(truth.edge_count());
  long long best_gap = -1;
  for (double rho : rho_grid) {
    SolverOptions point_opts = opts;
    point_opts.rho = rho;
    auto [inferred, solve_report] = infer_from_subproblems(sps, cs.n, point_opts);
    auto [precision, recall] = precision_recall(truth, inferred);
    report.curve.push_back(
        {rho, precision, recall, static_cast<long long>(inferred.edge_count())});

    long long gap = std::llabs(static_cast<long long>(inferred.edge_count()) - true_edges);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      report.mse_at_true_edge_count = mse(truth, inferred);
      report.mse_rho = rho;
    }
  }

  // Break-even: interpolate where precision - recall changes sign along the
  // grid; if it never does, report the closest point and flag extrapolation.
  const auto& curve = report.curve;
  bool found = false;
  for (std::size_t i = 0; i + 1 < curve.size() && !found; ++i) {
    double da = curve[i].precision - curve[i].recall;
    double db = curve[i + 1].precision - curve[i + 1].recall;
    if (da == 0.0) {
      report.break_even = curve[i].precision;
      found = true;
    } else if ((da < 0.0) != (db < 0.0)) {
      double t = da / (da - db); // root of the linear interpolant of (p - r)
      report.break_even =
          curve[i].precision + t * (curve[i + 1].precision - curve[i].precision);
      found = true;
    }
  }
  if (!found && !curve.empty()) {
    if (curve.back().precision == curve.back().recall) {
      report.break_even = curve.back().precision;
    } else {
      std::size_t closest = 0;
      for (std::size_t i = 1; i < curve.size(); ++i)
        if (std::abs(curve[i].precision - curve[i].recall) <
            std::abs(curve[closest].precision - curve[closest].recall))
          closest = i;
      report.break_even = 0.5 * (curve[closest].precision + curve[closest].recall);
      report.extrapolated = true;
    }
  }
  return report;
}

/// Curve as CSV for external plotting: `rho,precision,recall,edges_inferred`.
inline void write_pr_curve_csv(const EvalReport& report, const std::string& path) {
  auto out = detail::open_output(path);
  out << "rho,precision,recall,edges_inferred\n";
  for (const PRPoint& p : report.curve)
    out << detail::format_double(p.rho) << ',' << detail::format_double(p.precision)
        << ',' << detail::format_double(p.recall) << ',' << p.edges_inferred << "\n";
  if (!out) throw parse_error(path, 0, "write failed");
}

} // namespace connie
