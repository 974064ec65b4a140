// Bound-constrained minimization of the per-node objective, the two-stage
// sparsity procedure, and assembly of the full inferred network.
//
// The feasible set is a box and the objective is smooth and convex, so
// projected gradient descent with Armijo backtracking converges to the
// global minimum of each subproblem. Steps are scaled per coordinate by the
// exact Hessian diagonal: the curvature spans many orders of magnitude
// across the box (the penalty alone contributes rho * e^{-b}, up to
// rho / eps_A near the lower bound), and a single scalar step length makes
// coordinates with flat curvature crawl. Diagonal scaling is safe for box
// constraints because the projection acts component-wise.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "connie/network.hpp"
#include "connie/parallel.hpp"
#include "connie/subproblem.hpp"

namespace connie {

struct SolverOptions {
  double grad_tol = 1e-6;       // projected-gradient sup-norm tolerance
  int max_iter = 5000;          // iteration cap per minimize call
  double zero_threshold = 1e-4; // A below this after stage 1 is declared absent
  double init_A = 0.1;          // initial edge probability
  double rho = 0.0;             // sparsity weight
  int threads = 0;              // 0 = default_thread_count()
};

struct MinimizeResult {
  TransformedPoint x;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
};

struct NodeReport {
  int node = -1;
  int iterations = 0; // both stages
  double objective = 0.0;
  bool converged = false;
  int stage1_support = 0;
};

struct SolveReport {
  std::vector<NodeReport> nodes;
  double wall_seconds = 0.0;
  long long total_edges = 0;
};

namespace detail {

// Subproblem restricted to the free (not pinned-to-zero) parents. Pinned
// parents contribute a constant: factor 1 in every positive product, zero
// negative-evidence term, and rho per parent of penalty. Positive cascades
// whose parents are all pinned are infinite constants and cannot affect the
// minimizer, so they are dropped.
struct ReducedProblem {
  NodeSubproblem sp;
  std::vector<int> free_index; // reduced coordinate -> original coordinate
  double penalty_offset = 0.0; // rho * (number of pinned parents)
};

inline ReducedProblem reduce(const NodeSubproblem& sp, const std::vector<char>& pinned,
                             double rho) {
  ReducedProblem red;
  std::vector<int> to_reduced(sp.dim(), -1);
  for (std::size_t j = 0; j < sp.dim(); ++j) {
    if (pinned[j]) continue;
    to_reduced[j] = static_cast<int>(red.free_index.size());
    red.free_index.push_back(static_cast<int>(j));
    red.sp.parents.push_back(sp.parents[j]);
    red.sp.negative_counts.push_back(sp.negative_counts[j]);
  }
  red.sp.target = sp.target;
  red.penalty_offset = rho * static_cast<double>(sp.dim() - red.free_index.size());
  for (const auto& row : sp.positives) {
    std::vector<std::pair<int, double>> kept;
    for (const auto& [j, w] : row)
      if (to_reduced[j] >= 0) kept.emplace_back(to_reduced[j], w);
    if (!kept.empty()) red.sp.positives.push_back(std::move(kept));
  }
  return red;
}

} // namespace detail

/// Projected gradient descent over the box [log(eps_A), 0]^dim with the
/// coordinates in `fixed_zero` pinned at b=0 (A=0). The accepted-iterate
/// objective sequence is non-increasing; on convergence the projected
/// gradient sup-norm is <= opts.grad_tol. When `trace` is given it receives
/// the objective at every accepted iterate.
inline MinimizeResult minimize_box(const NodeSubproblem& sp, const SolverOptions& opts,
                                   const std::vector<int>& fixed_zero,
                                   const std::vector<double>* warm_start = nullptr,
                                   std::vector<double>* trace = nullptr) {
  if (sp.empty()) throw std::invalid_argument("minimize_box: empty subproblem");

  std::vector<char> pinned(sp.dim(), 0);
  for (int j : fixed_zero) {
    if (j < 0 || static_cast<std::size_t>(j) >= sp.dim())
      throw std::invalid_argument("minimize_box: fixed_zero index out of range");
    pinned[j] = 1;
  }

  detail::ReducedProblem red = detail::reduce(sp, pinned, opts.rho);
  const std::size_t d = red.free_index.size();

  MinimizeResult result;
  result.x.b_hat.assign(sp.dim(), 0.0);
  if (d == 0) {
    result.converged = true;
    result.objective = red.penalty_offset;
    return result;
  }

  auto project = [](double v) { return std::clamp(v, kLowerBhat, 0.0); };

  TransformedPoint x;
  x.b_hat.assign(d, bhat_from_a(opts.init_A));
  if (warm_start != nullptr) {
    if (warm_start->size() != sp.dim())
      throw std::invalid_argument("minimize_box: warm start dimension mismatch");
    for (std::size_t k = 0; k < d; ++k)
      x.b_hat[k] = project((*warm_start)[red.free_index[k]]);
  }

  std::vector<double> g(d), curvature(d);
  double f = objective_and_gradient(red.sp, x, opts.rho, g, &curvature);
  if (!std::isfinite(f)) {
    // retry once from the box midpoint
    x.b_hat.assign(d, kLowerBhat / 2.0);
    f = objective_and_gradient(red.sp, x, opts.rho, g, &curvature);
    if (!std::isfinite(f))
      throw std::runtime_error("minimize_box: objective not finite at the initial point");
  }
  if (trace != nullptr) trace->push_back(f + red.penalty_offset);

  std::vector<double> direction(d), trial(d);
  constexpr double kArmijo = 1e-4;
  constexpr double kBacktrack = 0.5;
  constexpr double kCurvatureFloor = 1e-12;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // Projected-gradient optimality measure.
    double pg_norm = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      pg_norm = std::max(pg_norm, std::abs(x.b_hat[k] - project(x.b_hat[k] - g[k])));
    if (pg_norm <= opts.grad_tol) {
      result.converged = true;
      break;
    }

    for (std::size_t k = 0; k < d; ++k)
      direction[k] = g[k] / std::max(curvature[k], kCurvatureFloor);

    double step = 1.0;
    double f_trial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (step >= 1e-18) {
      for (std::size_t k = 0; k < d; ++k)
        trial[k] = project(x.b_hat[k] - step * direction[k]);
      double directional = 0.0; // g . (trial - x), <= 0 for scaled projected steps
      double moved = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        directional += g[k] * (trial[k] - x.b_hat[k]);
        moved = std::max(moved, std::abs(trial[k] - x.b_hat[k]));
      }
      if (moved == 0.0) break; // stuck against the bounds
      TransformedPoint t{trial};
      f_trial = objective(red.sp, t, opts.rho);
      // Sufficient decrease, or a step whose true decrease is below the
      // objective's floating-point resolution; the latter keeps the iterate
      // moving (and f non-increasing) when g is tiny but above grad_tol.
      if (f_trial <= f + kArmijo * directional || f_trial <= f) {
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    if (!accepted) break; // no descent step available at working precision

    x.b_hat = trial;
    f = objective_and_gradient(red.sp, x, opts.rho, g, &curvature);
    if (trace != nullptr) trace->push_back(f + red.penalty_offset);
  }

  result.iterations = it;
  result.objective = f + red.penalty_offset;
  for (std::size_t k = 0; k < d; ++k) result.x.b_hat[red.free_index[k]] = x.b_hat[k];
  if (!result.converged) {
    double pg_norm = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      pg_norm = std::max(pg_norm, std::abs(x.b_hat[k] - project(x.b_hat[k] - g[k])));
    result.converged = pg_norm <= opts.grad_tol;
  }
  return result;
}

/// Two-stage estimate of the target's incoming weights: solve with the
/// sparsity penalty, pin every parent whose weight fell below the zero
/// threshold, then re-solve without the penalty to remove its bias from the
/// surviving weights. Returns one weight per candidate parent.
inline std::vector<double> solve_node(const NodeSubproblem& sp, const SolverOptions& opts,
                                      NodeReport* report = nullptr) {
  if (report != nullptr) *report = NodeReport{};
  if (report != nullptr) report->node = sp.target;
  if (sp.empty()) {
    if (report != nullptr) report->converged = true;
    return {};
  }

  MinimizeResult stage1 = minimize_box(sp, opts, {});
  std::vector<double> weights = weights_from_point(stage1.x);

  if (opts.rho == 0.0) {
    if (report != nullptr) {
      report->iterations = stage1.iterations;
      report->objective = stage1.objective;
      report->converged = stage1.converged;
      report->stage1_support = static_cast<int>(weights.size());
    }
    return weights;
  }

  std::vector<int> fixed_zero;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] < opts.zero_threshold) fixed_zero.push_back(static_cast<int>(j));

  SolverOptions relaxed = opts;
  relaxed.rho = 0.0;
  MinimizeResult stage2 = minimize_box(sp, relaxed, fixed_zero, &stage1.x.b_hat);
  std::vector<double> out = weights_from_point(stage2.x);
  for (int j : fixed_zero) out[j] = 0.0;

  if (report != nullptr) {
    report->iterations = stage1.iterations + stage2.iterations;
    report->objective = stage2.objective;
    report->converged = stage1.converged && stage2.converged;
    report->stage1_support = static_cast<int>(weights.size() - fixed_zero.size());
  }
  return out;
}

/// Builds one subproblem per node; exposed separately so a sweep over
/// penalty weights can reuse the cached evidence.
inline std::vector<NodeSubproblem> build_all_subproblems(const CascadeSet& cs,
                                                         const TransmissionModel& model,
                                                         int threads = 0) {
  std::vector<NodeSubproblem> sps(static_cast<std::size_t>(cs.n));
  parallel_for(cs.n, threads,
               [&](int i) { sps[i] = build_subproblem(cs, i, model); });
  return sps;
}

/// Solves all prepared subproblems and assembles the inferred network.
/// Columns are independent, solved by a worker pool, and written to disjoint
/// slots, so the result is identical for any worker count.
inline std::pair<Network, SolveReport>
infer_from_subproblems(const std::vector<NodeSubproblem>& sps, int n,
                       const SolverOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> columns(sps.size());
  SolveReport report;
  report.nodes.assign(sps.size(), NodeReport{});

  parallel_for(static_cast<int>(sps.size()), opts.threads, [&](int i) {
    try {
      columns[i] = solve_node(sps[i], opts, &report.nodes[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("node " + std::to_string(sps[i].target) + ": " + e.what());
    }
  });

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < sps.size(); ++i) {
    const NodeSubproblem& sp = sps[i];
    for (std::size_t j = 0; j < columns[i].size(); ++j)
      if (columns[i][j] > 0.0)
        edges.push_back({sp.parents[j], sp.target, columns[i][j]});
  }
  report.total_edges = static_cast<long long>(edges.size());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {Network(n, std::move(edges)), report};
}

/// End-to-end inference: evidence extraction plus per-node solves.
inline std::pair<Network, SolveReport> infer_network(const CascadeSet& cs,
                                                     const TransmissionModel& model,
                                                     const SolverOptions& opts) {
  std::vector<NodeSubproblem> sps = build_all_subproblems(cs, model, opts.threads);
  return infer_from_subproblems(sps, cs.n, opts);
}

} // namespace connie
