// Per-node inference subproblem and its convex objective.
//
// The incoming edges of a target node i can be estimated independently of
// every other node's. For each candidate parent j (a node that was infected
// strictly before i in at least one cascade) we estimate the transmission
// probability A_j. Working in the log-transformed variables
//
//     b_j = log(1 - A_j),   b_j in [log(eps_A), 0],
//
// the negative log-likelihood plus sparsity penalty becomes
//
//     F(b) = sum over cascades where i was infected of
//                -log(1 - prod_j (1 - w_j + w_j * exp(b_j)))
//          + sum_j n_j * (-b_j)
//          + rho * sum_j exp(-b_j)
//
// where w_j is the transmission-delay density evaluated at the observed time
// gap (clamped to (0, 1] so every factor stays a valid probability), the
// product runs over parents infected strictly before i in that cascade, and
// n_j counts cascades in which j was infected but i never was. Each factor
// 1 - w + w*exp(b) is positive and log-convex in b, so the product is
// log-convex and F is convex; the penalty term equals rho * sum 1/(1 - A_j).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "connie/cascade.hpp"
#include "connie/network.hpp"
#include "connie/transmission.hpp"

namespace connie {

// Transmission probabilities live in [0, 1 - kEpsA] so logarithms stay finite.
inline constexpr double kEpsA = 1e-12;
inline const double kLowerBhat = std::log(kEpsA);

// Cached delay densities are clamped into this range: the convex program
// needs w <= 1, and w > 0 keeps the evidence ordering intact.
inline constexpr double kMinDensity = 1e-12;
inline constexpr double kMaxDensity = 1.0;

inline double clamp_density(double w) {
  return std::clamp(w, kMinDensity, kMaxDensity);
}

/// Point in the transformed variables, one coordinate per candidate parent.
struct TransformedPoint {
  std::vector<double> b_hat;
};

inline double a_from_bhat(double b) { return -std::expm1(b); }
inline double bhat_from_a(double a) { return std::log1p(-a); }

inline TransformedPoint transform_weights(const std::vector<double>& a) {
  TransformedPoint x;
  x.b_hat.reserve(a.size());
  for (double v : a) x.b_hat.push_back(bhat_from_a(v));
  return x;
}

inline std::vector<double> weights_from_point(const TransformedPoint& x) {
  std::vector<double> a;
  a.reserve(x.b_hat.size());
  for (double b : x.b_hat) a.push_back(a_from_bhat(b));
  return a;
}

/// Evidence for one target node: candidate parents, per-cascade cached delay
/// densities for the cascades where the target was infected, and per-parent
/// counts of cascades where the parent was infected but the target was not.
struct NodeSubproblem {
  int target = -1;
  std::vector<int> parents; // candidate parent node ids, ascending

  // One entry per cascade with the target infected after at least one
  // parent: (parent index, clamped density of the observed delay).
  std::vector<std::vector<std::pair<int, double>>> positives;

  std::vector<long long> negative_counts; // per parent

  std::size_t dim() const { return parents.size(); }
  bool empty() const { return parents.empty(); }
};

/// Collects the evidence for `target` from a cascade set. Candidate parents
/// are the nodes infected strictly before the target in at least one cascade;
/// all other incoming weights are structurally zero. Simultaneous infection
/// times never count as potential transmissions.
inline NodeSubproblem build_subproblem(const CascadeSet& cs, int target,
                                       const TransmissionModel& model) {
  if (target < 0 || target >= cs.n)
    throw std::invalid_argument("build_subproblem: target out of range");

  NodeSubproblem sp;
  sp.target = target;

  for (const Cascade& c : cs.cascades) {
    double t_target = c.time_of(target);
    if (!std::isfinite(t_target)) continue;
    for (const InfectionRecord& r : c.records) {
      if (r.time >= t_target) break; // sorted by time
      sp.parents.push_back(r.node);
    }
  }
  std::sort(sp.parents.begin(), sp.parents.end());
  sp.parents.erase(std::unique(sp.parents.begin(), sp.parents.end()), sp.parents.end());
  if (sp.parents.empty()) return sp; // never infected after anyone

  std::unordered_map<int, int> index;
  index.reserve(sp.parents.size());
  for (std::size_t k = 0; k < sp.parents.size(); ++k)
    index.emplace(sp.parents[k], static_cast<int>(k));
  sp.negative_counts.assign(sp.parents.size(), 0);

  for (const Cascade& c : cs.cascades) {
    double t_target = c.time_of(target);
    if (std::isfinite(t_target)) {
      std::vector<std::pair<int, double>> row;
      for (const InfectionRecord& r : c.records) {
        if (r.time >= t_target) break;
        row.emplace_back(index.at(r.node),
                         clamp_density(density(model, t_target - r.time)));
      }
      if (!row.empty()) sp.positives.push_back(std::move(row));
    } else {
      for (const InfectionRecord& r : c.records) {
        auto it = index.find(r.node);
        if (it != index.end()) ++sp.negative_counts[it->second];
      }
    }
  }
  return sp;
}

namespace detail {

inline void check_dims(const NodeSubproblem& sp, const TransformedPoint& x) {
  if (x.b_hat.size() != sp.dim())
    throw std::invalid_argument("point dimension does not match subproblem");
}

} // namespace detail

/// Objective F at x. Returns +infinity when some cascade's infection has
/// probability zero under x (all relevant weights at zero).
inline double objective(const NodeSubproblem& sp, const TransformedPoint& x, double rho) {
  detail::check_dims(sp, x);
  const std::size_t d = sp.dim();
  std::vector<double> a(d);
  for (std::size_t j = 0; j < d; ++j) a[j] = a_from_bhat(x.b_hat[j]);

  // Extended-precision accumulation: the solver's line search must resolve
  // objective differences far below the rounding noise of a plain double
  // sum over thousands of terms.
  long double f = 0.0;
  for (const auto& row : sp.positives) {
    long double log_prod = 0.0;
    for (const auto& [j, w] : row) log_prod += std::log1p(-w * a[j]);
    long double p_infection = -std::expm1(log_prod); // 1 - prod
    if (p_infection <= 0.0) return std::numeric_limits<double>::infinity();
    f -= std::log(p_infection);
  }
  for (std::size_t j = 0; j < d; ++j) {
    f -= static_cast<long double>(sp.negative_counts[j]) * x.b_hat[j];
    if (rho != 0.0) f += static_cast<long double>(rho) * std::exp(-x.b_hat[j]);
  }
  return static_cast<double>(f);
}

/// Objective and exact gradient in one pass. The positive term of cascade c
/// contributes (P/(1-P)) * u_j to dF/db_j, with u_j = w_j e^{b_j} / f_j and
/// f_j = 1 - w_j + w_j e^{b_j}; negative evidence contributes -n_j; the
/// penalty -rho e^{-b_j}. When `diag` is non-null it receives the exact
/// diagonal of the Hessian, which the solver uses to scale its steps:
/// per cascade  u_j^2 P/(1-P)^2 + (P/(1-P)) u_j (1-u_j),  plus rho e^{-b_j}.
inline double objective_and_gradient(const NodeSubproblem& sp, const TransformedPoint& x,
                                     double rho, std::vector<double>& grad,
                                     std::vector<double>* diag = nullptr) {
  detail::check_dims(sp, x);
  const std::size_t d = sp.dim();
  grad.assign(d, 0.0);
  if (diag != nullptr) diag->assign(d, 0.0);
  std::vector<double> a(d), e(d);
  for (std::size_t j = 0; j < d; ++j) {
    a[j] = a_from_bhat(x.b_hat[j]);
    e[j] = std::exp(x.b_hat[j]);
  }

  long double f = 0.0;
  bool infinite = false;
  for (const auto& row : sp.positives) {
    long double log_prod = 0.0;
    for (const auto& [j, w] : row) log_prod += std::log1p(-w * a[j]);
    long double p_infection = -std::expm1(log_prod);
    if (p_infection <= 0.0) {
      infinite = true; // gradient of an infinite term is not useful
      continue;
    }
    f -= std::log(p_infection);
    double coeff = static_cast<double>(std::exp(log_prod) / p_infection); // P/(1-P)
    for (const auto& [j, w] : row) {
      double u = w * e[j] / (1.0 - w * a[j]);
      grad[j] += coeff * u;
      if (diag != nullptr)
        (*diag)[j] += coeff * u * (coeff * u + 1.0 - u);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    f -= static_cast<long double>(sp.negative_counts[j]) * x.b_hat[j];
    grad[j] -= static_cast<double>(sp.negative_counts[j]);
    if (rho != 0.0) {
      double pen = rho * std::exp(-x.b_hat[j]);
      f += pen;
      grad[j] -= pen;
      if (diag != nullptr) (*diag)[j] += pen;
    }
  }
  if (infinite) return std::numeric_limits<double>::infinity();
  return static_cast<double>(f);
}

inline std::vector<double> gradient(const NodeSubproblem& sp, const TransformedPoint& x,
                                    double rho) {
  std::vector<double> g;
  objective_and_gradient(sp, x, rho, g);
  return g;
}

/// Log-likelihood of the observed cascades under a fixed network, in the
/// original variables, summed over all nodes. No penalty. Returns -infinity
/// when some observed infection has probability zero under the network.
/// Delay densities are clamped exactly as in the subproblem objective, so
/// objective(sp, transform(A), rho=0) equals the negated per-node terms.
inline double log_likelihood(const Network& a_hat, const CascadeSet& cs,
                             const TransmissionModel& model) {
  if (a_hat.nodes() != cs.n)
    throw std::invalid_argument("log_likelihood: node counts differ");

  double ll = 0.0;
  std::vector<char> in_cascade(static_cast<std::size_t>(cs.n), 0);
  for (const Cascade& c : cs.cascades) {
    for (const InfectionRecord& r : c.records) in_cascade[r.node] = 1;

    // Infected nodes: probability that at least one earlier-infected node
    // transmitted at the observed delay.
    for (std::size_t k = 0; k < c.records.size(); ++k) {
      const InfectionRecord& ri = c.records[k];
      bool has_predecessor = false;
      double log_prod = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const InfectionRecord& rj = c.records[p];
        if (rj.time >= ri.time) break;
        has_predecessor = true;
        double w = clamp_density(density(model, ri.time - rj.time));
        log_prod += std::log1p(-w * a_hat.weight(rj.node, ri.node));
      }
      if (!has_predecessor) continue; // exogenous seed, no likelihood term
      double p_infection = -std::expm1(log_prod);
      if (p_infection <= 0.0) {
        for (const InfectionRecord& r : c.records) in_cascade[r.node] = 0;
        return -std::numeric_limits<double>::infinity();
      }
      ll += std::log(p_infection);
    }
    // Never-infected nodes: every infected node failed to transmit to them.
    // Only stored edges contribute (absent pairs have weight 0, log 1 = 0).
    for (const InfectionRecord& rj : c.records) {
      for (const Edge& e : a_hat.out_edges(rj.node)) {
        if (in_cascade[e.dst]) continue;
        if (e.weight >= 1.0) {
          for (const InfectionRecord& r : c.records) in_cascade[r.node] = 0;
          return -std::numeric_limits<double>::infinity();
        }
        ll += std::log1p(-e.weight);
      }
    }
    for (const InfectionRecord& r : c.records) in_cascade[r.node] = 0;
  }
  return ll;
}

} // namespace connie
