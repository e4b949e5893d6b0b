#pragma once

// Independent reference computations used as test oracles. None of them
// shares code with the solvers under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rashomon/model.hpp"
#include "rashomon/random.hpp"

namespace oracle {

// Dense row-major square matrix.
struct Dense {
  std::size_t n = 0;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(Dense A, std::vector<double> b) {
  const std::size_t n = A.n;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
    }
    for (std::size_t c = 0; c < n; ++c) std::swap(A(col, c), A(pivot, c));
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A(r, col) / A(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A(r, c) -= f * A(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= A(i, c) * x[c];
    x[i] = s / A(i, i);
  }
  return x;
}

// Dense transition matrix P[s][t] of a chain.
using Matrix = std::vector<std::vector<double>>;

// Reachability probabilities of `target` in the chain P: forward closure to
// find the states that can reach the target, then one dense linear solve.
inline std::vector<double> chain_reachability(const Matrix& P, const std::vector<bool>& target) {
  const std::size_t n = P.size();
  std::vector<bool> can_reach = target;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (can_reach[s]) continue;
      for (std::size_t t = 0; t < n; ++t) {
        if (P[s][t] > 0.0 && can_reach[t]) {
          can_reach[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<std::size_t> unknown;
  std::vector<std::size_t> position(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    if (can_reach[s] && !target[s]) {
      position[s] = unknown.size();
      unknown.push_back(s);
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (target[s]) x[s] = 1.0;
  }
  if (unknown.empty()) return x;
  Dense A{unknown.size(), std::vector<double>(unknown.size() * unknown.size(), 0.0)};
  std::vector<double> b(unknown.size(), 0.0);
  for (std::size_t i = 0; i < unknown.size(); ++i) {
    const std::size_t s = unknown[i];
    A(i, i) += 1.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (P[s][t] == 0.0) continue;
      if (target[t]) {
        b[i] += P[s][t];
      } else if (position[t] != n) {
        A(i, position[t]) -= P[s][t];
      }
    }
  }
  const auto y = solve_dense(A, b);
  for (std::size_t i = 0; i < unknown.size(); ++i) x[unknown[i]] = y[i];
  return x;
}

// Random MDP over explicit states 0..n-1 (single feature "s" = index, with
// index 0 initial) where every action of every state has 1-3 successors.
inline rashomon::ExplicitMdp random_mdp(rashomon::Xoshiro256& rng, std::size_t n, std::size_t k) {
  using namespace rashomon;
  std::vector<std::string> actions;
  for (std::size_t a = 0; a < k; ++a) actions.push_back("a" + std::to_string(a));
  MdpBuilder b(FeatureSchema({"s"}, {{0, static_cast<int>(n) - 1}}), actions);
  for (std::size_t s = 0; s < n; ++s) b.add_state(std::vector<int>{static_cast<int>(s)});
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t fanout = 1 + rng.below(3);
      std::vector<double> weights;
      std::vector<StateIndex> targets;
      for (std::size_t j = 0; j < fanout; ++j) {
        const StateIndex t = rng.below(n);
        if (std::find(targets.begin(), targets.end(), t) != targets.end()) continue;
        targets.push_back(t);
        weights.push_back(0.1 + rng.uniform());
      }
      double total = 0.0;
      for (double w : weights) total += w;
      std::vector<Transition> dist;
      for (std::size_t j = 0; j < targets.size(); ++j) dist.push_back({targets[j], weights[j] / total});
      b.set_distribution(s, a, std::move(dist));
    }
  }
  return std::move(b).build();
}

// Dense matrix of the chain a memoryless policy induces on an MDP.
inline Matrix induced_matrix(const rashomon::ExplicitMdp& m, const std::vector<std::size_t>& choice) {
  Matrix P(m.num_states(), std::vector<double>(m.num_states(), 0.0));
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (const auto& t : m.distribution(s, choice[s])) P[s][t.target] += t.probability;
  }
  return P;
}

// Per-state maximum and minimum reachability over all |Act|^|S| memoryless
// deterministic policies.
struct Extremes {
  std::vector<double> max;
  std::vector<double> min;
};

inline Extremes enumerate_policies(const rashomon::ExplicitMdp& m, const std::vector<bool>& target) {
  const std::size_t n = m.num_states();
  const std::size_t k = m.num_actions();
  Extremes out{std::vector<double>(n, -1.0), std::vector<double>(n, 2.0)};
  std::vector<std::size_t> choice(n, 0);
  while (true) {
    const auto x = chain_reachability(induced_matrix(m, choice), target);
    for (std::size_t s = 0; s < n; ++s) {
      out.max[s] = std::max(out.max[s], x[s]);
      out.min[s] = std::min(out.min[s], x[s]);
    }
    std::size_t i = 0;
    while (i < n && ++choice[i] == k) choice[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// Central finite difference of f around x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t i, double h = 1e-5) {
  const double orig = x[i];
  x[i] = orig + h;
  const double plus = f(x);
  x[i] = orig - h;
  const double minus = f(x);
  return (plus - minus) / (2.0 * h);
}

// ||a - b||_inf / max(||a||_inf, ||b||_inf), 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

}  // namespace oracle
