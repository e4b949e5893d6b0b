#include "rashomon/checker.hpp"

#include <algorithm>
#include <cmath>

#include "rashomon/error.hpp"

namespace rashomon {

namespace {

// Slack used to decide which actions count as optimal after value iteration.
double optimality_slack(const SolverOptions& options) { return std::max(1e-9, 10.0 * options.tolerance); }

// Predecessor lists in CSR form.
struct ReverseGraph {
  std::vector<std::size_t> offsets;
  std::vector<StateIndex> sources;

  std::span<const StateIndex> predecessors(StateIndex s) const {
    return {sources.data() + offsets[s], offsets[s + 1] - offsets[s]};
  }
};

template <typename ForEachEdge>
ReverseGraph reverse_graph(std::size_t n, ForEachEdge for_each_edge) {
  ReverseGraph g;
  g.offsets.assign(n + 1, 0);
  for_each_edge([&](StateIndex, StateIndex dst) { ++g.offsets[dst + 1]; });
  for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
  g.sources.resize(g.offsets[n]);
  std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for_each_edge([&](StateIndex src, StateIndex dst) { g.sources[fill[dst]++] = src; });
  return g;
}

ReverseGraph reverse_graph(const ExplicitDtmc& d) {
  return reverse_graph(d.num_states(), [&](auto&& edge) {
    for (StateIndex s = 0; s < d.num_states(); ++s) {
      for (const Transition& t : d.successors(s)) edge(s, t.target);
    }
  });
}

ReverseGraph reverse_graph(const ExplicitMdp& m) {
  return reverse_graph(m.num_states(), [&](auto&& edge) {
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      for (ActionIndex a = 0; a < m.num_actions(); ++a) {
        for (const Transition& t : m.distribution(s, a)) edge(s, t.target);
      }
    }
  });
}

// States with some path into `target`.
StateMask backward_reachable(const ReverseGraph& g, std::span<const std::uint8_t> target) {
  const std::size_t n = target.size();
  StateMask seen(n, 0);
  std::vector<StateIndex> stack;
  for (StateIndex s = 0; s < n; ++s) {
    if (target[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const StateIndex s = stack.back();
    stack.pop_back();
    for (StateIndex p : g.predecessors(s)) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

double expected(std::span<const Transition> dist, const std::vector<double>& x) {
  double acc = 0.0;
  for (const Transition& t : dist) acc += t.probability * x[t.target];
  return acc;
}

void check_target_size(std::size_t states, std::size_t mask) {
  if (states != mask) throw SemanticError("target mask size does not match the model");
}

enum class Objective { maximize, minimize };

ReachabilityResult solve_mdp_values(const ExplicitMdp& m, std::span<const std::uint8_t> target,
                                    const StateMask& fixed_zero, Objective objective, const SolverOptions& options) {
  const std::size_t n = m.num_states();
  ReachabilityResult r;
  r.values.assign(n, 0.0);
  std::vector<StateIndex> unknown;
  for (StateIndex s = 0; s < n; ++s) {
    if (target[s]) {
      r.values[s] = 1.0;
    } else if (!fixed_zero[s]) {
      unknown.push_back(s);
    }
  }
  auto bellman = [&](StateIndex s) {
    bool first = true;
    double best = 0.0;
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      const auto dist = m.distribution(s, a);
      if (dist.empty()) continue;
      const double q = expected(dist, r.values);
      if (first || (objective == Objective::maximize ? q > best : q < best)) best = q;
      first = false;
    }
    return best;
  };
  double diff = 0.0;
  while (!unknown.empty()) {
    if (r.iterations >= options.max_sweeps) {
      throw ConvergenceError("value iteration hit the cap of " + std::to_string(options.max_sweeps) + " sweeps", diff);
    }
    diff = 0.0;
    for (StateIndex s : unknown) {
      const double next = bellman(s);
      diff = std::max(diff, std::abs(next - r.values[s]));
      r.values[s] = next;
    }
    ++r.iterations;
    if (diff < options.tolerance) break;
  }
  for (StateIndex s : unknown) {
    r.values[s] = std::clamp(r.values[s], 0.0, 1.0);
    r.residual = std::max(r.residual, std::abs(r.values[s] - bellman(s)));
  }
  r.initial_value = n == 0 ? 0.0 : r.values[m.initial_state()];
  return r;
}

ActionIndex lowest_available(const ExplicitMdp& m, StateIndex s) {
  for (ActionIndex a = 0; a < m.num_actions(); ++a) {
    if (m.available(s, a)) return a;
  }
  return 0;
}

}  // namespace

StateMask target_states(const ExplicitMdp& m, const Predicate& target) {
  BoundPredicate bound(target, m.schema());
  StateMask mask(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) mask[s] = bound(m.state(s)) ? 1 : 0;
  return mask;
}

StateMask target_states(const ExplicitDtmc& d, const Predicate& target) {
  BoundPredicate bound(target, d.schema());
  StateMask mask(d.num_states());
  for (StateIndex s = 0; s < d.num_states(); ++s) mask[s] = bound(d.state(s)) ? 1 : 0;
  return mask;
}

ReachabilityResult reach_prob_dtmc(const ExplicitDtmc& d, const Predicate& target, SolverOptions options) {
  const StateMask mask = target_states(d, target);
  return reach_prob_dtmc(d, mask, options);
}

ReachabilityResult reach_prob_dtmc(const ExplicitDtmc& d, std::span<const std::uint8_t> target,
                                   SolverOptions options) {
  const std::size_t n = d.num_states();
  check_target_size(n, target.size());
  const StateMask can_reach = backward_reachable(reverse_graph(d), target);

  ReachabilityResult r;
  r.values.assign(n, 0.0);
  std::vector<StateIndex> unknown;
  for (StateIndex s = 0; s < n; ++s) {
    if (target[s]) {
      r.values[s] = 1.0;
    } else if (can_reach[s]) {
      unknown.push_back(s);
    }
  }

  // x_s = (sum_{t != s} P(s,t) x_t) / (1 - P(s,s)); P(s,s) < 1 because s can
  // reach the target.
  auto update = [&](StateIndex s) {
    double self = 0.0;
    double acc = 0.0;
    for (const Transition& t : d.successors(s)) {
      if (t.target == s) {
        self += t.probability;
      } else {
        acc += t.probability * r.values[t.target];
      }
    }
    return acc / (1.0 - self);
  };

  double diff = 0.0;
  while (!unknown.empty()) {
    if (r.iterations >= options.max_sweeps) {
      throw ConvergenceError("Gauss-Seidel hit the cap of " + std::to_string(options.max_sweeps) + " sweeps", diff);
    }
    diff = 0.0;
    for (StateIndex s : unknown) {
      const double next = update(s);
      diff = std::max(diff, std::abs(next - r.values[s]));
      r.values[s] = next;
    }
    ++r.iterations;
    if (diff < options.tolerance) break;
  }
  for (StateIndex s : unknown) {
    r.values[s] = std::clamp(r.values[s], 0.0, 1.0);
    r.residual = std::max(r.residual, std::abs(r.values[s] - expected(d.successors(s), r.values)));
  }
  r.initial_value = n == 0 ? 0.0 : r.values[d.initial_state()];
  return r;
}

MdpSolution max_reach_mdp(const ExplicitMdp& m, const Predicate& target, SolverOptions options) {
  const StateMask mask = target_states(m, target);
  return max_reach_mdp(m, mask, options);
}

MdpSolution max_reach_mdp(const ExplicitMdp& m, std::span<const std::uint8_t> target, SolverOptions options) {
  const std::size_t n = m.num_states();
  check_target_size(n, target.size());
  const ReverseGraph reverse = reverse_graph(m);
  StateMask zero = backward_reachable(reverse, target);
  for (auto& z : zero) z = !z;

  MdpSolution sol;
  sol.result = solve_mdp_values(m, target, zero, Objective::maximize, options);
  const auto& x = sol.result.values;
  const double slack = optimality_slack(options);
  auto optimal = [&](StateIndex s, ActionIndex a) {
    const auto dist = m.distribution(s, a);
    return !dist.empty() && expected(dist, x) >= x[s] - slack;
  };

  // Attractor construction over optimal actions: layer 0 is the target;
  // a state joins layer k+1 through its lowest optimal action that has a
  // successor in layers 0..k.
  constexpr ActionIndex kUnset = static_cast<ActionIndex>(-1);
  sol.policy.actions.assign(n, kUnset);
  StateMask attracted(n, 0);
  std::vector<StateIndex> layer;
  for (StateIndex s = 0; s < n; ++s) {
    if (target[s]) {
      attracted[s] = 1;
      sol.policy.actions[s] = lowest_available(m, s);
      layer.push_back(s);
    }
  }
  std::vector<StateIndex> candidates;
  StateMask queued(n, 0);
  while (!layer.empty()) {
    candidates.clear();
    for (StateIndex t : layer) {
      for (StateIndex p : reverse.predecessors(t)) {
        if (!attracted[p] && !queued[p] && !zero[p] && x[p] > 0.0) {
          queued[p] = 1;
          candidates.push_back(p);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<StateIndex> next_layer;
    for (StateIndex s : candidates) {
      queued[s] = 0;
      for (ActionIndex a = 0; a < m.num_actions(); ++a) {
        if (!optimal(s, a)) continue;
        const auto dist = m.distribution(s, a);
        const bool progress =
            std::any_of(dist.begin(), dist.end(), [&](const Transition& t) { return attracted[t.target] != 0; });
        if (progress) {
          sol.policy.actions[s] = a;
          next_layer.push_back(s);
          break;
        }
      }
    }
    for (StateIndex s : next_layer) attracted[s] = 1;
    layer = std::move(next_layer);
  }

  // Remaining states (value 0): plain argmax with lowest-index ties.
  for (StateIndex s = 0; s < n; ++s) {
    if (sol.policy.actions[s] != kUnset) continue;
    ActionIndex best = lowest_available(m, s);
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      if (optimal(s, a)) {
        best = a;
        break;
      }
    }
    sol.policy.actions[s] = best;
  }
  return sol;
}

MdpSolution min_reach_mdp(const ExplicitMdp& m, const Predicate& target, SolverOptions options) {
  const StateMask mask = target_states(m, target);
  return min_reach_mdp(m, mask, options);
}

MdpSolution min_reach_mdp(const ExplicitMdp& m, std::span<const std::uint8_t> target, SolverOptions options) {
  const std::size_t n = m.num_states();
  check_target_size(n, target.size());

  // forced[s]: every policy reaches the target from s with positive
  // probability. Its complement is fixed at 0.
  StateMask forced(target.begin(), target.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (StateIndex s = 0; s < n; ++s) {
      if (forced[s]) continue;
      bool all = true;
      bool any_action = false;
      for (ActionIndex a = 0; a < m.num_actions() && all; ++a) {
        const auto dist = m.distribution(s, a);
        if (dist.empty()) continue;
        any_action = true;
        all = std::any_of(dist.begin(), dist.end(), [&](const Transition& t) { return forced[t.target] != 0; });
      }
      if (any_action && all) {
        forced[s] = 1;
        changed = true;
      }
    }
  }
  StateMask zero(n);
  for (StateIndex s = 0; s < n; ++s) zero[s] = !forced[s];

  MdpSolution sol;
  sol.result = solve_mdp_values(m, target, zero, Objective::minimize, options);
  const auto& x = sol.result.values;
  const double slack = optimality_slack(options);
  sol.policy.actions.assign(n, 0);
  for (StateIndex s = 0; s < n; ++s) {
    ActionIndex choice = lowest_available(m, s);
    if (zero[s]) {
      // Stay inside the zero region.
      for (ActionIndex a = 0; a < m.num_actions(); ++a) {
        const auto dist = m.distribution(s, a);
        if (!dist.empty() &&
            std::all_of(dist.begin(), dist.end(), [&](const Transition& t) { return zero[t.target] != 0; })) {
          choice = a;
          break;
        }
      }
    } else if (!target[s]) {
      for (ActionIndex a = 0; a < m.num_actions(); ++a) {
        const auto dist = m.distribution(s, a);
        if (!dist.empty() && expected(dist, x) <= x[s] + slack) {
          choice = a;
          break;
        }
      }
    }
    sol.policy.actions[s] = choice;
  }
  return sol;
}

Verdict check_threshold(const PropertyQuery& q, double value) {
  if (q.mode != PropertyQuery::Mode::threshold) {
    throw SemanticError("check_threshold needs a threshold property, got a P=? query");
  }
  const double rounded = std::round(value * 1e12) / 1e12;
  return compare(q.bound, rounded, q.probability) ? Verdict::satisfied : Verdict::violated;
}

}  // namespace rashomon
