#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rashomon/model.hpp"
#include "rashomon/property.hpp"

namespace rashomon {

using StateMask = std::vector<std::uint8_t>;

struct SolverOptions {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 100'000;
};

struct ReachabilityResult {
  std::vector<double> values;  // per state, in [0, 1]
  double initial_value = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;  // max |x - P x| over the states actually solved for
};

// Memoryless deterministic policy, total over an MDP's states.
struct TablePolicy {
  std::vector<ActionIndex> actions;

  ActionIndex operator[](StateIndex s) const { return actions[s]; }
  std::size_t size() const { return actions.size(); }
  friend bool operator==(const TablePolicy&, const TablePolicy&) = default;
};

struct MdpSolution {
  ReachabilityResult result;
  TablePolicy policy;
};

StateMask target_states(const ExplicitMdp& m, const Predicate& target);
StateMask target_states(const ExplicitDtmc& d, const Predicate& target);

// Pr(F target) for every state of a DTMC. States without a path to the
// target are fixed at 0 by a backward search; the rest is solved by
// Gauss-Seidel sweeps in ascending state order.
ReachabilityResult reach_prob_dtmc(const ExplicitDtmc& d, const Predicate& target, SolverOptions options = {});
ReachabilityResult reach_prob_dtmc(const ExplicitDtmc& d, std::span<const std::uint8_t> target,
                                   SolverOptions options = {});

// Maximal Pr(F target) by value iteration, with a policy attaining it.
// Among optimal actions the policy prefers one that moves strictly closer to
// the target in the optimal-action graph, then the lowest action index; this
// rules out zero-progress self-loops that plain argmax would happily pick.
// Throws ConvergenceError once options.max_sweeps sweeps are exhausted.
MdpSolution max_reach_mdp(const ExplicitMdp& m, const Predicate& target, SolverOptions options = {});
MdpSolution max_reach_mdp(const ExplicitMdp& m, std::span<const std::uint8_t> target, SolverOptions options = {});

// Minimal Pr(F target); states that can avoid the target forever are fixed
// at 0 up front. Ties go to the lowest action index.
MdpSolution min_reach_mdp(const ExplicitMdp& m, const Predicate& target, SolverOptions options = {});
MdpSolution min_reach_mdp(const ExplicitMdp& m, std::span<const std::uint8_t> target, SolverOptions options = {});

enum class Verdict { satisfied, violated };

// Applies a threshold query's bound to `value` rounded to 12 decimal places.
// Throws SemanticError for query-mode input.
Verdict check_threshold(const PropertyQuery& q, double value);

}  // namespace rashomon
