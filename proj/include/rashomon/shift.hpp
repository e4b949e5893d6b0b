#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rashomon/induced.hpp"
#include "rashomon/mlp.hpp"
#include "rashomon/rashomon_set.hpp"
#include "rashomon/taxi.hpp"

namespace rashomon {

// Probabilities of completing all J jobs for one shifted job count.
struct ShiftColumn {
  int num_jobs = 0;
  std::vector<double> members;  // in member order
  double member_mean = 0.0;
  double ensemble = 0.0;
  double permissive_max = 0.0;
  double permissive_min = 0.0;
  double optimal = 0.0;
  std::size_t full_states = 0;
  std::size_t full_transitions = 0;
  std::size_t permissive_states = 0;
  std::size_t permissive_transitions = 0;
  bool members_diverge = false;  // some pair of member chains differs
};

struct ShiftReport {
  std::vector<PolicyId> member_ids;
  std::vector<ShiftColumn> columns;  // ascending job count
};

struct ShiftOptions {
  InducedOptions induced;
  SolverOptions solver;
  std::size_t workers = 0;
};

// Rebuilds the taxi model for every J in [min_jobs, max_jobs] and evaluates
// the members, their majority ensemble, their permissive union and a freshly
// synthesized optimal policy against "F jobs_done=J & done=1".
ShiftReport shift_eval(const taxi::TaxiParams& base, int min_jobs, int max_jobs, std::span<const PolicyId> ids,
                       std::span<const MlpPolicy> members, const ShiftOptions& options = {});

}  // namespace rashomon
