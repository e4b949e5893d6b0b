#include "rashomon/shift.hpp"

#include <numeric>
#include <string>

#include "rashomon/error.hpp"

namespace rashomon {

ShiftReport shift_eval(const taxi::TaxiParams& base, int min_jobs, int max_jobs, std::span<const PolicyId> ids,
                       std::span<const MlpPolicy> members, const ShiftOptions& options) {
  if (min_jobs < 1 || max_jobs < min_jobs) {
    throw ConfigError("shift: job range " + std::to_string(min_jobs) + ".." + std::to_string(max_jobs) +
                      " is empty or invalid");
  }
  if (members.empty()) throw SemanticError("shift: no member policies");
  if (ids.size() != members.size()) throw SemanticError("shift: one id per member policy is required");

  ShiftReport report;
  report.member_ids.assign(ids.begin(), ids.end());
  for (int jobs = min_jobs; jobs <= max_jobs; ++jobs) {
    taxi::TaxiParams params = base;
    params.num_jobs = jobs;
    params.state_cap = options.induced.state_cap;
    const ExplicitMdp m = taxi::build_taxi(params);
    const Predicate target = parse_property(taxi::completion_property(jobs)).target;

    std::vector<PolicyView> views;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < members.size(); ++i) {
      views.push_back(mlp_view(members[i], m.schema()));
      names.push_back(std::to_string(ids[i]));
    }

    ShiftColumn col;
    col.num_jobs = jobs;
    col.full_states = m.num_states();
    col.full_transitions = m.num_transitions();

    const auto chains = build_induced_all(m, views, target, options.induced, options.workers);
    for (const auto& chain : chains) {
      col.members.push_back(reach_prob_dtmc(chain.chain, target, options.solver).initial_value);
      if (!dtmc_equivalent(chain, chains.front())) col.members_diverge = true;
    }
    col.member_mean = std::accumulate(col.members.begin(), col.members.end(), 0.0) /
                      static_cast<double>(col.members.size());

    const auto ensemble = build_induced_dtmc(m, majority_ensemble(views), target, options.induced);
    col.ensemble = reach_prob_dtmc(ensemble.chain, target, options.solver).initial_value;

    const auto induced = build_induced_mdp(m, PermissivePolicy(names, views), target, options.induced);
    col.permissive_states = induced.mdp.num_states();
    col.permissive_transitions = induced.mdp.num_transitions();
    col.permissive_max = max_reach_mdp(induced.mdp, target, options.solver).result.initial_value;
    col.permissive_min = min_reach_mdp(induced.mdp, target, options.solver).result.initial_value;

    col.optimal = max_reach_mdp(m, target, options.solver).result.initial_value;
    report.columns.push_back(std::move(col));
  }
  return report;
}

}  // namespace rashomon
