#include "rashomon/rashomon_set.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "rashomon/error.hpp"
#include "rashomon/parallel.hpp"

namespace rashomon {

std::vector<InducedDtmc> build_induced_all(const ExplicitMdp& m, std::span<const PolicyView> policies,
                                           const Predicate& target, InducedOptions options, std::size_t workers) {
  std::vector<InducedDtmc> chains(policies.size());
  parallel_for(policies.size(), workers,
               [&](std::size_t i) { chains[i] = build_induced_dtmc(m, policies[i], target, options); });
  return chains;
}

EquivalenceClasses partition_classes(std::vector<InducedDtmc> chains, const Predicate& target,
                                     SolverOptions solver) {
  EquivalenceClasses out;
  out.class_of.resize(chains.size());
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_multimap<std::uint64_t, std::size_t> by_hash;  // hash -> group
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const std::uint64_t h = canonical_hash(chains[i].chain);
    std::size_t group = groups.size();
    const auto [lo, hi] = by_hash.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (dtmc_equivalent(chains[groups[it->second].front()], chains[i])) {
        group = it->second;
        break;
      }
    }
    if (group == groups.size()) {
      groups.emplace_back();
      by_hash.emplace(h, group);
    }
    groups[group].push_back(i);
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return groups[a].size() > groups[b].size(); });
  for (std::size_t g : order) {
    EquivalenceClass cls;
    cls.members = std::move(groups[g]);
    cls.representative = std::move(chains[cls.members.front()]);
    cls.value = reach_prob_dtmc(cls.representative.chain, target, solver).initial_value;
    for (std::size_t member : cls.members) out.class_of[member] = out.classes.size();
    out.classes.push_back(std::move(cls));
  }
  return out;
}

EquivalenceClasses partition_classes(const ExplicitMdp& m, std::span<const PolicyView> policies,
                                     const Predicate& target, InducedOptions options, std::size_t workers) {
  return partition_classes(build_induced_all(m, policies, target, options, workers), target);
}

std::vector<PolicyId> build_rashomon_set(std::span<const PolicyId> members, std::span<const FeatureRanking> rankings) {
  if (members.empty()) throw SemanticError("cannot build a Rashomon set from an empty class");
  if (members.size() != rankings.size()) throw SemanticError("one ranking per class member is required");
  std::vector<PolicyId> out;
  for (const auto& group : group_by_ranking(rankings)) {
    PolicyId best = members[group.front()];
    for (std::size_t i : group) best = std::min(best, members[i]);
    out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rashomon
