#include "rashomon/induced.hpp"

#include <algorithm>
#include <bit>
#include <utility>

#include "rashomon/error.hpp"

namespace rashomon {

PolicyView table_view(const TablePolicy& policy) {
  return [actions = policy.actions](StateIndex s, std::span<const int>) {
    if (s >= actions.size()) throw SemanticError("table policy has no entry for state " + std::to_string(s));
    return actions[s];
  };
}

PolicyView mlp_view(const MlpPolicy& policy, const FeatureSchema& schema) {
  if (policy.num_inputs() != schema.arity()) {
    throw SemanticError("policy expects " + std::to_string(policy.num_inputs()) + " features but the model has " +
                        std::to_string(schema.arity()));
  }
  return [&policy](StateIndex, std::span<const int> state) { return select_action(policy, state); };
}

PolicyView majority_ensemble(std::vector<PolicyView> members) {
  if (members.empty()) throw SemanticError("ensemble needs at least one member");
  return [members = std::move(members)](StateIndex s, std::span<const int> state) {
    std::vector<std::size_t> votes;
    for (const auto& member : members) {
      const ActionIndex a = member(s, state);
      if (a >= votes.size()) votes.resize(a + 1, 0);
      ++votes[a];
    }
    return static_cast<ActionIndex>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  };
}

bool is_absorbing(const ExplicitMdp& m, StateIndex s) {
  bool any = false;
  for (ActionIndex a = 0; a < m.num_actions(); ++a) {
    const auto dist = m.distribution(s, a);
    if (dist.empty()) continue;
    if (dist.size() != 1 || dist[0].target != s) return false;
    any = true;
  }
  return any;
}

namespace {

std::vector<Transition> self_loop(StateIndex s) { return {Transition{s, 1.0}}; }

void check_cap(std::size_t states, std::size_t cap) {
  if (states > cap) throw ResourceError("induced model exceeds the state cap of " + std::to_string(cap));
}

}  // namespace

InducedDtmc build_induced_dtmc(const ExplicitMdp& m, const PolicyView& policy, const Predicate& target,
                               InducedOptions options, InducedProvenance provenance) {
  if (m.num_states() == 0) throw SemanticError("cannot induce a chain from an empty model");
  const BoundPredicate is_target(target, m.schema());
  DtmcBuilder builder(m.schema());
  std::vector<StateIndex> source{m.initial_state()};
  builder.add_state(m.state(m.initial_state()));
  std::vector<StateIndex> stack{0};
  while (!stack.empty()) {
    const StateIndex s = stack.back();
    stack.pop_back();
    const StateIndex ms = source[s];
    const auto features = m.state(ms);
    if (is_target(features) || is_absorbing(m, ms)) {
      builder.set_successors(s, self_loop(s));
      continue;
    }
    const ActionIndex a = policy(ms, features);
    if (a >= m.num_actions() || !m.available(ms, a)) {
      throw SemanticError("policy selects unavailable action " + std::to_string(a) + " in state " +
                          std::to_string(ms));
    }
    std::vector<Transition> dist;
    for (const Transition& t : m.distribution(ms, a)) {
      const auto [idx, inserted] = builder.add_state(m.state(t.target));
      if (inserted) {
        check_cap(builder.num_states(), options.state_cap);
        source.push_back(t.target);
        stack.push_back(idx);
      }
      dist.push_back({idx, t.probability});
    }
    builder.set_successors(s, std::move(dist));
  }
  return {std::move(builder).build(), std::move(source), std::move(provenance)};
}

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb93e53ca8d63ULL;
  return h ^ (h >> 33);
}

std::uint64_t vector_hash(std::span<const int> v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int x : v) h = mix(h ^ static_cast<std::uint32_t>(x));
  return h;
}

void check_schemas(const ExplicitDtmc& a, const ExplicitDtmc& b) {
  if (a.schema().names() != b.schema().names()) throw SemanticError("chains have different feature schemas");
}

}  // namespace

std::uint64_t canonical_hash(const ExplicitDtmc& d) {
  std::uint64_t total = mix(d.num_states()) ^ mix(vector_hash(d.state(d.initial_state())) + 1);
  for (StateIndex s = 0; s < d.num_states(); ++s) {
    std::uint64_t row = 0;
    for (const Transition& t : d.successors(s)) {
      // Summation keeps the row hash independent of successor order.
      row += mix(vector_hash(d.state(t.target)) ^ std::bit_cast<std::uint64_t>(t.probability));
    }
    total += mix(vector_hash(d.state(s)) ^ mix(row));
  }
  return total;
}

bool dtmc_equivalent(const ExplicitDtmc& a, const ExplicitDtmc& b) {
  check_schemas(a, b);
  if (a.num_states() != b.num_states() || a.num_transitions() != b.num_transitions()) return false;
  if (b.states().find(a.state(a.initial_state())) != b.initial_state()) return false;
  std::vector<Transition> mapped;
  std::vector<Transition> other;
  const auto by_target = [](const Transition& x, const Transition& y) { return x.target < y.target; };
  for (StateIndex s = 0; s < a.num_states(); ++s) {
    const auto sb = b.states().find(a.state(s));
    if (!sb) return false;
    const auto succ_a = a.successors(s);
    const auto succ_b = b.successors(*sb);
    if (succ_a.size() != succ_b.size()) return false;
    mapped.clear();
    for (const Transition& t : succ_a) {
      const auto tb = b.states().find(a.state(t.target));
      if (!tb) return false;
      mapped.push_back({*tb, t.probability});
    }
    other.assign(succ_b.begin(), succ_b.end());
    std::sort(mapped.begin(), mapped.end(), by_target);
    std::sort(other.begin(), other.end(), by_target);
    if (mapped != other) return false;
  }
  return true;
}

PermissivePolicy::PermissivePolicy(std::vector<std::string> member_ids, std::vector<PolicyView> members)
    : ids_(std::move(member_ids)), members_(std::move(members)) {
  if (members_.empty()) throw SemanticError("permissive policy needs at least one member");
  if (ids_.size() != members_.size()) throw SemanticError("permissive policy: one id per member is required");
}

std::vector<ActionIndex> PermissivePolicy::actions(StateIndex s, std::span<const int> state) const {
  std::vector<ActionIndex> out;
  out.reserve(members_.size());
  for (const auto& member : members_) out.push_back(member(s, state));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

InducedMdp build_induced_mdp(const ExplicitMdp& m, const PermissivePolicy& tau, const Predicate& target,
                             InducedOptions options) {
  if (m.num_states() == 0) throw SemanticError("cannot induce a model from an empty MDP");
  const BoundPredicate is_target(target, m.schema());
  MdpBuilder builder(m.schema(), m.actions());
  std::vector<StateIndex> source{m.initial_state()};
  builder.add_state(m.state(m.initial_state()));
  std::vector<StateIndex> stack{0};
  while (!stack.empty()) {
    const StateIndex s = stack.back();
    stack.pop_back();
    const StateIndex ms = source[s];
    const auto features = m.state(ms);
    if (is_target(features) || is_absorbing(m, ms)) {
      builder.set_distribution(s, 0, self_loop(s));
      continue;
    }
    for (ActionIndex a : tau.actions(ms, features)) {
      if (a >= m.num_actions() || !m.available(ms, a)) {
        throw SemanticError("permissive policy allows unavailable action " + std::to_string(a) + " in state " +
                            std::to_string(ms));
      }
      std::vector<Transition> dist;
      for (const Transition& t : m.distribution(ms, a)) {
        const auto [idx, inserted] = builder.add_state(m.state(t.target));
        if (inserted) {
          check_cap(builder.num_states(), options.state_cap);
          source.push_back(t.target);
          stack.push_back(idx);
        }
        dist.push_back({idx, t.probability});
      }
      builder.set_distribution(s, a, std::move(dist));
    }
  }
  return {std::move(builder).build(), std::move(source)};
}

}  // namespace rashomon
