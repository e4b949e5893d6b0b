#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rashomon/checker.hpp"
#include "rashomon/mlp.hpp"
#include "rashomon/model.hpp"
#include "rashomon/property.hpp"

namespace rashomon {

// A memoryless deterministic policy as seen by the model builders: it receives
// the MDP state index and its feature vector and returns an action index.
using PolicyView = std::function<ActionIndex(StateIndex, std::span<const int>)>;

// The table must cover the MDP the view is used with.
PolicyView table_view(const TablePolicy& policy);
// Throws SemanticError when the network input width differs from `schema`.
PolicyView mlp_view(const MlpPolicy& policy, const FeatureSchema& schema);
// Most-voted member action per state, lowest action index on ties. Votes are
// taken on demand; nothing is tabulated.
PolicyView majority_ensemble(std::vector<PolicyView> members);

struct InducedOptions {
  std::size_t state_cap = 2'000'000;
};

struct InducedProvenance {
  std::string policy_id;
  std::string property;
  std::uint64_t mdp_fingerprint = 0;
};

struct InducedDtmc {
  ExplicitDtmc chain;
  std::vector<StateIndex> source_states;  // MDP index of each chain state
  InducedProvenance provenance;
};

// True when every available action of s leads back to s with probability 1.
bool is_absorbing(const ExplicitMdp& m, StateIndex s);

// Depth-first expansion from the MDP's initial state, following the policy's
// action and copying Tr(s, a, .) verbatim. States satisfying `target`, and
// states absorbing under every action, get a self-loop and are not expanded.
// Throws ResourceError past the state cap and SemanticError when the policy
// picks an action unavailable in the MDP.
InducedDtmc build_induced_dtmc(const ExplicitMdp& m, const PolicyView& policy, const Predicate& target,
                               InducedOptions options = {}, InducedProvenance provenance = {});

// Order-independent hash of a chain keyed by feature vectors; equivalent
// chains hash equal.
std::uint64_t canonical_hash(const ExplicitDtmc& d);

// Same reachable feature vectors, same initial state, and bit-identical
// successor distributions keyed by successor feature vectors. Throws
// SemanticError when the schemas' feature names differ.
bool dtmc_equivalent(const ExplicitDtmc& a, const ExplicitDtmc& b);
inline bool dtmc_equivalent(const InducedDtmc& a, const InducedDtmc& b) { return dtmc_equivalent(a.chain, b.chain); }

// Union of the members' selections at each state.
class PermissivePolicy {
 public:
  PermissivePolicy(std::vector<std::string> member_ids, std::vector<PolicyView> members);

  const std::vector<std::string>& member_ids() const { return ids_; }
  std::size_t size() const { return members_.size(); }
  // Sorted, duplicate-free, nonempty.
  std::vector<ActionIndex> actions(StateIndex s, std::span<const int> state) const;

 private:
  std::vector<std::string> ids_;
  std::vector<PolicyView> members_;
};

struct InducedMdp {
  ExplicitMdp mdp;  // only the actions in tau(s) are available at s
  std::vector<StateIndex> source_states;
};

// Expands every action in tau(s) from the initial state. Target and absorbing
// states are cut like in build_induced_dtmc; their self-loop is attached to
// action 0.
InducedMdp build_induced_mdp(const ExplicitMdp& m, const PermissivePolicy& tau, const Predicate& target,
                             InducedOptions options = {});

}  // namespace rashomon
