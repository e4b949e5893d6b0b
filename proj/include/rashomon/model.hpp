#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rashomon {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

// Tolerance on |sum of a distribution - 1|.
inline constexpr double kDistributionTolerance = 1e-9;

struct FeatureBounds {
  int min = 0;
  int max = 0;
  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

// Ordered, named integer features with inclusive bounds. Names are unique and
// nonempty and min <= max for every feature; the constructor enforces both.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<std::string> names, std::vector<FeatureBounds> bounds);

  std::size_t arity() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<FeatureBounds>& bounds() const { return bounds_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // True when `values` has the schema's arity and every value is in bounds.
  bool conforms(std::span<const int> values) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<FeatureBounds> bounds_;
};

// A state is the plain vector of its feature values.
using StateVector = std::vector<int>;

struct StateVectorHash {
  std::size_t operator()(const StateVector& v) const noexcept;
};

// Dense bijection between indices 0..n-1 and feature vectors.
class StateTable {
 public:
  explicit StateTable(std::size_t arity = 0) : arity_(arity) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return arity_ == 0 ? 0 : values_.size() / arity_; }

  // Returns the index of `state`, adding it if new. `second` is true on insert.
  std::pair<StateIndex, bool> insert(std::span<const int> state);
  std::optional<StateIndex> find(std::span<const int> state) const;

  std::span<const int> operator[](StateIndex i) const {
    return {values_.data() + i * arity_, arity_};
  }

  friend bool operator==(const StateTable& a, const StateTable& b) {
    return a.arity_ == b.arity_ && a.values_ == b.values_;
  }

 private:
  std::size_t arity_;
  std::vector<int> values_;
  std::unordered_map<StateVector, StateIndex, StateVectorHash> index_;
};

struct Transition {
  StateIndex target = 0;
  double probability = 0.0;
  friend bool operator==(const Transition&, const Transition&) = default;
};

using RewardMap = std::map<std::pair<StateIndex, ActionIndex>, double>;

// Sparse explicit MDP. Rows are (state, action) pairs stored in CSR layout; an
// empty row means the action is unavailable in that state. State 0 is the
// initial state. Immutable once built.
class ExplicitMdp {
 public:
  ExplicitMdp() = default;
  ExplicitMdp(FeatureSchema schema, std::vector<std::string> actions, StateTable states,
              std::vector<std::size_t> row_offsets, std::vector<Transition> entries,
              RewardMap rewards = {});

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<std::string>& actions() const { return actions_; }
  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_transitions() const { return entries_.size(); }
  StateIndex initial_state() const { return 0; }

  const StateTable& states() const { return states_; }
  std::span<const int> state(StateIndex s) const { return states_[s]; }

  std::span<const Transition> distribution(StateIndex s, ActionIndex a) const {
    const std::size_t row = s * actions_.size() + a;
    return {entries_.data() + row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]};
  }
  bool available(StateIndex s, ActionIndex a) const { return !distribution(s, a).empty(); }

  // Carried for completeness; nothing in the toolkit consumes rewards.
  const RewardMap& rewards() const { return rewards_; }

  friend bool operator==(const ExplicitMdp&, const ExplicitMdp&) = default;

 private:
  FeatureSchema schema_;
  std::vector<std::string> actions_;
  StateTable states_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Transition> entries_;
  RewardMap rewards_;
};

class MdpBuilder {
 public:
  MdpBuilder(FeatureSchema schema, std::vector<std::string> actions);

  std::pair<StateIndex, bool> add_state(std::span<const int> state) { return states_.insert(state); }
  std::optional<StateIndex> find_state(std::span<const int> state) const { return states_.find(state); }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  std::span<const int> state(StateIndex s) const { return states_[s]; }

  // Replaces the distribution of (s, a). Throws std::out_of_range on a bad
  // action index; successor indices are checked by validate_mdp.
  void set_distribution(StateIndex s, ActionIndex a, std::vector<Transition> dist);
  void set_reward(StateIndex s, ActionIndex a, double reward) { rewards_[{s, a}] = reward; }

  ExplicitMdp build() &&;

 private:
  FeatureSchema schema_;
  std::vector<std::string> actions_;
  StateTable states_;
  std::vector<std::vector<Transition>> rows_;
  RewardMap rewards_;
};

// Sparse explicit DTMC with one distribution per state. Absorbing states
// carry an explicit probability-1 self-loop.
class ExplicitDtmc {
 public:
  ExplicitDtmc() = default;
  ExplicitDtmc(FeatureSchema schema, StateTable states, StateIndex initial,
               std::vector<std::size_t> row_offsets, std::vector<Transition> entries);

  const FeatureSchema& schema() const { return schema_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_transitions() const { return entries_.size(); }
  StateIndex initial_state() const { return initial_; }
  const StateTable& states() const { return states_; }
  std::span<const int> state(StateIndex s) const { return states_[s]; }

  std::span<const Transition> successors(StateIndex s) const {
    return {entries_.data() + row_offsets_[s], row_offsets_[s + 1] - row_offsets_[s]};
  }

  friend bool operator==(const ExplicitDtmc&, const ExplicitDtmc&) = default;

 private:
  FeatureSchema schema_;
  StateTable states_;
  StateIndex initial_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Transition> entries_;
};

class DtmcBuilder {
 public:
  explicit DtmcBuilder(FeatureSchema schema);

  std::pair<StateIndex, bool> add_state(std::span<const int> state);
  std::optional<StateIndex> find_state(std::span<const int> state) const { return states_.find(state); }
  std::size_t num_states() const { return states_.size(); }
  std::span<const int> state(StateIndex s) const { return states_[s]; }
  void set_successors(StateIndex s, std::vector<Transition> dist);
  void set_initial(StateIndex s) { initial_ = s; }

  ExplicitDtmc build() &&;

 private:
  FeatureSchema schema_;
  StateTable states_;
  StateIndex initial_ = 0;
  std::vector<std::vector<Transition>> rows_;
};

struct Violation {
  enum class Kind {
    empty_model,
    state_out_of_schema,
    missing_action,
    probability_out_of_range,
    distribution_sum,
    invalid_successor,
    invalid_initial_state,
  };
  Kind kind;
  std::optional<StateIndex> state;
  std::optional<ActionIndex> action;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

struct ValidationOptions {
  // Induced MDPs of permissive policies legitimately restrict actions.
  bool require_all_actions = true;
};

ValidationReport validate_mdp(const ExplicitMdp& m, ValidationOptions options = {});
ValidationReport validate_dtmc(const ExplicitDtmc& d);

}  // namespace rashomon
