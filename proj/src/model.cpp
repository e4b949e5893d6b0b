#include "rashomon/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rashomon {

FeatureSchema::FeatureSchema(std::vector<std::string> names, std::vector<FeatureBounds> bounds)
    : names_(std::move(names)), bounds_(std::move(bounds)) {
  if (names_.size() != bounds_.size()) {
    throw std::invalid_argument("schema: names and bounds differ in length");
  }
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw std::invalid_argument("schema: empty feature name");
    if (!seen.insert(names_[i]).second) {
      throw std::invalid_argument("schema: duplicate feature name '" + names_[i] + "'");
    }
    if (bounds_[i].min > bounds_[i].max) {
      throw std::invalid_argument("schema: feature '" + names_[i] + "' has min > max");
    }
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

bool FeatureSchema::conforms(std::span<const int> values) const {
  if (values.size() != arity()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < bounds_[i].min || values[i] > bounds_[i].max) return false;
  }
  return true;
}

std::size_t StateVectorHash::operator()(const StateVector& v) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (int x : v) {
    h ^= static_cast<std::uint32_t>(x);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::pair<StateIndex, bool> StateTable::insert(std::span<const int> state) {
  if (state.size() != arity_) throw std::invalid_argument("state table: arity mismatch");
  StateVector key(state.begin(), state.end());
  auto [it, inserted] = index_.try_emplace(std::move(key), size());
  if (inserted) values_.insert(values_.end(), state.begin(), state.end());
  return {it->second, inserted};
}

std::optional<StateIndex> StateTable::find(std::span<const int> state) const {
  auto it = index_.find(StateVector(state.begin(), state.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ExplicitMdp::ExplicitMdp(FeatureSchema schema, std::vector<std::string> actions, StateTable states,
                         std::vector<std::size_t> row_offsets, std::vector<Transition> entries,
                         RewardMap rewards)
    : schema_(std::move(schema)),
      actions_(std::move(actions)),
      states_(std::move(states)),
      row_offsets_(std::move(row_offsets)),
      entries_(std::move(entries)),
      rewards_(std::move(rewards)) {
  if (row_offsets_.size() != states_.size() * actions_.size() + 1) {
    throw std::invalid_argument("mdp: row offsets do not match states x actions");
  }
}

MdpBuilder::MdpBuilder(FeatureSchema schema, std::vector<std::string> actions)
    : schema_(std::move(schema)), actions_(std::move(actions)), states_(schema_.arity()) {}

void MdpBuilder::set_distribution(StateIndex s, ActionIndex a, std::vector<Transition> dist) {
  if (a >= actions_.size()) throw std::out_of_range("mdp builder: action index out of range");
  const std::size_t row = s * actions_.size() + a;
  if (rows_.size() <= row) rows_.resize((s + 1) * actions_.size());
  rows_[row] = std::move(dist);
}

ExplicitMdp MdpBuilder::build() && {
  const std::size_t num_rows = states_.size() * actions_.size();
  rows_.resize(num_rows);
  std::vector<std::size_t> offsets;
  offsets.reserve(num_rows + 1);
  offsets.push_back(0);
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  std::vector<Transition> entries;
  entries.reserve(total);
  for (auto& row : rows_) {
    entries.insert(entries.end(), row.begin(), row.end());
    offsets.push_back(entries.size());
  }
  rows_.clear();
  return ExplicitMdp(std::move(schema_), std::move(actions_), std::move(states_), std::move(offsets),
                     std::move(entries), std::move(rewards_));
}

ExplicitDtmc::ExplicitDtmc(FeatureSchema schema, StateTable states, StateIndex initial,
                           std::vector<std::size_t> row_offsets, std::vector<Transition> entries)
    : schema_(std::move(schema)),
      states_(std::move(states)),
      initial_(initial),
      row_offsets_(std::move(row_offsets)),
      entries_(std::move(entries)) {
  if (row_offsets_.size() != states_.size() + 1) {
    throw std::invalid_argument("dtmc: row offsets do not match states");
  }
}

DtmcBuilder::DtmcBuilder(FeatureSchema schema) : schema_(std::move(schema)), states_(schema_.arity()) {}

std::pair<StateIndex, bool> DtmcBuilder::add_state(std::span<const int> state) {
  auto result = states_.insert(state);
  if (result.second) rows_.emplace_back();
  return result;
}

void DtmcBuilder::set_successors(StateIndex s, std::vector<Transition> dist) {
  if (s >= rows_.size()) throw std::out_of_range("dtmc builder: state index out of range");
  rows_[s] = std::move(dist);
}

ExplicitDtmc DtmcBuilder::build() && {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(rows_.size() + 1);
  std::vector<Transition> entries;
  for (auto& row : rows_) {
    entries.insert(entries.end(), row.begin(), row.end());
    offsets.push_back(entries.size());
  }
  rows_.clear();
  return ExplicitDtmc(std::move(schema_), std::move(states_), initial_, std::move(offsets),
                      std::move(entries));
}

namespace {

std::string fmt_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Checks one distribution, appending violations for probability range,
// successor validity and the sum constraint.
void check_distribution(std::span<const Transition> dist, std::size_t num_states, StateIndex s,
                        std::optional<ActionIndex> a, const std::string& where,
                        ValidationReport& report) {
  double sum = 0.0;
  for (const Transition& t : dist) {
    if (!(t.probability > 0.0 && t.probability <= 1.0)) {
      report.push_back({Violation::Kind::probability_out_of_range, s, a,
                        where + ": probability " + fmt_number(t.probability) + " outside (0, 1]"});
    }
    if (t.target >= num_states) {
      report.push_back({Violation::Kind::invalid_successor, s, a,
                        where + ": successor index " + std::to_string(t.target) + " is not a state"});
    }
    sum += t.probability;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    report.push_back({Violation::Kind::distribution_sum, s, a,
                      where + ": probabilities sum to " + fmt_number(sum)});
  }
}

}  // namespace

ValidationReport validate_mdp(const ExplicitMdp& m, ValidationOptions options) {
  ValidationReport report;
  if (m.num_states() == 0) {
    report.push_back({Violation::Kind::empty_model, std::nullopt, std::nullopt, "model has no states"});
    return report;
  }
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    if (!m.schema().conforms(m.state(s))) {
      report.push_back({Violation::Kind::state_out_of_schema, s, std::nullopt,
                        "state " + std::to_string(s) + " does not conform to the schema"});
    }
    bool any_action = false;
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      const auto dist = m.distribution(s, a);
      const std::string where =
          "state " + std::to_string(s) + " action " + std::to_string(a) + " (" + m.actions()[a] + ")";
      if (dist.empty()) {
        if (options.require_all_actions) {
          report.push_back({Violation::Kind::missing_action, s, a,
                            "state " + std::to_string(s) + " lacks action " + m.actions()[a] +
                                "; all actions must be available at all states"});
        }
        continue;
      }
      any_action = true;
      check_distribution(dist, m.num_states(), s, a, where, report);
    }
    if (!options.require_all_actions && !any_action) {
      report.push_back({Violation::Kind::missing_action, s, std::nullopt,
                        "state " + std::to_string(s) + " has no available action"});
    }
  }
  return report;
}

ValidationReport validate_dtmc(const ExplicitDtmc& d) {
  ValidationReport report;
  if (d.num_states() == 0) {
    report.push_back({Violation::Kind::empty_model, std::nullopt, std::nullopt, "model has no states"});
    return report;
  }
  if (d.initial_state() >= d.num_states()) {
    report.push_back({Violation::Kind::invalid_initial_state, std::nullopt, std::nullopt,
                      "initial state index out of range"});
  }
  for (StateIndex s = 0; s < d.num_states(); ++s) {
    if (!d.schema().conforms(d.state(s))) {
      report.push_back({Violation::Kind::state_out_of_schema, s, std::nullopt,
                        "state " + std::to_string(s) + " does not conform to the schema"});
    }
    check_distribution(d.successors(s), d.num_states(), s, std::nullopt, "state " + std::to_string(s),
                       report);
  }
  return report;
}

}  // namespace rashomon
