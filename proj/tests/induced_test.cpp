#include "rashomon/induced.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "rashomon/checker.hpp"
#include "rashomon/error.hpp"
#include "rashomon/random.hpp"
#include "rashomon/taxi.hpp"

namespace rashomon {
namespace {

const FeatureSchema kLine({"s"}, {{0, 16}});

// 0 -a-> 1 -a-> 2 (target), b loops in place; state 3 is unreachable and
// only reachable states are 0..2.
ExplicitMdp four_state_mdp() {
  MdpBuilder b(kLine, {"a", "b"});
  for (int i = 0; i < 4; ++i) b.add_state(std::vector<int>{i});
  b.set_distribution(0, 0, {{1, 1.0}});
  b.set_distribution(0, 1, {{0, 0.5}, {3, 0.5}});
  b.set_distribution(1, 0, {{2, 1.0}});
  b.set_distribution(1, 1, {{1, 1.0}});
  b.set_distribution(2, 0, {{2, 1.0}});
  b.set_distribution(2, 1, {{2, 1.0}});
  b.set_distribution(3, 0, {{2, 1.0}});
  b.set_distribution(3, 1, {{0, 1.0}});
  return std::move(b).build();
}

taxi::TaxiParams small_taxi() {
  taxi::TaxiParams p;
  p.width = 3;
  p.height = 3;
  p.fuel_capacity = 10;
  p.num_jobs = 2;
  p.depots = {{{0, 0}, {2, 0}, {0, 2}, {2, 2}}};
  return p;
}

Predicate completion(const taxi::TaxiParams& p) { return parse_property(taxi::completion_property(p.num_jobs)).target; }

TablePolicy random_table(const ExplicitMdp& m, Xoshiro256& rng) {
  TablePolicy t;
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    std::vector<ActionIndex> avail;
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      if (m.available(s, a)) avail.push_back(a);
    }
    t.actions.push_back(avail[rng.below(avail.size())]);
  }
  return t;
}

void expect_faithful(const ExplicitMdp& m, const InducedDtmc& d, const TablePolicy& policy, const Predicate& target) {
  ASSERT_EQ(d.source_states.size(), d.chain.num_states());
  EXPECT_TRUE(validate_dtmc(d.chain).empty());
  const BoundPredicate in_target(target, m.schema());
  for (StateIndex c = 0; c < d.chain.num_states(); ++c) {
    const StateIndex s = d.source_states[c];
    ASSERT_EQ(*m.states().find(d.chain.state(c)), s);
    const auto succ = d.chain.successors(c);
    if (in_target(m.state(s)) || is_absorbing(m, s)) {
      ASSERT_EQ(succ.size(), 1u);
      EXPECT_EQ(succ[0].target, c);
      EXPECT_EQ(succ[0].probability, 1.0);
      continue;
    }
    const auto row = m.distribution(s, policy[s]);
    ASSERT_EQ(succ.size(), row.size());
    for (const auto& t : succ) {
      const auto it = std::find_if(row.begin(), row.end(),
                                   [&](const Transition& r) { return r.target == d.source_states[t.target]; });
      ASSERT_NE(it, row.end());
      EXPECT_EQ(it->probability, t.probability);
    }
  }
}

TEST(InducedDtmc, DeterministicMdpGivesAPath) {
  const auto m = four_state_mdp();
  const auto d = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 0}}), parse_predicate("s=2"));
  EXPECT_EQ(d.chain.num_states(), 3u);
  EXPECT_LE(d.chain.num_states(), m.num_states());
  EXPECT_EQ(d.source_states, (std::vector<StateIndex>{0, 1, 2}));
  EXPECT_EQ(d.chain.state(d.chain.initial_state())[0], 0);
}

TEST(InducedDtmc, TransitionsAreCopiedVerbatim) {
  Xoshiro256 rng(9);
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto target = completion(p);
  for (int trial = 0; trial < 10; ++trial) {
    const auto policy = random_table(m, rng);
    expect_faithful(m, build_induced_dtmc(m, table_view(policy), target), policy, target);
  }
}

TEST(InducedDtmc, OptimalTaxiPolicyValueMatchesTheSynthesizedValue) {
  const taxi::TaxiParams p;
  const auto m = taxi::build_taxi(p);
  const auto target = completion(p);
  const auto sol = max_reach_mdp(m, target);
  const auto d = build_induced_dtmc(m, table_view(sol.policy), target);
  EXPECT_NEAR(reach_prob_dtmc(d.chain, target).initial_value, sol.result.initial_value, 1e-8);
  expect_faithful(m, d, sol.policy, target);
}

TEST(InducedDtmc, FirstStepIntoTheTargetIsCutOff) {
  const auto m = four_state_mdp();
  const auto d = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 0}}), parse_predicate("s=1"));
  ASSERT_EQ(d.chain.num_states(), 2u);
  const auto succ = d.chain.successors(1);
  ASSERT_EQ(succ.size(), 1u);
  EXPECT_EQ(succ[0].target, 1u);
}

TEST(InducedDtmc, CarriesProvenance) {
  const auto m = four_state_mdp();
  const auto d = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 0}}), parse_predicate("s=2"), {},
                                    {"pi_3", "P=? [ F s=2 ]", 42});
  EXPECT_EQ(d.provenance.policy_id, "pi_3");
  EXPECT_EQ(d.provenance.property, "P=? [ F s=2 ]");
  EXPECT_EQ(d.provenance.mdp_fingerprint, 42u);
}

TEST(InducedDtmc, UnavailableActionIsSemanticError) {
  MdpBuilder b(kLine, {"a", "b"});
  b.add_state(std::vector<int>{0});
  b.add_state(std::vector<int>{1});
  b.set_distribution(0, 0, {{1, 1.0}});
  b.set_distribution(1, 0, {{1, 1.0}});
  b.set_distribution(1, 1, {{0, 1.0}});
  const auto m = std::move(b).build();
  EXPECT_THROW(build_induced_dtmc(m, table_view(TablePolicy{{1, 0}}), parse_predicate("s=1")), SemanticError);
}

TEST(InducedDtmc, StateCapIsResourceError) {
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto sol = max_reach_mdp(m, completion(p));
  EXPECT_THROW(build_induced_dtmc(m, table_view(sol.policy), completion(p), {.state_cap = 3}), ResourceError);
}

TEST(InducedDtmc, MlpViewChecksArity) {
  const MlpPolicy net(0, {3, 4, 2}, {1.0, 1.0, 1.0});
  EXPECT_THROW(mlp_view(net, kLine), SemanticError);
}

TEST(DtmcEquivalent, ReflexiveOnARebuild) {
  const auto m = four_state_mdp();
  const TablePolicy pol{{0, 1, 0, 0}};
  const auto a = build_induced_dtmc(m, table_view(pol), parse_predicate("s=2"));
  const auto b = build_induced_dtmc(m, table_view(pol), parse_predicate("s=2"));
  EXPECT_TRUE(dtmc_equivalent(a, b));
  EXPECT_EQ(canonical_hash(a.chain), canonical_hash(b.chain));
}

TEST(DtmcEquivalent, DifferencesAtUnreachableStatesDoNotMatter) {
  const auto m = four_state_mdp();
  const auto a = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 0}}), parse_predicate("s=2"));
  const auto b = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 1}}), parse_predicate("s=2"));
  EXPECT_TRUE(dtmc_equivalent(a, b));
  // At the target the cut makes the choice irrelevant as well.
  const auto c = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 1, 1}}), parse_predicate("s=2"));
  EXPECT_TRUE(dtmc_equivalent(a, c));
}

TEST(DtmcEquivalent, DifferentFirstActionsDiffer) {
  const auto m = four_state_mdp();
  const auto a = build_induced_dtmc(m, table_view(TablePolicy{{0, 0, 0, 0}}), parse_predicate("s=2"));
  const auto b = build_induced_dtmc(m, table_view(TablePolicy{{1, 0, 0, 0}}), parse_predicate("s=2"));
  EXPECT_FALSE(dtmc_equivalent(a, b));
  EXPECT_FALSE(dtmc_equivalent(b, a));
}

TEST(DtmcEquivalent, SchemaNameMismatchIsSemanticError) {
  DtmcBuilder x(FeatureSchema({"s"}, {{0, 1}}));
  x.add_state(std::vector<int>{0});
  x.set_successors(0, {{0, 1.0}});
  DtmcBuilder y(FeatureSchema({"t"}, {{0, 1}}));
  y.add_state(std::vector<int>{0});
  y.set_successors(0, {{0, 1.0}});
  EXPECT_THROW(dtmc_equivalent(std::move(x).build(), std::move(y).build()), SemanticError);
}

TEST(DtmcEquivalent, IndependentOfStateNumbering) {
  DtmcBuilder x(kLine);
  x.add_state(std::vector<int>{0});
  x.add_state(std::vector<int>{1});
  x.add_state(std::vector<int>{2});
  x.set_successors(0, {{1, 0.25}, {2, 0.75}});
  x.set_successors(1, {{1, 1.0}});
  x.set_successors(2, {{2, 1.0}});
  DtmcBuilder y(kLine);
  y.add_state(std::vector<int>{0});
  y.add_state(std::vector<int>{2});
  y.add_state(std::vector<int>{1});
  y.set_successors(0, {{1, 0.75}, {2, 0.25}});
  y.set_successors(1, {{1, 1.0}});
  y.set_successors(2, {{2, 1.0}});
  const auto a = std::move(x).build();
  const auto b = std::move(y).build();
  EXPECT_TRUE(dtmc_equivalent(a, b));
  EXPECT_EQ(canonical_hash(a), canonical_hash(b));
}

TEST(MajorityEnsemble, VotesWithLowestIndexTieBreak) {
  const auto view = [](ActionIndex a) { return PolicyView([a](StateIndex, std::span<const int>) { return a; }); };
  const std::vector<int> s{0};
  EXPECT_EQ(majority_ensemble({view(2), view(2), view(2)})(0, s), 2u);
  EXPECT_EQ(majority_ensemble({view(0), view(0), view(1)})(0, s), 0u);
  EXPECT_EQ(majority_ensemble({view(3), view(3), view(1)})(0, s), 3u);
  EXPECT_EQ(majority_ensemble({view(0), view(0), view(1), view(1)})(0, s), 0u);
  EXPECT_EQ(majority_ensemble({view(4), view(1), view(1), view(4)})(0, s), 1u);
}

TEST(MajorityEnsemble, AgreeingMembersGiveTheSameChain) {
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto target = completion(p);
  const auto sol = max_reach_mdp(m, target);
  const auto member = build_induced_dtmc(m, table_view(sol.policy), target);
  const auto ens = build_induced_dtmc(
      m, majority_ensemble({table_view(sol.policy), table_view(sol.policy), table_view(sol.policy)}), target);
  EXPECT_TRUE(dtmc_equivalent(member, ens));
}

TEST(PermissivePolicy, ActionSetsAreTheSortedUnion) {
  const auto view = [](ActionIndex a) { return PolicyView([a](StateIndex, std::span<const int>) { return a; }); };
  const PermissivePolicy tau({"x", "y", "z"}, {view(3), view(1), view(3)});
  EXPECT_EQ(tau.actions(0, std::vector<int>{0}), (std::vector<ActionIndex>{1, 3}));
  EXPECT_EQ(tau.size(), 3u);
}

TEST(PermissivePolicy, SingleMemberCollapsesToItsChain) {
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto target = completion(p);
  Xoshiro256 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto policy = trial == 0 ? max_reach_mdp(m, target).policy : random_table(m, rng);
    const auto chain = build_induced_dtmc(m, table_view(policy), target);
    const auto induced = build_induced_mdp(m, PermissivePolicy({"only"}, {table_view(policy)}), target);
    ASSERT_EQ(induced.mdp.num_states(), chain.chain.num_states());
    // Exactly one available action per state; read off the unique chain.
    DtmcBuilder b(induced.mdp.schema());
    for (StateIndex s = 0; s < induced.mdp.num_states(); ++s) b.add_state(induced.mdp.state(s));
    for (StateIndex s = 0; s < induced.mdp.num_states(); ++s) {
      int available = 0;
      for (ActionIndex a = 0; a < induced.mdp.num_actions(); ++a) {
        if (!induced.mdp.available(s, a)) continue;
        ++available;
        const auto row = induced.mdp.distribution(s, a);
        b.set_successors(s, {row.begin(), row.end()});
      }
      EXPECT_EQ(available, 1);
    }
    EXPECT_TRUE(dtmc_equivalent(std::move(b).build(), chain.chain));
  }
}

TEST(PermissivePolicy, InducedMdpBoundsEveryMember) {
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto target = completion(p);
  Xoshiro256 rng(6);
  std::vector<TablePolicy> members{max_reach_mdp(m, target).policy, min_reach_mdp(m, target).policy};
  for (int i = 0; i < 3; ++i) members.push_back(random_table(m, rng));
  std::vector<PolicyView> views;
  std::vector<std::string> ids;
  for (const auto& t : members) {
    views.push_back(table_view(t));
    ids.push_back("t" + std::to_string(ids.size()));
  }
  const auto induced = build_induced_mdp(m, PermissivePolicy(ids, views), target);
  EXPECT_LE(induced.mdp.num_states(), m.num_states());
  const auto issues = validate_mdp(induced.mdp, {.require_all_actions = false});
  EXPECT_TRUE(issues.empty()) << (issues.empty() ? "" : issues.front().message);
  const double hi = max_reach_mdp(induced.mdp, target).result.initial_value;
  const double lo = min_reach_mdp(induced.mdp, target).result.initial_value;
  for (const auto& v : views) {
    const double x = reach_prob_dtmc(build_induced_dtmc(m, v, target).chain, target).initial_value;
    EXPECT_GE(hi, x - 1e-9);
    EXPECT_LE(lo, x + 1e-9);
  }
  // Every induced state exists in the source model.
  for (StateIndex s = 0; s < induced.mdp.num_states(); ++s) {
    EXPECT_TRUE(m.states().find(induced.mdp.state(s)).has_value());
  }
}

TEST(PermissivePolicy, InducedMdpStateCapIsResourceError) {
  const auto p = small_taxi();
  const auto m = taxi::build_taxi(p);
  const auto sol = max_reach_mdp(m, completion(p));
  EXPECT_THROW(build_induced_mdp(m, PermissivePolicy({"a"}, {table_view(sol.policy)}), completion(p), {.state_cap = 2}),
               ResourceError);
}

}  // namespace
}  // namespace rashomon
