#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rashomon/attribution.hpp"
#include "rashomon/checker.hpp"
#include "rashomon/induced.hpp"

namespace rashomon {

using PolicyId = std::uint64_t;

struct EquivalenceClass {
  std::vector<std::size_t> members;  // input positions, ascending
  InducedDtmc representative;        // chain of the first member
  double value = 0.0;                // reachability probability from its initial state
};

struct EquivalenceClasses {
  std::vector<EquivalenceClass> classes;  // by descending size, then first member
  std::vector<std::size_t> class_of;      // class index of each input position
};

// Builds one induced chain per policy, `workers` at a time (0 = all cores).
std::vector<InducedDtmc> build_induced_all(const ExplicitMdp& m, std::span<const PolicyView> policies,
                                           const Predicate& target, InducedOptions options = {},
                                           std::size_t workers = 0);

// Partitions chains under dtmc_equivalent and checks each class once, on its
// representative.
EquivalenceClasses partition_classes(std::vector<InducedDtmc> chains, const Predicate& target,
                                     SolverOptions solver = {});
EquivalenceClasses partition_classes(const ExplicitMdp& m, std::span<const PolicyView> policies,
                                     const Predicate& target, InducedOptions options = {},
                                     std::size_t workers = 0);

// One policy per distinct ranking, the lowest id of each ranking group; the
// result is sorted ascending. Throws SemanticError on empty or mismatched
// input.
std::vector<PolicyId> build_rashomon_set(std::span<const PolicyId> members, std::span<const FeatureRanking> rankings);

}  // namespace rashomon
