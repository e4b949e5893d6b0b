#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rashomon/cloning.hpp"
#include "rashomon/mlp.hpp"

namespace rashomon {

// Per-feature |d logit[selected action] / d normalized input|.
using SaliencyVector = std::vector<double>;

// ranks[f] in 1..d, 1 = most important feature.
using FeatureRanking = std::vector<int>;

SaliencyVector saliency(const MlpPolicy& policy, std::span<const int> state);

// Mean saliency per feature over the dataset states.
std::vector<double> mean_saliency(const MlpPolicy& policy, const ExpertDataset& data);

// Ranks by descending score; equal scores rank the lower feature index first.
FeatureRanking rank_scores(std::span<const double> scores);

// Throws SemanticError on an empty dataset.
FeatureRanking global_ranking(const MlpPolicy& policy, const ExpertDataset& data);

// Throws SemanticError when the arities differ.
bool rankings_equal(const FeatureRanking& a, const FeatureRanking& b);

// Partitions input positions into groups of equal rankings. Groups and their
// members appear in order of first occurrence.
std::vector<std::vector<std::size_t>> group_by_ranking(std::span<const FeatureRanking> rankings);

}  // namespace rashomon
