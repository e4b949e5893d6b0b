#include "rashomon/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rashomon/error.hpp"

namespace rashomon {

SaliencyVector saliency(const MlpPolicy& policy, std::span<const int> state) {
  const auto input = policy.normalize(state);
  std::vector<double> logits(policy.num_actions());
  policy.forward(input, logits);
  MlpWorkspace ws(policy);
  SaliencyVector grad(policy.num_inputs());
  logit_input_gradient(policy, input, argmax_lowest(logits), grad, ws);
  for (double& g : grad) g = std::abs(g);
  return grad;
}

std::vector<double> mean_saliency(const MlpPolicy& policy, const ExpertDataset& data) {
  if (data.empty()) throw SemanticError("attribution: dataset is empty");
  if (data.schema().arity() != policy.num_inputs()) throw SemanticError("attribution: schema arity mismatch");
  const std::size_t d = policy.num_inputs();
  MlpWorkspace ws(policy);
  std::vector<double> logits(policy.num_actions());
  std::vector<double> grad(d);
  std::vector<double> sum(d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto input = policy.normalize(data.state(i));
    policy.forward(input, logits);
    logit_input_gradient(policy, input, argmax_lowest(logits), grad, ws);
    for (std::size_t f = 0; f < d; ++f) sum[f] += std::abs(grad[f]);
  }
  for (double& s : sum) s /= static_cast<double>(data.size());
  return sum;
}

FeatureRanking rank_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  FeatureRanking ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r + 1);
  return ranks;
}

FeatureRanking global_ranking(const MlpPolicy& policy, const ExpertDataset& data) {
  return rank_scores(mean_saliency(policy, data));
}

bool rankings_equal(const FeatureRanking& a, const FeatureRanking& b) {
  if (a.size() != b.size()) {
    throw SemanticError("rankings have different arities (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
  return a == b;
}

std::vector<std::vector<std::size_t>> group_by_ranking(std::span<const FeatureRanking> rankings) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return rankings_equal(rankings[g.front()], rankings[i]); });
    if (it == groups.end()) {
      groups.push_back({i});
    } else {
      it->push_back(i);
    }
  }
  return groups;
}

}  // namespace rashomon
