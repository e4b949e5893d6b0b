#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "rashomon/checker.hpp"
#include "rashomon/mlp.hpp"
#include "rashomon/model.hpp"

namespace rashomon {

// Expert demonstrations: exactly one (state, action) pair per MDP state, in
// ascending state order.
class ExpertDataset {
 public:
  ExpertDataset() = default;
  ExpertDataset(FeatureSchema schema, std::size_t num_actions);

  void add(std::span<const int> state, ActionIndex action);

  const FeatureSchema& schema() const { return schema_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::span<const int> state(std::size_t i) const { return {features_.data() + i * schema_.arity(), schema_.arity()}; }
  ActionIndex action(std::size_t i) const { return labels_[i]; }

  friend bool operator==(const ExpertDataset&, const ExpertDataset&) = default;

 private:
  FeatureSchema schema_;
  std::size_t num_actions_ = 0;
  std::vector<int> features_;
  std::vector<ActionIndex> labels_;
};

// Throws SemanticError when the policy does not cover every state.
ExpertDataset extract_expert_dataset(const ExplicitMdp& m, const TablePolicy& expert);

// Text format: "DATASET <d> <nActs> <n>", the SCHEMA line of the explicit
// model format, then one "<f1> ... <fd> <action>" line per pair.
void write_dataset_file(const ExpertDataset& data, const std::filesystem::path& path);
ExpertDataset read_dataset_file(const std::filesystem::path& path);

struct TrainConfig {
  std::size_t epochs = 3000;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::vector<std::size_t> hidden{64, 64};
  std::uint64_t seed = 1;
  bool early_stop = true;  // stop at the first epoch reaching accuracy 1.0

  // Throws ConfigError.
  void validate() const;
};

// Glorot-uniform weights from xoshiro256** seeded with cfg.seed; zero biases.
MlpPolicy init_policy(const FeatureSchema& schema, std::size_t num_actions, const TrainConfig& cfg);

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean cross-entropy of each epoch's mini-batch passes
  double initial_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::size_t epochs_run = 0;
};

double dataset_accuracy(const MlpPolicy& policy, const ExpertDataset& data);
double dataset_loss(const MlpPolicy& policy, const ExpertDataset& data);

// Mini-batch SGD on softmax cross-entropy. Batches come from a seeded
// reshuffle every epoch, so the result depends only on (policy, data, cfg).
std::pair<MlpPolicy, TrainingReport> train(MlpPolicy policy, const ExpertDataset& data, const TrainConfig& cfg);

}  // namespace rashomon
