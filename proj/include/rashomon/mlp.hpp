#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rashomon/model.hpp"

namespace rashomon {

// Feed-forward policy network: ReLU hidden layers, identity output (logits).
// Parameters live in one flat vector, layer by layer: the weight matrix
// (outputs x inputs, row-major) followed by the bias vector. Inputs are
// divided feature-wise by fixed positive divisors before the first layer.
class MlpPolicy {
 public:
  MlpPolicy() = default;
  // All parameters start at zero.
  MlpPolicy(std::uint64_t seed, std::vector<std::size_t> layer_sizes, std::vector<double> input_divisors);

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t num_layers() const { return sizes_.size() - 1; }
  std::size_t num_inputs() const { return sizes_.front(); }
  std::size_t num_actions() const { return sizes_.back(); }
  std::size_t max_width() const;
  const std::vector<double>& input_divisors() const { return divisors_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Layer l maps sizes[l] inputs to sizes[l+1] outputs.
  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  std::vector<double> normalize(std::span<const int> state) const;
  std::vector<double> logits(std::span<const int> state) const;
  // Output logits for an already-normalized input; `out` has num_actions().
  void forward(std::span<const double> input, std::span<double> out) const;

  // FNV-1a over layer sizes, divisors and the bit patterns of all parameters.
  std::uint64_t checksum() const;

  friend bool operator==(const MlpPolicy&, const MlpPolicy&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> sizes_;
  std::vector<double> divisors_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;  // start of each layer's weights
};

// Per-feature divisor max(|min|, |max|, 1) of the schema bounds.
std::vector<double> normalization_divisors(const FeatureSchema& schema);

// argmax of the logits; the lowest action index wins ties.
ActionIndex select_action(const MlpPolicy& policy, std::span<const int> state);
ActionIndex argmax_lowest(std::span<const double> values);

// Scratch buffers for forward/backward passes, one per thread.
class MlpWorkspace {
 public:
  explicit MlpWorkspace(const MlpPolicy& policy);

 private:
  friend double accumulate_loss_gradient(const MlpPolicy&, std::span<const double>, ActionIndex, std::span<double>,
                                         MlpWorkspace&, ActionIndex*);
  friend void logit_input_gradient(const MlpPolicy&, std::span<const double>, ActionIndex, std::span<double>,
                                   MlpWorkspace&);
  std::vector<std::vector<double>> activations_;  // post-activation per layer, [0] = input
  std::vector<double> delta_;
  std::vector<double> delta_next_;
};

// Softmax cross-entropy loss of one sample. Adds d(loss)/d(parameters) into
// `gradient` (same layout as parameters()) and returns the loss. When
// `predicted` is non-null it receives the argmax action of the forward pass.
double accumulate_loss_gradient(const MlpPolicy& policy, std::span<const double> input, ActionIndex label,
                                std::span<double> gradient, MlpWorkspace& ws, ActionIndex* predicted = nullptr);

// d logit[output] / d input for a normalized input; `gradient` has num_inputs().
void logit_input_gradient(const MlpPolicy& policy, std::span<const double> input, ActionIndex output,
                          std::span<double> gradient, MlpWorkspace& ws);

// Text format:
//   MLP <seed> <d> <h1> ... <nActs>
//   NORM <divisor_1> ... <divisor_d>
//   then, per layer, one line per weight row followed by one bias line.
// Values carry 17 significant digits.
void write_mlp(const MlpPolicy& policy, std::ostream& out);
MlpPolicy read_mlp(std::istream& in);
void write_mlp_file(const MlpPolicy& policy, const std::filesystem::path& path);
MlpPolicy read_mlp_file(const std::filesystem::path& path);

}  // namespace rashomon
