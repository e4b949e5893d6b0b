#include "rashomon/cloning.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "rashomon/error.hpp"
#include "rashomon/explicit_io.hpp"
#include "rashomon/random.hpp"

namespace rashomon {

ExpertDataset::ExpertDataset(FeatureSchema schema, std::size_t num_actions)
    : schema_(std::move(schema)), num_actions_(num_actions) {}

void ExpertDataset::add(std::span<const int> state, ActionIndex action) {
  if (state.size() != schema_.arity()) throw SemanticError("dataset: state arity mismatch");
  if (action >= num_actions_) throw SemanticError("dataset: action index " + std::to_string(action) + " out of range");
  features_.insert(features_.end(), state.begin(), state.end());
  labels_.push_back(action);
}

ExpertDataset extract_expert_dataset(const ExplicitMdp& m, const TablePolicy& expert) {
  if (expert.size() != m.num_states()) {
    throw SemanticError("expert policy covers " + std::to_string(expert.size()) + " of " +
                        std::to_string(m.num_states()) + " states");
  }
  ExpertDataset data(m.schema(), m.num_actions());
  for (StateIndex s = 0; s < m.num_states(); ++s) data.add(m.state(s), expert[s]);
  return data;
}

void write_dataset_file(const ExpertDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto& schema = data.schema();
  out << "DATASET " << schema.arity() << ' ' << data.num_actions() << ' ' << data.size() << "\nSCHEMA";
  for (std::size_t i = 0; i < schema.arity(); ++i) {
    out << ' ' << schema.name(i) << ':' << schema.bounds()[i].min << ':' << schema.bounds()[i].max;
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int v : data.state(i)) out << v << ' ';
    out << data.action(i) << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ExpertDataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open dataset file '" + path.string() + "'");
  std::string line;
  std::size_t arity = 0, num_actions = 0, count = 0;
  {
    std::getline(in, line);
    std::istringstream header(line);
    std::string tag;
    if (!(header >> tag >> arity >> num_actions >> count) || tag != "DATASET") {
      throw ParseError(1, "expected 'DATASET <d> <nActs> <n>'");
    }
  }
  std::vector<std::string> names;
  std::vector<FeatureBounds> bounds;
  {
    std::getline(in, line);
    std::istringstream schema_line(line);
    std::string tag;
    schema_line >> tag;
    if (tag != "SCHEMA") throw ParseError(2, "expected SCHEMA line");
    for (std::string tok; schema_line >> tok;) {
      const auto c1 = tok.find(':');
      const auto c2 = tok.rfind(':');
      if (c1 == std::string::npos || c1 == c2) throw ParseError(2, "malformed schema entry '" + tok + "'");
      names.push_back(tok.substr(0, c1));
      bounds.push_back({std::stoi(tok.substr(c1 + 1, c2 - c1 - 1)), std::stoi(tok.substr(c2 + 1))});
    }
  }
  if (names.size() != arity) throw ParseError(2, "schema arity disagrees with header");
  ExpertDataset data(FeatureSchema(std::move(names), std::move(bounds)), num_actions);
  std::vector<int> state(arity);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError(i + 3, "dataset ended early");
    std::istringstream row(line);
    for (auto& v : state) {
      if (!(row >> v)) throw ParseError(i + 3, "malformed dataset row");
    }
    ActionIndex a = 0;
    if (!(row >> a)) throw ParseError(i + 3, "malformed dataset row");
    data.add(state, a);
  }
  return data;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("training: learning rate must be > 0");
  if (batch_size < 1) throw ConfigError("training: batch size must be >= 1");
  if (hidden.empty()) throw ConfigError("training: at least one hidden layer is required");
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("training: hidden sizes must be positive");
  }
}

MlpPolicy init_policy(const FeatureSchema& schema, std::size_t num_actions, const TrainConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> sizes{schema.arity()};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(num_actions);
  MlpPolicy policy(cfg.seed, sizes, normalization_divisors(schema));
  Xoshiro256 rng(cfg.seed);
  for (std::size_t l = 0; l < policy.num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
    for (double& w : policy.weights(l)) w = rng.symmetric(bound);
  }
  return policy;
}

namespace {

std::vector<double> normalized_inputs(const MlpPolicy& policy, const ExpertDataset& data) {
  const std::size_t d = policy.num_inputs();
  std::vector<double> inputs(data.size() * d);
  const auto& div = policy.input_divisors();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = data.state(i);
    for (std::size_t f = 0; f < d; ++f) inputs[i * d + f] = s[f] / div[f];
  }
  return inputs;
}

void check_compatible(const MlpPolicy& policy, const ExpertDataset& data) {
  if (policy.num_inputs() != data.schema().arity() || policy.num_actions() != data.num_actions()) {
    throw SemanticError("training: dataset dimensions do not match the policy network");
  }
}

}  // namespace

double dataset_accuracy(const MlpPolicy& policy, const ExpertDataset& data) {
  check_compatible(policy, data);
  if (data.empty()) return 1.0;
  const auto inputs = normalized_inputs(policy, data);
  const std::size_t d = policy.num_inputs();
  std::vector<double> logits(policy.num_actions());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    policy.forward({inputs.data() + i * d, d}, logits);
    if (argmax_lowest(logits) == data.action(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double dataset_loss(const MlpPolicy& policy, const ExpertDataset& data) {
  check_compatible(policy, data);
  if (data.empty()) return 0.0;
  const auto inputs = normalized_inputs(policy, data);
  const std::size_t d = policy.num_inputs();
  std::vector<double> logits(policy.num_actions());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    policy.forward({inputs.data() + i * d, d}, logits);
    const double shift = logits[argmax_lowest(logits)];
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - shift);
    total += std::log(denom) - (logits[data.action(i)] - shift);
  }
  return total / static_cast<double>(data.size());
}

std::pair<MlpPolicy, TrainingReport> train(MlpPolicy policy, const ExpertDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  check_compatible(policy, data);
  TrainingReport report;
  report.initial_accuracy = dataset_accuracy(policy, data);
  report.final_accuracy = report.initial_accuracy;
  if (data.empty() || cfg.epochs == 0) return {std::move(policy), report};
  if (cfg.early_stop && report.initial_accuracy == 1.0) return {std::move(policy), report};

  const std::size_t n = data.size();
  const std::size_t d = policy.num_inputs();
  const auto inputs = normalized_inputs(policy, data);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Independent stream from the one used for initialization.
  Xoshiro256 shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
  MlpWorkspace ws(policy);
  std::vector<double> gradient(policy.parameters().size());
  auto params = policy.parameters();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::fill(gradient.begin(), gradient.end(), 0.0);
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t i = order[j];
        ActionIndex predicted = 0;
        loss_sum += accumulate_loss_gradient(policy, {inputs.data() + i * d, d}, data.action(i), gradient, ws,
                                             &predicted);
        if (predicted == data.action(i)) ++correct;
      }
      const double step = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= step * gradient[p];
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    report.epochs_run = epoch + 1;
    // In-pass predictions are a cheap filter; confirm with a clean pass.
    if (cfg.early_stop && correct == n && dataset_accuracy(policy, data) == 1.0) break;
  }
  report.final_accuracy = dataset_accuracy(policy, data);
  return {std::move(policy), report};
}

}  // namespace rashomon
