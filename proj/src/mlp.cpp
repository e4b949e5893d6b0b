#include "rashomon/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rashomon/error.hpp"
#include "rashomon/explicit_io.hpp"

namespace rashomon {

namespace {

// Dot product with four partial sums; fixed association keeps results
// reproducible while letting the compiler pipeline the loop.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

MlpPolicy::MlpPolicy(std::uint64_t seed, std::vector<std::size_t> layer_sizes, std::vector<double> input_divisors)
    : seed_(seed), sizes_(std::move(layer_sizes)), divisors_(std::move(input_divisors)) {
  if (sizes_.size() < 2) throw std::invalid_argument("mlp: need at least input and output sizes");
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("mlp: layer sizes must be positive");
  }
  if (divisors_.size() != sizes_.front()) throw std::invalid_argument("mlp: one divisor per input required");
  for (double d : divisors_) {
    if (!(d > 0.0)) throw std::invalid_argument("mlp: normalization divisors must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

std::size_t MlpPolicy::max_width() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

std::span<double> MlpPolicy::weights(std::size_t l) {
  return {params_.data() + offsets_[l], sizes_[l] * sizes_[l + 1]};
}
std::span<const double> MlpPolicy::weights(std::size_t l) const {
  return {params_.data() + offsets_[l], sizes_[l] * sizes_[l + 1]};
}
std::span<double> MlpPolicy::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + sizes_[l] * sizes_[l + 1], sizes_[l + 1]};
}
std::span<const double> MlpPolicy::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + sizes_[l] * sizes_[l + 1], sizes_[l + 1]};
}

std::vector<double> MlpPolicy::normalize(std::span<const int> state) const {
  if (state.size() != num_inputs()) throw SemanticError("mlp: state arity does not match the network input");
  std::vector<double> input(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) input[i] = state[i] / divisors_[i];
  return input;
}

void MlpPolicy::forward(std::span<const double> input, std::span<double> out) const {
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t outs = sizes_[l + 1];
    const double* w = weights(l).data();
    const double* b = bias(l).data();
    next.assign(outs, 0.0);
    const bool hidden = l + 1 < num_layers();
    for (std::size_t o = 0; o < outs; ++o) {
      const double z = b[o] + dot(w + o * in, current.data(), in);
      next[o] = hidden ? std::max(z, 0.0) : z;
    }
    current.swap(next);
  }
  std::copy(current.begin(), current.end(), out.begin());
}

std::vector<double> MlpPolicy::logits(std::span<const int> state) const {
  std::vector<double> out(num_actions());
  forward(normalize(state), out);
  return out;
}

std::uint64_t MlpPolicy::checksum() const {
  std::uint64_t h = fnv1a("mlp");
  auto mix = [&](const void* data, std::size_t bytes) {
    h = fnv1a(std::string_view(static_cast<const char*>(data), bytes), h);
  };
  for (std::size_t s : sizes_) {
    const std::uint64_t v = s;
    mix(&v, sizeof v);
  }
  mix(divisors_.data(), divisors_.size() * sizeof(double));
  mix(params_.data(), params_.size() * sizeof(double));
  return h;
}

std::vector<double> normalization_divisors(const FeatureSchema& schema) {
  std::vector<double> out;
  for (const auto& b : schema.bounds()) {
    out.push_back(std::max({std::abs(static_cast<double>(b.min)), std::abs(static_cast<double>(b.max)), 1.0}));
  }
  return out;
}

ActionIndex argmax_lowest(std::span<const double> values) {
  ActionIndex best = 0;
  for (ActionIndex a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

ActionIndex select_action(const MlpPolicy& policy, std::span<const int> state) {
  return argmax_lowest(policy.logits(state));
}

MlpWorkspace::MlpWorkspace(const MlpPolicy& policy) {
  for (std::size_t s : policy.layer_sizes()) activations_.emplace_back(s, 0.0);
  delta_.assign(policy.max_width(), 0.0);
  delta_next_.assign(policy.max_width(), 0.0);
}

double accumulate_loss_gradient(const MlpPolicy& policy, std::span<const double> input, ActionIndex label,
                                std::span<double> gradient, MlpWorkspace& ws, ActionIndex* predicted) {
  const auto& sizes = policy.layer_sizes();
  const std::size_t layers = policy.num_layers();
  auto& act = ws.activations_;
  std::copy(input.begin(), input.end(), act[0].begin());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes[l];
    const double* w = policy.weights(l).data();
    const double* b = policy.bias(l).data();
    double* out = act[l + 1].data();
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      const double z = b[o] + dot(w + o * in, act[l].data(), in);
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
  }

  // Softmax cross-entropy on the logits.
  const std::size_t k = sizes.back();
  const double* logits = act[layers].data();
  const ActionIndex best = argmax_lowest({logits, k});
  if (predicted) *predicted = best;
  const double shift = logits[best];
  double denom = 0.0;
  for (std::size_t i = 0; i < k; ++i) denom += std::exp(logits[i] - shift);
  const double loss = std::log(denom) - (logits[label] - shift);

  double* delta = ws.delta_.data();
  for (std::size_t i = 0; i < k; ++i) delta[i] = std::exp(logits[i] - shift) / denom;
  delta[label] -= 1.0;

  double* delta_prev = ws.delta_next_.data();
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes[l];
    const std::size_t outs = sizes[l + 1];
    const double* w = policy.weights(l).data();
    const double* a_in = act[l].data();
    // Offsets of this layer's weights and bias inside the flat gradient.
    double* gw = gradient.data() + (policy.weights(l).data() - policy.parameters().data());
    double* gb = gw + in * outs;
    for (std::size_t o = 0; o < outs; ++o) {
      if (delta[o] == 0.0) continue;
      axpy(delta[o], a_in, gw + o * in, in);
      gb[o] += delta[o];
    }
    if (l == 0) break;
    std::fill(delta_prev, delta_prev + in, 0.0);
    for (std::size_t o = 0; o < outs; ++o) {
      if (delta[o] != 0.0) axpy(delta[o], w + o * in, delta_prev, in);
    }
    // ReLU derivative of the previous layer's pre-activation.
    for (std::size_t i = 0; i < in; ++i) {
      if (a_in[i] <= 0.0) delta_prev[i] = 0.0;
    }
    std::swap(delta, delta_prev);
  }
  return loss;
}

void logit_input_gradient(const MlpPolicy& policy, std::span<const double> input, ActionIndex output,
                          std::span<double> gradient, MlpWorkspace& ws) {
  const auto& sizes = policy.layer_sizes();
  const std::size_t layers = policy.num_layers();
  auto& act = ws.activations_;
  std::copy(input.begin(), input.end(), act[0].begin());
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const std::size_t in = sizes[l];
    const double* w = policy.weights(l).data();
    const double* b = policy.bias(l).data();
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      act[l + 1][o] = std::max(b[o] + dot(w + o * in, act[l].data(), in), 0.0);
    }
  }
  double* delta = ws.delta_.data();
  double* delta_prev = ws.delta_next_.data();
  std::fill(delta, delta + sizes.back(), 0.0);
  delta[output] = 1.0;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes[l];
    const double* w = policy.weights(l).data();
    std::fill(delta_prev, delta_prev + in, 0.0);
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      if (delta[o] != 0.0) axpy(delta[o], w + o * in, delta_prev, in);
    }
    if (l > 0) {
      for (std::size_t i = 0; i < in; ++i) {
        if (act[l][i] <= 0.0) delta_prev[i] = 0.0;
      }
    }
    std::swap(delta, delta_prev);
  }
  std::copy(delta, delta + sizes.front(), gradient.begin());
}

void write_mlp(const MlpPolicy& policy, std::ostream& out) {
  out << "MLP " << policy.seed();
  for (std::size_t s : policy.layer_sizes()) out << ' ' << s;
  out << "\nNORM";
  for (double d : policy.input_divisors()) out << ' ' << format_real(d);
  out << '\n';
  const auto& sizes = policy.layer_sizes();
  for (std::size_t l = 0; l < policy.num_layers(); ++l) {
    const auto w = policy.weights(l);
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      for (std::size_t i = 0; i < sizes[l]; ++i) {
        if (i) out << ' ';
        out << format_real(w[o * sizes[l] + i]);
      }
      out << '\n';
    }
    const auto b = policy.bias(l);
    for (std::size_t o = 0; o < b.size(); ++o) {
      if (o) out << ' ';
      out << format_real(b[o]);
    }
    out << '\n';
  }
}

MlpPolicy read_mlp(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of policy file");
    ++line_no;
    return std::istringstream(line);
  };
  auto header = next_line();
  std::string tag;
  std::uint64_t seed = 0;
  if (!(header >> tag >> seed) || tag != "MLP") throw ParseError(line_no, "expected 'MLP <seed> <sizes...>'");
  std::vector<std::size_t> sizes;
  for (std::size_t s; header >> s;) sizes.push_back(s);
  if (sizes.size() < 2) throw ParseError(line_no, "policy header lists fewer than two layer sizes");

  auto norm = next_line();
  if (!(norm >> tag) || tag != "NORM") throw ParseError(line_no, "expected NORM line");
  std::vector<double> divisors;
  for (std::string tok; norm >> tok;) divisors.push_back(std::stod(tok));

  MlpPolicy policy = [&] {
    try {
      return MlpPolicy(seed, sizes, divisors);
    } catch (const std::invalid_argument& e) {
      throw SemanticError(std::string("policy file: ") + e.what());
    }
  }();
  auto read_values = [&](double* dst, std::size_t count) {
    auto row = next_line();
    std::size_t n = 0;
    for (std::string tok; row >> tok; ++n) {
      if (n == count) throw ParseError(line_no, "too many values");
      std::size_t used = 0;
      try {
        dst[n] = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ParseError(line_no, "malformed value '" + tok + "'");
    }
    if (n != count) throw ParseError(line_no, "expected " + std::to_string(count) + " values");
  };
  for (std::size_t l = 0; l < policy.num_layers(); ++l) {
    auto w = policy.weights(l);
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) read_values(w.data() + o * sizes[l], sizes[l]);
    read_values(policy.bias(l).data(), sizes[l + 1]);
  }
  return policy;
}

void write_mlp_file(const MlpPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_mlp(policy, out);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

MlpPolicy read_mlp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open policy file '" + path.string() + "'");
  return read_mlp(in);
}

}  // namespace rashomon
