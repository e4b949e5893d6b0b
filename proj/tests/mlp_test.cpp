#include "rashomon/mlp.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "rashomon/error.hpp"
#include "rashomon/random.hpp"

namespace rashomon {
namespace {

MlpPolicy random_network(std::uint64_t seed, std::vector<std::size_t> sizes) {
  MlpPolicy p(seed, sizes, std::vector<double>(sizes.front(), 1.0));
  Xoshiro256 rng(seed);
  for (double& w : p.parameters()) w = rng.symmetric(1.0);
  return p;
}

double loss_at(MlpPolicy p, const std::vector<double>& params, const std::vector<double>& input, ActionIndex label) {
  std::copy(params.begin(), params.end(), p.parameters().begin());
  std::vector<double> grad(params.size(), 0.0);
  MlpWorkspace ws(p);
  return accumulate_loss_gradient(p, input, label, grad, ws);
}

TEST(MlpPolicy, ZeroWeightsSelectTheFirstAction) {
  const MlpPolicy p(0, {10, 64, 64, 6}, std::vector<double>(10, 1.0));
  for (double l : p.logits(std::vector<int>(10, 3))) EXPECT_EQ(l, 0.0);
  EXPECT_EQ(select_action(p, std::vector<int>(10, 3)), 0u);
}

TEST(MlpPolicy, HandBuiltNetworkFavoursTheBiasedAction) {
  MlpPolicy p(0, {2, 2, 6}, {1.0, 1.0});
  p.bias(1)[2] = 1.0;
  EXPECT_EQ(select_action(p, std::vector<int>{5, -5}), 2u);
  // Identity hidden layer, output 4 reads the first input.
  p.weights(0)[0] = 1.0;
  p.weights(0)[3] = 1.0;
  p.weights(1)[4 * 2 + 0] = 1.0;
  EXPECT_EQ(select_action(p, std::vector<int>{5, 0}), 4u);
  EXPECT_EQ(select_action(p, std::vector<int>{0, 0}), 2u);
}

TEST(MlpPolicy, ArgmaxTiesGoToTheLowestIndex) {
  EXPECT_EQ(argmax_lowest(std::vector<double>{1.0, 3.0, 3.0, 2.0}), 1u);
  EXPECT_EQ(argmax_lowest(std::vector<double>{0.0, 0.0}), 0u);
}

TEST(MlpPolicy, InputsAreDividedByTheSchemaBounds) {
  const FeatureSchema schema({"a", "b", "c"}, {{0, 4}, {-7, 2}, {0, 0}});
  EXPECT_EQ(normalization_divisors(schema), (std::vector<double>{4.0, 7.0, 1.0}));
  const MlpPolicy p(0, {3, 1, 2}, normalization_divisors(schema));
  EXPECT_EQ(p.normalize(std::vector<int>{2, -7, 0}), (std::vector<double>{0.5, -1.0, 0.0}));
  EXPECT_THROW(p.normalize(std::vector<int>{1, 2}), SemanticError);
}

TEST(MlpPolicy, RejectsInvalidShapes) {
  EXPECT_THROW(MlpPolicy(0, {3}, {1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(MlpPolicy(0, {3, 0, 2}, {1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(MlpPolicy(0, {3, 2}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(MlpPolicy(0, {1, 2}, {0.0}), std::invalid_argument);
}

TEST(MlpPolicy, ParameterCountMatchesLayerSizes) {
  const MlpPolicy p(0, {10, 64, 64, 6}, std::vector<double>(10, 1.0));
  EXPECT_EQ(p.parameters().size(), 10u * 64 + 64 + 64 * 64 + 64 + 64 * 6 + 6);
}

TEST(MlpGradient, LossGradientMatchesCentralDifferences) {
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const MlpPolicy p = random_network(trial + 1, {4, 5, 3, 6});
    std::vector<double> input(4);
    for (double& x : input) x = rng.symmetric(1.0);
    const ActionIndex label = rng.below(6);
    std::vector<double> grad(p.parameters().size(), 0.0);
    MlpWorkspace ws(p);
    accumulate_loss_gradient(p, input, label, grad, ws);
    const std::vector<double> params(p.parameters().begin(), p.parameters().end());
    const auto f = [&](const std::vector<double>& x) { return loss_at(p, x, input, label); };
    std::vector<double> fd(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) fd[i] = oracle::central_difference(f, params, i);
    EXPECT_LT(oracle::relative_error(grad, fd), 1e-4) << "trial " << trial;
  }
}

TEST(MlpGradient, GradientAccumulatesAcrossSamples) {
  const MlpPolicy p = random_network(7, {3, 4, 6});
  const std::vector<double> x1{0.1, -0.2, 0.3}, x2{-0.5, 0.4, 0.9};
  std::vector<double> g1(p.parameters().size(), 0.0), g2 = g1, both = g1;
  MlpWorkspace ws(p);
  const double l1 = accumulate_loss_gradient(p, x1, 1, g1, ws);
  const double l2 = accumulate_loss_gradient(p, x2, 4, g2, ws);
  const double lb = accumulate_loss_gradient(p, x1, 1, both, ws) + accumulate_loss_gradient(p, x2, 4, both, ws);
  EXPECT_DOUBLE_EQ(lb, l1 + l2);
  for (std::size_t i = 0; i < both.size(); ++i) EXPECT_NEAR(both[i], g1[i] + g2[i], 1e-12);
}

TEST(MlpGradient, PredictedActionIsTheForwardArgmax) {
  const MlpPolicy p = random_network(3, {3, 8, 6});
  const std::vector<double> x{0.3, 0.1, -0.4};
  std::vector<double> grad(p.parameters().size(), 0.0), logits(6);
  MlpWorkspace ws(p);
  ActionIndex predicted = 99;
  accumulate_loss_gradient(p, x, 0, grad, ws, &predicted);
  p.forward(x, logits);
  EXPECT_EQ(predicted, argmax_lowest(logits));
}

TEST(MlpGradient, InputGradientMatchesCentralDifferences) {
  Xoshiro256 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const MlpPolicy p = random_network(100 + trial, {6, 7, 5, 6});
    std::vector<double> input(6);
    for (double& x : input) x = rng.symmetric(1.0);
    MlpWorkspace ws(p);
    for (ActionIndex a = 0; a < 6; ++a) {
      std::vector<double> grad(6);
      logit_input_gradient(p, input, a, grad, ws);
      const auto f = [&](const std::vector<double>& x) {
        std::vector<double> out(6);
        p.forward(x, out);
        return out[a];
      };
      std::vector<double> fd(6);
      for (std::size_t i = 0; i < 6; ++i) fd[i] = oracle::central_difference(f, input, i);
      EXPECT_LT(oracle::relative_error(grad, fd), 1e-4) << "trial " << trial << " action " << a;
    }
  }
}

TEST(MlpPolicy, ShiftingAllLogitsKeepsTheChoice) {
  MlpPolicy p = random_network(21, {3, 6, 6});
  Xoshiro256 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> s{static_cast<int>(rng.below(9)) - 4, static_cast<int>(rng.below(9)) - 4,
                             static_cast<int>(rng.below(9)) - 4};
    const ActionIndex before = select_action(p, s);
    MlpPolicy shifted = p;
    for (double& b : shifted.bias(1)) b += 2.5;
    EXPECT_EQ(select_action(shifted, s), before);
  }
}

TEST(MlpIo, RoundTripIsBitExact) {
  const MlpPolicy p = random_network(17, {10, 64, 64, 6});
  std::stringstream buf;
  write_mlp(p, buf);
  const MlpPolicy q = read_mlp(buf);
  EXPECT_EQ(p, q);
  EXPECT_EQ(p.checksum(), q.checksum());
}

TEST(MlpIo, FileRoundTripAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "rashomon_mlp_test.mlp";
  const MlpPolicy p = random_network(4, {2, 3, 6});
  write_mlp_file(p, path);
  EXPECT_EQ(read_mlp_file(path), p);
  std::filesystem::remove(path);
  EXPECT_THROW(read_mlp_file(path), MissingArtifactError);
}

TEST(MlpIo, MalformedFilesAreParseErrors) {
  std::istringstream bad_header("NET 1 2 3\n");
  EXPECT_THROW(read_mlp(bad_header), ParseError);
  std::istringstream short_body("MLP 1 1 2\nNORM 1\n0.5\n");
  EXPECT_THROW(read_mlp(short_body), ParseError);
  std::istringstream bad_value("MLP 1 1 2\nNORM 1\n0.5\n0.25\nx\n0 0\n");
  EXPECT_THROW(read_mlp(bad_value), ParseError);
}

TEST(MlpPolicy, ChecksumSeesEveryParameter) {
  MlpPolicy p = random_network(2, {3, 4, 6});
  const auto base = p.checksum();
  for (std::size_t i = 0; i < p.parameters().size(); i += 5) {
    MlpPolicy q = p;
    q.parameters()[i] += 1e-15;
    EXPECT_NE(q.checksum(), base) << i;
  }
}

}  // namespace
}  // namespace rashomon
