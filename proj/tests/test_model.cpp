#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "emocnn/model.hpp"
#include "emocnn/rmsprop.hpp"
#include "oracles.hpp"

using namespace emocnn;

namespace {

ModelConfig config_for(Index seq_len, Index vocab = 10) {
  ModelConfig c;
  c.seq_len = seq_len;
  c.vocab_size = vocab;
  return c;
}

std::vector<int> random_ids(std::mt19937_64& gen, Index length, Index vocab) {
  std::uniform_int_distribution<int> id(0, static_cast<int>(vocab) - 1);
  std::vector<int> ids(static_cast<std::size_t>(length));
  for (auto& v : ids) v = id(gen);
  return ids;
}

}  // namespace

TEST(ModelConfig, ShapeChainForSixtyFour) {
  const auto s = config_for(64).shapes();
  EXPECT_EQ(s, (ShapeChain{64, 62, 31, 29, 14, 448}));
}

TEST(ModelConfig, ShapeChainForSixteen) {
  EXPECT_EQ(config_for(16).shapes(), (ShapeChain{16, 14, 7, 5, 2, 64}));
}

TEST(ModelConfig, ShortestAcceptedLengthIsTen) {
  EXPECT_EQ(config_for(10).shapes(), (ShapeChain{10, 8, 4, 2, 1, 32}));
  EXPECT_NO_THROW(config_for(10).validate());
  EXPECT_EQ(kMinSequenceLength, 10);
}

TEST(ModelConfig, NineLeavesSecondPoolEmpty) {
  EXPECT_EQ(config_for(9).shapes(), (ShapeChain{9, 7, 3, 1, 0, 0}));
  EXPECT_THROW(config_for(9).validate(), std::invalid_argument);
}

TEST(ModelConfig, RejectsEight) { EXPECT_THROW(config_for(8).validate(), std::invalid_argument); }

TEST(ModelConfig, RejectsEmptyVocabulary) { EXPECT_THROW(config_for(16, 0).validate(), std::invalid_argument); }

TEST(ModelConfig, ParameterCountsAtSixtyFour) {
  const auto c = config_for(64, 500);
  EXPECT_EQ(parameter_count(c, ParamId::conv1_kernel) + parameter_count(c, ParamId::conv1_bias), 24640);
  EXPECT_EQ(parameter_count(c, ParamId::conv2_kernel) + parameter_count(c, ParamId::conv2_bias), 6176);
  EXPECT_EQ(parameter_count(c, ParamId::dense1_weight) + parameter_count(c, ParamId::dense1_bias), 7184);
  EXPECT_EQ(parameter_count(c, ParamId::dense2_weight) + parameter_count(c, ParamId::dense2_bias), 68);
  EXPECT_EQ(parameter_count(c, false), 24640 + 6176 + 7184 + 68);
  EXPECT_EQ(parameter_count(c), 24640 + 6176 + 7184 + 68 + 500 * 128);
}

TEST(ModelConfig, CoverageOfPositions) {
  EXPECT_TRUE(config_for(10).covers_all_positions());
  EXPECT_TRUE(config_for(22).covers_all_positions());
  EXPECT_FALSE(config_for(16).covers_all_positions());
  EXPECT_FALSE(config_for(64).covers_all_positions());
}

TEST(InitModel, DeterministicForSeed) {
  const auto a = init_model<double>(config_for(16), 42);
  const auto b = init_model<double>(config_for(16), 42);
  const auto c = init_model<double>(config_for(16), 43);
  EXPECT_TRUE(a.params.bitwise_equal(b.params));
  EXPECT_FALSE(a.params.bitwise_equal(c.params));
}

TEST(InitModel, BiasesAreZeroAndWeightsInRange) {
  const auto m = init_model<double>(config_for(16), 1);
  for (auto id : {ParamId::conv1_bias, ParamId::conv2_bias, ParamId::dense1_bias, ParamId::dense2_bias}) {
    for (double v : m.params[id].values()) EXPECT_EQ(v, 0.0);
  }
  EXPECT_LE(m.params[ParamId::embedding].flat().cwiseAbs().maxCoeff(), 0.05);
  const double conv1_limit = std::sqrt(6.0 / (3 * 128 + 3 * 64));
  EXPECT_LE(m.params[ParamId::conv1_kernel].flat().cwiseAbs().maxCoeff(), conv1_limit);
  const double dense2_limit = std::sqrt(6.0 / (16 + 4));
  EXPECT_LE(m.params[ParamId::dense2_weight].flat().cwiseAbs().maxCoeff(), dense2_limit);
  EXPECT_GT(m.params[ParamId::dense2_weight].flat().cwiseAbs().maxCoeff(), 0.0);
}

TEST(InitModel, RejectsInvalidConfig) {
  EXPECT_THROW(init_model<double>(config_for(8), 0), std::invalid_argument);
}

TEST(Forward, ProducesTheDimensionChain) {
  std::mt19937_64 gen(1);
  for (Index L : {10, 16, 64}) {
    const auto m = init_model<double>(config_for(L), 3);
    const auto fc = forward(m, random_ids(gen, L, 10));
    const auto s = m.config.shapes();
    EXPECT_EQ(fc.embedded.shape(), (Shape{L, 128}));
    EXPECT_EQ(fc.conv1_pre.shape(), (Shape{s.conv1, 64}));
    EXPECT_EQ(fc.pool1.output.shape(), (Shape{s.pool1, 64}));
    EXPECT_EQ(fc.conv2_pre.shape(), (Shape{s.conv2, 32}));
    EXPECT_EQ(fc.pool2.output.shape(), (Shape{s.pool2, 32}));
    EXPECT_EQ(fc.flat.shape(), (Shape{s.flatten}));
    EXPECT_EQ(fc.dense1_act.shape(), (Shape{16}));
    EXPECT_EQ(fc.probs.shape(), (Shape{4}));
    EXPECT_NEAR(fc.probs.flat().sum(), 1.0, 1e-12);
  }
}

TEST(Forward, RejectsWrongLength) {
  const auto m = init_model<double>(config_for(16), 3);
  EXPECT_THROW(forward(m, std::vector<int>(15, 0)), std::invalid_argument);
}

TEST(Forward, RejectsIdOutsideVocabulary) {
  const auto m = init_model<double>(config_for(10), 3);
  std::vector<int> ids(10, 0);
  ids[4] = 10;
  EXPECT_THROW(forward(m, ids), std::out_of_range);
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(7);
  const auto m = init_model<double>(config_for(10), 5);
  std::vector<std::vector<int>> inputs{random_ids(gen, 10, 10), random_ids(gen, 10, 10)};
  const auto checks = oracle::gradient_check(m, inputs, {2, 0}, 7);
  for (const auto& c : checks) {
    EXPECT_GT(c.checked, 0u) << c.name;
    EXPECT_LT(c.relative_error, 1e-4) << c.name;
    EXPECT_LT(c.max_abs_error, 1e-7) << c.name;
  }
}

TEST(Backward, OneHotFormMatchesLabelForm) {
  std::mt19937_64 gen(2);
  const auto m = init_model<double>(config_for(10), 5);
  const auto fc = forward(m, random_ids(gen, 10, 10));
  const auto a = model_backward(m, fc, Index{3});
  const auto b = model_backward(m, fc, Tensor<double>({4}, {0, 0, 0, 1}));
  EXPECT_TRUE(a.bitwise_equal(b));
  EXPECT_THROW(model_backward(m, fc, Tensor<double>({4}, {0, 1, 0, 1})), std::invalid_argument);
}

TEST(Backward, UnreferencedEmbeddingRowsGetZeroGradient) {
  const auto m = init_model<double>(config_for(10), 5);
  const std::vector<int> ids{0, 0, 0, 0, 2, 3, 2, 5, 3, 2};
  const auto g = model_backward(m, forward(m, ids), Index{1});
  const auto& ge = g[ParamId::embedding];
  for (Index row : {1, 4, 6, 7, 8, 9}) {
    for (Index c = 0; c < 128; ++c) ASSERT_EQ(ge(row, c), 0.0) << "row " << row;
  }
  EXPECT_GT(ge.matrix().row(2).cwiseAbs().sum(), 0.0);
}

TEST(Backward, DeadReluBlocksEverythingUpstream) {
  auto m = init_model<double>(config_for(10), 5);
  m.params[ParamId::conv2_bias].flat().setConstant(-1e3);
  const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 0};
  const auto g = model_backward(m, forward(m, ids), Index{0});
  for (auto id : {ParamId::embedding, ParamId::conv1_kernel, ParamId::conv1_bias, ParamId::conv2_kernel,
                  ParamId::conv2_bias, ParamId::dense1_weight, ParamId::dense2_weight}) {
    EXPECT_EQ(g[id].flat().cwiseAbs().maxCoeff(), 0.0) << kParamNames[static_cast<std::size_t>(id)];
  }
  EXPECT_GT(g[ParamId::dense2_bias].flat().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, RequiresCompletedForwardPass) {
  const auto m = init_model<double>(config_for(10), 5);
  ForwardCache<double> empty;
  EXPECT_THROW(model_backward(m, empty, Index{0}), std::logic_error);
}

TEST(Backward, RejectsStaleCache) {
  auto m = init_model<double>(config_for(10), 5);
  const std::vector<int> ids(10, 3);
  const auto fc = forward(m, ids);
  auto state = RmsPropState<double>::for_model(m.config);
  rmsprop_step(m, model_backward(m, fc, Index{0}), state);
  EXPECT_EQ(m.generation, 1u);
  EXPECT_THROW(model_backward(m, fc, Index{0}), std::logic_error);
  EXPECT_NO_THROW(model_backward(m, forward(m, ids), Index{0}));
}

TEST(Training, FiftyStepsReduceLossOnOneExample) {
  std::mt19937_64 gen(4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto m = init_model<double>(config_for(16), seed);
    const auto ids = random_ids(gen, 16, 10);
    const Index label = static_cast<Index>(seed % 4);
    const double initial = loss(forward(m, ids), label);
    auto state = RmsPropState<double>::for_model(m.config);
    for (int step = 0; step < 50; ++step) rmsprop_step(m, model_backward(m, forward(m, ids), label), state);
    EXPECT_LT(loss(forward(m, ids), label), initial);
  }
}

TEST(Training, RmsPropStepRejectsNonFiniteBeforeMutating) {
  auto m = init_model<double>(config_for(10), 5);
  const auto before = m.params;
  auto grads = ParamSet<double>::zeros(m.config);
  grads[ParamId::dense2_bias](0) = std::numeric_limits<double>::quiet_NaN();
  grads[ParamId::embedding](0, 0) = 1.0;
  auto state = RmsPropState<double>::for_model(m.config);
  EXPECT_THROW(rmsprop_step(m, grads, state), NonFiniteGradient);
  EXPECT_TRUE(m.params.bitwise_equal(before));
  EXPECT_EQ(m.generation, 0u);
}

TEST(Precision, SinglePrecisionForwardAgreesWithDouble) {
  std::mt19937_64 gen(9);
  const auto m = init_model<double>(config_for(16), 5);
  Model<float> mf{m.config, ParamSet<float>::zeros(m.config), 0};
  for (std::size_t i = 0; i < kParamCount; ++i) mf.params.tensors[i] = m.params.tensors[i].cast<float>();
  const auto ids = random_ids(gen, 16, 10);
  const auto pd = forward(m, ids).probs;
  const auto pf = forward(mf, ids).probs;
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(pd(i), pf(i), 1e-5);
}
