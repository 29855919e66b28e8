#include <gtest/gtest.h>

#include <cmath>

#include "irbm/data_io.hpp"
#include "irbm/energy.hpp"
#include "irbm/training.hpp"
#include "oracle.hpp"

namespace irbm {
namespace {

GradientSet filled(const ModelParams& p, double value) {
  GradientSet g = GradientSet::zeros_like(p);
  for (double& x : g.dW.values()) x = value;
  for (double& x : g.dbv) x = value;
  for (double& x : g.dbh) x = value;
  return g;
}

TEST(Adagrad, FirstAndSecondSteps) {
  ModelParams p = init_model(Variant::Rbm, 2, 2, kDefaultBeta, 0.0);
  AdagradState state = AdagradState::zeros_like(p);
  adagrad_update(p, filled(p, 1.0), state, 0.1, 1e-6);
  for (double w : p.W.values()) EXPECT_DOUBLE_EQ(w, -0.1 / (1e-6 + 1.0));
  for (double a : state.bv) EXPECT_EQ(a, 1.0);
  const double before = p.bh[0];
  adagrad_update(p, filled(p, 1.0), state, 0.1, 1e-6);
  EXPECT_DOUBLE_EQ(before - p.bh[0], 0.1 / (1e-6 + std::sqrt(2.0)));
}

TEST(Adagrad, ZeroGradientChangesNothing) {
  RngStream rng(1);
  ModelParams p = oracle::random_model(Variant::Orbm, 3, 2, 1.0, rng);
  const ModelParams before = p;
  AdagradState state = AdagradState::zeros_like(p);
  state.bv[1] = 4.0;
  const AdagradState state_before = state;
  adagrad_update(p, GradientSet::zeros_like(p), state, 0.5, 1e-6);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state, state_before);
}

TEST(Adagrad, AccumulatorIsNonnegativeAndNondecreasing) {
  RngStream rng(2);
  ModelParams p = oracle::random_model(Variant::Rbm, 3, 2, 1.0, rng);
  AdagradState state = AdagradState::zeros_like(p);
  for (int step = 0; step < 50; ++step) {
    const AdagradState prev = state;
    GradientSet g = GradientSet::zeros_like(p);
    for (double& x : g.dW.values()) x = rng.uniform(-1, 1);
    adagrad_update(p, g, state, 0.1, 1e-6);
    for (std::size_t i = 0; i < state.W.values().size(); ++i) {
      ASSERT_GE(state.W.values()[i], prev.W.values()[i]);
      ASSERT_GE(state.W.values()[i], 0.0);
    }
  }
}

TEST(Adagrad, ShapeMismatchThrows) {
  ModelParams p = init_model(Variant::Rbm, 2, 2);
  AdagradState state = AdagradState::zeros_like(init_model(Variant::Rbm, 2, 3));
  EXPECT_THROW(adagrad_update(p, GradientSet::zeros_like(p), state, 0.1, 1e-6), std::invalid_argument);
}

TEST(Regularization, Examples) {
  ModelParams p = init_model(Variant::Rbm, 1, 1, kDefaultBeta, 0.0);
  p.W(0, 0) = 1.0;
  p.bh[0] = -1.0;
  p.bv[0] = 1.0;
  ModelParams same = p;
  apply_regularization(same, RegKind::L2, 0.0, 0.1);
  EXPECT_EQ(same, p);

  ModelParams l2 = p;
  apply_regularization(l2, RegKind::L2, 0.01, 0.1);
  EXPECT_DOUBLE_EQ(l2.W(0, 0), 0.999);
  EXPECT_DOUBLE_EQ(l2.bh[0], -0.999);
  EXPECT_EQ(l2.bv[0], 1.0);

  ModelParams l1 = p;
  l1.W(0, 0) = 0.0005;
  l1.bh[0] = -0.0009;
  apply_regularization(l1, RegKind::L1, 0.01, 0.1);
  EXPECT_EQ(l1.W(0, 0), 0.0);
  EXPECT_EQ(l1.bh[0], 0.0);
  EXPECT_EQ(l1.bv[0], 1.0);

  ModelParams l1b = p;
  apply_regularization(l1b, RegKind::L1, 0.01, 0.1);
  EXPECT_DOUBLE_EQ(l1b.W(0, 0), 0.999);
  EXPECT_DOUBLE_EQ(l1b.bh[0], -0.999);
}

TEST(Regularization, PerDimensionRates) {
  ModelParams p = init_model(Variant::Rbm, 2, 1, kDefaultBeta, 0.0);
  p.W(0, 0) = p.W(0, 1) = 1.0;
  AdagradState state = AdagradState::zeros_like(p);
  state.W(0, 0) = 4.0;
  state.W(0, 1) = 16.0;
  apply_regularization(p, RegKind::L1, 0.1, state, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(p.W(0, 0), 1.0 - 0.5 / 2.0 * 0.1);
  EXPECT_DOUBLE_EQ(p.W(0, 1), 1.0 - 0.5 / 4.0 * 0.1);
}

std::vector<BinaryVector> rows(const Dataset& d, std::size_t begin, std::size_t end) {
  std::vector<BinaryVector> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(d.example(i));
  return out;
}

TEST(TrainUpdate, IrbmGrowsFromOneZeroUnit) {
  const Dataset data = synthetic_patterns(8, 3, 0.05, 64, 3);
  ModelParams p = init_model(Variant::Irbm, 8, 1);
  TrainConfig cfg;
  cfg.gibbs_steps = 1;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(4);
  std::size_t prev = p.hidden();
  for (int step = 0; step < 10; ++step) {
    const UpdateMetrics m = train_update(p, rows(data, 0, 16), pcd, ada, cfg, rng);
    EXPECT_LE(m.hidden, prev + 1);
    if (m.grew) {
      for (double w : p.W.row(p.hidden() - 1)) EXPECT_EQ(w, 0.0);
      EXPECT_EQ(p.bh.back(), 0.0);
      for (double a : ada.W.row(p.hidden() - 1)) EXPECT_EQ(a, 0.0);
      EXPECT_EQ(ada.bh.back(), 0.0);
    }
    prev = m.hidden;
  }
  EXPECT_GT(p.hidden(), 1u);
}

TEST(TrainUpdate, ZeroLearningRateFreezesParameters) {
  const Dataset data = synthetic_patterns(6, 2, 0.1, 32, 5);
  for (Variant variant : {Variant::Rbm, Variant::Orbm}) {
    ModelParams p = init_model(variant, 6, 4, kDefaultBeta, 0.5, 6);
    const ModelParams before = p;
    TrainConfig cfg;
    cfg.lr = 0.0;
    cfg.reg = RegKind::L1;
    cfg.lambda = 1e-3;
    PcdState pcd;
    AdagradState ada = AdagradState::zeros_like(p);
    RngStream rng(7);
    for (int step = 0; step < 5; ++step) train_update(p, rows(data, 0, 32), pcd, ada, cfg, rng);
    EXPECT_EQ(p, before);
  }
}

TEST(TrainUpdate, Cd1RaisesVisibleMeanOnAllOnes) {
  ModelParams p = init_model(Variant::Rbm, 4, 3, kDefaultBeta, 0.01, 8);
  TrainConfig cfg;
  cfg.method = NegativePhase::Cd;
  cfg.gibbs_steps = 1;
  cfg.lr = 0.05;
  const std::vector<BinaryVector> batch{{1, 1, 1, 1}};
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(9);
  auto mean_visible = [&] {
    double s = 0;
    for (double b : p.bv) s += sigmoid(b);
    return s / 4;
  };
  std::vector<double> trace{mean_visible()};
  for (int step = 1; step <= 200; ++step) {
    train_update(p, batch, pcd, ada, cfg, rng);
    if (step % 50 == 0) trace.push_back(mean_visible());
  }
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GT(trace[i], trace[i - 1]);
  EXPECT_TRUE(pcd.chains.empty());
}

TEST(TrainUpdate, PcdChainsPersist) {
  const Dataset data = synthetic_patterns(6, 2, 0.1, 16, 10);
  ModelParams p = init_model(Variant::Orbm, 6, 3, kDefaultBeta, 0.3, 11);
  TrainConfig cfg;
  cfg.gibbs_steps = 3;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(12);
  train_update(p, rows(data, 0, 8), pcd, ada, cfg, rng);
  ASSERT_EQ(pcd.chains.size(), 8u);

  // Replay the next update's negative phase from the carried chains.
  std::vector<ChainState> expected = pcd.chains;
  RngStream replay = rng;
  for (auto& c : expected) c = run_chain(p, c, cfg.gibbs_steps, replay);
  train_update(p, rows(data, 8, 16), pcd, ada, cfg, rng);
  ASSERT_EQ(pcd.chains.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(pcd.chains[i].v, expected[i].v);
    EXPECT_EQ(pcd.chains[i].z, expected[i].z);
  }
}

TEST(TrainUpdate, CdRestartsFromMinibatch) {
  const Dataset data = synthetic_patterns(6, 2, 0.1, 8, 13);
  ModelParams p = init_model(Variant::Rbm, 6, 3, kDefaultBeta, 0.3, 14);
  TrainConfig cfg;
  cfg.method = NegativePhase::Cd;
  cfg.gibbs_steps = 2;
  cfg.lr = 0.0;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(15);
  const auto batch = rows(data, 0, 8);
  RngStream replay = rng;
  train_update(p, batch, pcd, ada, cfg, rng);
  for (const auto& v : batch) {
    ChainState c = init_chain(p, ChainInit::FromExample, replay, v);
    run_chain(p, c, cfg.gibbs_steps, replay);
  }
  EXPECT_EQ(rng, replay);
}

TEST(TrainUpdate, CapStopsGrowth) {
  const Dataset data = synthetic_patterns(4, 2, 0.1, 32, 16);
  ModelParams p = init_model(Variant::Irbm, 4, 1);
  TrainConfig cfg;
  cfg.gibbs_steps = 1;
  cfg.max_hidden_cap = 3;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(17);
  bool capped = false;
  for (int step = 0; step < 40; ++step) {
    const UpdateMetrics m = train_update(p, rows(data, 0, 32), pcd, ada, cfg, rng);
    ASSERT_LE(p.hidden(), 3u);
    capped = capped || m.cap_reached;
    if (m.cap_reached)
      for (const auto& c : pcd.chains) ASSERT_LE(c.z, p.hidden());
  }
  EXPECT_TRUE(capped);
}

TEST(TrainUpdate, SampledPositivePhaseRuns) {
  const Dataset data = synthetic_patterns(6, 2, 0.1, 16, 18);
  ModelParams p = init_model(Variant::Orbm, 6, 3, kDefaultBeta, 0.3, 19);
  TrainConfig cfg;
  cfg.positive = PositivePhase::SampledZ;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(20);
  const ModelParams before = p;
  train_update(p, rows(data, 0, 16), pcd, ada, cfg, rng);
  EXPECT_NO_THROW(validate(p));
  EXPECT_NE(p, before);
}

TEST(Train, ZeroEpochsIsIdentity) {
  const Dataset data = synthetic_patterns(5, 2, 0.1, 20, 21);
  TrainConfig cfg;
  cfg.epochs = 0;
  TrainerState s = make_trainer(init_model(Variant::Rbm, 5, 3, kDefaultBeta, 0.1, 22), cfg);
  const ModelParams before = s.params;
  train(s, data, cfg);
  EXPECT_EQ(s.params, before);
  EXPECT_TRUE(s.history.empty());
}

TEST(Train, IrbmSizeNeverShrinksWithoutL1) {
  const Dataset data = synthetic_patterns(8, 3, 0.05, 200, 23);
  for (RegKind reg : {RegKind::None, RegKind::L2}) {
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.reg = reg;
    cfg.lambda = reg == RegKind::None ? 0.0 : 1e-2;
    cfg.batch_size = 32;
    cfg.gibbs_steps = 2;
    TrainerState s = make_trainer(init_model(Variant::Irbm, 8, 1), cfg);
    train(s, data, cfg);
    ASSERT_EQ(s.history.size(), 8u);
    for (std::size_t e = 1; e < s.history.size(); ++e) EXPECT_GE(s.history[e].hidden, s.history[e - 1].hidden);
  }
}

TEST(TrainUpdate, L1ShrinksThresholdedTrailingUnits) {
  RngStream init(24);
  ModelParams p = oracle::random_model(Variant::Irbm, 4, 3, 1e-3, init);
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.reg = RegKind::L1;
  cfg.lambda = 1e6;
  cfg.gibbs_steps = 1;
  PcdState pcd;
  AdagradState ada = AdagradState::zeros_like(p);
  RngStream rng(24);
  const std::vector<BinaryVector> batch{{1, 0, 1, 0}};
  UpdateMetrics m = train_update(p, batch, pcd, ada, cfg, rng);
  EXPECT_EQ(m.shrunk, 0u);
  cfg.lr = 1.0;
  m = train_update(p, batch, pcd, ada, cfg, rng);
  EXPECT_GE(m.shrunk, 1u);
  EXPECT_EQ(ada.W.rows(), p.hidden());
  EXPECT_EQ(ada.bh.size(), p.hidden());
}

TEST(Train, SeededRunsAreIdentical) {
  const Dataset data = synthetic_patterns(6, 3, 0.05, 100, 25);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.reg = RegKind::L1;
  cfg.lambda = 1e-3;
  TrainerState a = make_trainer(init_model(Variant::Irbm, 6, 1), cfg);
  TrainerState b = make_trainer(init_model(Variant::Irbm, 6, 1), cfg);
  train(a, data, cfg);
  train(b, data, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.adagrad, b.adagrad);
  EXPECT_EQ(a.pcd, b.pcd);
}

TEST(Train, RejectsMismatchedData) {
  TrainConfig cfg;
  TrainerState s = make_trainer(init_model(Variant::Rbm, 5, 3), cfg);
  EXPECT_THROW(train(s, synthetic_patterns(4, 2, 0.1, 10, 1), cfg), std::invalid_argument);
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace irbm
