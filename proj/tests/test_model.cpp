#include <gtest/gtest.h>

#include "irbm/model.hpp"
#include "irbm/rng.hpp"
#include "oracle.hpp"

namespace irbm {
namespace {

TEST(InitModel, EmptyIrbm) {
  const ModelParams p = init_model(Variant::Irbm, 4, 0, 1.01);
  EXPECT_EQ(p.hidden(), 0u);
  EXPECT_EQ(p.visible(), 4u);
  EXPECT_EQ(p.W.rows(), 0u);
  EXPECT_NO_THROW(validate(p));
}

TEST(InitModel, ZeroScaleGivesZeroParams) {
  const ModelParams p = init_model(Variant::Rbm, 2, 2, kDefaultBeta, 0.0);
  for (double w : p.W.values()) EXPECT_EQ(w, 0.0);
  for (double b : p.bv) EXPECT_EQ(b, 0.0);
  for (double b : p.bh) EXPECT_EQ(b, 0.0);
}

TEST(InitModel, SeededAndBounded) {
  const ModelParams a = init_model(Variant::Rbm, 2, 2, kDefaultBeta, 0.01, 7);
  const ModelParams b = init_model(Variant::Rbm, 2, 2, kDefaultBeta, 0.01, 7);
  EXPECT_EQ(a, b);
  const ModelParams c = init_model(Variant::Orbm, 30, 20, kDefaultBeta, 0.01, 8);
  bool any_nonzero = false;
  for (double w : c.W.values()) {
    EXPECT_LE(std::abs(w), 0.01);
    any_nonzero = any_nonzero || w != 0.0;
  }
  EXPECT_TRUE(any_nonzero);
  for (double b : c.bv) EXPECT_EQ(b, 0.0);
  for (double b : c.bh) EXPECT_EQ(b, 0.0);
}

TEST(InitModel, RejectsBadArguments) {
  EXPECT_THROW(init_model(Variant::Rbm, 0, 2), std::invalid_argument);
  EXPECT_THROW(init_model(Variant::Rbm, 2, 0), std::invalid_argument);
  EXPECT_THROW(init_model(Variant::Orbm, 2, 0), std::invalid_argument);
  try {
    init_model(Variant::Irbm, 3, 1, 1.0);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "beta must exceed 1");
  }
  EXPECT_THROW(init_model(Variant::Orbm, 3, 1, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(init_model(Variant::Rbm, 3, 1, 0.5));
}

TEST(Variant, ParseRoundTrip) {
  for (Variant v : {Variant::Rbm, Variant::Orbm, Variant::Irbm}) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_THROW(parse_variant("grbm"), std::invalid_argument);
}

TEST(LegalSet, Membership) {
  EXPECT_TRUE(in_legal_set(BinaryVector{1, 1, 0}, 2));
  EXPECT_FALSE(in_legal_set(BinaryVector{1, 0, 1}, 2));
  EXPECT_TRUE(in_legal_set(BinaryVector{0, 0, 0}, 0));
}

TEST(Grow, AppendsZeroUnit) {
  ModelParams p = init_model(Variant::Irbm, 3, 0);
  p = grow_hidden_unit(std::move(p));
  ASSERT_EQ(p.hidden(), 1u);
  for (double w : p.W.row(0)) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(p.bh[0], 0.0);
}

TEST(Grow, KeepsExistingRowsBitIdentical) {
  RngStream rng(1);
  const ModelParams before = oracle::random_model(Variant::Irbm, 4, 3, 1.0, rng);
  const ModelParams after = grow_hidden_unit(grow_hidden_unit(before));
  ASSERT_EQ(after.hidden(), 5u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(after.W(i, j), before.W(i, j));
  for (std::size_t i = 3; i < 5; ++i) {
    for (double w : after.W.row(i)) EXPECT_EQ(w, 0.0);
    EXPECT_EQ(after.bh[i], 0.0);
  }
  EXPECT_EQ(after.bv, before.bv);
}

TEST(Grow, RejectsFiniteVariants) {
  EXPECT_THROW(grow_hidden_unit(init_model(Variant::Rbm, 2, 2)), std::invalid_argument);
  EXPECT_THROW(grow_hidden_unit(init_model(Variant::Orbm, 2, 2)), std::invalid_argument);
  EXPECT_THROW(shrink_trailing_zero_units(init_model(Variant::Orbm, 2, 2)), std::invalid_argument);
}

ModelParams irbm_with_rows(const std::vector<bool>& nonzero) {
  ModelParams p = init_model(Variant::Irbm, 2, 0);
  for (bool nz : nonzero) {
    p = grow_hidden_unit(std::move(p));
    if (nz) p.W(p.hidden() - 1, 0) = 0.5;
  }
  return p;
}

TEST(Shrink, RemovesTrailingBlockOnly) {
  EXPECT_EQ(shrink_trailing_zero_units(irbm_with_rows({true, false, false})).hidden(), 1u);
  EXPECT_EQ(shrink_trailing_zero_units(irbm_with_rows({false, true})).hidden(), 2u);
  EXPECT_EQ(shrink_trailing_zero_units(irbm_with_rows({false, false})).hidden(), 0u);
  EXPECT_EQ(trailing_zero_units(irbm_with_rows({true, false, false})), 2u);
}

TEST(Shrink, NonzeroBiasKeepsUnit) {
  ModelParams p = irbm_with_rows({true, false});
  p.bh[1] = -1e-300;
  EXPECT_EQ(shrink_trailing_zero_units(p).hidden(), 2u);
}

TEST(Lifecycle, GrowThenShrinkIsIdentity) {
  RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p = oracle::random_model(Variant::Irbm, 3, 1 + rng.below(4), 1.0, rng);
    EXPECT_EQ(shrink_trailing_zero_units(grow_hidden_unit(p)), p);
  }
}

TEST(Lifecycle, ShapesStayConsistent) {
  RngStream rng(6);
  ModelParams p = init_model(Variant::Irbm, 5, 1);
  for (int step = 0; step < 200; ++step) {
    if (rng.uniform() < 0.6) {
      p = grow_hidden_unit(std::move(p));
      if (rng.uniform() < 0.5) p.W(p.hidden() - 1, rng.below(5)) = 1.0;
    } else {
      p = shrink_trailing_zero_units(std::move(p));
    }
    ASSERT_EQ(p.W.rows(), p.hidden());
    ASSERT_EQ(p.W.cols(), p.visible());
    ASSERT_NO_THROW(validate(p));
  }
}

}  // namespace
}  // namespace irbm
