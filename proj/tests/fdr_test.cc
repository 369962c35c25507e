#include <gtest/gtest.h>

#include "gen.h"
#include "oracles.h"
#include "pagerel/error.h"
#include "pagerel/fdr.h"

namespace pagerel {
namespace {

std::vector<double> RandomPValues(testing::Gen& gen) {
  std::vector<double> p(static_cast<size_t>(gen.Int(1, 100)));
  const double signal = gen.Real(0.0, 1.0);
  for (double& x : p) {
    if (gen.Coin(0.15)) {
      x = 0.05 * static_cast<double>(gen.Int(0, 10));  // exact ties
    } else if (gen.Coin(signal)) {
      x = std::pow(gen.Unit(), 4.0) * 0.05;
    } else {
      x = gen.Unit();
    }
  }
  return p;
}

TEST(BenjaminiHochberg, FourSmallPValues) {
  const BhResult r = BenjaminiHochberg(std::vector<double>{0.005, 0.01, 0.03, 0.04}, 0.05);
  EXPECT_EQ(r.rejected, (std::vector<bool>{true, true, true, true}));
  EXPECT_EQ(r.k_star, 4);
  const std::vector<double> adjusted = {0.02, 0.02, 0.04, 0.04};
  for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.adjusted_p[i], adjusted[i], 1e-15);
}

TEST(BenjaminiHochberg, AllNull) {
  const BhResult r = BenjaminiHochberg(std::vector<double>{1.0, 1.0, 1.0}, 0.2);
  EXPECT_EQ(r.rejected, (std::vector<bool>{false, false, false}));
  EXPECT_EQ(r.adjusted_p, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(r.k_star, 0);
}

TEST(BenjaminiHochberg, OneOfTwo) {
  const BhResult r = BenjaminiHochberg(std::vector<double>{0.01, 0.9}, 0.05);
  EXPECT_EQ(r.rejected, (std::vector<bool>{true, false}));
  EXPECT_NEAR(r.adjusted_p[0], 0.02, 1e-15);
  EXPECT_NEAR(r.adjusted_p[1], 0.9, 1e-15);
}

TEST(BenjaminiHochberg, Errors) {
  auto code = [](std::vector<double> p, double q) {
    try {
      BenjaminiHochberg(p, q);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  EXPECT_EQ(code({}, 0.05), ErrorCode::kEmptyInput);
  EXPECT_EQ(code({0.1, 1.2}, 0.05), ErrorCode::kBadPValue);
  EXPECT_EQ(code({-0.1}, 0.05), ErrorCode::kBadPValue);
  EXPECT_EQ(code({std::nan("")}, 0.05), ErrorCode::kBadPValue);
  EXPECT_EQ(code({0.1}, 0.0), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code({0.1}, 1.0), ErrorCode::kInvalidArgument);
}

TEST(BenjaminiHochbergProperty, MatchesBruteForce) {
  testing::Gen gen(31);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto p = RandomPValues(gen);
    const double q = gen.Real(0.01, 0.3);
    const BhResult r = BenjaminiHochberg(p, q);
    const oracle::BhOracle o = oracle::BenjaminiHochberg(p, q);
    EXPECT_EQ(r.rejected, o.rejected);
    for (size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(r.adjusted_p[i], o.adjusted[i], 1e-15);
      EXPECT_GE(r.adjusted_p[i], p[i]);
      EXPECT_EQ(r.rejected[i], r.adjusted_p[i] <= q);
    }
  }
}

TEST(BenjaminiHochbergProperty, PermutationEquivariant) {
  testing::Gen gen(32);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = RandomPValues(gen);
    std::vector<size_t> order(p.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    gen.Shuffle(order);
    std::vector<double> permuted;
    for (size_t i : order) permuted.push_back(p[i]);
    const BhResult a = BenjaminiHochberg(p, 0.1);
    const BhResult b = BenjaminiHochberg(permuted, 0.1);
    for (size_t j = 0; j < order.size(); ++j) {
      EXPECT_EQ(b.rejected[j], a.rejected[order[j]]);
      EXPECT_EQ(b.adjusted_p[j], a.adjusted_p[order[j]]);
    }
  }
}

TEST(BenjaminiHochbergProperty, LoweringAPValueNeverShrinksRejections) {
  testing::Gen gen(33);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = RandomPValues(gen);
    const BhResult before = BenjaminiHochberg(p, 0.1);
    const size_t i = static_cast<size_t>(gen.Int(0, static_cast<int64_t>(p.size()) - 1));
    p[i] *= gen.Unit();
    const BhResult after = BenjaminiHochberg(p, 0.1);
    for (size_t j = 0; j < p.size(); ++j) {
      if (before.rejected[j]) EXPECT_TRUE(after.rejected[j]);
    }
  }
}

TEST(BenjaminiHochbergProperty, TiesShareDecisions) {
  testing::Gen gen(34);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = RandomPValues(gen);
    const BhResult r = BenjaminiHochberg(p, 0.1);
    for (size_t i = 0; i < p.size(); ++i) {
      for (size_t j = 0; j < p.size(); ++j) {
        if (p[i] != p[j]) continue;
        EXPECT_EQ(r.rejected[i], r.rejected[j]);
        EXPECT_EQ(r.adjusted_p[i], r.adjusted_p[j]);
      }
    }
  }
}

}  // namespace
}  // namespace pagerel
