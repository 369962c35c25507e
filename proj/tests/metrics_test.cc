#include <gtest/gtest.h>

#include "gen.h"
#include "oracles.h"
#include "pagerel/metrics.h"

namespace pagerel {
namespace {

std::vector<RelevanceLabel> L(std::initializer_list<int> levels) {
  std::vector<RelevanceLabel> out;
  for (int l : levels) out.push_back(RelevanceLabel::FromLevel(l));
  return out;
}

std::vector<int> Levels(const std::vector<RelevanceLabel>& labels) {
  std::vector<int> out;
  for (RelevanceLabel l : labels) out.push_back(l.level());
  return out;
}

QueryRecord Record(std::vector<RelevanceLabel> control,
                   std::vector<RelevanceLabel> treatment) {
  QueryRecord r;
  r.query_id = "q";
  r.control.labels = std::move(control);
  r.treatment = RankedPage{std::move(treatment)};
  return r;
}

TEST(Sdcg, ConstantPages) {
  for (int k : {1, 2, 7, 25, 100}) {
    const std::vector<RelevanceLabel> top(k, RelevanceLabel::FromLevel(5));
    const std::vector<RelevanceLabel> bottom(k, RelevanceLabel::FromLevel(1));
    EXPECT_EQ(SdcgAtK(top, k).value, 1.0);
    EXPECT_EQ(SdcgAtK(bottom, k).value, 0.2);
  }
}

TEST(Sdcg, TwoResultPage) {
  // 50-digit evaluation: (5 + 1/log2 3) / (5 + 5/log2 3).
  EXPECT_NEAR(SdcgAtK(L({5, 1}), 2).value, 0.6905177542123667, 1e-15);
  EXPECT_NEAR(SdcgAtK(L({5, 1}), 2).value, 0.690518, 1e-6);
  EXPECT_NEAR(SdcgAtK(L({3}), 1).value, 0.6, 1e-15);
}

TEST(Sdcg, ShortPagesTruncateBothSums) {
  const SdcgScore s = SdcgAtK(L({5, 1}), 25);
  EXPECT_TRUE(s.short_page);
  EXPECT_EQ(s.k_effective, 2);
  EXPECT_EQ(s.value, SdcgAtK(L({5, 1}), 2).value);
  const SdcgScore full = SdcgAtK(L({5, 1, 3}), 2);
  EXPECT_FALSE(full.short_page);
  EXPECT_EQ(full.k_effective, 2);
}

TEST(Sdcg, Errors) {
  try {
    SdcgAtK(std::vector<RelevanceLabel>{}, 25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPage);
  }
  EXPECT_THROW(SdcgAtK(L({3}), 0), Error);
}

TEST(Sdcg, MatchesHighPrecisionOracle) {
  testing::Gen gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto labels = gen.Labels(static_cast<size_t>(gen.Int(1, 40)));
    const int k = static_cast<int>(gen.Int(1, 30));
    const double got = SdcgAtK(labels, k).value;
    EXPECT_NEAR(got, oracle::Sdcg(Levels(labels), k), 1e-14);
    EXPECT_GE(got, 0.2);
    EXPECT_LE(got, 1.0);
  }
}

TEST(PairedDelta, Examples) {
  EXPECT_EQ(PairedDelta(Record(L({3, 4}), L({3, 4})), 25), 0.0);
  EXPECT_NEAR(PairedDelta(Record(L({1, 1, 1}), L({5, 5, 5})), 3), 0.8, 1e-15);
  EXPECT_NEAR(PairedDelta(Record(L({1, 1}), L({5, 1})), 2), 0.490518, 1e-6);
  QueryRecord single;
  single.control.labels = L({3});
  try {
    PairedDelta(single, 25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArm);
  }
}

TEST(SdcgProperty, RaisingOneLabelRaisesScore) {
  testing::Gen gen(5);
  for (int trial = 0; trial < 2000; ++trial) {
    auto labels = gen.Labels(static_cast<size_t>(gen.Int(1, 30)));
    const int k = static_cast<int>(gen.Int(1, 30));
    const size_t depth = std::min<size_t>(labels.size(), static_cast<size_t>(k));
    const size_t i = static_cast<size_t>(gen.Int(0, static_cast<int64_t>(depth) - 1));
    if (labels[i].level() == 5) continue;
    const double before = SdcgAtK(labels, k).value;
    labels[i] = RelevanceLabel::FromLevel(gen.Int(labels[i].level() + 1, 5));
    EXPECT_GT(SdcgAtK(labels, k).value, before);
  }
}

TEST(SdcgProperty, MovingBetterLabelUpRaisesScore) {
  testing::Gen gen(6);
  for (int trial = 0; trial < 2000; ++trial) {
    auto labels = gen.Labels(static_cast<size_t>(gen.Int(2, 30)));
    const int k = static_cast<int>(labels.size());
    const size_t i = static_cast<size_t>(gen.Int(0, k - 2));
    const size_t j = static_cast<size_t>(gen.Int(static_cast<int64_t>(i) + 1, k - 1));
    if (labels[i] == labels[j]) continue;
    if (labels[i] < labels[j]) std::swap(labels[i], labels[j]);
    auto worse = labels;
    std::swap(worse[i], worse[j]);
    EXPECT_GT(SdcgAtK(labels, k).value, SdcgAtK(worse, k).value);
  }
}

TEST(SdcgProperty, ResultsBeyondDepthIgnored) {
  testing::Gen gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = static_cast<int>(gen.Int(1, 25));
    auto labels = gen.Labels(static_cast<size_t>(k));
    const double base = SdcgAtK(labels, k).value;
    const auto tail = gen.Labels(static_cast<size_t>(gen.Int(1, 10)));
    labels.insert(labels.end(), tail.begin(), tail.end());
    EXPECT_EQ(SdcgAtK(labels, k).value, base);
  }
}

TEST(PairedDeltaProperty, SwappingArmsNegates) {
  testing::Gen gen(8);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = gen.Labels(static_cast<size_t>(gen.Int(1, 30)));
    const auto b = gen.Labels(static_cast<size_t>(gen.Int(1, 30)));
    const double d = PairedDelta(Record(a, b), 25);
    EXPECT_EQ(PairedDelta(Record(b, a), 25), -d);
    EXPECT_GE(d, -0.8 - 1e-15);
    EXPECT_LE(d, 0.8 + 1e-15);
  }
}

}  // namespace
}  // namespace pagerel
