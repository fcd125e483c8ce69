#include "trajfair/similarity.h"

#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "synthetic.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

using testing::Rng;

Heatmap RandomHeatmap(const GridSpec& spec, std::int64_t max_count, double density,
                      Rng& rng) {
  Heatmap h{spec, Matrix<std::int64_t>(spec.rows(), spec.cols(), 0), 0};
  for (auto& c : h.counts.data()) {
    if (rng.Uniform() < density) c = 1 + static_cast<std::int64_t>(rng.Index(max_count));
  }
  return h;
}

GridSpec Grid(std::size_t rows, std::size_t cols) {
  return GridSpec::FromOrigin(39.9, 116.4, rows, cols, 100.0);
}

TEST(SsimParams, Validation) {
  SsimParams p;
  EXPECT_NO_THROW(p.Validate());
  EXPECT_DOUBLE_EQ(p.c1(), 2.55 * 2.55);
  EXPECT_DOUBLE_EQ(p.c2(), 7.65 * 7.65);
  p.window = 8;
  EXPECT_THROW(p.Validate(), ConfigError);
  p.window = 3;
  p.k1 = 0;
  EXPECT_THROW(p.Validate(), ConfigError);
}

TEST(SsimMap, IdentityIsOneEverywhere) {
  Rng rng(1);
  const auto h = RandomHeatmap(Grid(12, 9), 30, 0.4, rng);
  const auto map = ComputeSsimMap(h, h, SsimParams{});
  for (double v : map.values.data()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(SsimMap, TwoEmptyHeatmapsAreOne) {
  const Heatmap zero{Grid(8, 8), Matrix<std::int64_t>(8, 8, 0), 0};
  const auto map = ComputeSsimMap(zero, zero, SsimParams{});
  for (double v : map.values.data()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(SsimMap, MatchesPerWindowOracle) {
  Rng rng(2);
  SsimParams params;
  params.window = 3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = RandomHeatmap(Grid(8, 8), 50, 0.5, rng);
    const auto b = RandomHeatmap(Grid(8, 8), 50, 0.5, rng);
    const auto [na, nb] = testing::OracleNormalize(a.counts, b.counts);
    const auto oracle = testing::OracleSsimMap(na, nb, 3, params.c1(), params.c2());
    const auto map = ComputeSsimMap(a, b, params);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      EXPECT_NEAR(map.values.data()[i], oracle.data()[i], 1e-9);
    }
    EXPECT_NEAR(SsimGlobal(a, b, params), testing::Mean(oracle), 1e-9);
  }
}

TEST(SsimMap, BoundedAndSymmetric) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = RandomHeatmap(Grid(10, 14), 5, 0.3, rng);
    const auto b = RandomHeatmap(Grid(10, 14), 500, 0.1, rng);
    const auto ab = ComputeSsimMap(a, b, SsimParams{});
    const auto ba = ComputeSsimMap(b, a, SsimParams{});
    for (std::size_t i = 0; i < ab.values.size(); ++i) {
      EXPECT_GE(ab.values.data()[i], -1.0);
      EXPECT_LE(ab.values.data()[i], 1.0);
      EXPECT_NEAR(ab.values.data()[i], ba.values.data()[i], 1e-12);
    }
    EXPECT_NEAR(SsimGlobal(a, b, SsimParams{}), SsimGlobal(b, a, SsimParams{}), 1e-12);
  }
}

TEST(SsimMap, LogIntensityMatchesOracleOnTransformedCounts) {
  Rng rng(4);
  SsimParams params;
  params.window = 5;
  params.log_intensity = true;
  const auto a = RandomHeatmap(Grid(9, 9), 100, 0.5, rng);
  const auto b = RandomHeatmap(Grid(9, 9), 100, 0.5, rng);
  double peak = 0;
  for (auto c : a.counts.data()) peak = std::max(peak, std::log1p(static_cast<double>(c)));
  for (auto c : b.counts.data()) peak = std::max(peak, std::log1p(static_cast<double>(c)));
  auto scaled = [&](const Heatmap& h) {
    Matrix<double> m(9, 9);
    for (std::size_t i = 0; i < m.size(); ++i) {
      m.data()[i] = std::log1p(static_cast<double>(h.counts.data()[i])) * 255.0 / peak;
    }
    return m;
  };
  const auto oracle = testing::OracleSsimMap(scaled(a), scaled(b), 5, params.c1(), params.c2());
  EXPECT_NEAR(SsimGlobal(a, b, params), testing::Mean(oracle), 1e-9);
}

TEST(SsimMap, Errors) {
  const Heatmap small{Grid(4, 4), Matrix<std::int64_t>(4, 4, 0), 0};
  EXPECT_THROW(ComputeSsimMap(small, small, SsimParams{}), ConfigError);  // window 7
  const Heatmap other{Grid(5, 5), Matrix<std::int64_t>(5, 5, 0), 0};
  SsimParams p;
  p.window = 3;
  EXPECT_THROW(ComputeSsimMap(small, other, p), ConfigError);
}

TEST(EffectiveSsim, SingleUserCohortIsOne) {
  Rng rng(6);
  const auto h = RandomHeatmap(Grid(10, 10), 20, 0.3, rng);
  EXPECT_NEAR(EffectiveSsim(h, h, SsimParams{}), 1.0, 1e-12);
}

TEST(EffectiveSsim, EmptyUserIsBelowOne) {
  Rng rng(7);
  const auto integrated = RandomHeatmap(Grid(10, 10), 20, 0.3, rng);
  const Heatmap empty{integrated.spec, Matrix<std::int64_t>(10, 10, 0), 0};
  EXPECT_LT(EffectiveSsim(empty, integrated, SsimParams{}), 1.0);
}

TEST(EffectiveSsim, IsMaskedMeanOfOracleMap) {
  Rng rng(8);
  const auto spec = Grid(12, 12);
  std::vector<Heatmap> users;
  for (int i = 0; i < 3; ++i) users.push_back(RandomHeatmap(spec, 10, 0.15, rng));
  const auto integrated = IntegrateHeatmaps(users);
  SsimParams params;
  params.window = 5;
  for (const auto& u : users) {
    const auto [nu, ni] = testing::OracleNormalize(u.counts, integrated.counts);
    const auto oracle = testing::OracleSsimMap(nu, ni, 5, params.c1(), params.c2());
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      if (integrated.counts.data()[i] > 0) {
        sum += oracle.data()[i];
        ++n;
      }
    }
    EXPECT_NEAR(EffectiveSsim(u, integrated, params), sum / n, 1e-9);
  }
}

TEST(EffectiveSsim, EmptyIntegratedIsAnError) {
  const Heatmap zero{Grid(8, 8), Matrix<std::int64_t>(8, 8, 0), 0};
  EXPECT_THROW(EffectiveSsim(zero, zero, SsimParams{}), InputError);
}

TEST(PairwiseSsim, MatchesDirectCallsAndIsSymmetric) {
  Rng rng(10);
  const auto spec = Grid(9, 11);
  std::vector<Heatmap> users;
  for (int i = 0; i < 4; ++i) users.push_back(RandomHeatmap(spec, 8, 0.3, rng));
  users.push_back(users[1]);  // duplicate
  const auto m = PairwiseSsim(users, SsimParams{});
  ASSERT_EQ(m.rows(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(m(i, i), 1.0);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(m(i, j), m(j, i));
      if (i != j) EXPECT_NEAR(m(i, j), SsimGlobal(users[i], users[j], SsimParams{}), 1e-12);
    }
  }
  EXPECT_NEAR(m(1, 4), 1.0, 1e-12);
}

TEST(PairwiseSsim, NeedsTwoUsers) {
  const std::vector<Heatmap> one{{Grid(8, 8), Matrix<std::int64_t>(8, 8, 0), 0}};
  EXPECT_THROW(PairwiseSsim(one, SsimParams{}), InputError);
}

TEST(PairwiseSsim, CsvExportHasLabelledHeader) {
  Matrix<double> m(2, 2, 1.0);
  m(0, 1) = m(1, 0) = 0.25;
  const std::vector<std::string> labels{"a", "b"};
  std::ostringstream out;
  WriteLabeledMatrixCsv(out, labels, m);
  EXPECT_EQ(out.str(), "user_id,a,b\na,1,0.25\nb,0.25,1\n");
}

}  // namespace
}  // namespace trajfair
