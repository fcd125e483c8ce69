#include "trajfair/entropy.h"

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "synthetic.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

using testing::Rng;

GridSpec Grid() { return GridSpec::FromOrigin(39.9, 116.4, 20, 20, 100.0); }

GeoPoint AtCell(const GridSpec& spec, std::size_t row, std::size_t col, Timestamp t) {
  return {spec.min_lat() + (static_cast<double>(row) + 0.5) * 100.0 / kMetersPerDegree,
          spec.min_lon() + (static_cast<double>(col) + 0.5) * 100.0 / spec.MetersPerDegreeLon(),
          t};
}

Heatmap FromCounts(const std::vector<std::int64_t>& counts) {
  const auto spec = Grid();
  Heatmap h{spec, Matrix<std::int64_t>(spec.rows(), spec.cols(), 0), 0};
  for (std::size_t i = 0; i < counts.size(); ++i) h.counts(i, i) = counts[i];
  return h;
}

TEST(ShannonEntropy, Examples) {
  EXPECT_EQ(ShannonEntropy(FromCounts({7})), 0.0);
  EXPECT_DOUBLE_EQ(ShannonEntropy(FromCounts({2, 2})), 1.0);
  EXPECT_NEAR(ShannonEntropy(FromCounts({3, 1})), 0.8113, 1e-4);
  EXPECT_NEAR(ShannonEntropy(FromCounts({3, 1})),
              -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25)), 1e-15);
}

TEST(ShannonEntropy, FromTrajectory) {
  const auto spec = Grid();
  const Trajectory t{"u", {AtCell(spec, 1, 1, 0), AtCell(spec, 1, 1, 1), AtCell(spec, 1, 1, 2),
                           AtCell(spec, 4, 2, 3)}};
  EXPECT_NEAR(ShannonEntropy(t, spec), 0.8112781244591328, 1e-15);
}

TEST(ShannonEntropy, BoundedByLogOfDistinctCells) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> counts(1 + rng.Index(10));
    for (auto& c : counts) c = 1 + static_cast<std::int64_t>(rng.Index(20));
    const double h = ShannonEntropy(FromCounts(counts));
    const double bound = std::log2(static_cast<double>(counts.size()));
    EXPECT_LE(h, bound + 1e-12);
    std::vector<double> as_double(counts.begin(), counts.end());
    EXPECT_NEAR(h, testing::OracleShannonBits(as_double), 1e-12);
    const bool uniform = std::set<std::int64_t>(counts.begin(), counts.end()).size() == 1;
    if (uniform) {
      EXPECT_NEAR(h, bound, 1e-12);
    } else {
      EXPECT_LT(h, bound - 1e-12);
    }
  }
}

TEST(ShannonEntropy, NoInBoxPointsIsAnError) {
  EXPECT_THROW(ShannonEntropy(FromCounts({})), InputError);
}

TEST(FuzzyEntropy, ConstantSeriesIsZero) {
  const std::vector<double> series(50, 3.5);
  EXPECT_EQ(FuzzyEntropy(series, 2, 0.2, 2), 0.0);
}

TEST(FuzzyEntropy, AlternationIsBelowRandom) {
  Rng rng(2);
  std::vector<double> alternating, random;
  for (int i = 0; i < 200; ++i) {
    alternating.push_back(i % 2);
    random.push_back(rng.Uniform());
  }
  const double r = 0.2 * 0.5;
  const double fa = FuzzyEntropy(alternating, 2, r, 2);
  const double fr = FuzzyEntropy(random, 2, r, 2);
  EXPECT_LT(fa, fr);
  EXPECT_NEAR(fa, testing::OracleFuzzyEntropy(alternating, 2, r, 2), 1e-10);
  EXPECT_NEAR(fr, testing::OracleFuzzyEntropy(random, 2, r, 2), 1e-10);
}

TEST(FuzzyEntropy, MatchesOracleAcrossParameters) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(10 + rng.Index(60));
    double x = 0;
    for (auto& v : s) v = (x += rng.Normal());
    const int m = 1 + static_cast<int>(rng.Index(3));
    const double r = rng.Uniform(0.05, 2.0);
    const double n_pow = 1.0 + static_cast<double>(rng.Index(3));
    EXPECT_NEAR(FuzzyEntropy(s, m, r, n_pow), testing::OracleFuzzyEntropy(s, m, r, n_pow), 1e-10);
  }
}

TEST(FuzzyEntropy, Errors) {
  const std::vector<double> three{1, 2, 3};
  EXPECT_THROW(FuzzyEntropy(three, 2, 0.2, 2), InputError);
  const std::vector<double> ten(10, 1.0);
  EXPECT_THROW(FuzzyEntropy(ten, 2, 0.0, 2), ConfigError);
}

TEST(LonLatEntropy, StationaryUserIsZero) {
  Trajectory t{"u", {}};
  for (int i = 0; i < 30; ++i) t.points.push_back({39.95, 116.35, i * 600});
  EXPECT_EQ(LonLatEntropy(t, 600, FuzzyParams{}), 0.0);
}

TEST(LonLatEntropy, EastWestShuttleIsHalfTheLongitudeEntropy) {
  Rng rng(4);
  Trajectory t{"u", {}};
  for (int i = 0; i < 80; ++i) {
    t.points.push_back({39.95, 116.30 + 0.01 * (i % 3) + 0.001 * rng.Uniform(), i * 600});
  }
  std::vector<double> lon;
  for (const auto& p : Resample(t, 600).points) lon.push_back(p.longitude);
  double mean = 0, var = 0;
  for (double v : lon) mean += v;
  mean /= static_cast<double>(lon.size());
  for (double v : lon) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(lon.size()));
  const double expected = 0.5 * testing::OracleFuzzyEntropy(lon, 2, 0.2 * sigma, 2);
  EXPECT_NEAR(LonLatEntropy(t, 600, FuzzyParams{}), expected, 1e-10);
}

TEST(LonLatEntropy, RandomWalkIsPositive) {
  const auto cohort = testing::RandomWalkCohort(3, 500, 5);
  for (const auto& t : cohort) EXPECT_GT(LonLatEntropy(t, 600, FuzzyParams{}), 0.0);
}

TEST(SampleEntropy2D, ConstantImageIsZero) {
  const Matrix<double> image(6, 6, 2.0);
  EXPECT_EQ(SampleEntropy2D(image, 1, 0.1), 0.0);
}

TEST(SampleEntropy2D, MatchesFourLoopOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix<double> image(6, 6);
    for (auto& v : image.data()) v = static_cast<double>(rng.Index(3));
    const double r = 0.5 + static_cast<double>(trial % 2);
    const auto got = SampleEntropy2D(image, 1, r);
    const auto want = testing::OracleSampleEntropy2D(image, 1, r);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (want) EXPECT_NEAR(*got, *want, 1e-12);
  }
}

TEST(SampleEntropy2D, LargerWindowsMatchOracle) {
  Rng rng(7);
  Matrix<double> image(9, 8);
  for (auto& v : image.data()) v = rng.Uniform() < 0.7 ? 0.0 : rng.Uniform(0, 3);
  for (int m : {1, 2, 3}) {
    const auto got = SampleEntropy2D(image, m, 0.6);
    const auto want = testing::OracleSampleEntropy2D(image, m, 0.6);
    ASSERT_EQ(got.has_value(), want.has_value()) << "m=" << m;
    if (want) EXPECT_NEAR(*got, *want, 1e-12);
  }
}

TEST(SampleEntropy2D, SingleBrightPixel) {
  Matrix<double> image(6, 6, 0.0);
  image(2, 3) = 10.0;
  const auto got = SampleEntropy2D(image, 1, 1.0);
  ASSERT_TRUE(got.has_value());
  EXPECT_GE(*got, 0.0);
  EXPECT_NEAR(*got, *testing::OracleSampleEntropy2D(image, 1, 1.0), 1e-12);
}

TEST(SampleEntropy2D, NoMatchesIsUndefined) {
  Matrix<double> image(4, 4);
  for (std::size_t i = 0; i < image.size(); ++i) image.data()[i] = 10.0 * static_cast<double>(i);
  EXPECT_FALSE(SampleEntropy2D(image, 1, 0.5).has_value());
}

TEST(SampleEntropy2D, Errors) {
  const Matrix<double> tiny(2, 5, 0.0);
  EXPECT_THROW(SampleEntropy2D(tiny, 1, 0.5), InputError);
  const Matrix<double> image(6, 6, 0.0);
  EXPECT_THROW(SampleEntropy2D(image, 1, 0.0), ConfigError);
}

TEST(HeatmapEntropy, UsesLogCountsAndRelativeTolerance) {
  Rng rng(8);
  const auto spec = GridSpec::FromOrigin(39.9, 116.4, 7, 7, 100.0);
  Heatmap h{spec, Matrix<std::int64_t>(7, 7, 0), 0};
  for (auto& c : h.counts.data()) c = static_cast<std::int64_t>(rng.Index(4));
  Matrix<double> image(7, 7);
  for (std::size_t i = 0; i < image.size(); ++i) {
    image.data()[i] = std::log1p(static_cast<double>(h.counts.data()[i]));
  }
  double mean = 0, var = 0;
  for (double v : image.data()) mean += v;
  mean /= 49.0;
  for (double v : image.data()) var += (v - mean) * (v - mean);
  const double r = 0.2 * std::sqrt(var / 49.0);
  const auto want = testing::OracleSampleEntropy2D(image, 1, r);
  const auto got = HeatmapEntropy(h, HeatmapEntropyParams{});
  ASSERT_EQ(got.has_value(), want.has_value());
  if (want) EXPECT_NEAR(*got, *want, 1e-12);
}

TEST(NoveltySeries, StationaryUser) {
  const auto spec = Grid();
  Trajectory t{"u", {}};
  for (int i = 0; i < 5; ++i) t.points.push_back(AtCell(spec, 3, 3, i * 600));
  EXPECT_EQ(BuildNoveltySeries(t, spec, 600).bits, (std::vector<std::uint8_t>{1, 0, 0, 0, 0}));
}

TEST(NoveltySeries, ReturnToFirstCell) {
  const auto spec = Grid();
  const Trajectory t{"u", {AtCell(spec, 1, 1, 0), AtCell(spec, 1, 2, 600),
                           AtCell(spec, 2, 2, 1200), AtCell(spec, 1, 1, 1800)}};
  EXPECT_EQ(BuildNoveltySeries(t, spec, 600).bits, (std::vector<std::uint8_t>{1, 1, 1, 0}));
}

TEST(NoveltySeries, OnesCountDistinctCells) {
  const auto cohort = testing::RandomWalkCohort(4, 400, 9);
  const auto spec = GridSpec::ForCohort(cohort, 100.0);
  for (const auto& t : cohort) {
    const auto series = BuildNoveltySeries(t, spec, 60);
    std::set<Cell> cells;
    for (const auto& p : Resample(t, 60).points) cells.insert(*ProjectToCell(p, spec));
    std::size_t ones = 0;
    for (auto b : series.bits) ones += b;
    EXPECT_EQ(ones, cells.size());
    EXPECT_EQ(series.bits.front(), 1);
  }
}

TEST(ActualEntropy, FirstLambdaIsOne) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> s(1 + rng.Index(30));
    for (auto& b : s) b = static_cast<std::uint8_t>(rng.Index(2));
    EXPECT_EQ(LempelZivLambdas(s).front(), 1u);
  }
}

TEST(ActualEntropy, HandComputedExample) {
  const std::vector<std::uint8_t> s{1, 0, 0, 0};
  EXPECT_EQ(LempelZivLambdas(s), (std::vector<std::size_t>{1, 1, 2, 2}));
  EXPECT_EQ(testing::OracleLambdas(s), (std::vector<std::size_t>{1, 1, 2, 2}));
  EXPECT_DOUBLE_EQ(ActualEntropy(s), std::log(4.0) / 1.5);
}

TEST(ActualEntropy, RegularSeriesIsBelowRandom) {
  Rng rng(11);
  std::vector<std::uint8_t> regular(64, 0), random(64);
  regular[0] = 1;
  for (auto& b : random) b = static_cast<std::uint8_t>(rng.Index(2));
  EXPECT_LT(ActualEntropy(regular), ActualEntropy(random));
  EXPECT_EQ(ActualEntropy(regular), testing::OracleActualEntropy(regular));
  EXPECT_EQ(ActualEntropy(random), testing::OracleActualEntropy(random));
}

TEST(ActualEntropy, NeedsTwoSymbols) {
  const std::vector<std::uint8_t> one{1};
  EXPECT_THROW(ActualEntropy(one), InputError);
}

TEST(EntropyProfile, StationaryUserHasAllZeroEntropies) {
  const auto spec = Grid();
  Trajectory t{"still", {}};
  for (int i = 0; i < 40; ++i) t.points.push_back(AtCell(spec, 5, 5, i * 300));
  const auto p = ComputeEntropyProfile(t, spec, EntropyConfig{});
  EXPECT_EQ(p.se, 0.0);
  EXPECT_EQ(p.le, 0.0);
  ASSERT_TRUE(p.he.has_value());
  EXPECT_EQ(*p.he, 0.0);
  EXPECT_EQ(p.ae, 0.0);
}

TEST(EntropyProfile, RandomWalkValuesAreNonNegative) {
  const auto cohort = testing::RandomWalkCohort(5, 600, 12);
  const auto spec = GridSpec::ForCohort(cohort, 100.0);
  for (const auto& t : cohort) {
    const auto p = ComputeEntropyProfile(t, spec, EntropyConfig{});
    EXPECT_GE(p.se, 0.0);
    EXPECT_GE(p.ae, 0.0);
    ASSERT_TRUE(p.he.has_value());
    EXPECT_GE(*p.he, 0.0);
    EXPECT_EQ(p.user_id, t.user_id);
  }
}

TEST(EntropySimilarity, RangeNormalization) {
  const std::vector<double> values{0.0, 1.0, 0.5};
  const auto m = RangeSimilarity(values);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(m(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 2), 0.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m(i, i), 1.0);
}

TEST(EntropySimilarity, IdenticalProfilesAreFullySimilar) {
  const std::vector<EntropyProfile> profiles(4, EntropyProfile{"x", 1.0, 2.0, 0.5, 0.3});
  for (auto kind : {EntropyKind::kSE, EntropyKind::kLE, EntropyKind::kHE, EntropyKind::kAE,
                    EntropyKind::kEOTs}) {
    const auto m = EntropySimilarity(profiles, kind);
    for (double v : m.data()) EXPECT_EQ(v, 1.0);
  }
}

TEST(EntropySimilarity, EotsIsTheMinimumOfTheKinds) {
  Rng rng(13);
  std::vector<EntropyProfile> profiles;
  for (int i = 0; i < 12; ++i) {
    profiles.push_back({"u" + std::to_string(i), rng.Uniform(0, 5), rng.Uniform(0, 2),
                        rng.Uniform(0, 3), rng.Uniform(0, 1)});
  }
  const auto eots = EntropySimilarity(profiles, EntropyKind::kEOTs);
  std::vector<Matrix<double>> single;
  for (auto kind : {EntropyKind::kSE, EntropyKind::kLE, EntropyKind::kHE, EntropyKind::kAE}) {
    single.push_back(EntropySimilarity(profiles, kind));
  }
  for (std::size_t i = 0; i < eots.size(); ++i) {
    double lowest = 1.0;
    for (const auto& m : single) {
      EXPECT_LE(eots.data()[i], m.data()[i]);
      EXPECT_GE(m.data()[i], 0.0);
      EXPECT_LE(m.data()[i], 1.0);
      lowest = std::min(lowest, m.data()[i]);
    }
    EXPECT_EQ(eots.data()[i], lowest);
  }
  for (std::size_t i = 0; i < eots.rows(); ++i) {
    for (std::size_t j = 0; j < eots.cols(); ++j) EXPECT_EQ(eots(i, j), eots(j, i));
  }
}

TEST(EntropySimilarity, Errors) {
  const std::vector<EntropyProfile> one{{"a", 1, 1, 1, 1}};
  EXPECT_THROW(EntropySimilarity(one, EntropyKind::kSE), InputError);
  const std::vector<EntropyProfile> missing{{"a", 1, 1, std::nullopt, 1}, {"b", 1, 1, 1.0, 1}};
  EXPECT_THROW(EntropySimilarity(missing, EntropyKind::kHE), InputError);
}

TEST(EntropyKind, NamesRoundTrip) {
  for (auto kind : {EntropyKind::kSE, EntropyKind::kLE, EntropyKind::kHE, EntropyKind::kAE,
                    EntropyKind::kEOTs}) {
    EXPECT_EQ(ParseEntropyKind(ToString(kind)), kind);
  }
  EXPECT_FALSE(ParseEntropyKind("XE"));
}

TEST(EntropyProfile, CsvExport) {
  const std::vector<EntropyProfile> profiles{{"a", 1.5, 0.25, std::nullopt, 2.0}};
  std::ostringstream out;
  WriteEntropyProfilesCsv(out, profiles);
  EXPECT_EQ(out.str(), "user_id,se,le,he,ae\na,1.5,0.25,,2\n");
}

}  // namespace
}  // namespace trajfair
