#include "synthetic.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "trajfair/csv.h"
#include "trajfair/grid.h"

namespace trajfair::testing {

double Rng::Normal() {
  // Box-Muller; 1 - U keeps the log argument in (0, 1].
  const double u = 1.0 - Uniform();
  const double v = Uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::string UserId(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%02zu", index);
  return buf;
}

std::vector<Trajectory> RandomWalkCohort(std::size_t users, std::size_t steps,
                                         std::uint64_t seed,
                                         const WalkOptions& options) {
  Rng rng(seed);
  const double lat_per_m = 1.0 / kMetersPerDegree;
  const double lon_per_m =
      1.0 / (kMetersPerDegree * std::cos(options.center_lat * std::numbers::pi / 180.0));
  std::vector<Trajectory> cohort;
  for (std::size_t u = 0; u < users; ++u) {
    Trajectory traj{UserId(u), {}};
    double north = rng.Uniform(-0.5, 0.5) * options.start_spread_m;
    double east = rng.Uniform(-0.5, 0.5) * options.start_spread_m;
    for (std::size_t s = 0; s < steps; ++s) {
      traj.points.push_back({options.center_lat + north * lat_per_m,
                             options.center_lon + east * lon_per_m,
                             options.start_time + static_cast<Timestamp>(s) * options.step_s});
      north += options.step_m * rng.Normal();
      east += options.step_m * rng.Normal();
    }
    cohort.push_back(std::move(traj));
  }
  return cohort;
}

OutcomeTable RandomOutcomes(const std::vector<std::string>& users,
                            std::uint64_t seed) {
  Rng rng(seed);
  OutcomeTable table;
  for (const auto& user : users) {
    table.Set(user, "original", OutcomeMetric::kUniquenessAccuracy, rng.Uniform(0.05, 1.0));
    table.Set(user, "original", OutcomeMetric::kPredictabilityAccuracy, rng.Uniform(0.05, 1.0));
    for (const char* model : {"mo-pae", "trajgan"}) {
      table.Set(user, model, OutcomeMetric::kPrivacyGain, rng.Uniform(0.05, 1.0));
      table.Set(user, model, OutcomeMetric::kUtilityDecline, rng.Uniform(0.05, 1.0));
    }
  }
  return table;
}

Matrix<double> Blobs(const std::vector<std::vector<double>>& centers,
                     std::size_t per_blob, double spread, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dims = centers.front().size();
  Matrix<double> points(centers.size() * per_blob, dims);
  for (std::size_t b = 0; b < centers.size(); ++b) {
    for (std::size_t p = 0; p < per_blob; ++p) {
      for (std::size_t d = 0; d < dims; ++d) {
        points(b * per_blob + p, d) = centers[b][d] + rng.Uniform(-spread, spread);
      }
    }
  }
  return points;
}

Matrix<double> RandomMatrix(std::size_t rows, std::size_t cols, double lo,
                            double hi, Rng& rng) {
  Matrix<double> m(rows, cols);
  for (auto& v : m.data()) v = rng.Uniform(lo, hi);
  return m;
}

TempDir::TempDir() {
  static std::uint64_t counter = 0;
  std::random_device entropy;
  const auto tag = std::to_string(entropy()) + "_" + std::to_string(counter++);
  path_ = std::filesystem::temp_directory_path() / ("trajfair_test_" + tag);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::Write(const std::string& name,
                                     const std::string& text) const {
  const auto file = path_ / name;
  std::filesystem::create_directories(file.parent_path());
  std::ofstream(file, std::ios::binary) << text;
  return file;
}

void WriteTrajectoryCsv(const std::filesystem::path& path,
                        const std::vector<Trajectory>& trajectories) {
  std::ofstream out(path, std::ios::binary);
  csv::WriteRow(out, {"user_id", "timestamp", "lat", "lon"});
  for (const auto& t : trajectories) {
    for (const auto& p : t.points) {
      csv::WriteRow(out, {t.user_id, std::to_string(p.timestamp),
                          csv::FormatDouble(p.latitude), csv::FormatDouble(p.longitude)});
    }
  }
}

void WriteOutcomesCsv(const std::filesystem::path& path,
                      const OutcomeTable& outcomes) {
  std::ofstream out(path, std::ios::binary);
  csv::WriteRow(out, {"user_id", "source", "metric", "value"});
  for (const auto& user : outcomes.Users()) {
    for (const auto& column : outcomes.Columns()) {
      if (const auto v = outcomes.Get(user, column.source, column.metric)) {
        csv::WriteRow(out, {user, column.source, std::string(ToString(column.metric)),
                            csv::FormatDouble(*v)});
      }
    }
  }
}

void WriteDemographicsCsv(const std::filesystem::path& path,
                          const DemographicTable& demographics,
                          const std::vector<std::string>& users) {
  std::ofstream out(path, std::ios::binary);
  csv::WriteRow(out, {"user_id", "attribute", "value"});
  for (const auto& user : users) {
    for (const auto& attribute : demographics.Attributes()) {
      if (const auto v = demographics.Get(user, attribute)) {
        csv::WriteRow(out, {user, attribute, *v});
      }
    }
  }
}

}  // namespace trajfair::testing
