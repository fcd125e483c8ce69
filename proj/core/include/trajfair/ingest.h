#ifndef TRAJFAIR_INGEST_H_
#define TRAJFAIR_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trajfair {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

struct GeoPoint {
  double latitude = 0.0;   // degrees, WGS-84
  double longitude = 0.0;  // degrees, WGS-84
  Timestamp timestamp = 0;

  // latitude in [-90, 90], longitude in [-180, 180], timestamp >= 0.
  bool IsValid() const;

  bool operator==(const GeoPoint&) const = default;
};

struct Trajectory {
  std::string user_id;
  std::vector<GeoPoint> points;  // non-empty, non-decreasing timestamps

  bool operator==(const Trajectory&) const = default;
};

// Throws InvariantError if `traj` is empty, has an invalid point, or is not
// time-ordered.
void CheckTrajectory(const Trajectory& traj);

// Rows that were skipped while parsing, with one message per rejected row.
struct ParseDiagnostics {
  std::size_t rejected_rows = 0;
  std::vector<std::string> messages;

  void Reject(std::string message);
  void Merge(const ParseDiagnostics& other);
};

struct TrajectorySet {
  std::vector<Trajectory> trajectories;  // sorted by user_id
  ParseDiagnostics diagnostics;
};

// Column names used to read a trajectory CSV.
struct TrajectorySchema {
  std::string user = "user_id";
  std::string timestamp = "timestamp";
  std::string latitude = "lat";
  std::string longitude = "lon";
};

// Parses "YYYY-MM-DDTHH:MM:SS[.fff]Z" (the Z is required) or an integer epoch
// second count. Fractional seconds are truncated.
std::optional<Timestamp> ParseTimestamp(std::string_view text);

// Parses a calendar date and wall-clock time as UTC.
std::optional<Timestamp> ParseDateTime(std::string_view date,
                                       std::string_view time);

// Reads a trajectory CSV. Rows that fail to parse or violate the GeoPoint
// invariants are skipped and counted. Throws InputError on a missing file,
// a schema column absent from the header, or when no row is valid.
TrajectorySet LoadTrajectories(const std::filesystem::path& path,
                               const TrajectorySchema& schema = {});

// Parses one Geolife PLT file: 6 header lines, then
// `lat,lon,0,altitude,serial_days,date,time` records.
std::vector<GeoPoint> ParsePltFile(const std::filesystem::path& path,
                                   ParseDiagnostics& diagnostics);

// Reads a Geolife tree `<dir>/<user>/Trajectory/*.plt` (a top-level `Data/`
// directory is descended into). All files of one user merge into one
// time-sorted trajectory.
TrajectorySet LoadGeolife(const std::filesystem::path& directory);

// Last-observation-carried-forward resampling onto t0, t0+s, t0+2s, ... up to
// the last observation; an off-grid terminal observation is appended.
Trajectory Resample(const Trajectory& traj, Timestamp interval);

enum class OutcomeMetric {
  kUniquenessAccuracy,
  kPredictabilityAccuracy,
  kPrivacyGain,
  kUtilityDecline,
};

inline constexpr std::string_view kOriginalSource = "original";

std::string_view ToString(OutcomeMetric metric);
std::optional<OutcomeMetric> ParseOutcomeMetric(std::string_view name);

// Uniqueness and predictability belong to the original source; privacy gain
// and utility decline to the privacy models.
bool MetricAllowedForSource(OutcomeMetric metric, std::string_view source);

// One audited outcome column: a (source, metric) combination.
struct OutcomeColumn {
  std::string source;
  OutcomeMetric metric;

  std::string Label() const;
  auto operator<=>(const OutcomeColumn&) const = default;
};

// Per-user outcome values in [0, 1], keyed by (user, source, metric).
class OutcomeTable {
 public:
  // Throws InputError on an out-of-range value, a duplicate cell, or a
  // metric not allowed for the source.
  void Set(const std::string& user, const std::string& source,
           OutcomeMetric metric, double value);

  std::optional<double> Get(std::string_view user, std::string_view source,
                            OutcomeMetric metric) const;

  std::vector<std::string> Users() const;
  // "original" first, then model sources in lexicographic order.
  std::vector<std::string> Sources() const;
  // Every (source, metric) present in the table, ordered as Sources() then
  // by metric.
  std::vector<OutcomeColumn> Columns() const;
  std::size_t size() const { return cells_.size(); }

 private:
  struct Key {
    std::string user;
    std::string source;
    OutcomeMetric metric;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, double, std::less<>> cells_;
};

// Reads `user_id,source,metric,value`. Any invalid row is an InputError.
OutcomeTable LoadOutcomes(const std::filesystem::path& path);

class DemographicTable {
 public:
  // Throws InputError on an empty value or a duplicate (user, attribute).
  void Set(const std::string& user, const std::string& attribute,
           const std::string& value);

  std::optional<std::string> Get(std::string_view user,
                                 std::string_view attribute) const;
  std::vector<std::string> Attributes() const;
  // Subgroup value -> member user ids, for one attribute.
  std::map<std::string, std::vector<std::string>> Groups(
      std::string_view attribute) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string> values_;
};

// Reads `user_id,attribute,value`. Any invalid row is an InputError.
DemographicTable LoadDemographics(const std::filesystem::path& path);

}  // namespace trajfair

#endif  // TRAJFAIR_INGEST_H_
