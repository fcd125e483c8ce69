#include "trajfair/ingest.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "trajfair/csv.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

template <typename T>
std::optional<T> ParseNumber(std::string_view text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<double> ParseFinite(std::string_view text) {
  auto value = ParseNumber<double>(text);
  if (!value || !std::isfinite(*value)) return std::nullopt;
  return value;
}

bool AllDigits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void SortByTime(std::vector<GeoPoint>& points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const GeoPoint& a, const GeoPoint& b) {
                     return a.timestamp < b.timestamp;
                   });
}

std::vector<Trajectory> Assemble(
    std::map<std::string, std::vector<GeoPoint>> by_user) {
  std::vector<Trajectory> out;
  out.reserve(by_user.size());
  for (auto& [user, points] : by_user) {
    if (points.empty()) continue;
    SortByTime(points);
    Trajectory traj{user, std::move(points)};
    CheckTrajectory(traj);
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace

bool GeoPoint::IsValid() const {
  return std::isfinite(latitude) && std::isfinite(longitude) &&
         latitude >= -90.0 && latitude <= 90.0 && longitude >= -180.0 &&
         longitude <= 180.0 && timestamp >= 0;
}

void CheckTrajectory(const Trajectory& traj) {
  if (traj.points.empty()) {
    throw InvariantError("trajectory of user '" + traj.user_id + "' is empty");
  }
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    if (!traj.points[i].IsValid()) {
      throw InvariantError("trajectory of user '" + traj.user_id +
                           "' has an invalid point at index " +
                           std::to_string(i));
    }
    if (i > 0 && traj.points[i].timestamp < traj.points[i - 1].timestamp) {
      throw InvariantError("trajectory of user '" + traj.user_id +
                           "' is not time-ordered");
    }
  }
}

void ParseDiagnostics::Reject(std::string message) {
  ++rejected_rows;
  messages.push_back(std::move(message));
}

void ParseDiagnostics::Merge(const ParseDiagnostics& other) {
  rejected_rows += other.rejected_rows;
  messages.insert(messages.end(), other.messages.begin(), other.messages.end());
}

std::optional<Timestamp> ParseDateTime(std::string_view date,
                                       std::string_view time) {
  // YYYY-MM-DD and HH:MM:SS
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') return std::nullopt;
  if (time.size() != 8 || time[2] != ':' || time[5] != ':') return std::nullopt;
  const auto y = date.substr(0, 4), mo = date.substr(5, 2), d = date.substr(8, 2);
  const auto h = time.substr(0, 2), mi = time.substr(3, 2), s = time.substr(6, 2);
  for (auto part : {y, mo, d, h, mi, s}) {
    if (!AllDigits(part)) return std::nullopt;
  }
  const int year = *ParseNumber<int>(y);
  const unsigned month = *ParseNumber<unsigned>(mo);
  const unsigned day = *ParseNumber<unsigned>(d);
  const int hour = *ParseNumber<int>(h);
  const int minute = *ParseNumber<int>(mi);
  const int second = *ParseNumber<int>(s);
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hour * 3600 + minute * 60 +
         second;
}

std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  if (AllDigits(text)) return ParseNumber<Timestamp>(text);
  // YYYY-MM-DDTHH:MM:SS[.fraction]Z
  if (text.size() < 20 || text.back() != 'Z' || text[10] != 'T') {
    return std::nullopt;
  }
  const auto fraction = text.substr(19, text.size() - 20);
  if (!fraction.empty() &&
      (fraction[0] != '.' || !AllDigits(fraction.substr(1)))) {
    return std::nullopt;
  }
  return ParseDateTime(text.substr(0, 10), text.substr(11, 8));
}

TrajectorySet LoadTrajectories(const std::filesystem::path& path,
                               const TrajectorySchema& schema) {
  if (!std::filesystem::exists(path)) {
    throw InputError("trajectory file not found: " + path.string());
  }
  const csv::Table table = csv::ReadFile(path);
  auto column = [&](const std::string& name) {
    auto idx = table.Column(name);
    if (!idx) {
      throw InputError(path.string() + ": column '" + name +
                       "' not found in header");
    }
    return *idx;
  };
  const std::size_t user_col = column(schema.user);
  const std::size_t time_col = column(schema.timestamp);
  const std::size_t lat_col = column(schema.latitude);
  const std::size_t lon_col = column(schema.longitude);
  const std::size_t width =
      std::max({user_col, time_col, lat_col, lon_col}) + 1;

  TrajectorySet result;
  std::map<std::string, std::vector<GeoPoint>> by_user;
  for (const auto& record : table.records) {
    const std::string where = path.filename().string() + ":" +
                              std::to_string(record.line) + ": ";
    if (record.fields.size() < width) {
      result.diagnostics.Reject(where + "too few fields");
      continue;
    }
    const std::string& user = record.fields[user_col];
    const auto ts = ParseTimestamp(record.fields[time_col]);
    const auto lat = ParseFinite(record.fields[lat_col]);
    const auto lon = ParseFinite(record.fields[lon_col]);
    if (user.empty() || !ts || !lat || !lon) {
      result.diagnostics.Reject(where + "unparseable field");
      continue;
    }
    const GeoPoint point{*lat, *lon, *ts};
    if (!point.IsValid()) {
      result.diagnostics.Reject(where + "coordinate or timestamp out of range");
      continue;
    }
    by_user[user].push_back(point);
  }
  result.trajectories = Assemble(std::move(by_user));
  if (result.trajectories.empty()) {
    throw InputError(path.string() + ": no valid trajectory rows");
  }
  return result;
}

std::vector<GeoPoint> ParsePltFile(const std::filesystem::path& path,
                                   ParseDiagnostics& diagnostics) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  constexpr int kHeaderLines = 6;
  std::vector<GeoPoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= kHeaderLines) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::Trim(line).empty()) continue;
    const auto fields = csv::SplitRecord(line);
    const std::string where =
        path.filename().string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 7) {
      diagnostics.Reject(where + "expected 7 fields");
      continue;
    }
    const auto lat = ParseFinite(fields[0]);
    const auto lon = ParseFinite(fields[1]);
    const auto ts = ParseDateTime(fields[5], fields[6]);
    if (!lat || !lon || !ts) {
      diagnostics.Reject(where + "unparseable field");
      continue;
    }
    const GeoPoint point{*lat, *lon, *ts};
    if (!point.IsValid()) {
      diagnostics.Reject(where + "coordinate or timestamp out of range");
      continue;
    }
    points.push_back(point);
  }
  if (in.bad()) throw InputError("read error on " + path.string());
  return points;
}

TrajectorySet LoadGeolife(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw InputError("Geolife directory not found: " + directory.string());
  }
  fs::path root = directory;
  if (fs::is_directory(root / "Data")) root /= "Data";

  std::vector<fs::path> user_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_directory(entry.path() / "Trajectory")) {
      user_dirs.push_back(entry.path());
    }
  }
  std::sort(user_dirs.begin(), user_dirs.end());

  TrajectorySet result;
  std::map<std::string, std::vector<GeoPoint>> by_user;
  for (const auto& user_dir : user_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(user_dir / "Trajectory")) {
      if (entry.is_regular_file() && entry.path().extension() == ".plt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    auto& points = by_user[user_dir.filename().string()];
    for (const auto& file : files) {
      auto parsed = ParsePltFile(file, result.diagnostics);
      points.insert(points.end(), parsed.begin(), parsed.end());
    }
  }
  result.trajectories = Assemble(std::move(by_user));
  if (result.trajectories.empty()) {
    throw InputError(directory.string() + ": no valid PLT records");
  }
  return result;
}

Trajectory Resample(const Trajectory& traj, Timestamp interval) {
  if (interval <= 0) throw ConfigError("resample interval must be positive");
  CheckTrajectory(traj);
  const auto& pts = traj.points;
  const Timestamp first = pts.front().timestamp;
  const Timestamp last = pts.back().timestamp;

  Trajectory out{traj.user_id, {}};
  out.points.reserve(static_cast<std::size_t>((last - first) / interval) + 2);
  std::size_t idx = 0;
  Timestamp t = first;
  Timestamp emitted = first;
  while (true) {
    while (idx + 1 < pts.size() && pts[idx + 1].timestamp <= t) ++idx;
    out.points.push_back({pts[idx].latitude, pts[idx].longitude, t});
    emitted = t;
    if (last - t < interval) break;
    t += interval;
  }
  if (emitted != last) {
    out.points.push_back({pts.back().latitude, pts.back().longitude, last});
  }
  return out;
}

std::string_view ToString(OutcomeMetric metric) {
  switch (metric) {
    case OutcomeMetric::kUniquenessAccuracy:
      return "uniqueness_accuracy";
    case OutcomeMetric::kPredictabilityAccuracy:
      return "predictability_accuracy";
    case OutcomeMetric::kPrivacyGain:
      return "privacy_gain";
    case OutcomeMetric::kUtilityDecline:
      return "utility_decline";
  }
  return "unknown";
}

std::optional<OutcomeMetric> ParseOutcomeMetric(std::string_view name) {
  for (auto metric :
       {OutcomeMetric::kUniquenessAccuracy, OutcomeMetric::kPredictabilityAccuracy,
        OutcomeMetric::kPrivacyGain, OutcomeMetric::kUtilityDecline}) {
    if (ToString(metric) == name) return metric;
  }
  return std::nullopt;
}

bool MetricAllowedForSource(OutcomeMetric metric, std::string_view source) {
  const bool original_metric = metric == OutcomeMetric::kUniquenessAccuracy ||
                               metric == OutcomeMetric::kPredictabilityAccuracy;
  return original_metric == (source == kOriginalSource);
}

std::string OutcomeColumn::Label() const {
  return source + "/" + std::string(ToString(metric));
}

void OutcomeTable::Set(const std::string& user, const std::string& source,
                       OutcomeMetric metric, double value) {
  if (user.empty() || source.empty()) {
    throw InputError("outcome row with empty user or source");
  }
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw InputError("outcome value out of [0,1] for " + user + "/" + source +
                     "/" + std::string(ToString(metric)));
  }
  if (!MetricAllowedForSource(metric, source)) {
    throw InputError("metric " + std::string(ToString(metric)) +
                     " not allowed for source '" + source + "'");
  }
  const auto [it, inserted] = cells_.emplace(Key{user, source, metric}, value);
  if (!inserted) {
    throw InputError("duplicate outcome cell " + user + "/" + source + "/" +
                     std::string(ToString(metric)));
  }
}

std::optional<double> OutcomeTable::Get(std::string_view user,
                                        std::string_view source,
                                        OutcomeMetric metric) const {
  const auto it =
      cells_.find(Key{std::string(user), std::string(source), metric});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> OutcomeTable::Users() const {
  std::set<std::string> users;
  for (const auto& [key, value] : cells_) users.insert(key.user);
  return {users.begin(), users.end()};
}

std::vector<std::string> OutcomeTable::Sources() const {
  std::set<std::string> sources;
  for (const auto& [key, value] : cells_) sources.insert(key.source);
  std::vector<std::string> out;
  if (sources.erase(std::string(kOriginalSource)) > 0) {
    out.emplace_back(kOriginalSource);
  }
  out.insert(out.end(), sources.begin(), sources.end());
  return out;
}

std::vector<OutcomeColumn> OutcomeTable::Columns() const {
  std::set<std::pair<std::string, OutcomeMetric>> present;
  for (const auto& [key, value] : cells_) present.emplace(key.source, key.metric);
  std::vector<OutcomeColumn> out;
  for (const auto& source : Sources()) {
    for (const auto& [s, metric] : present) {
      if (s == source) out.push_back({source, metric});
    }
  }
  return out;
}

OutcomeTable LoadOutcomes(const std::filesystem::path& path) {
  const csv::Table table = csv::ReadFile(path);
  if (table.header !=
      std::vector<std::string>{"user_id", "source", "metric", "value"}) {
    throw InputError(path.string() +
                     ": expected header user_id,source,metric,value");
  }
  OutcomeTable outcomes;
  for (const auto& record : table.records) {
    const std::string where =
        path.filename().string() + ":" + std::to_string(record.line) + ": ";
    if (record.fields.size() != 4) throw InputError(where + "expected 4 fields");
    const auto metric = ParseOutcomeMetric(record.fields[2]);
    if (!metric) {
      throw InputError(where + "unknown metric '" + record.fields[2] + "'");
    }
    const auto value = ParseFinite(record.fields[3]);
    if (!value) throw InputError(where + "unparseable value");
    try {
      outcomes.Set(record.fields[0], record.fields[1], *metric, *value);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return outcomes;
}

void DemographicTable::Set(const std::string& user,
                           const std::string& attribute,
                           const std::string& value) {
  if (user.empty() || attribute.empty()) {
    throw InputError("demographic row with empty user or attribute");
  }
  if (value.empty()) {
    throw InputError("empty value for " + user + "/" + attribute);
  }
  const auto [it, inserted] = values_.emplace(std::pair{user, attribute}, value);
  if (!inserted) {
    throw InputError("duplicate demographic attribute " + user + "/" +
                     attribute);
  }
}

std::optional<std::string> DemographicTable::Get(
    std::string_view user, std::string_view attribute) const {
  const auto it =
      values_.find(std::pair{std::string(user), std::string(attribute)});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> DemographicTable::Attributes() const {
  std::set<std::string> attributes;
  for (const auto& [key, value] : values_) attributes.insert(key.second);
  return {attributes.begin(), attributes.end()};
}

std::map<std::string, std::vector<std::string>> DemographicTable::Groups(
    std::string_view attribute) const {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [key, value] : values_) {
    if (key.second == attribute) groups[value].push_back(key.first);
  }
  return groups;
}

DemographicTable LoadDemographics(const std::filesystem::path& path) {
  const csv::Table table = csv::ReadFile(path);
  if (table.header != std::vector<std::string>{"user_id", "attribute", "value"}) {
    throw InputError(path.string() + ": expected header user_id,attribute,value");
  }
  DemographicTable demographics;
  for (const auto& record : table.records) {
    const std::string where =
        path.filename().string() + ":" + std::to_string(record.line) + ": ";
    if (record.fields.size() != 3) throw InputError(where + "expected 3 fields");
    try {
      demographics.Set(record.fields[0], record.fields[1], record.fields[2]);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return demographics;
}

}  // namespace trajfair
