#include "trajfair/grid.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "trajfair/error.h"

namespace trajfair {
namespace {

double MetersPerDegreeLonAt(double latitude) {
  return kMetersPerDegree * std::cos(latitude * std::numbers::pi / 180.0);
}

void ValidateBox(double min_lat, double max_lat, double min_lon,
                 double max_lon, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ConfigError("grid cell size must be positive");
  }
  if (!(min_lat < max_lat) || !(min_lon < max_lon)) {
    throw ConfigError("grid bounding box must have min < max on both axes");
  }
  if (min_lat < -90.0 || max_lat > 90.0 || min_lon < -180.0 ||
      max_lon > 180.0) {
    throw ConfigError("grid bounding box outside WGS-84 range");
  }
}

}  // namespace

GridSpec GridSpec::FromBounds(double min_lat, double max_lat, double min_lon,
                              double max_lon, double cell_size) {
  ValidateBox(min_lat, max_lat, min_lon, max_lon, cell_size);
  GridSpec spec;
  spec.min_lat_ = min_lat;
  spec.max_lat_ = max_lat;
  spec.min_lon_ = min_lon;
  spec.max_lon_ = max_lon;
  spec.cell_size_ = cell_size;
  const double ns = (max_lat - min_lat) * kMetersPerDegree / cell_size;
  const double ew = (max_lon - min_lon) * spec.MetersPerDegreeLon() / cell_size;
  // Absorb round-off so that exact multiples do not gain a sliver cell.
  spec.rows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ns - 1e-9)));
  spec.cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ew - 1e-9)));
  return spec;
}

GridSpec GridSpec::FromOrigin(double origin_lat, double origin_lon,
                              std::size_t rows, std::size_t cols,
                              double cell_size) {
  if (rows == 0 || cols == 0) throw ConfigError("grid must have cells");
  if (!(cell_size > 0.0)) throw ConfigError("grid cell size must be positive");
  GridSpec spec;
  spec.min_lat_ = origin_lat;
  spec.min_lon_ = origin_lon;
  spec.cell_size_ = cell_size;
  spec.rows_ = rows;
  spec.cols_ = cols;
  spec.max_lat_ = origin_lat + static_cast<double>(rows) * cell_size / kMetersPerDegree;
  spec.max_lon_ = origin_lon + static_cast<double>(cols) * cell_size /
                                   spec.MetersPerDegreeLon();
  ValidateBox(spec.min_lat_, spec.max_lat_, spec.min_lon_, spec.max_lon_,
              cell_size);
  return spec;
}

GridSpec GridSpec::ForCohort(std::span<const Trajectory> trajectories,
                             double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("grid cell size must be positive");
  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  bool any = false;
  for (const auto& traj : trajectories) {
    for (const auto& p : traj.points) {
      min_lat = std::min(min_lat, p.latitude);
      max_lat = std::max(max_lat, p.latitude);
      min_lon = std::min(min_lon, p.longitude);
      max_lon = std::max(max_lon, p.longitude);
      any = true;
    }
  }
  if (!any) throw InputError("cannot build a grid for an empty cohort");

  // One cell of padding on every side; rows/cols are whole cells so the box
  // extent is an exact multiple of the cell size. The origin sits a hair
  // beyond one cell so rounding cannot push the extreme points into the pad.
  constexpr double kPad = 1.0 + 1e-9;
  const auto cells_for = [](double extent_cells) {
    return static_cast<std::size_t>(std::floor(extent_cells + 2e-9)) + 3;
  };
  const double origin_lat = min_lat - kPad * cell_size / kMetersPerDegree;
  const auto rows = cells_for((max_lat - min_lat) * kMetersPerDegree / cell_size);
  const double top = origin_lat + static_cast<double>(rows) * cell_size / kMetersPerDegree;
  const double lon_scale = MetersPerDegreeLonAt(0.5 * (origin_lat + top));
  const double origin_lon = min_lon - kPad * cell_size / lon_scale;
  const auto cols = cells_for((max_lon - min_lon) * lon_scale / cell_size);
  return FromOrigin(origin_lat, origin_lon, rows, cols, cell_size);
}

double GridSpec::MetersPerDegreeLon() const {
  return MetersPerDegreeLonAt(0.5 * (min_lat_ + max_lat_));
}

std::optional<Cell> ProjectToCell(const GeoPoint& p, const GridSpec& spec) {
  if (p.latitude < spec.min_lat() || p.latitude > spec.max_lat() ||
      p.longitude < spec.min_lon() || p.longitude > spec.max_lon()) {
    return std::nullopt;
  }
  const double north = (p.latitude - spec.min_lat()) * kMetersPerDegree;
  const double east = (p.longitude - spec.min_lon()) * spec.MetersPerDegreeLon();
  // The north and east edges belong to the last row/column.
  const auto row = std::min(
      static_cast<std::size_t>(std::floor(north / spec.cell_size())), spec.rows() - 1);
  const auto col = std::min(
      static_cast<std::size_t>(std::floor(east / spec.cell_size())), spec.cols() - 1);
  return Cell{row, col};
}

std::int64_t Heatmap::Total() const {
  std::int64_t total = 0;
  for (auto c : counts.data()) total += c;
  return total;
}

std::int64_t Heatmap::MaxCount() const {
  std::int64_t best = 0;
  for (auto c : counts.data()) best = std::max(best, c);
  return best;
}

std::size_t Heatmap::NonZeroCells() const {
  return static_cast<std::size_t>(std::count_if(
      counts.data().begin(), counts.data().end(), [](auto c) { return c != 0; }));
}

Heatmap BuildHeatmap(const Trajectory& traj, const GridSpec& spec) {
  Heatmap map{spec, Matrix<std::int64_t>(spec.rows(), spec.cols(), 0), 0};
  for (const auto& p : traj.points) {
    if (const auto cell = ProjectToCell(p, spec)) {
      ++map.counts(cell->row, cell->col);
    } else {
      ++map.points_outside;
    }
  }
  return map;
}

Heatmap IntegrateHeatmaps(std::span<const Heatmap> maps) {
  if (maps.empty()) throw ConfigError("no heatmaps to integrate");
  Heatmap sum = maps.front();
  for (std::size_t i = 1; i < maps.size(); ++i) {
    if (!(maps[i].spec == sum.spec)) {
      throw ConfigError("cannot integrate heatmaps with different grids");
    }
    auto dst = sum.counts.data();
    auto src = maps[i].counts.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    sum.points_outside += maps[i].points_outside;
  }
  return sum;
}

void WriteHeatmapCsv(const Heatmap& map, std::ostream& out) {
  for (std::size_t r = 0; r < map.counts.rows(); ++r) {
    const auto row = map.counts.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << row[c];
    }
    out << '\n';
  }
}

void WriteHeatmapPgm(const Heatmap& map, std::ostream& out) {
  const auto max = map.MaxCount();
  out << "P5\n" << map.counts.cols() << ' ' << map.counts.rows() << "\n255\n";
  for (std::size_t r = map.counts.rows(); r-- > 0;) {
    for (auto count : map.counts.row(r)) {
      const double scaled =
          max > 0 ? std::round(255.0 * static_cast<double>(count) / static_cast<double>(max))
                  : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(scaled)));
    }
  }
}

}  // namespace trajfair
