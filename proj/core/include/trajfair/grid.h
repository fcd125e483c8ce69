#ifndef TRAJFAIR_GRID_H_
#define TRAJFAIR_GRID_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include "trajfair/ingest.h"
#include "trajfair/matrix.h"

namespace trajfair {

// Meters per degree of latitude in the local equirectangular projection.
inline constexpr double kMetersPerDegree = 111320.0;

struct Cell {
  std::size_t row = 0;  // 0 = southernmost
  std::size_t col = 0;  // 0 = westernmost
  auto operator<=>(const Cell&) const = default;
};

// A regular grid over a lat/lon bounding box. Cells are `cell_size` meters on
// a side; row 0 / col 0 sit at the southwest corner.
class GridSpec {
 public:
  // rows = ceil(north-south extent / cell_size), cols likewise with the
  // east-west extent measured at the box's mid-latitude.
  static GridSpec FromBounds(double min_lat, double max_lat, double min_lon,
                             double max_lon, double cell_size);

  // A grid of exactly rows x cols cells whose southwest corner is
  // (origin_lat, origin_lon). The box extents are exact multiples of
  // cell_size.
  static GridSpec FromOrigin(double origin_lat, double origin_lon,
                             std::size_t rows, std::size_t cols,
                             double cell_size);

  // The cohort box: min/max over every point of every trajectory, padded by
  // one cell on each side.
  static GridSpec ForCohort(std::span<const Trajectory> trajectories,
                            double cell_size);

  double min_lat() const { return min_lat_; }
  double max_lat() const { return max_lat_; }
  double min_lon() const { return min_lon_; }
  double max_lon() const { return max_lon_; }
  double cell_size() const { return cell_size_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t cell_count() const { return rows_ * cols_; }

  // Meters east per degree of longitude, at the box's mid-latitude.
  double MetersPerDegreeLon() const;

  bool operator==(const GridSpec&) const = default;

 private:
  GridSpec() = default;

  double min_lat_ = 0, max_lat_ = 0, min_lon_ = 0, max_lon_ = 0;
  double cell_size_ = 0;
  std::size_t rows_ = 0, cols_ = 0;
};

// The cell containing `p`, or nullopt when it lies outside the box.
std::optional<Cell> ProjectToCell(const GeoPoint& p, const GridSpec& spec);

// Visit-frequency image of one or more trajectories.
struct Heatmap {
  GridSpec spec;
  Matrix<std::int64_t> counts;
  // Points that fell outside the grid and were not counted.
  std::size_t points_outside = 0;

  std::int64_t Total() const;
  std::int64_t MaxCount() const;
  std::size_t NonZeroCells() const;
};

Heatmap BuildHeatmap(const Trajectory& traj, const GridSpec& spec);

// Element-wise sum. Throws ConfigError on an empty list or mismatched specs.
Heatmap IntegrateHeatmaps(std::span<const Heatmap> maps);

// Row 0 (south) first, one CSV line per grid row.
void WriteHeatmapCsv(const Heatmap& map, std::ostream& out);

// Binary 8-bit PGM (P5), north-up, intensity = round(255 * count / max).
void WriteHeatmapPgm(const Heatmap& map, std::ostream& out);

}  // namespace trajfair

#endif  // TRAJFAIR_GRID_H_
