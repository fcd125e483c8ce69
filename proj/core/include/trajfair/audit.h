#ifndef TRAJFAIR_AUDIT_H_
#define TRAJFAIR_AUDIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajfair/clustering.h"
#include "trajfair/entropy.h"
#include "trajfair/fairness.h"
#include "trajfair/grid.h"
#include "trajfair/ingest.h"
#include "trajfair/similarity.h"

namespace trajfair {

// Which SSIM feeds the "SSIM" similarity row.
enum class SsimSimilarity {
  kPairwise,   // global SSIM between the two users' heatmaps
  kEffective,  // range-normalized distance between effective SSIM values
};

std::string_view ToString(SsimSimilarity mode);
std::optional<SsimSimilarity> ParseSsimSimilarity(std::string_view name);

struct AuditConfig {
  double granularity_m = 100.0;
  std::vector<double> sweep_m = {50.0, 100.0, 300.0, 500.0, 700.0, 900.0};
  double epsilon = kDefaultEpsilon;
  double tau = kDefaultTau;
  Timestamp resample_interval_s = 600;
  SsimParams ssim;
  FuzzyParams lonlat;
  HeatmapEntropyParams heatmap_entropy;
  int k_min = 2;
  int k_max = 8;
  std::uint64_t seed = 42;
  GfsMode gfs_mode = GfsMode::kSymmetric;
  SsimSimilarity ssim_similarity = SsimSimilarity::kPairwise;

  EntropyConfig Entropy() const;

  // Throws ConfigError on any out-of-range field.
  void Validate() const;
};

// Row order of the individual-fairness table.
inline constexpr std::string_view kSimilarityMetrics[] = {
    "SE", "LE", "HE", "AE", "SSIM", "EOTs", "EOTs+SSIM"};

struct ViolationCell {
  OutcomeColumn column;
  std::size_t evaluated = 0;
  std::size_t violating = 0;
  std::size_t dropped = 0;
  std::optional<double> v_pct;  // unset when nothing could be evaluated
};

struct IndividualRow {
  std::string metric;
  std::size_t qualifying_pairs = 0;
  std::size_t total_pairs = 0;
  double pct_pairs = 0.0;
  std::vector<ViolationCell> cells;
};

struct ClusterCell {
  OutcomeColumn column;
  std::size_t evaluated = 0;
  std::size_t violating = 0;
  bool singleton = false;
  double v_pct = 0.0;
};

struct ClusterRow {
  std::string label;  // "cluster 1".. or "average"
  int cluster = -1;   // -1 for the average row
  std::size_t size = 0;
  std::vector<ClusterCell> cells;
};

struct ClusterSection {
  int k = 0;
  double silhouette = 0.0;
  double inertia = 0.0;
  std::vector<KDiagnostics> per_k;
  std::vector<ClusterRow> rows;
};

struct GroupCell {
  OutcomeColumn column;
  std::size_t outcome_count = 0;
  std::optional<double> mean;
  std::optional<double> gfs;
  std::optional<bool> fair;
};

struct GroupRow {
  std::string attribute;
  std::string value;
  std::size_t user_count = 0;
  bool advantaged = false;
  std::vector<GroupCell> cells;
};

struct SweepRow {
  double granularity_m = 0.0;
  double median_ssim = 0.0;
  std::size_t qualifying_pairs = 0;
  std::size_t total_pairs = 0;
  std::vector<ViolationCell> cells;
};

struct UserRecord {
  std::string user_id;
  double effective_ssim = 0.0;
  EntropyProfile profile;
  std::optional<int> cluster;
};

struct FairnessReport {
  AuditConfig config;
  std::vector<OutcomeColumn> columns;
  std::vector<UserRecord> users;
  std::vector<std::string> diagnostics;
  std::vector<IndividualRow> individual;
  std::optional<ClusterSection> clusters;
  std::optional<std::vector<GroupRow>> group;
  std::optional<std::vector<SweepRow>> sweep;
};

// Everything derived from the cohort at one granularity, before any outcome
// is consulted.
struct CohortAnalysis {
  std::vector<Trajectory> trajectories;  // audited users, sorted by id
  std::vector<std::string> users;
  GridSpec spec;
  SsimParams ssim;  // window clamped to the grid
  std::vector<Heatmap> heatmaps;
  Heatmap integrated;
  std::vector<double> effective_ssim;
  std::vector<EntropyProfile> profiles;
  Matrix<double> pairwise_ssim;
};

// The configured SSIM parameters with the window reduced to the largest odd
// size that fits the grid.
SsimParams FitWindow(const SsimParams& params, const GridSpec& spec);

// Heatmaps, SSIM and entropies of `trajectories` on the cohort grid.
CohortAnalysis AnalyzeCohort(std::vector<Trajectory> trajectories,
                             double granularity_m, const AuditConfig& config);

// Similarity matrix behind one row of the individual-fairness table.
Matrix<double> SimilarityFor(const CohortAnalysis& cohort,
                             std::string_view metric,
                             const AuditConfig& config);

// Median of the strictly upper triangle.
double MedianOffDiagonal(const Matrix<double>& m);

// Per-granularity median pairwise SSIM and SSIM-pair violation rates.
// Throws ConfigError for fewer than 2 granularities.
std::vector<SweepRow> SweepGranularity(std::span<const Trajectory> trajectories,
                                       const OutcomeTable& outcomes,
                                       const AuditConfig& config);

// The full audit. Users need both a trajectory and at least one outcome.
// Errors from the stages are rethrown with the stage name prepended.
FairnessReport RunAudit(std::span<const Trajectory> trajectories,
                        const OutcomeTable& outcomes,
                        const DemographicTable* demographics,
                        const AuditConfig& config);

}  // namespace trajfair

#endif  // TRAJFAIR_AUDIT_H_
