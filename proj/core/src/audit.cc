#include "trajfair/audit.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "trajfair/csv.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

[[noreturn]] void Rethrow(const Error& e, std::string_view stage) {
  const std::string message = "[" + std::string(stage) + "] " + e.what();
  switch (e.kind()) {
    case ErrorKind::kInput: throw InputError(message);
    case ErrorKind::kConfig: throw ConfigError(message);
    case ErrorKind::kInvariant: throw InvariantError(message);
  }
  throw InvariantError(message);
}

template <typename Fn>
auto Stage(std::string_view name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    Rethrow(e, name);
  }
}

double Percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0
                    : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

ViolationCell EvaluateCell(const PairSelection& selection,
                           const Matrix<double>& similarity,
                           std::span<const std::string> users,
                           std::string_view metric, const OutcomeTable& outcomes,
                           const OutcomeColumn& column, double tau) {
  ViolationCell cell;
  cell.column = column;
  if (selection.pairs.empty()) return cell;
  try {
    const auto result = ViolationRate(selection, similarity, users, metric,
                                      outcomes, column, tau);
    cell.evaluated = result.evaluated_pairs;
    cell.violating = result.violating_pairs;
    cell.dropped = result.dropped_pairs;
    cell.v_pct = Percent(cell.violating, cell.evaluated);
  } catch (const InputError&) {
    // Every qualifying pair lacked this outcome.
    cell.dropped = selection.pairs.size();
  }
  return cell;
}

void CheckFraction(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw ConfigError(std::string(name) + " must lie in (0, 1)");
  }
}

}  // namespace

std::string_view ToString(SsimSimilarity mode) {
  return mode == SsimSimilarity::kPairwise ? "pairwise" : "effective";
}

std::optional<SsimSimilarity> ParseSsimSimilarity(std::string_view name) {
  if (name == "pairwise") return SsimSimilarity::kPairwise;
  if (name == "effective") return SsimSimilarity::kEffective;
  return std::nullopt;
}

EntropyConfig AuditConfig::Entropy() const {
  return {resample_interval_s, lonlat, heatmap_entropy};
}

void AuditConfig::Validate() const {
  if (!(granularity_m > 0.0)) throw ConfigError("granularity must be positive");
  for (double g : sweep_m) {
    if (!(g > 0.0)) throw ConfigError("sweep granularities must be positive");
  }
  CheckFraction(epsilon, "epsilon");
  CheckFraction(tau, "tau");
  if (resample_interval_s <= 0) {
    throw ConfigError("resample interval must be positive");
  }
  ssim.Validate();
  if (lonlat.m < 1 || !(lonlat.r_factor > 0.0) || !(lonlat.n_pow > 0.0)) {
    throw ConfigError("invalid LonLat entropy parameters");
  }
  if (heatmap_entropy.m < 1 || !(heatmap_entropy.r_factor > 0.0)) {
    throw ConfigError("invalid heatmap entropy parameters");
  }
  if (k_min < 2 || k_max < k_min) throw ConfigError("k range must satisfy 2 <= k_min <= k_max");
}

SsimParams FitWindow(const SsimParams& params, const GridSpec& spec) {
  SsimParams fitted = params;
  auto limit = static_cast<int>(std::min(spec.rows(), spec.cols()));
  if (limit % 2 == 0) --limit;
  fitted.window = std::min(params.window, limit);
  return fitted;
}

CohortAnalysis AnalyzeCohort(std::vector<Trajectory> trajectories,
                             double granularity_m, const AuditConfig& config) {
  const GridSpec spec = Stage("grid", [&] {
    return GridSpec::ForCohort(trajectories, granularity_m);
  });
  const SsimParams ssim = FitWindow(config.ssim, spec);

  std::vector<Heatmap> heatmaps = Stage("heatmap", [&] {
    std::vector<Heatmap> maps;
    maps.reserve(trajectories.size());
    for (const auto& traj : trajectories) maps.push_back(BuildHeatmap(traj, spec));
    return maps;
  });
  Heatmap integrated = Stage("heatmap", [&] { return IntegrateHeatmaps(heatmaps); });

  std::vector<double> effective = Stage("effective ssim", [&] {
    std::vector<double> values;
    values.reserve(heatmaps.size());
    for (const auto& h : heatmaps) values.push_back(EffectiveSsim(h, integrated, ssim));
    return values;
  });
  Matrix<double> pairwise =
      Stage("pairwise ssim", [&] { return PairwiseSsim(heatmaps, ssim); });

  std::vector<EntropyProfile> profiles = Stage("entropy", [&] {
    std::vector<EntropyProfile> out;
    out.reserve(trajectories.size());
    const auto entropy_config = config.Entropy();
    for (const auto& traj : trajectories) {
      try {
        out.push_back(ComputeEntropyProfile(traj, spec, entropy_config));
      } catch (const Error& e) {
        Rethrow(e, "user " + traj.user_id);
      }
    }
    return out;
  });

  std::vector<std::string> users;
  users.reserve(trajectories.size());
  for (const auto& traj : trajectories) users.push_back(traj.user_id);

  return CohortAnalysis{std::move(trajectories), std::move(users), spec, ssim,
                        std::move(heatmaps),     std::move(integrated),
                        std::move(effective),    std::move(profiles),
                        std::move(pairwise)};
}

Matrix<double> SimilarityFor(const CohortAnalysis& cohort,
                             std::string_view metric,
                             const AuditConfig& config) {
  auto ssim_similarity = [&] {
    return config.ssim_similarity == SsimSimilarity::kPairwise
               ? cohort.pairwise_ssim
               : RangeSimilarity(cohort.effective_ssim);
  };
  if (metric == "SSIM") return ssim_similarity();
  if (metric == "EOTs+SSIM") {
    // Both criteria hold iff their minimum clears the threshold.
    Matrix<double> combined = EntropySimilarity(cohort.profiles, EntropyKind::kEOTs);
    const Matrix<double> ssim = ssim_similarity();
    for (std::size_t i = 0; i < combined.size(); ++i) {
      combined.data()[i] = std::min(combined.data()[i], ssim.data()[i]);
    }
    return combined;
  }
  const auto kind = ParseEntropyKind(metric);
  if (!kind) throw ConfigError("unknown similarity metric '" + std::string(metric) + "'");
  return EntropySimilarity(cohort.profiles, *kind);
}

double MedianOffDiagonal(const Matrix<double>& m) {
  std::vector<double> values;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) values.push_back(m(i, j));
  }
  if (values.empty()) throw InputError("median needs at least one pair");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SweepRow> SweepGranularity(std::span<const Trajectory> trajectories,
                                       const OutcomeTable& outcomes,
                                       const AuditConfig& config) {
  std::vector<double> grains = config.sweep_m;
  std::sort(grains.begin(), grains.end());
  grains.erase(std::unique(grains.begin(), grains.end()), grains.end());
  if (grains.size() < 2) {
    throw ConfigError("a granularity sweep needs at least 2 distinct granularities");
  }
  const auto columns = outcomes.Columns();
  std::vector<SweepRow> rows;
  for (double g : grains) {
    const std::string stage = "sweep " + csv::FormatDouble(g) + "m";
    const std::vector<Trajectory> copy(trajectories.begin(), trajectories.end());
    const GridSpec spec =
        Stage(stage, [&] { return GridSpec::ForCohort(copy, g); });
    const SsimParams ssim = FitWindow(config.ssim, spec);
    const Matrix<double> sim = Stage(stage, [&] {
      std::vector<Heatmap> maps;
      maps.reserve(copy.size());
      for (const auto& traj : copy) maps.push_back(BuildHeatmap(traj, spec));
      return PairwiseSsim(maps, ssim);
    });
    std::vector<std::string> users;
    for (const auto& traj : copy) users.push_back(traj.user_id);

    SweepRow row;
    row.granularity_m = g;
    row.median_ssim = MedianOffDiagonal(sim);
    const auto selection =
        Stage(stage, [&] { return SelectPairs(sim, config.epsilon); });
    row.qualifying_pairs = selection.pairs.size();
    row.total_pairs = selection.total_pairs;
    for (const auto& column : columns) {
      row.cells.push_back(EvaluateCell(selection, sim, users, "SSIM", outcomes,
                                       column, config.tau));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

FairnessReport RunAudit(std::span<const Trajectory> trajectories,
                        const OutcomeTable& outcomes,
                        const DemographicTable* demographics,
                        const AuditConfig& config) {
  Stage("config", [&] {
    config.Validate();
    return 0;
  });

  FairnessReport report;
  report.config = config;
  report.columns = outcomes.Columns();

  // Cohort: users with a trajectory and at least one outcome.
  const auto outcome_users = outcomes.Users();
  const std::set<std::string> with_outcomes(outcome_users.begin(), outcome_users.end());
  std::vector<Trajectory> cohort_trajectories;
  std::set<std::string> with_trajectories;
  for (const auto& traj : trajectories) {
    with_trajectories.insert(traj.user_id);
    if (with_outcomes.count(traj.user_id)) {
      cohort_trajectories.push_back(traj);
    } else {
      report.diagnostics.push_back("user " + traj.user_id +
                                   " has a trajectory but no outcomes; excluded");
    }
  }
  for (const auto& user : outcome_users) {
    if (!with_trajectories.count(user)) {
      report.diagnostics.push_back("user " + user +
                                   " has outcomes but no trajectory; excluded");
    }
  }
  std::sort(cohort_trajectories.begin(), cohort_trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.user_id < b.user_id; });
  if (cohort_trajectories.size() < 2) {
    throw InputError("[cohort] at least 2 users need both a trajectory and outcomes");
  }

  const CohortAnalysis cohort =
      AnalyzeCohort(cohort_trajectories, config.granularity_m, config);
  if (cohort.ssim.window != config.ssim.window) {
    report.diagnostics.push_back("SSIM window reduced to " +
                                 std::to_string(cohort.ssim.window) +
                                 " to fit the grid");
  }
  for (std::size_t i = 0; i < cohort.users.size(); ++i) {
    report.users.push_back({cohort.users[i], cohort.effective_ssim[i],
                            cohort.profiles[i], std::nullopt});
  }

  // Threshold-based individual fairness.
  for (std::string_view metric : kSimilarityMetrics) {
    const std::string stage = "pairs " + std::string(metric);
    const Matrix<double> sim =
        Stage(stage, [&] { return SimilarityFor(cohort, metric, config); });
    const PairSelection selection =
        Stage(stage, [&] { return SelectPairs(sim, config.epsilon); });
    IndividualRow row;
    row.metric = std::string(metric);
    row.qualifying_pairs = selection.pairs.size();
    row.total_pairs = selection.total_pairs;
    row.pct_pairs = Percent(row.qualifying_pairs, row.total_pairs);
    for (const auto& column : report.columns) {
      row.cells.push_back(Stage(stage, [&] {
        return EvaluateCell(selection, sim, cohort.users, metric, outcomes,
                            column, config.tau);
      }));
    }
    report.individual.push_back(std::move(row));
  }

  // Clustering-based individual fairness.
  const int n = static_cast<int>(cohort.users.size());
  const int k_max = std::min(config.k_max, n);
  if (config.k_min > k_max) {
    report.diagnostics.push_back("clustering skipped: k_min exceeds the cohort size");
  } else {
    report.clusters = Stage("clustering", [&] {
      const Matrix<double> features =
          FeatureMatrix(cohort.profiles, cohort.effective_ssim);
      const KSelection choice = ChooseK(features, config.k_min, k_max, config.seed);
      const ClusterAssignment assignment = KMeans(features, choice.best_k, config.seed);
      ClusterSection section;
      section.k = assignment.k;
      section.silhouette = assignment.silhouette;
      section.inertia = assignment.inertia;
      section.per_k = choice.per_k;
      for (int c = 0; c < assignment.k; ++c) {
        section.rows.push_back({"cluster " + std::to_string(c + 1), c, 0, {}});
      }
      ClusterRow average{"average", -1, static_cast<std::size_t>(n), {}};
      for (const auto& column : report.columns) {
        const auto per_cluster = ClusterViolationRate(assignment, cohort.users,
                                                      outcomes, column, config.tau);
        std::size_t evaluated = 0, violating = 0;
        for (const auto& cv : per_cluster) {
          auto& row = section.rows[static_cast<std::size_t>(cv.cluster)];
          row.size = cv.size;
          row.cells.push_back({column, cv.evaluated_users, cv.violating_users,
                               cv.singleton, 100.0 * cv.Rate()});
          evaluated += cv.evaluated_users;
          violating += cv.violating_users;
        }
        average.cells.push_back(
            {column, evaluated, violating, false, Percent(violating, evaluated)});
      }
      section.rows.push_back(std::move(average));
      for (std::size_t i = 0; i < report.users.size(); ++i) {
        report.users[i].cluster = assignment.labels[i];
      }
      return section;
    });
  }

  // Group fairness.
  if (demographics == nullptr) {
    report.diagnostics.push_back("group fairness not available: no demographics supplied");
  } else {
    report.group = Stage("group", [&] {
      std::vector<GroupRow> rows;
      for (const auto& attribute : demographics->Attributes()) {
        const auto groups = demographics->Groups(attribute);
        const std::size_t first = rows.size();
        for (const auto& [value, members] : groups) {
          rows.push_back({attribute, value, members.size(), false, {}});
        }
        for (const auto& column : report.columns) {
          std::vector<GroupFairnessRow> scored;
          try {
            scored = GroupFairnessScore(outcomes, *demographics, attribute, column,
                                        config.gfs_mode);
          } catch (const InputError& e) {
            report.diagnostics.push_back(std::string("group fairness: ") + e.what());
          }
          for (std::size_t g = 0; g < groups.size(); ++g) {
            GroupRow& row = rows[first + g];
            GroupCell cell;
            cell.column = column;
            if (!scored.empty()) {
              const auto& s = scored[g];
              cell.outcome_count = s.outcome_count;
              cell.mean = s.mean;
              cell.gfs = s.gfs;
              cell.fair = s.fair;
              row.advantaged = row.advantaged || s.advantaged;
            }
            row.cells.push_back(std::move(cell));
          }
        }
      }
      return rows;
    });
  }

  if (config.sweep_m.size() >= 2) {
    report.sweep = SweepGranularity(cohort.trajectories, outcomes, config);
  }
  return report;
}

}  // namespace trajfair
