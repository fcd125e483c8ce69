#include "trajfair/fairness.h"

#include <algorithm>
#include <cmath>

#include "trajfair/error.h"

namespace trajfair {

double PairSelection::Fraction() const {
  return total_pairs == 0 ? 0.0
                          : static_cast<double>(pairs.size()) /
                                static_cast<double>(total_pairs);
}

PairSelection SelectPairs(const Matrix<double>& similarity, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (similarity.rows() != similarity.cols()) {
    throw InputError("similarity matrix must be square");
  }
  const std::size_t n = similarity.rows();
  if (n < 2) throw InputError("pair selection needs at least 2 users");
  PairSelection selection;
  selection.total_pairs = n * (n - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (similarity(i, j) >= epsilon) selection.pairs.push_back({i, j});
    }
  }
  return selection;
}

double OutcomeDelta(double d_i, double d_j) {
  const double hi = std::max(d_i, d_j);
  if (hi == 0.0) return 0.0;
  return 1.0 - std::min(d_i, d_j) / hi;
}

double ViolationResult::Rate() const {
  return evaluated_pairs == 0 ? 0.0
                              : static_cast<double>(violating_pairs) /
                                    static_cast<double>(evaluated_pairs);
}

ViolationResult ViolationRate(const PairSelection& selection,
                              const Matrix<double>& similarity,
                              std::span<const std::string> users,
                              std::string_view metric_name,
                              const OutcomeTable& outcomes,
                              const OutcomeColumn& column, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (users.size() != similarity.rows()) {
    throw InvariantError("user list does not match the similarity matrix");
  }
  ViolationResult result;
  for (const auto& pair : selection.pairs) {
    const auto& ua = users[pair.a];
    const auto& ub = users[pair.b];
    const auto da = outcomes.Get(ua, column.source, column.metric);
    const auto db = outcomes.Get(ub, column.source, column.metric);
    if (!da || !db) {
      ++result.dropped_pairs;
      result.diagnostics.push_back("pair " + ua + "," + ub + " dropped: missing " +
                                   column.Label() + " for " + (da ? ub : ua));
      continue;
    }
    PairVerdict verdict{ua, ub, std::string(metric_name), similarity(pair.a, pair.b),
                        column, OutcomeDelta(*da, *db), false};
    verdict.violated = verdict.delta > tau;
    ++result.evaluated_pairs;
    if (verdict.violated) ++result.violating_pairs;
    result.verdicts.push_back(std::move(verdict));
  }
  if (result.evaluated_pairs == 0) {
    throw InputError("no qualifying pair has " + column.Label() +
                     " outcomes for both users");
  }
  return result;
}

std::string_view ToString(GfsMode mode) {
  return mode == GfsMode::kSymmetric ? "symmetric" : "literal";
}

std::optional<GfsMode> ParseGfsMode(std::string_view name) {
  if (name == "symmetric") return GfsMode::kSymmetric;
  if (name == "literal") return GfsMode::kLiteral;
  return std::nullopt;
}

std::vector<GroupFairnessRow> GroupFairnessScore(
    const OutcomeTable& outcomes, const DemographicTable& demographics,
    std::string_view attribute, const OutcomeColumn& column, GfsMode mode) {
  const auto groups = demographics.Groups(attribute);
  if (groups.empty()) {
    throw InputError("unknown demographic attribute '" + std::string(attribute) + "'");
  }
  std::vector<GroupFairnessRow> rows;
  std::size_t with_outcomes = 0;
  for (const auto& [value, members] : groups) {
    GroupFairnessRow row;
    row.attribute = std::string(attribute);
    row.value = value;
    row.user_count = members.size();
    double sum = 0.0;
    for (const auto& user : members) {
      if (const auto v = outcomes.Get(user, column.source, column.metric)) {
        sum += *v;
        ++row.outcome_count;
      }
    }
    if (row.outcome_count > 0) {
      row.mean = sum / static_cast<double>(row.outcome_count);
      ++with_outcomes;
    }
    rows.push_back(std::move(row));
  }
  if (with_outcomes < 2) {
    throw InputError("group fairness for '" + std::string(attribute) +
                     "' needs at least 2 subgroups with " + column.Label() +
                     " outcomes");
  }
  // Dominant subgroup by size; std::map order makes ties resolve to the
  // lexicographically first value.
  auto advantaged = rows.end();
  for (auto it = rows.begin(); it != rows.end(); ++it) {
    if (!it->mean) continue;
    if (advantaged == rows.end() || it->user_count > advantaged->user_count) {
      advantaged = it;
    }
  }
  advantaged->advantaged = true;
  const double a = *advantaged->mean;
  for (auto& row : rows) {
    if (row.advantaged || !row.mean) continue;
    const double d = *row.mean;
    if (mode == GfsMode::kSymmetric) {
      if (a > 0.0 && d > 0.0) row.gfs = std::min(d / a, a / d);
    } else if (d > 0.0) {
      row.gfs = a / d;
    }
    if (row.gfs) row.fair = *row.gfs >= kFourFifths;
  }
  return rows;
}

}  // namespace trajfair
