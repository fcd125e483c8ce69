#ifndef TRAJFAIR_FAIRNESS_H_
#define TRAJFAIR_FAIRNESS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajfair/ingest.h"
#include "trajfair/matrix.h"

namespace trajfair {

// Default similarity threshold and four-fifths cut-off.
inline constexpr double kDefaultEpsilon = 0.8;
inline constexpr double kDefaultTau = 0.2;
inline constexpr double kFourFifths = 0.8;

struct UserPair {
  std::size_t a = 0;  // a < b, indices into the cohort
  std::size_t b = 0;
  auto operator<=>(const UserPair&) const = default;
};

struct PairSelection {
  std::vector<UserPair> pairs;
  std::size_t total_pairs = 0;  // n (n - 1) / 2

  // Qualifying pairs / total pairs.
  double Fraction() const;
};

// Unordered pairs with similarity >= epsilon. Throws ConfigError unless
// epsilon is in (0, 1), InputError for fewer than 2 users or a non-square
// matrix.
PairSelection SelectPairs(const Matrix<double>& similarity, double epsilon);

// 1 - min / max, symmetric in its arguments; 0 when both are 0.
double OutcomeDelta(double d_i, double d_j);

struct PairVerdict {
  std::string user_a;
  std::string user_b;
  std::string metric;   // similarity kind the pair qualified under
  double similarity = 0.0;
  OutcomeColumn column;
  double delta = 0.0;
  bool violated = false;  // delta > tau
};

struct ViolationResult {
  std::vector<PairVerdict> verdicts;
  std::size_t evaluated_pairs = 0;
  std::size_t violating_pairs = 0;
  std::size_t dropped_pairs = 0;  // a user lacked the outcome
  std::vector<std::string> diagnostics;

  // violating / evaluated.
  double Rate() const;
};

// Share of qualifying pairs whose outcome delta exceeds tau. Pairs with a
// user lacking the (source, metric) outcome are dropped. Throws ConfigError
// unless tau is in (0, 1), InputError when no pair survives the drops.
ViolationResult ViolationRate(const PairSelection& selection,
                              const Matrix<double>& similarity,
                              std::span<const std::string> users,
                              std::string_view metric_name,
                              const OutcomeTable& outcomes,
                              const OutcomeColumn& column, double tau);

enum class GfsMode {
  kSymmetric,  // min(d / a, a / d)
  kLiteral,    // a / d: advantaged over disadvantaged mean
};

std::string_view ToString(GfsMode mode);
std::optional<GfsMode> ParseGfsMode(std::string_view name);

struct GroupFairnessRow {
  std::string attribute;
  std::string value;
  std::size_t user_count = 0;      // subgroup members in the demographics
  std::size_t outcome_count = 0;   // members with the outcome value
  bool advantaged = false;
  std::optional<double> mean;      // mean outcome of the members
  std::optional<double> gfs;       // unset for the advantaged row or 0 ratio
  std::optional<bool> fair;        // gfs >= 0.8
};

// Disparate impact of each subgroup against the largest one (ties go to the
// lexicographically first value). Throws InputError when the attribute is
// unknown or fewer than 2 subgroups have outcome values.
std::vector<GroupFairnessRow> GroupFairnessScore(
    const OutcomeTable& outcomes, const DemographicTable& demographics,
    std::string_view attribute, const OutcomeColumn& column, GfsMode mode);

}  // namespace trajfair

#endif  // TRAJFAIR_FAIRNESS_H_
