#ifndef TRAJFAIR_CLUSTERING_H_
#define TRAJFAIR_CLUSTERING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajfair/entropy.h"
#include "trajfair/ingest.h"
#include "trajfair/matrix.h"

namespace trajfair {

// Column order of the clustering features.
inline constexpr const char* kFeatureNames[] = {"effective_ssim", "se", "le",
                                                "he", "ae"};

// users x 5 matrix of [effective SSIM, SE, LE, HE, AE], each column z-scored
// with the population standard deviation; a constant column becomes zeros.
// Throws InputError on a size mismatch or a missing HE value.
Matrix<double> FeatureMatrix(std::span<const EntropyProfile> profiles,
                             std::span<const double> effective_ssim);

struct ClusterAssignment {
  int k = 0;
  std::vector<int> labels;              // one per row, in [0, k)
  Matrix<double> centroids;             // k x features
  double inertia = 0.0;                 // sum of squared distances
  double silhouette = 0.0;              // mean silhouette coefficient
  std::vector<double> inertia_history;  // after each Lloyd iteration
  int iterations = 0;
};

inline constexpr int kMaxLloydIterations = 300;

// Lloyd's algorithm from k-means++ seeding; stops when assignments stop
// changing or after 300 iterations. Deterministic given (features, k, seed).
// Throws ConfigError unless 2 <= k <= rows.
ClusterAssignment KMeans(const Matrix<double>& features, int k,
                         std::uint64_t seed);

// Mean silhouette with Euclidean distance. Points alone in their cluster,
// and points whose a and b are both zero, score 0.
double Silhouette(const Matrix<double>& features, std::span<const int> labels,
                  int k);

struct KDiagnostics {
  int k = 0;
  double inertia = 0.0;
  double silhouette = 0.0;
};

struct KSelection {
  int best_k = 0;  // largest silhouette, smallest k on ties
  std::vector<KDiagnostics> per_k;
};

// Throws ConfigError for an empty range, k_min < 2 or k_max > rows.
KSelection ChooseK(const Matrix<double>& features, int k_min, int k_max,
                   std::uint64_t seed);

struct ClusterViolation {
  int cluster = 0;
  std::size_t size = 0;             // members in the cluster
  std::size_t evaluated_users = 0;  // members with the outcome
  std::size_t violating_users = 0;
  bool singleton = false;           // fewer than 2 members with outcomes

  double Rate() const;
};

// Per user: the mean outcome delta against every other member of the same
// cluster that has the outcome; the user violates when that mean exceeds
// tau. Users without the outcome are skipped.
std::vector<ClusterViolation> ClusterViolationRate(
    const ClusterAssignment& assignment, std::span<const std::string> users,
    const OutcomeTable& outcomes, const OutcomeColumn& column, double tau);

}  // namespace trajfair

#endif  // TRAJFAIR_CLUSTERING_H_
