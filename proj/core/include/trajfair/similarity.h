#ifndef TRAJFAIR_SIMILARITY_H_
#define TRAJFAIR_SIMILARITY_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajfair/grid.h"
#include "trajfair/matrix.h"

namespace trajfair {

// Structural similarity parameters. The stabilizers are c1 = (k1 L)^2 and
// c2 = (k2 L)^2 with L the dynamic range of the normalized intensities.
struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  // Side of the uniform square window, odd, centered on each cell.
  int window = 7;
  // Map counts through log(1 + count) before linear scaling.
  bool log_intensity = false;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }

  // Throws ConfigError unless k1, k2, L > 0 and window is odd and positive.
  void Validate() const;
};

struct SsimMap {
  GridSpec spec;
  Matrix<double> values;  // local SSIM per cell, in [-1, 1]
};

// Scales both heatmaps onto [0, L] by their common maximum (after the
// optional log transform). Two all-zero maps stay all-zero.
std::pair<Matrix<double>, Matrix<double>> NormalizePair(const Heatmap& a,
                                                        const Heatmap& b,
                                                        const SsimParams& params);

// Local SSIM of two equally sized intensity images over border-clipped
// windows. Window statistics use the population (1/N) variance and
// covariance.
Matrix<double> LocalSsim(const Matrix<double>& a, const Matrix<double>& b,
                         const SsimParams& params);

// Throws ConfigError on mismatched specs or a window larger than the grid.
SsimMap ComputeSsimMap(const Heatmap& a, const Heatmap& b,
                       const SsimParams& params);

// Mean of the local SSIM map.
double SsimGlobal(const Heatmap& a, const Heatmap& b, const SsimParams& params);

// Mean local SSIM between a user's heatmap and the cohort's integrated
// heatmap, restricted to cells the cohort visited. Throws InputError when the
// integrated heatmap is all zero.
double EffectiveSsim(const Heatmap& user, const Heatmap& integrated,
                     const SsimParams& params);

// Symmetric matrix of SsimGlobal over every pair, unit diagonal.
Matrix<double> PairwiseSsim(std::span<const Heatmap> users,
                            const SsimParams& params);

// CSV with a leading `user_id` header cell, one column and one row per user.
void WriteLabeledMatrixCsv(std::ostream& out,
                           std::span<const std::string> labels,
                           const Matrix<double>& matrix);

}  // namespace trajfair

#endif  // TRAJFAIR_SIMILARITY_H_
