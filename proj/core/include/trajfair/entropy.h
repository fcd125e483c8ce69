#ifndef TRAJFAIR_ENTROPY_H_
#define TRAJFAIR_ENTROPY_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajfair/grid.h"
#include "trajfair/ingest.h"
#include "trajfair/matrix.h"

namespace trajfair {

// The four trajectory entropies of one user.
struct EntropyProfile {
  std::string user_id;
  double se = 0.0;            // Shannon entropy of the cell distribution, bits
  double le = 0.0;            // fuzzy entropy of lon/lat series, nats
  std::optional<double> he;   // 2D sample entropy of the heatmap, nats
  double ae = 0.0;            // Lempel-Ziv entropy of the novelty series, nats
};

// 1 the first time the resampled trajectory enters a cell, else 0.
struct NoveltySeries {
  std::string user_id;
  std::vector<std::uint8_t> bits;
};

// -sum p log2 p over the non-empty cells. Throws InputError if the heatmap
// holds no points.
double ShannonEntropy(const Heatmap& heatmap);
double ShannonEntropy(const Trajectory& traj, const GridSpec& spec);

// Fuzzy entropy ln Phi^m - ln Phi^{m+1}. Templates are mean-subtracted,
// compared with the Chebyshev distance d and weighted by exp(-d^n_pow / r);
// N - m templates are used at both lengths and self-matches are excluded.
// Throws ConfigError for r <= 0 or m < 1, InputError if the series has no
// more than m + 1 samples.
double FuzzyEntropy(std::span<const double> series, int m, double r,
                    double n_pow);

struct FuzzyParams {
  int m = 2;
  double r_factor = 0.2;  // r = r_factor * standard deviation of the series
  double n_pow = 2.0;
};

// Mean of the fuzzy entropies of the resampled longitude and latitude
// series. A constant axis contributes 0.
double LonLatEntropy(const Trajectory& traj, Timestamp interval,
                     const FuzzyParams& params);

// Two-dimensional sample entropy -ln(U^{m+1} / U^m). U^k is the fraction of
// ordered pairs of distinct k x k windows whose largest absolute element
// difference is <= r; window origins range over the same (H-m) x (W-m) set
// for both k. Returns nullopt when either U is zero. Throws ConfigError for
// r <= 0 or m < 1, InputError if a side is shorter than m + 2.
std::optional<double> SampleEntropy2D(const Matrix<double>& image, int m,
                                      double r);

struct HeatmapEntropyParams {
  int m = 1;
  double r_factor = 0.2;       // r = r_factor * std of the image intensities
  bool log_intensity = true;   // use log(1 + count)
};

// 2D sample entropy of a heatmap. A constant image has entropy 0.
std::optional<double> HeatmapEntropy(const Heatmap& heatmap,
                                     const HeatmapEntropyParams& params);

NoveltySeries BuildNoveltySeries(const Trajectory& traj, const GridSpec& spec,
                                 Timestamp interval);

// Lambda_i for every position: the length of the shortest substring starting
// at i that does not occur inside s[0, i). When none exists the value is
// (n - i) + 1 with 0-based i.
std::vector<std::size_t> LempelZivLambdas(std::span<const std::uint8_t> s);

// (mean Lambda)^-1 ln n. Throws InputError for n < 2.
double ActualEntropy(std::span<const std::uint8_t> s);

struct EntropyConfig {
  Timestamp resample_interval = 600;
  FuzzyParams lonlat;
  HeatmapEntropyParams heatmap;
};

// All four entropies of one user on the cohort grid. A user whose in-box
// points occupy a single cell has HE = AE = 0.
EntropyProfile ComputeEntropyProfile(const Trajectory& traj,
                                     const GridSpec& spec,
                                     const EntropyConfig& config);

enum class EntropyKind { kSE, kLE, kHE, kAE, kEOTs };

std::string_view ToString(EntropyKind kind);
std::optional<EntropyKind> ParseEntropyKind(std::string_view name);

// 1 - |v_i - v_j| / (max - min); all ones when the range is zero.
Matrix<double> RangeSimilarity(std::span<const double> values);

// Range-normalized similarity for a single kind; EOTs is the element-wise
// minimum over the four kinds. Throws InputError with fewer than 2 profiles
// or a missing HE value.
Matrix<double> EntropySimilarity(std::span<const EntropyProfile> profiles,
                                 EntropyKind kind);

// `user_id,se,le,he,ae`; an undefined HE is written as an empty field.
void WriteEntropyProfilesCsv(std::ostream& out,
                             std::span<const EntropyProfile> profiles);

}  // namespace trajfair

#endif  // TRAJFAIR_ENTROPY_H_
