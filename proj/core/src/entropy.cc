#include "trajfair/entropy.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "trajfair/csv.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

double PopulationStd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

bool IsConstant(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            std::not_equal_to<>()) == values.end();
}

// Average fuzzy membership over distinct ordered template pairs.
double FuzzyPhi(std::span<const double> series, std::size_t length,
                std::size_t templates, double r, double n_pow) {
  Matrix<double> centered(templates, length);
  for (std::size_t i = 0; i < templates; ++i) {
    const auto window = series.subspan(i, length);
    const double mean =
        std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(length);
    for (std::size_t k = 0; k < length; ++k) centered(i, k) = window[k] - mean;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < templates; ++i) {
    const auto a = centered.row(i);
    for (std::size_t j = i + 1; j < templates; ++j) {
      const auto b = centered.row(j);
      double d = 0.0;
      for (std::size_t k = 0; k < length; ++k) d = std::max(d, std::abs(a[k] - b[k]));
      sum += std::exp(-std::pow(d, n_pow) / r);
    }
  }
  const double t = static_cast<double>(templates);
  return 2.0 * sum / (t * (t - 1.0));
}

// Number of ordered pairs of distinct window origins whose k x k windows
// match within r. Identical windows are grouped first, which keeps sparse
// heatmaps (mostly empty windows) cheap while giving the exact count.
std::uint64_t CountWindowMatches(const Matrix<double>& image, std::size_t k,
                                 std::size_t origin_rows,
                                 std::size_t origin_cols, double r) {
  std::vector<std::vector<double>> windows;
  windows.reserve(origin_rows * origin_cols);
  for (std::size_t i = 0; i < origin_rows; ++i) {
    for (std::size_t j = 0; j < origin_cols; ++j) {
      std::vector<double> w;
      w.reserve(k * k);
      for (std::size_t di = 0; di < k; ++di) {
        for (std::size_t dj = 0; dj < k; ++dj) w.push_back(image(i + di, j + dj));
      }
      windows.push_back(std::move(w));
    }
  }
  std::sort(windows.begin(), windows.end());
  std::vector<const std::vector<double>*> unique;
  std::vector<std::uint64_t> multiplicity;
  for (const auto& w : windows) {
    if (unique.empty() || *unique.back() != w) {
      unique.push_back(&w);
      multiplicity.push_back(1);
    } else {
      ++multiplicity.back();
    }
  }
  std::uint64_t matches = 0;
  for (std::size_t p = 0; p < unique.size(); ++p) {
    matches += multiplicity[p] * (multiplicity[p] - 1);
    const auto& a = *unique[p];
    for (std::size_t q = p + 1; q < unique.size(); ++q) {
      const auto& b = *unique[q];
      bool match = true;
      for (std::size_t e = 0; e < a.size(); ++e) {
        if (std::abs(a[e] - b[e]) > r) {
          match = false;
          break;
        }
      }
      if (match) matches += 2 * multiplicity[p] * multiplicity[q];
    }
  }
  return matches;
}

}  // namespace

double ShannonEntropy(const Heatmap& heatmap) {
  const auto total = heatmap.Total();
  if (total <= 0) throw InputError("Shannon entropy needs at least one in-box point");
  double h = 0.0;
  for (auto count : heatmap.counts.data()) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h + 0.0;
}

double ShannonEntropy(const Trajectory& traj, const GridSpec& spec) {
  return ShannonEntropy(BuildHeatmap(traj, spec));
}

double FuzzyEntropy(std::span<const double> series, int m, double r,
                    double n_pow) {
  if (m < 1) throw ConfigError("fuzzy entropy template length must be >= 1");
  if (!(r > 0.0)) throw ConfigError("fuzzy entropy tolerance r must be positive");
  if (!(n_pow > 0.0)) throw ConfigError("fuzzy entropy exponent must be positive");
  const auto len = static_cast<std::size_t>(m);
  if (series.size() <= len + 1) {
    throw InputError("fuzzy entropy needs more than m + 1 samples (got " +
                     std::to_string(series.size()) + ")");
  }
  const std::size_t templates = series.size() - len;
  const double phi_m = FuzzyPhi(series, len, templates, r, n_pow);
  const double phi_m1 = FuzzyPhi(series, len + 1, templates, r, n_pow);
  return std::log(phi_m) - std::log(phi_m1) + 0.0;
}

double LonLatEntropy(const Trajectory& traj, Timestamp interval,
                     const FuzzyParams& params) {
  const Trajectory resampled = Resample(traj, interval);
  std::vector<double> lon, lat;
  lon.reserve(resampled.points.size());
  lat.reserve(resampled.points.size());
  for (const auto& p : resampled.points) {
    lon.push_back(p.longitude);
    lat.push_back(p.latitude);
  }
  auto axis = [&](const std::vector<double>& series) {
    if (IsConstant(series)) return 0.0;
    const double sigma = PopulationStd(series);
    if (!(sigma > 0.0)) return 0.0;
    return FuzzyEntropy(series, params.m, params.r_factor * sigma, params.n_pow);
  };
  return 0.5 * (axis(lon) + axis(lat));
}

std::optional<double> SampleEntropy2D(const Matrix<double>& image, int m,
                                      double r) {
  if (m < 1) throw ConfigError("2D sample entropy window must be >= 1");
  if (!(r > 0.0)) throw ConfigError("2D sample entropy tolerance r must be positive");
  const auto k = static_cast<std::size_t>(m);
  if (image.rows() < k + 2 || image.cols() < k + 2) {
    throw InputError("2D sample entropy needs an image of at least (m+2) per side");
  }
  const std::size_t origin_rows = image.rows() - k;
  const std::size_t origin_cols = image.cols() - k;
  const auto matches_m = CountWindowMatches(image, k, origin_rows, origin_cols, r);
  const auto matches_m1 = CountWindowMatches(image, k + 1, origin_rows, origin_cols, r);
  if (matches_m == 0 || matches_m1 == 0) return std::nullopt;
  // Both U values share the denominator N (N - 1), which cancels.
  const double value = -std::log(static_cast<double>(matches_m1) /
                                 static_cast<double>(matches_m));
  return value + 0.0;
}

std::optional<double> HeatmapEntropy(const Heatmap& heatmap,
                                     const HeatmapEntropyParams& params) {
  Matrix<double> image(heatmap.counts.rows(), heatmap.counts.cols());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const auto x = static_cast<double>(heatmap.counts.data()[i]);
    image.data()[i] = params.log_intensity ? std::log1p(x) : x;
  }
  if (IsConstant(image.data())) return 0.0;
  const double sigma = PopulationStd(image.data());
  return SampleEntropy2D(image, params.m, params.r_factor * sigma);
}

NoveltySeries BuildNoveltySeries(const Trajectory& traj, const GridSpec& spec,
                                 Timestamp interval) {
  const Trajectory resampled = Resample(traj, interval);
  NoveltySeries series{traj.user_id, {}};
  series.bits.reserve(resampled.points.size());
  std::set<Cell> seen;
  for (const auto& p : resampled.points) {
    const auto cell = ProjectToCell(p, spec);
    if (!cell) continue;
    series.bits.push_back(seen.insert(*cell).second ? 1 : 0);
  }
  return series;
}

std::vector<std::size_t> LempelZivLambdas(std::span<const std::uint8_t> s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> lambdas(n);
  // lcp_next[j] = longest common prefix of suffixes j and i + 1, for j <= i.
  std::vector<std::size_t> lcp_next(n + 1, 0), lcp(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    std::size_t longest = 0;
    for (std::size_t j = 0; j < i; ++j) {
      lcp[j] = s[j] == s[i] ? 1 + lcp_next[j + 1] : 0;
      // The match must lie entirely inside s[0, i).
      longest = std::max(longest, std::min(lcp[j], i - j));
    }
    lambdas[i] = longest + 1;
    std::swap(lcp, lcp_next);
  }
  return lambdas;
}

double ActualEntropy(std::span<const std::uint8_t> s) {
  if (s.size() < 2) throw InputError("actual entropy needs a series of length >= 2");
  const auto lambdas = LempelZivLambdas(s);
  const auto total = std::accumulate(lambdas.begin(), lambdas.end(), std::size_t{0});
  const double n = static_cast<double>(s.size());
  return std::log(n) / (static_cast<double>(total) / n);
}

EntropyProfile ComputeEntropyProfile(const Trajectory& traj,
                                     const GridSpec& spec,
                                     const EntropyConfig& config) {
  const Heatmap heatmap = BuildHeatmap(traj, spec);
  EntropyProfile profile;
  profile.user_id = traj.user_id;
  profile.se = ShannonEntropy(heatmap);
  profile.le = LonLatEntropy(traj, config.resample_interval, config.lonlat);
  if (heatmap.NonZeroCells() == 1) {
    profile.he = 0.0;
    profile.ae = 0.0;
    return profile;
  }
  profile.he = HeatmapEntropy(heatmap, config.heatmap);
  const auto novelty = BuildNoveltySeries(traj, spec, config.resample_interval);
  profile.ae = ActualEntropy(novelty.bits);
  return profile;
}

std::string_view ToString(EntropyKind kind) {
  switch (kind) {
    case EntropyKind::kSE: return "SE";
    case EntropyKind::kLE: return "LE";
    case EntropyKind::kHE: return "HE";
    case EntropyKind::kAE: return "AE";
    case EntropyKind::kEOTs: return "EOTs";
  }
  return "unknown";
}

std::optional<EntropyKind> ParseEntropyKind(std::string_view name) {
  for (auto kind : {EntropyKind::kSE, EntropyKind::kLE, EntropyKind::kHE,
                    EntropyKind::kAE, EntropyKind::kEOTs}) {
    if (ToString(kind) == name) return kind;
  }
  return std::nullopt;
}

Matrix<double> RangeSimilarity(std::span<const double> values) {
  const std::size_t n = values.size();
  Matrix<double> sim(n, n, 1.0);
  if (n == 0) return sim;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return sim;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 1.0 - std::abs(values[i] - values[j]) / range;
      sim(i, j) = s;
      sim(j, i) = s;
    }
  }
  return sim;
}

Matrix<double> EntropySimilarity(std::span<const EntropyProfile> profiles,
                                 EntropyKind kind) {
  if (profiles.size() < 2) {
    throw InputError("entropy similarity needs at least 2 profiles");
  }
  if (kind == EntropyKind::kEOTs) {
    Matrix<double> combined = EntropySimilarity(profiles, EntropyKind::kSE);
    for (auto single : {EntropyKind::kLE, EntropyKind::kHE, EntropyKind::kAE}) {
      const auto other = EntropySimilarity(profiles, single);
      for (std::size_t i = 0; i < combined.size(); ++i) {
        combined.data()[i] = std::min(combined.data()[i], other.data()[i]);
      }
    }
    return combined;
  }
  std::vector<double> values;
  values.reserve(profiles.size());
  for (const auto& p : profiles) {
    switch (kind) {
      case EntropyKind::kSE: values.push_back(p.se); break;
      case EntropyKind::kLE: values.push_back(p.le); break;
      case EntropyKind::kAE: values.push_back(p.ae); break;
      case EntropyKind::kHE:
        if (!p.he) {
          throw InputError("heatmap entropy undefined for user '" + p.user_id + "'");
        }
        values.push_back(*p.he);
        break;
      case EntropyKind::kEOTs: break;
    }
  }
  return RangeSimilarity(values);
}

void WriteEntropyProfilesCsv(std::ostream& out,
                             std::span<const EntropyProfile> profiles) {
  csv::WriteRow(out, {"user_id", "se", "le", "he", "ae"});
  for (const auto& p : profiles) {
    csv::WriteRow(out, {p.user_id, csv::FormatDouble(p.se), csv::FormatDouble(p.le),
                        p.he ? csv::FormatDouble(*p.he) : std::string(),
                        csv::FormatDouble(p.ae)});
  }
}

}  // namespace trajfair
