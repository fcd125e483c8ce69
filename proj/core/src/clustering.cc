#include "trajfair/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "trajfair/error.h"
#include "trajfair/fairness.h"

namespace trajfair {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard
// libraries, unlike std::uniform_real_distribution.
double UnitDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix<double> SeedPlusPlus(const Matrix<double>& x, int k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  Matrix<double> centers(static_cast<std::size_t>(k), x.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  std::size_t pick = static_cast<std::size_t>(rng() % n);
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : nearest[i];
      if (total > 0.0) {
        const double target = UnitDouble(rng) * total;
        double cumulative = 0.0;
        pick = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (chosen[i] || nearest[i] == 0.0) continue;
          cumulative += nearest[i];
          pick = i;
          if (cumulative > target) break;
        }
      } else {
        // Every remaining point coincides with a center.
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i) {
          if (!chosen[i]) free.push_back(i);
        }
        pick = free[static_cast<std::size_t>(rng() % free.size())];
      }
    }
    chosen[pick] = true;
    std::copy(x.row(pick).begin(), x.row(pick).end(),
              centers.row(static_cast<std::size_t>(c)).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(x.row(i), x.row(pick)));
    }
  }
  return centers;
}

double Inertia(const Matrix<double>& x, std::span<const int> labels,
               const Matrix<double>& centers) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    total += SquaredDistance(x.row(i), centers.row(static_cast<std::size_t>(labels[i])));
  }
  return total;
}

}  // namespace

Matrix<double> FeatureMatrix(std::span<const EntropyProfile> profiles,
                             std::span<const double> effective_ssim) {
  if (profiles.size() != effective_ssim.size()) {
    throw InputError("feature matrix: profile and SSIM counts differ");
  }
  const std::size_t n = profiles.size();
  Matrix<double> m(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    if (!p.he) {
      throw InputError("feature matrix: heatmap entropy undefined for '" +
                       p.user_id + "'");
    }
    m(i, 0) = effective_ssim[i];
    m(i, 1) = p.se;
    m(i, 2) = p.le;
    m(i, 3) = *p.he;
    m(i, 4) = p.ae;
  }
  for (std::size_t c = 0; c < m.cols() && n > 0; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += m(i, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (m(i, c) - mean) * (m(i, c) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      m(i, c) = sd > 0.0 ? (m(i, c) - mean) / sd : 0.0;
    }
  }
  return m;
}

ClusterAssignment KMeans(const Matrix<double>& features, int k,
                         std::uint64_t seed) {
  const std::size_t n = features.rows();
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw ConfigError("k must lie in [2, " + std::to_string(n) + "], got " +
                      std::to_string(k));
  }
  const auto kk = static_cast<std::size_t>(k);
  std::mt19937_64 rng(seed);
  ClusterAssignment result;
  result.k = k;
  result.centroids = SeedPlusPlus(features, k, rng);
  result.labels.assign(n, -1);

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = result.labels[i];
      double best_d = best >= 0
          ? SquaredDistance(features.row(i), result.centroids.row(static_cast<std::size_t>(best)))
          : std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double d = SquaredDistance(features.row(i), result.centroids.row(c));
        // Switch only on strict improvement so ties cannot oscillate.
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (best != result.labels[i]) {
        result.labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    // Refill empty clusters with the point farthest from its centroid,
    // taken from a cluster that can spare it.
    std::vector<std::size_t> sizes(kk, 0);
    for (int label : result.labels) ++sizes[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < kk; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(result.labels[i]);
        if (sizes[own] < 2) continue;
        const double d = SquaredDistance(features.row(i), result.centroids.row(own));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(result.labels[far])];
      result.labels[far] = static_cast<int>(c);
      sizes[c] = 1;
    }

    Matrix<double> sums(kk, features.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = sums.row(static_cast<std::size_t>(result.labels[i]));
      const auto src = features.row(i);
      for (std::size_t f = 0; f < src.size(); ++f) dst[f] += src[f];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      for (auto& v : sums.row(c)) v /= static_cast<double>(sizes[c]);
    }
    result.centroids = std::move(sums);
    result.inertia_history.push_back(
        Inertia(features, result.labels, result.centroids));
    result.iterations = iter + 1;
  }

  result.inertia = Inertia(features, result.labels, result.centroids);
  result.silhouette = Silhouette(features, result.labels, k);
  return result;
}

double Silhouette(const Matrix<double>& features, std::span<const int> labels,
                  int k) {
  const std::size_t n = features.rows();
  if (n == 0) return 0.0;
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::size_t> sizes(kk, 0);
  for (int label : labels) ++sizes[static_cast<std::size_t>(label)];

  double total = 0.0;
  std::vector<double> dist_sum(kk);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[static_cast<std::size_t>(labels[j])] +=
          std::sqrt(SquaredDistance(features.row(i), features.row(j)));
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] < 2) continue;
    const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kk; ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (std::isfinite(b) && denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

KSelection ChooseK(const Matrix<double>& features, int k_min, int k_max,
                   std::uint64_t seed) {
  if (k_min > k_max) throw ConfigError("empty k range");
  if (k_min < 2) throw ConfigError("k_min must be >= 2");
  if (static_cast<std::size_t>(k_max) > features.rows()) {
    throw ConfigError("k_max exceeds the number of users");
  }
  KSelection selection;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const auto assignment = KMeans(features, k, seed);
    selection.per_k.push_back({k, assignment.inertia, assignment.silhouette});
    if (assignment.silhouette > best) {
      best = assignment.silhouette;
      selection.best_k = k;
    }
  }
  return selection;
}

double ClusterViolation::Rate() const {
  return evaluated_users == 0 ? 0.0
                              : static_cast<double>(violating_users) /
                                    static_cast<double>(evaluated_users);
}

std::vector<ClusterViolation> ClusterViolationRate(
    const ClusterAssignment& assignment, std::span<const std::string> users,
    const OutcomeTable& outcomes, const OutcomeColumn& column, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (users.size() != assignment.labels.size()) {
    throw InvariantError("cluster labels do not cover the user list");
  }
  std::vector<ClusterViolation> out(static_cast<std::size_t>(assignment.k));
  std::vector<std::vector<double>> values(out.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].cluster = static_cast<int>(c);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment.labels[i]);
    ++out[c].size;
    if (const auto v = outcomes.Get(users[i], column.source, column.metric)) {
      values[c].push_back(*v);
    }
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto& vals = values[c];
    out[c].evaluated_users = vals.size();
    if (vals.size() < 2) {
      out[c].singleton = true;
      continue;
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < vals.size(); ++j) {
        if (j != i) sum += OutcomeDelta(vals[i], vals[j]);
      }
      if (sum / static_cast<double>(vals.size() - 1) > tau) ++out[c].violating_users;
    }
  }
  return out;
}

}  // namespace trajfair
