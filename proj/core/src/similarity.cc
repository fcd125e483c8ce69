#include "trajfair/similarity.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "trajfair/csv.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

// Sum of `m` over the border-clipped (2 half + 1)^2 window centered on each
// cell. Separable: row prefix sums, then column prefix sums of those.
Matrix<double> BoxSum(const Matrix<double>& m, std::size_t half) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Matrix<double> horizontal(rows, cols);
  std::vector<double> prefix(std::max(rows, cols) + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    prefix[0] = 0.0;
    for (std::size_t c = 0; c < cols; ++c) prefix[c + 1] = prefix[c] + m(r, c);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t lo = c >= half ? c - half : 0;
      const std::size_t hi = std::min(cols - 1, c + half);
      horizontal(r, c) = prefix[hi + 1] - prefix[lo];
    }
  }
  Matrix<double> out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    prefix[0] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      prefix[r + 1] = prefix[r] + horizontal(r, c);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t lo = r >= half ? r - half : 0;
      const std::size_t hi = std::min(rows - 1, r + half);
      out(r, c) = prefix[hi + 1] - prefix[lo];
    }
  }
  return out;
}

std::size_t ClippedExtent(std::size_t i, std::size_t n, std::size_t half) {
  const std::size_t lo = i >= half ? i - half : 0;
  const std::size_t hi = std::min(n - 1, i + half);
  return hi - lo + 1;
}

void CheckComparable(const Heatmap& a, const Heatmap& b,
                     const SsimParams& params) {
  params.Validate();
  if (!(a.spec == b.spec)) {
    throw ConfigError("SSIM requires heatmaps on the same grid");
  }
  const auto window = static_cast<std::size_t>(params.window);
  if (window > a.spec.rows() || window > a.spec.cols()) {
    throw ConfigError("SSIM window " + std::to_string(params.window) +
                      " larger than the " + std::to_string(a.spec.rows()) +
                      "x" + std::to_string(a.spec.cols()) + " grid");
  }
}

}  // namespace

void SsimParams::Validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
    throw ConfigError("SSIM k1, k2 and dynamic range must be positive");
  }
  if (window <= 0 || window % 2 == 0) {
    throw ConfigError("SSIM window must be an odd positive integer");
  }
}

std::pair<Matrix<double>, Matrix<double>> NormalizePair(
    const Heatmap& a, const Heatmap& b, const SsimParams& params) {
  auto transform = [&](std::int64_t count) {
    const auto x = static_cast<double>(count);
    return params.log_intensity ? std::log1p(x) : x;
  };
  const double peak =
      transform(std::max(a.MaxCount(), b.MaxCount()));
  const double scale = peak > 0.0 ? params.dynamic_range / peak : 0.0;
  auto scaled = [&](const Heatmap& h) {
    Matrix<double> out(h.counts.rows(), h.counts.cols());
    auto src = h.counts.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = transform(src[i]) * scale;
    return out;
  };
  return {scaled(a), scaled(b)};
}

Matrix<double> LocalSsim(const Matrix<double>& a, const Matrix<double>& b,
                         const SsimParams& params) {
  params.Validate();
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError("SSIM images differ in size");
  }
  const std::size_t rows = a.rows(), cols = a.cols();
  const auto half = static_cast<std::size_t>(params.window / 2);

  Matrix<double> aa(rows, cols), bb(rows, cols), ab(rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    aa.data()[i] = x * x;
    bb.data()[i] = y * y;
    ab.data()[i] = x * y;
  }
  const auto sum_a = BoxSum(a, half);
  const auto sum_b = BoxSum(b, half);
  const auto sum_aa = BoxSum(aa, half);
  const auto sum_bb = BoxSum(bb, half);
  const auto sum_ab = BoxSum(ab, half);

  const double c1 = params.c1(), c2 = params.c2();
  Matrix<double> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto nr = ClippedExtent(r, rows, half);
    for (std::size_t c = 0; c < cols; ++c) {
      const double n = static_cast<double>(nr * ClippedExtent(c, cols, half));
      const double mu_a = sum_a(r, c) / n;
      const double mu_b = sum_b(r, c) / n;
      const double var_a = sum_aa(r, c) / n - mu_a * mu_a;
      const double var_b = sum_bb(r, c) / n - mu_b * mu_b;
      const double cov = sum_ab(r, c) / n - mu_a * mu_b;
      const double value = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                           ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      out(r, c) = std::clamp(value, -1.0, 1.0);
    }
  }
  return out;
}

SsimMap ComputeSsimMap(const Heatmap& a, const Heatmap& b,
                       const SsimParams& params) {
  CheckComparable(a, b, params);
  const auto [x, y] = NormalizePair(a, b, params);
  return {a.spec, LocalSsim(x, y, params)};
}

double SsimGlobal(const Heatmap& a, const Heatmap& b, const SsimParams& params) {
  const auto map = ComputeSsimMap(a, b, params);
  double sum = 0.0;
  for (double v : map.values.data()) sum += v;
  return sum / static_cast<double>(map.values.size());
}

double EffectiveSsim(const Heatmap& user, const Heatmap& integrated,
                     const SsimParams& params) {
  const auto map = ComputeSsimMap(user, integrated, params);
  double sum = 0.0;
  std::size_t swept = 0;
  const auto mask = integrated.counts.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] > 0) {
      sum += map.values.data()[i];
      ++swept;
    }
  }
  if (swept == 0) {
    throw InputError("effective SSIM needs a non-empty integrated heatmap");
  }
  return sum / static_cast<double>(swept);
}

Matrix<double> PairwiseSsim(std::span<const Heatmap> users,
                            const SsimParams& params) {
  if (users.size() < 2) throw InputError("pairwise SSIM needs at least 2 users");
  const std::size_t n = users.size();
  Matrix<double> m(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = SsimGlobal(users[i], users[j], params);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

void WriteLabeledMatrixCsv(std::ostream& out,
                           std::span<const std::string> labels,
                           const Matrix<double>& matrix) {
  if (labels.size() != matrix.rows() || labels.size() != matrix.cols()) {
    throw InvariantError("label count does not match matrix shape");
  }
  std::vector<std::string> row{"user_id"};
  row.insert(row.end(), labels.begin(), labels.end());
  csv::WriteRow(out, row);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    row.assign({labels[i]});
    for (double v : matrix.row(i)) row.push_back(csv::FormatDouble(v));
    csv::WriteRow(out, row);
  }
}

}  // namespace trajfair
