// Copyright 2026 The exowrist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "exowrist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exowrist/special_functions.hpp"

namespace exowrist::stats {
namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Ascending-order polynomial c[0] + c[1] x + ...
template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

// Half-coefficients a[0..n/2) of the Shapiro-Wilk weights.
std::vector<double> sw_coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = special::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(c1, rsn) - m[0] / ssumm2;

  std::size_t first;
  double fac;
  if (n > 5) {
    first = 2;
    const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    first = 1;
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

std::vector<double> PairedSample::differences() const {
  if (x.size() != y.size()) throw StatsError("paired sample: x and y differ in length");
  if (x.size() < 2) throw StatsError("paired sample: need at least 2 pairs");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw StatsError("paired sample: non-finite value");
    d[i] = x[i] - y[i];
  }
  return d;
}

StatsResult shapiro_wilk(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw StatsError("shapiro_wilk: need at least 3 values");
  if (n > 5000) throw StatsError("shapiro_wilk: more than 5000 values");
  for (double v : x) {
    if (!std::isfinite(v)) throw StatsError("shapiro_wilk: non-finite value");
  }
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (range < 1e-19 * std::max(1.0, std::abs(x.front()))) throw StatsError("shapiro_wilk: all values identical");

  const std::vector<double> a = sw_coefficients(n);

  // Squared correlation between the ordered data and the full weight vector.
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n / 2; ++i) {
    w[i] = -a[i];
    w[n - 1 - i] = a[i];
  }
  double sx = 0.0;
  for (double v : x) sx += v / range;
  sx /= static_cast<double>(n);
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = w[i];
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  // 1 - W, computed this way to keep precision when W is close to 1.
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double stat = 1.0 - w1;

  StatsResult r;
  r.test_name = "shapiro_wilk";
  r.statistic = stat;

  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // asin(sqrt(3/4))
    r.p_two_tailed = std::clamp(pi6 * (std::asin(std::sqrt(stat)) - stqr), 0.0, 1.0);
    return r;
  }

  static constexpr double g[] = {-2.273, 0.459};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};

  const double an = static_cast<double>(n);
  double y = std::log(w1);
  double m, s;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) {
      r.p_two_tailed = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    m = poly(c3, an);
    s = std::exp(poly(c4, an));
  } else {
    const double xx = std::log(an);
    m = poly(c5, xx);
    s = std::exp(poly(c6, xx));
  }
  r.p_two_tailed = std::clamp(special::normal_sf((y - m) / s), 0.0, 1.0);
  return r;
}

StatsResult paired_t(const PairedSample& s) {
  const std::vector<double> d = s.differences();
  const double n = static_cast<double>(d.size());
  const double mean = mean_of(d);
  const double sd = sd_of(d, mean);
  if (!(sd > 0.0)) throw StatsError("paired_t: differences have zero variance");

  StatsResult r;
  r.test_name = "paired_t";
  r.statistic = mean / (sd / std::sqrt(n));
  r.df = n - 1.0;
  r.p_two_tailed = std::clamp(special::student_t_two_tailed(r.statistic, *r.df), 0.0, 1.0);
  r.effect_size = mean / sd;
  return r;
}

std::vector<double> signed_ranks(const std::vector<double>& d) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  std::vector<double> ranks(idx.size());
  std::vector<double> out;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[k] = mid;
    i = j + 1;
  }
  // Back to input order.
  std::vector<std::pair<std::size_t, double>> by_input;
  for (std::size_t k = 0; k < idx.size(); ++k) by_input.emplace_back(idx[k], std::copysign(ranks[k], d[idx[k]]));
  std::sort(by_input.begin(), by_input.end());
  for (const auto& [i, r] : by_input) out.push_back(r);
  return out;
}

StatsResult wilcoxon_signed_rank(const PairedSample& s) {
  const std::vector<double> d = s.differences();
  const std::vector<double> ranks = signed_ranks(d);
  const std::size_t m = ranks.size();
  if (m == 0) throw StatsError("wilcoxon: all differences are zero");

  // Ranks are multiples of 1/2; work in doubled ranks so sums are integers.
  std::vector<long long> r2(m);
  long long w_plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    r2[i] = std::llround(2.0 * std::abs(ranks[i]));
    total2 += r2[i];
    if (ranks[i] > 0.0) w_plus2 += r2[i];
  }
  const long long w2 = std::min(w_plus2, total2 - w_plus2);

  StatsResult r;
  r.test_name = "wilcoxon";
  r.statistic = static_cast<double>(w2) / 2.0;

  if (static_cast<int>(m) <= kWilcoxonExactMax) {
    // Number of sign assignments reaching each W+ (doubled).
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1.0;
    long long reach = 0;
    for (long long v : r2) {
      reach += v;
      for (long long k = reach; k >= v; --k) count[static_cast<std::size_t>(k)] += count[static_cast<std::size_t>(k - v)];
    }
    double extreme = 0.0;
    for (long long k = 0; k <= total2; ++k) {
      if (std::min(k, total2 - k) <= w2) extreme += count[static_cast<std::size_t>(k)];
    }
    r.p_two_tailed = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(m)));
    return r;
  }

  const double mm = static_cast<double>(m);
  double tie_term = 0.0;
  std::vector<double> mags(m);
  for (std::size_t i = 0; i < m; ++i) mags[i] = std::abs(ranks[i]);
  std::sort(mags.begin(), mags.end());
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && mags[j] == mags[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = mm * (mm + 1.0) / 4.0;
  const double sd = std::sqrt(mm * (mm + 1.0) * (2.0 * mm + 1.0) / 24.0 - tie_term / 48.0);
  const double z = std::max(0.0, std::abs(r.statistic - mean) - 0.5) / sd;
  r.p_two_tailed = std::min(1.0, 2.0 * special::normal_sf(z));
  return r;
}

StatsResult chi_square_independence(const ContingencyTable& t, bool yates) {
  const std::size_t rows = t.counts.size();
  if (rows < 2) throw StatsError("chi_square: need at least 2 rows");
  const std::size_t cols = t.counts.front().size();
  if (cols < 2) throw StatsError("chi_square: need at least 2 columns");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (t.counts[i].size() != cols) throw StatsError("chi_square: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (t.counts[i][j] < 0) throw StatsError("chi_square: negative count");
      const double c = static_cast<double>(t.counts[i][j]);
      row_sum[i] += c;
      col_sum[j] += c;
      total += c;
    }
  }
  if (total <= 0.0) throw StatsError("chi_square: empty table");
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_sum[i] == 0.0) throw StatsError("chi_square: row " + std::to_string(i) + " has a zero margin");
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_sum[j] == 0.0) throw StatsError("chi_square: column " + std::to_string(j) + " has a zero margin");
  }

  const bool correct = yates && rows == 2 && cols == 2;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / total;
      double diff = std::abs(static_cast<double>(t.counts[i][j]) - e);
      if (correct) diff = std::max(0.0, diff - 0.5);
      chi2 += diff * diff / e;
    }
  }
  StatsResult r;
  r.test_name = correct ? "chi_square_yates" : "chi_square";
  r.statistic = chi2;
  r.df = static_cast<double>((rows - 1) * (cols - 1));
  r.p_two_tailed = std::clamp(special::chi_square_sf(chi2, *r.df), 0.0, 1.0);
  return r;
}

double cohens_d_paired(const PairedSample& s) {
  const std::vector<double> d = s.differences();
  const double mean = mean_of(d);
  const double sd = sd_of(d, mean);
  if (!(sd > 0.0)) throw StatsError("cohens_d: differences have zero variance");
  return mean / sd;
}

StatsResult select_and_run(const PairedSample& s, double alpha) {
  const StatsResult normality = shapiro_wilk(s.differences());
  StatsResult r = normality.p_two_tailed >= alpha ? paired_t(s) : wilcoxon_signed_rank(s);
  r.normality_p = normality.p_two_tailed;
  if (!r.effect_size) {
    try {
      r.effect_size = cohens_d_paired(s);
    } catch (const StatsError&) {
      // zero-variance differences: no effect size
    }
  }
  return r;
}

}  // namespace exowrist::stats
