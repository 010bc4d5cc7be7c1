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

#pragma once

// Hypothesis tests used to compare the two conditions. All p-values are
// two-tailed. Inputs violating a precondition raise StatsError.

#include <optional>
#include <string>
#include <vector>

#include "exowrist/error.hpp"

namespace exowrist::stats {

class StatsError : public Error {
 public:
  using Error::Error;
};

struct PairedSample {
  std::vector<double> x;
  std::vector<double> y;

  // x - y. Throws StatsError for unequal lengths, n < 2 or non-finite values.
  std::vector<double> differences() const;
};

struct ContingencyTable {
  std::vector<std::vector<long long>> counts;  // rows x columns
};

struct StatsResult {
  std::string test_name;
  double statistic = 0.0;
  std::optional<double> df;
  double p_two_tailed = 1.0;
  std::optional<double> effect_size;
  std::optional<double> normality_p;  // Shapiro-Wilk p of the differences, when gated
};

// Royston's AS R94 approximation. 3 <= n <= 5000.
StatsResult shapiro_wilk(std::vector<double> x);

StatsResult paired_t(const PairedSample& s);

// Zero differences dropped, tied magnitudes mid-ranked. Exact null
// distribution for up to kWilcoxonExactMax nonzero differences, normal
// approximation with continuity correction above.
inline constexpr int kWilcoxonExactMax = 20;
StatsResult wilcoxon_signed_rank(const PairedSample& s);

// Signed ranks (mid-ranks for ties) of the nonzero differences, kept in
// the input order. Exposed for tests.
std::vector<double> signed_ranks(const std::vector<double>& d);

StatsResult chi_square_independence(const ContingencyTable& t, bool yates = false);

double cohens_d_paired(const PairedSample& s);

// Shapiro-Wilk on the differences; paired_t when p >= alpha, otherwise
// wilcoxon. The result carries Cohen's d and the normality p.
StatsResult select_and_run(const PairedSample& s, double alpha = 0.05);

}  // namespace exowrist::stats
