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

// Special functions behind the test distributions.

namespace exowrist::special {

// Regularized incomplete beta I_x(a, b). a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

// Regularized lower / upper incomplete gamma P(a, x), Q(a, x). a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double normal_cdf(double z);
double normal_sf(double z);  // 1 - cdf without cancellation

// Inverse of normal_cdf for p in (0, 1) (Wichura, AS241).
double normal_quantile(double p);

// Two-tailed p of Student's t with df degrees of freedom.
double student_t_two_tailed(double t, double df);

// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double df);

}  // namespace exowrist::special
