// Copyright 2026 The simulst Authors. All Rights Reserved.
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

#ifndef SIMULST_LOGMATH_HPP
#define SIMULST_LOGMATH_HPP

#include <cmath>
#include <limits>
#include <span>

namespace simulst {

// Zero probability. Kept as a genuine -inf, never a large-negative sentinel,
// so that impossible events stay impossible under addition.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kLogZero) return kLogZero;
  const double diff = b - a;  // <= 0
  if (diff < -50.0) return a;
  return a + std::log1p(std::exp(diff));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kLogZero;
  for (double x : xs) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double x : xs) {
    if (x != kLogZero) sum += std::exp(x - m);
  }
  return m + std::log(sum);
}

}  // namespace simulst

#endif  // SIMULST_LOGMATH_HPP
