//
// Copyright 2026 The panpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Goodness-of-fit helpers shared by the unit and acceptance tests.

#ifndef PANPRIV_TESTS_TESTING_STATS_H_
#define PANPRIV_TESTS_TESTING_STATS_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "boost/math/distributions/chi_squared.hpp"

namespace panpriv::testing {

struct TestResult {
  double statistic;
  double p_value;
};

// Asymptotic Kolmogorov survival function
//   Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
// For small lambda the alternating series converges slowly, so the
// complementary theta-function form is used there.
inline double KolmogorovSurvival(double lambda) {
  if (lambda <= 0) return 1.0;
  if (lambda < 1.0) {
    // 1 - Q = sqrt(2 pi) / lambda * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double pi = 3.14159265358979323846;
    double sum = 0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      sum += std::exp(-j * j * pi * pi / (8 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

// One-sample KS statistic sup |F_n - F| against a continuous CDF.
inline TestResult OneSampleKs(std::vector<double> samples,
                              const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sqrt_n = std::sqrt(n);
  return {d, KolmogorovSurvival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

// Two-sample KS test with the usual effective-size correction.
inline TestResult TwoSampleKs(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0;
  size_t j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, KolmogorovSurvival((ne + 0.12 + 0.11 / ne) * d)};
}

// Pearson chi-square against expected counts; df = cells - 1.
inline TestResult ChiSquare(const std::vector<double>& observed,
                            const std::vector<double>& expected) {
  double stat = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const boost::math::chi_squared dist(
      static_cast<double>(observed.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

struct MeanAndVariance {
  double mean;
  double variance;  // unbiased
};

inline MeanAndVariance Moments(const std::vector<double>& xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

}  // namespace panpriv::testing

#endif  // PANPRIV_TESTS_TESTING_STATS_H_
