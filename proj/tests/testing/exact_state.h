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

// Exact (rational) law of the per-user presence state for small universes in
// which every user qualifies for the sample. Independent of the estimator
// code: it encodes the transition rules directly.

#ifndef PANPRIV_TESTS_TESTING_EXACT_STATE_H_
#define PANPRIV_TESTS_TESTING_EXACT_STATE_H_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <utility>
#include <vector>

#include "boost/multiprecision/cpp_int.hpp"

namespace panpriv::testing {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double.
inline Rational ToRational(double x) {
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<int64_t>(std::ldexp(mantissa, 53));
  Rational r(scaled);
  exponent -= 53;
  const boost::multiprecision::cpp_int two_pow =
      boost::multiprecision::cpp_int(1) << std::abs(exponent);
  return exponent >= 0 ? r * Rational(two_pow) : r / Rational(two_pow);
}

enum class UpdateRule {
  // Static estimators: an appearance redraws the bit from f_upd.
  kRedraw,
  // Distinct sampling: a present user stays with probability p_upd, an
  // absent one enters with probability p_upd.
  kToggle,
};

// Map from presence bitmask (bit u-1 for user u) to probability, after the
// initial f_init draw and the given insert-only stream.
inline std::map<uint32_t, Rational> ExactStateLaw(
    int users, const Rational& p_init, const Rational& p_upd,
    const std::vector<int>& stream, UpdateRule rule) {
  std::map<uint32_t, Rational> law;
  law[0] = 1;
  for (int u = 0; u < users; ++u) {
    std::map<uint32_t, Rational> next;
    for (const auto& [state, p] : law) {
      next[state | (1u << u)] += p * p_init;
      next[state] += p * (1 - p_init);
    }
    law = std::move(next);
  }
  for (int user : stream) {
    const uint32_t bit = 1u << (user - 1);
    std::map<uint32_t, Rational> next;
    for (const auto& [state, p] : law) {
      const bool present = (state & bit) != 0;
      if (rule == UpdateRule::kRedraw || !present) {
        next[state | bit] += p * p_upd;
        next[state & ~bit] += p * (1 - p_upd);
      } else {
        next[state] += p * p_upd;
        next[state & ~bit] += p * (1 - p_upd);
      }
    }
    law = std::move(next);
  }
  return law;
}

// True when |x - q| <= ulp(x) / 2, i.e. x is a correctly rounded value of q.
inline bool IsCorrectlyRounded(double x, const Rational& q) {
  const double up = std::nextafter(x, 2 * x + 1);
  const Rational half_ulp = (ToRational(up) - ToRational(x)) / 2;
  const Rational diff = ToRational(x) - q;
  return (diff < 0 ? -diff : diff) <= half_ulp;
}

}  // namespace panpriv::testing

#endif  // PANPRIV_TESTS_TESTING_EXACT_STATE_H_
