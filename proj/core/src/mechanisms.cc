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

#include "panpriv/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace panpriv {
namespace {

// The certificate is checked in floating point; the optimal pair meets it
// with equality, so allow a few ulps of rounding in the log-ratio.
constexpr double kCertificateSlack =
    8 * std::numeric_limits<double>::epsilon();

// A format with at least 113 significand bits. 1 - p needs up to 54 bits, and
// a quotient of a 53-bit by a 54-bit number is either a double midpoint or
// lies at least 2^-109 (relative) away from one, so dividing in this format
// and rounding once to double gives the correctly rounded ratio.
#if defined(__SIZEOF_FLOAT128__)
using WideFloat = __float128;
#else
using WideFloat = long double;
#endif

double RoundedRatio(WideFloat num, WideFloat den) {
  return static_cast<double>(num / den);
}

absl::Status ValidateEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Epsilon must be finite and positive, but is ", epsilon));
  }
  return absl::OkStatus();
}

absl::Status CheckCertificate(double p_init, double p_upd, double half_gap,
                              double declared_epsilon) {
  if (!(p_init > 0 && p_init <= p_upd && p_upd < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli pair must satisfy 0 < p_init <= p_upd < 1, got (",
                     p_init, ", ", p_upd, ")"));
  }
  if (!(half_gap >= 0)) {
    return absl::InvalidArgumentError("Half gap must be non-negative");
  }
  const double log_r1 = std::log1p(2 * half_gap / p_init);
  const double log_r0 = std::log1p(-2 * half_gap / (1 - p_init));
  const double used = std::max(std::abs(log_r0), std::abs(log_r1));
  if (used > declared_epsilon * (1 + kCertificateSlack)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Bernoulli pair (", p_init, ", ", p_upd, ") needs epsilon ", used,
        " but only ", declared_epsilon, " was declared"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (absl::Status s = ValidateEpsilon(epsilon); !s.ok()) return s;
  if (epsilon > kMaxGuaranteedEpsilon) {
    return absl::InvalidArgumentError(
        absl::StrCat("Epsilon must be at most ", kMaxGuaranteedEpsilon,
                     " for the estimators to be pan-private, but is ",
                     epsilon));
  }
  return PrivacyBudget(epsilon);
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::CreateRelaxed(double epsilon) {
  if (absl::Status s = ValidateEpsilon(epsilon); !s.ok()) return s;
  return PrivacyBudget(epsilon);
}

absl::StatusOr<BernoulliPair> BernoulliPair::Create(double center,
                                                    double half_gap,
                                                    double declared_epsilon) {
  if (!std::isfinite(center) || !std::isfinite(half_gap) ||
      !std::isfinite(declared_epsilon) || declared_epsilon < 0) {
    return absl::InvalidArgumentError(
        "Bernoulli pair parameters must be finite, epsilon non-negative");
  }
  const double p_init = center - half_gap;
  const double p_upd = center + half_gap;
  if (absl::Status s = CheckCertificate(p_init, p_upd, half_gap,
                                        declared_epsilon);
      !s.ok()) {
    return s;
  }
  return BernoulliPair(p_init, p_upd, center, half_gap, declared_epsilon);
}

absl::StatusOr<BernoulliPair> MakeDworkPair(const PrivacyBudget& budget) {
  const double eps = budget.epsilon();
  if (!budget.within_guarantee()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Dwork pair requires epsilon <= ", kMaxGuaranteedEpsilon));
  }
  // p_init is exactly 1/2; keeping it literal (rather than center - half_gap)
  // makes R1 = 1 + eps/2 bit-exact.
  BernoulliPair pair(0.5, 0.5 + eps / 4, 0.5 + eps / 8, eps / 8, eps);
  if (absl::Status s =
          CheckCertificate(pair.p_init(), pair.p_upd(), pair.half_gap(), eps);
      !s.ok()) {
    return s;
  }
  return pair;
}

absl::StatusOr<BernoulliPair> MakeOptimalPair(const PrivacyBudget& budget,
                                              double center) {
  const double eps = budget.epsilon();
  if (!budget.within_guarantee()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Optimal pair requires epsilon <= ", kMaxGuaranteedEpsilon));
  }
  if (!(center > 0 && center <= 0.8)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Center must lie in (0, 4/5], but is ", center));
  }
  const double t = std::tanh(eps / 2);
  BernoulliPair pair(center * (1 - t), center * (1 + t), center, center * t,
                     eps);
  if (absl::Status s =
          CheckCertificate(pair.p_init(), pair.p_upd(), pair.half_gap(), eps);
      !s.ok()) {
    return s;
  }
  return pair;
}

StateRatios StatePrivacyRatios(const BernoulliPair& pair) {
  const WideFloat one = 1;
  return StateRatios{
      .r0 = RoundedRatio(one - pair.p_upd(), one - pair.p_init()),
      .r1 = pair.p_upd() / pair.p_init()};
}

double ActualBudget(const BernoulliPair& pair) {
  const double gap = 2 * pair.half_gap();
  const double log_r1 = std::log1p(gap / pair.p_init());
  const double log_r0 = std::log1p(-gap / (1 - pair.p_init()));
  return std::max(std::abs(log_r0), std::abs(log_r1));
}

uint64_t NoiseSource::UniformInt(uint64_t bound) {
  // Lemire's nearly divisionless method.
  unsigned __int128 product =
      static_cast<unsigned __int128>(NextBits()) * bound;
  uint64_t low = static_cast<uint64_t>(product);
  if (low < bound) {
    const uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(NextBits()) * bound;
      low = static_cast<uint64_t>(product);
    }
  }
  return static_cast<uint64_t>(product >> 64);
}

absl::StatusOr<double> LaplaceSample(double scale, NoiseSource& src) {
  if (!std::isfinite(scale) || scale <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be finite and positive, but is ",
                     scale));
  }
  if (std::optional<double> injected = src.TakeInjectedLaplace()) {
    return *injected;
  }
  const double u = src.UniformOpen();
  if (u < 0.5) return scale * std::log(2 * u);
  return -scale * std::log(2 * (1 - u));
}

absl::StatusOr<bool> BernoulliSample(double p, NoiseSource& src) {
  if (!(p >= 0 && p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli probability must lie in [0, 1], but is ", p));
  }
  return src.Bernoulli(p);
}

uint64_t MixSeed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace panpriv
