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

// Randomized primitives shared by every estimator: the privacy budget, the
// pair of Bernoulli state distributions (f_init for users not yet seen, f_upd
// for users that have appeared) and a seeded noise source.

#ifndef PANPRIV_MECHANISMS_H_
#define PANPRIV_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <random>

#include "absl/status/statusor.h"

namespace panpriv {

// Largest epsilon for which the estimators' pan-privacy guarantees hold.
inline constexpr double kMaxGuaranteedEpsilon = 0.5;

// A validated privacy parameter. Create() enforces 0 < epsilon <= 1/2, the
// range in which the estimators are private; CreateRelaxed() accepts any
// positive finite epsilon and is meant for bound evaluation only.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon);
  static absl::StatusOr<PrivacyBudget> CreateRelaxed(double epsilon);

  double epsilon() const { return epsilon_; }
  bool within_guarantee() const { return epsilon_ <= kMaxGuaranteedEpsilon; }

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}

  double epsilon_;
};

// Two Bernoulli distributions symmetric around `center`:
//   p_init = center - half_gap, p_upd = center + half_gap.
// Every pair carries the epsilon it was built for and satisfies the state DP
// certificate  e^-eps <= R(b) = f_upd(b) / f_init(b) <= e^eps  for b in {0,1}.
class BernoulliPair {
 public:
  // Validates 0 < p_init <= p_upd < 1, half_gap >= 0 and the certificate.
  static absl::StatusOr<BernoulliPair> Create(double center, double half_gap,
                                              double declared_epsilon);

  double p_init() const { return p_init_; }
  double p_upd() const { return p_upd_; }
  double center() const { return center_; }
  double half_gap() const { return half_gap_; }
  double declared_epsilon() const { return declared_epsilon_; }

 private:
  friend absl::StatusOr<BernoulliPair> MakeDworkPair(const PrivacyBudget&);
  friend absl::StatusOr<BernoulliPair> MakeOptimalPair(const PrivacyBudget&,
                                                       double);

  BernoulliPair(double p_init, double p_upd, double center, double half_gap,
                double declared_epsilon)
      : p_init_(p_init),
        p_upd_(p_upd),
        center_(center),
        half_gap_(half_gap),
        declared_epsilon_(declared_epsilon) {}

  double p_init_;
  double p_upd_;
  double center_;
  double half_gap_;
  double declared_epsilon_;
};

// Pair used by the conventional estimator: (1/2, 1/2 + eps/4).
absl::StatusOr<BernoulliPair> MakeDworkPair(const PrivacyBudget& budget);

// Pair that spends the whole budget: p = c (1 -/+ tanh(eps/2)). The center
// must lie in (0, 4/5], where both probabilities stay inside (0, 1) for every
// eps <= 1/2. The b = 0 ratio (1 - p_upd) / (1 - p_init) drops below e^-eps as
// soon as c > 1/2, so such centers fail the certificate and are rejected.
absl::StatusOr<BernoulliPair> MakeOptimalPair(const PrivacyBudget& budget,
                                              double center = 0.5);

struct StateRatios {
  double r0;  // (1 - p_upd) / (1 - p_init)
  double r1;  // p_upd / p_init
};

StateRatios StatePrivacyRatios(const BernoulliPair& pair);

// Smallest epsilon for which the pair is epsilon-DP: max(|log R0|, |log R1|).
// Evaluated through log1p of the half gap so small budgets keep full
// relative precision.
double ActualBudget(const BernoulliPair& pair);

// Seeded, single-owner source of randomness. Draws are built from the raw
// 64-bit output of std::mt19937_64 (fully specified by the standard), so a
// seed replays bit-exactly on any conforming platform.
class NoiseSource {
 public:
  explicit NoiseSource(uint64_t seed) : engine_(seed) {}

  uint64_t NextBits() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(NextBits() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1), symmetric around 1/2.
  double UniformOpen() {
    return (static_cast<double>(NextBits() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound); bound must be positive. Unbiased
  // (multiply-shift with rejection).
  uint64_t UniformInt(uint64_t bound);

  // Unchecked Bernoulli draw for callers that validated p up front.
  bool Bernoulli(double p) { return Uniform() < p; }

  // Forces the next Laplace draw to return `value`. Test hook only.
  void InjectNextLaplace(double value) { injected_laplace_ = value; }

  std::optional<double> TakeInjectedLaplace() {
    std::optional<double> out = injected_laplace_;
    injected_laplace_.reset();
    return out;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> injected_laplace_;
};

// Laplace(0, scale) by inverse CDF on a single uniform draw.
absl::StatusOr<double> LaplaceSample(double scale, NoiseSource& src);

absl::StatusOr<bool> BernoulliSample(double p, NoiseSource& src);

// SplitMix64 finalizer over the combination of two words. Used to derive
// independent seeds for repetitions, grid points and streams.
uint64_t MixSeed(uint64_t a, uint64_t b);

}  // namespace panpriv

#endif  // PANPRIV_MECHANISMS_H_
