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

#include "panpriv/distinct_sampling.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"

namespace panpriv {

int MinimumHashBits(uint64_t universe_size) {
  if (universe_size <= 1) return 0;
  return static_cast<int>(std::bit_width(universe_size - 1));
}

absl::StatusOr<FmHashParams> NewFmHash(uint64_t universe_size,
                                       uint64_t seed) {
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  if (universe_size > (uint64_t{1} << 63)) {
    return absl::InvalidArgumentError("Universe size must be at most 2^63");
  }
  const int q = MinimumHashBits(universe_size);
  if (q == 0) return FmHashParams{.q = 0, .alpha = 1, .beta = 0};
  NoiseSource src(seed);
  const uint64_t half_range = uint64_t{1} << (q - 1);
  const uint64_t alpha = 2 * src.UniformInt(half_range) + 1;
  const uint64_t beta = src.UniformInt(2 * half_range);
  return FmHashParams{.q = q, .alpha = alpha, .beta = beta};
}

int TrailingZeros(uint64_t x, int q) {
  if (x == 0) return q;
  return std::countr_zero(x);
}

DensityEstimate FinalizePpds(const BernoulliPair& pair, int level,
                             uint64_t sample_count, uint64_t universe_size,
                             double epsilon, int64_t sample_bound,
                             NoiseSource& src) {
  const double scale_up = std::ldexp(1.0, level);
  const double u = static_cast<double>(universe_size);
  const double mean = scale_up * static_cast<double>(sample_count) / u;
  const double noise = *LaplaceSample(scale_up / (epsilon * u), src);
  return DensityEstimate{.value = DebiasStateMean(pair, mean) + noise,
                         .variant = Variant::kPpds,
                         .sample_size = sample_bound,
                         .epsilon = epsilon,
                         .level = level};
}

absl::StatusOr<PpdsEstimator> PpdsEstimator::Create(
    uint64_t universe_size, uint64_t sample_bound, const PrivacyBudget& budget,
    uint64_t seed) {
  absl::StatusOr<FmHashParams> hash =
      NewFmHash(universe_size, MixSeed(seed, 0x68617368));
  if (!hash.ok()) return hash.status();
  return CreateWithHash(universe_size, sample_bound, budget, *hash, seed);
}

absl::StatusOr<PpdsEstimator> PpdsEstimator::CreateWithHash(
    uint64_t universe_size, uint64_t sample_bound, const PrivacyBudget& budget,
    const FmHashParams& hash, uint64_t seed) {
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  if (sample_bound < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("Sample bound must be at least 2, but is ", sample_bound));
  }
  if (hash.q < 0 || hash.q > 63 || (hash.q > 0 && hash.alpha % 2 == 0) ||
      universe_size > (uint64_t{1} << hash.q)) {
    return absl::InvalidArgumentError(
        "Hash must have odd alpha and cover the universe");
  }
  absl::StatusOr<BernoulliPair> pair = MakeOptimalPair(budget);
  if (!pair.ok()) return pair.status();

  PpdsEstimator est(universe_size, sample_bound, budget, *pair, hash, seed);
  const double p_init = est.pair_.p_init();
  for (UserId u = 1; u <= universe_size; ++u) {
    if (HashLevel(est.hash_, u) >= est.level_ && est.src_.Bernoulli(p_init)) {
      est.sample_.insert(u);
    }
    if (absl::Status s = est.EnforceBound(); !s.ok()) return s;
  }
  return est;
}

absl::Status PpdsEstimator::EnforceBound() {
  while (sample_.size() >= sample_bound_) {
    const int level = level_;
    absl::erase_if(sample_, [this, level](UserId v) {
      return HashLevel(hash_, v) <= level;
    });
    ++level_;
    if (level_ > hash_.q) {
      return absl::FailedPreconditionError(
          absl::StrCat("Sample bound ", sample_bound_,
                       " unreachable: level exceeded ", hash_.q));
    }
  }
  return absl::OkStatus();
}

absl::Status PpdsEstimator::Observe(UserId user) {
  if (user < 1 || user > universe_size_) {
    return absl::OutOfRangeError(absl::StrCat(
        "User id ", user, " outside universe [1, ", universe_size_, "]"));
  }
  if (auto it = sample_.find(user); it != sample_.end()) {
    if (!src_.Bernoulli(pair_.p_upd())) sample_.erase(it);
    return absl::OkStatus();
  }
  if (HashLevel(hash_, user) >= level_ && src_.Bernoulli(pair_.p_upd())) {
    sample_.insert(user);
  }
  return EnforceBound();
}

DensityEstimate PpdsEstimator::Estimate() {
  return FinalizePpds(pair_, level_, sample_.size(), universe_size_,
                      budget_.epsilon(), static_cast<int64_t>(sample_bound_),
                      src_);
}

PpdsStateSnapshot PpdsEstimator::Snapshot() const {
  PpdsStateSnapshot snap{.level = level_,
                         .sample = {sample_.begin(), sample_.end()}};
  std::sort(snap.sample.begin(), snap.sample.end());
  return snap;
}

}  // namespace panpriv
