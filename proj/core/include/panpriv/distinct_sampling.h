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

// Pan-private distinct sampling. Users are assigned geometric levels by a
// Flajolet-Martin style hash; only users at or above the current level may
// enter the sample, and the level rises whenever the sample fills up.

#ifndef PANPRIV_DISTINCT_SAMPLING_H_
#define PANPRIV_DISTINCT_SAMPLING_H_

#include <cstdint>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "panpriv/mechanisms.h"
#include "panpriv/static_estimator.h"

namespace panpriv {

// Linear hash h(u) = (alpha * u + beta) mod 2^Q with alpha odd, so h is a
// bijection on Z / 2^Q.
struct FmHashParams {
  int q;
  uint64_t alpha;
  uint64_t beta;
};

// Smallest q with universe_size <= 2^q.
int MinimumHashBits(uint64_t universe_size);

// Draws alpha (odd, in [1, 2^Q - 1]) and beta (in [0, 2^Q - 1]) from `seed`,
// with Q = MinimumHashBits(universe_size). universe_size must be in
// [1, 2^63].
absl::StatusOr<FmHashParams> NewFmHash(uint64_t universe_size, uint64_t seed);

// Number of trailing zero bits of x, with trailing_zeros(0) = q so that the
// level map has codomain {0, ..., q}.
int TrailingZeros(uint64_t x, int q);

// Level of `user`: trailing zeros of h(user). Deterministic per (params, user).
inline int HashLevel(const FmHashParams& params, UserId user) {
  const uint64_t mask =
      params.q >= 64 ? ~uint64_t{0} : (uint64_t{1} << params.q) - 1;
  return TrailingZeros((params.alpha * user + params.beta) & mask, params.q);
}

struct PpdsStateSnapshot {
  int level;
  std::vector<UserId> sample;  // sorted ascending
};

// Finalization on sufficient statistics (level, |sample|):
//   (2^L |M| / U - p_init) / (p_upd - p_init) + Laplace(0, 2^L / (eps U)).
DensityEstimate FinalizePpds(const BernoulliPair& pair, int level,
                             uint64_t sample_count, uint64_t universe_size,
                             double epsilon, int64_t sample_bound,
                             NoiseSource& src);

// Single-owner and movable; not safe for concurrent mutation.
class PpdsEstimator {
 public:
  // Builds the hash, then scans the universe once, admitting each qualifying
  // user with probability p_init. Requires sample_bound >= 2 and a budget
  // within the guaranteed range.
  static absl::StatusOr<PpdsEstimator> Create(uint64_t universe_size,
                                              uint64_t sample_bound,
                                              const PrivacyBudget& budget,
                                              uint64_t seed);

  // Same as Create() but with caller-chosen hash parameters.
  static absl::StatusOr<PpdsEstimator> CreateWithHash(
      uint64_t universe_size, uint64_t sample_bound,
      const PrivacyBudget& budget, const FmHashParams& hash, uint64_t seed);

  // A present user is removed with probability 1 - p_upd; an absent user at
  // or above the current level is added with probability p_upd, after which
  // the sample bound is enforced.
  absl::Status Observe(UserId user);

  DensityEstimate Estimate();

  PpdsStateSnapshot Snapshot() const;

  int level() const { return level_; }
  uint64_t sample_count() const { return sample_.size(); }
  bool Contains(UserId user) const { return sample_.contains(user); }
  const FmHashParams& hash() const { return hash_; }
  const BernoulliPair& pair() const { return pair_; }
  uint64_t universe_size() const { return universe_size_; }
  uint64_t sample_bound() const { return sample_bound_; }

 private:
  PpdsEstimator(uint64_t universe_size, uint64_t sample_bound,
                const PrivacyBudget& budget, const BernoulliPair& pair,
                const FmHashParams& hash, uint64_t seed)
      : universe_size_(universe_size),
        sample_bound_(sample_bound),
        budget_(budget),
        pair_(pair),
        hash_(hash),
        src_(seed) {}

  // Evicts every member with level <= L and increments L while the sample is
  // at or above its bound.
  absl::Status EnforceBound();

  uint64_t universe_size_;
  uint64_t sample_bound_;
  PrivacyBudget budget_;
  BernoulliPair pair_;
  FmHashParams hash_;
  NoiseSource src_;
  int level_ = 0;
  absl::flat_hash_set<UserId> sample_;
};

}  // namespace panpriv

#endif  // PANPRIV_DISTINCT_SAMPLING_H_
