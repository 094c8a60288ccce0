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

#ifndef PANPRIV_STATIC_ESTIMATOR_H_
#define PANPRIV_STATIC_ESTIMATOR_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "panpriv/mechanisms.h"
#include "panpriv/variant.h"

namespace panpriv {

// User ids are 1-based: a universe of size U is {1, ..., U}.
using UserId = uint64_t;

// A finalized density estimate. `value` is unclamped and may fall outside
// [0, 1].
struct DensityEstimate {
  double value;
  Variant variant;
  int64_t sample_size;
  double epsilon;
  // Final sampling level; only set by the distinct-sampling estimator.
  std::optional<int> level;
};

struct StaticStateSnapshot {
  std::vector<UserId> sampled_users;
  std::vector<uint8_t> bits;
};

// Maps the mean of the sampled state bits back to a density estimate:
//   (mean - p_init) / (p_upd - p_init)
// which is 4/eps (mean - 1/2) for the Dwork pair and
// (mean - 1/2 + tanh(eps/2)/2) / tanh(eps/2) for the optimal pair.
double DebiasStateMean(const BernoulliPair& pair, double mean);

// Pan-private density estimator over a static uniform sample of m users.
// Each sampled user owns one bit: drawn from f_init at construction, redrawn
// from f_upd on every appearance and from f_init on every deletion.
//
// Single-owner and movable; not safe for concurrent mutation.
class StaticEstimator {
 public:
  // `variant` must be kDwork or kOptBern; the budget must be within the
  // guaranteed range.
  static absl::StatusOr<StaticEstimator> Create(Variant variant,
                                                uint64_t universe_size,
                                                uint64_t sample_size,
                                                const PrivacyBudget& budget,
                                                uint64_t seed);

  // Insert update for `user`.
  absl::Status Observe(UserId user);
  // Delete update for `user`.
  absl::Status ObserveDelete(UserId user);

  // Draws fresh Laplace noise on every call. Budget accounting for repeated
  // outputs is the caller's concern.
  DensityEstimate Estimate();

  // Finalization step on sufficient statistics; exposed so the return formula
  // can be exercised on chosen states.
  static DensityEstimate Finalize(Variant variant, const BernoulliPair& pair,
                                  double state_mean, int64_t sample_size,
                                  double epsilon, NoiseSource& src);

  // Copy of the internal state (what an intruder would see).
  StaticStateSnapshot Snapshot() const;

  Variant variant() const { return variant_; }
  uint64_t universe_size() const { return universe_size_; }
  uint64_t sample_size() const { return sampled_users_.size(); }
  const BernoulliPair& pair() const { return pair_; }
  bool IsSampled(UserId user) const { return IndexOf(user).has_value(); }

 private:
  StaticEstimator(Variant variant, uint64_t universe_size,
                  const PrivacyBudget& budget, const BernoulliPair& pair,
                  uint64_t seed)
      : variant_(variant),
        universe_size_(universe_size),
        budget_(budget),
        pair_(pair),
        src_(seed) {}

  void DrawSample(uint64_t sample_size);
  std::optional<uint64_t> IndexOf(UserId user) const;
  absl::Status CheckUser(UserId user) const;

  Variant variant_;
  uint64_t universe_size_;
  PrivacyBudget budget_;
  BernoulliPair pair_;
  NoiseSource src_;

  std::vector<UserId> sampled_users_;
  std::vector<uint8_t> bits_;
  // Position lookup. Dense (indexed by user id, 0 = untracked, else index+1)
  // when the sample covers a large fraction of the universe; hashed otherwise.
  std::vector<uint32_t> dense_index_;
  absl::flat_hash_map<UserId, uint32_t> sparse_index_;
};

}  // namespace panpriv

#endif  // PANPRIV_STATIC_ESTIMATOR_H_
