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

#include "panpriv/static_estimator.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"

namespace panpriv {
namespace {

// Above this sample fraction the position lookup uses a dense array, which is
// still O(m) memory.
constexpr uint64_t kDenseFractionDenominator = 8;

}  // namespace

double DebiasStateMean(const BernoulliPair& pair, double mean) {
  return (mean - pair.p_init()) / (2 * pair.half_gap());
}

absl::StatusOr<StaticEstimator> StaticEstimator::Create(
    Variant variant, uint64_t universe_size, uint64_t sample_size,
    const PrivacyBudget& budget, uint64_t seed) {
  if (variant == Variant::kPpds) {
    return absl::InvalidArgumentError(
        "StaticEstimator supports only the dwork and optbern variants");
  }
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  if (sample_size == 0 || sample_size > universe_size) {
    return absl::InvalidArgumentError(
        absl::StrCat("Sample size must lie in [1, ", universe_size,
                     "], but is ", sample_size));
  }
  if (sample_size >= std::numeric_limits<uint32_t>::max()) {
    return absl::InvalidArgumentError("Sample size too large");
  }
  absl::StatusOr<BernoulliPair> pair = variant == Variant::kDwork
                                           ? MakeDworkPair(budget)
                                           : MakeOptimalPair(budget);
  if (!pair.ok()) return pair.status();

  StaticEstimator est(variant, universe_size, budget, *pair, seed);
  est.DrawSample(sample_size);
  est.bits_.resize(sample_size);
  const double p_init = est.pair_.p_init();
  for (uint8_t& bit : est.bits_) bit = est.src_.Bernoulli(p_init);
  return est;
}

void StaticEstimator::DrawSample(uint64_t sample_size) {
  // Partial Fisher-Yates over the virtual array [1, ..., U].
  sampled_users_.resize(sample_size);
  const bool dense =
      sample_size * kDenseFractionDenominator >= universe_size_;
  if (dense) {
    std::vector<UserId> perm(universe_size_);
    std::iota(perm.begin(), perm.end(), UserId{1});
    for (uint64_t i = 0; i < sample_size; ++i) {
      const uint64_t j = i + src_.UniformInt(universe_size_ - i);
      std::swap(perm[i], perm[j]);
      sampled_users_[i] = perm[i];
    }
    dense_index_.assign(universe_size_ + 1, 0);
    for (uint64_t i = 0; i < sample_size; ++i) {
      dense_index_[sampled_users_[i]] = static_cast<uint32_t>(i + 1);
    }
    return;
  }

  absl::flat_hash_map<uint64_t, UserId> displaced;
  displaced.reserve(2 * sample_size);
  auto value_at = [&displaced](uint64_t k) {
    auto it = displaced.find(k);
    return it == displaced.end() ? UserId{k + 1} : it->second;
  };
  for (uint64_t i = 0; i < sample_size; ++i) {
    const uint64_t j = i + src_.UniformInt(universe_size_ - i);
    const UserId at_i = value_at(i);
    const UserId at_j = value_at(j);
    displaced[j] = at_i;
    sampled_users_[i] = at_j;
  }
  sparse_index_.reserve(sample_size);
  for (uint64_t i = 0; i < sample_size; ++i) {
    sparse_index_.emplace(sampled_users_[i], static_cast<uint32_t>(i));
  }
}

std::optional<uint64_t> StaticEstimator::IndexOf(UserId user) const {
  if (!dense_index_.empty()) {
    if (user >= dense_index_.size() || dense_index_[user] == 0) {
      return std::nullopt;
    }
    return dense_index_[user] - 1;
  }
  auto it = sparse_index_.find(user);
  if (it == sparse_index_.end()) return std::nullopt;
  return it->second;
}

absl::Status StaticEstimator::CheckUser(UserId user) const {
  if (user < 1 || user > universe_size_) {
    return absl::OutOfRangeError(absl::StrCat(
        "User id ", user, " outside universe [1, ", universe_size_, "]"));
  }
  return absl::OkStatus();
}

absl::Status StaticEstimator::Observe(UserId user) {
  if (absl::Status s = CheckUser(user); !s.ok()) return s;
  if (std::optional<uint64_t> i = IndexOf(user)) {
    bits_[*i] = src_.Bernoulli(pair_.p_upd());
  }
  return absl::OkStatus();
}

absl::Status StaticEstimator::ObserveDelete(UserId user) {
  if (absl::Status s = CheckUser(user); !s.ok()) return s;
  if (std::optional<uint64_t> i = IndexOf(user)) {
    bits_[*i] = src_.Bernoulli(pair_.p_init());
  }
  return absl::OkStatus();
}

DensityEstimate StaticEstimator::Finalize(Variant variant,
                                          const BernoulliPair& pair,
                                          double state_mean,
                                          int64_t sample_size, double epsilon,
                                          NoiseSource& src) {
  const double scale = 1.0 / (epsilon * static_cast<double>(sample_size));
  // Scale is positive for any validated budget and sample size.
  const double noise = *LaplaceSample(scale, src);
  return DensityEstimate{.value = DebiasStateMean(pair, state_mean) + noise,
                         .variant = variant,
                         .sample_size = sample_size,
                         .epsilon = epsilon,
                         .level = std::nullopt};
}

DensityEstimate StaticEstimator::Estimate() {
  uint64_t ones = 0;
  for (uint8_t bit : bits_) ones += bit;
  const auto m = static_cast<int64_t>(bits_.size());
  const double mean = static_cast<double>(ones) / static_cast<double>(m);
  return Finalize(variant_, pair_, mean, m, budget_.epsilon(), src_);
}

StaticStateSnapshot StaticEstimator::Snapshot() const {
  return StaticStateSnapshot{.sampled_users = sampled_users_, .bits = bits_};
}

}  // namespace panpriv
