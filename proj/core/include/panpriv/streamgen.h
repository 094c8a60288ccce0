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

#ifndef PANPRIV_STREAMGEN_H_
#define PANPRIV_STREAMGEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "panpriv/static_estimator.h"

namespace panpriv {

enum class UpdateKind : uint8_t { kInsert, kDelete };

struct StreamUpdate {
  UserId user;
  UpdateKind kind = UpdateKind::kInsert;

  friend bool operator==(const StreamUpdate&, const StreamUpdate&) = default;
};

using Stream = std::vector<StreamUpdate>;

enum class StreamDistribution { kUniform, kZipf };

struct StreamSpec {
  StreamDistribution distribution = StreamDistribution::kUniform;
  double zipf_exponent = 1.0;  // used by kZipf only; must be positive
  uint64_t length = 0;
  uint64_t universe_size = 1;
  uint64_t seed = 0;
};

// Draws insert-only streams of i.i.d. user ids for a fixed distribution. The
// Zipf law P(u) ~ u^-s is normalized over the finite support [1, U] and sampled
// by binary search in a precomputed cumulative table.
class StreamGenerator {
 public:
  static absl::StatusOr<StreamGenerator> Create(StreamDistribution distribution,
                                                uint64_t universe_size,
                                                double zipf_exponent = 1.0);

  Stream Generate(uint64_t length, uint64_t seed) const;

  uint64_t universe_size() const { return universe_size_; }

 private:
  StreamGenerator(StreamDistribution distribution, uint64_t universe_size)
      : distribution_(distribution), universe_size_(universe_size) {}

  StreamDistribution distribution_;
  uint64_t universe_size_;
  std::vector<double> cdf_;
};

absl::StatusOr<Stream> Generate(const StreamSpec& spec);

// Fraction of the universe present at the end of the stream. For insert-only
// streams this is (number of distinct ids) / U; with deletions a user counts
// when its last update is an insert.
absl::StatusOr<double> TrueDensity(const Stream& stream, uint64_t universe_size);

// Text format, one update per line: "<id>" (insert) or "<id>,<+1|-1>".
// Blank lines are skipped and '#' starts a comment. Ids are decimal >= 1.
absl::StatusOr<Stream> ParseStream(const std::string& text);
absl::StatusOr<Stream> ReadStream(const std::string& path);
absl::Status WriteStream(const Stream& stream, const std::string& path);

}  // namespace panpriv

#endif  // PANPRIV_STREAMGEN_H_
