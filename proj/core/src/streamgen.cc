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

#include "panpriv/streamgen.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "panpriv/mechanisms.h"

namespace panpriv {
namespace {

// Zipf tables are kept in memory, one double per id.
constexpr uint64_t kMaxZipfUniverse = uint64_t{1} << 28;

}  // namespace

absl::StatusOr<StreamGenerator> StreamGenerator::Create(
    StreamDistribution distribution, uint64_t universe_size,
    double zipf_exponent) {
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  StreamGenerator gen(distribution, universe_size);
  if (distribution == StreamDistribution::kUniform) return gen;

  if (!std::isfinite(zipf_exponent) || zipf_exponent <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Zipf exponent must be finite and positive, but is ", zipf_exponent));
  }
  if (universe_size > kMaxZipfUniverse) {
    return absl::InvalidArgumentError(
        absl::StrCat("Zipf universe too large: ", universe_size));
  }
  gen.cdf_.resize(universe_size);
  double total = 0;
  for (uint64_t u = 1; u <= universe_size; ++u) {
    total += std::pow(static_cast<double>(u), -zipf_exponent);
    gen.cdf_[u - 1] = total;
  }
  for (double& c : gen.cdf_) c /= total;
  gen.cdf_.back() = 1.0;
  return gen;
}

Stream StreamGenerator::Generate(uint64_t length, uint64_t seed) const {
  NoiseSource src(seed);
  Stream stream(length);
  if (distribution_ == StreamDistribution::kUniform) {
    for (StreamUpdate& update : stream) {
      update.user = src.UniformInt(universe_size_) + 1;
    }
    return stream;
  }
  for (StreamUpdate& update : stream) {
    const double u = src.Uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto index = static_cast<uint64_t>(it - cdf_.begin());
    update.user = std::min(index, universe_size_ - 1) + 1;
  }
  return stream;
}

absl::StatusOr<Stream> Generate(const StreamSpec& spec) {
  absl::StatusOr<StreamGenerator> gen = StreamGenerator::Create(
      spec.distribution, spec.universe_size, spec.zipf_exponent);
  if (!gen.ok()) return gen.status();
  return gen->Generate(spec.length, spec.seed);
}

absl::StatusOr<double> TrueDensity(const Stream& stream,
                                   uint64_t universe_size) {
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  std::vector<bool> present(universe_size + 1, false);
  uint64_t count = 0;
  for (const StreamUpdate& update : stream) {
    if (update.user < 1 || update.user > universe_size) {
      return absl::OutOfRangeError(absl::StrCat(
          "User id ", update.user, " outside universe [1, ", universe_size,
          "]"));
    }
    const bool now = update.kind == UpdateKind::kInsert;
    if (present[update.user] != now) {
      present[update.user] = now;
      if (now) {
        ++count;
      } else {
        --count;
      }
    }
  }
  return static_cast<double>(count) / static_cast<double>(universe_size);
}

absl::StatusOr<Stream> ParseStream(const std::string& text) {
  Stream stream;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (const size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;

    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() > 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected '<id>' or '<id>,<+1|-1>'"));
    }
    const absl::string_view id_text = absl::StripAsciiWhitespace(fields[0]);
    int64_t id = 0;
    if (!absl::SimpleAtoi(id_text, &id)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": invalid user id '", id_text, "'"));
    }
    if (id <= 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": user id must be >= 1, got ", id));
    }
    StreamUpdate update{.user = static_cast<UserId>(id)};
    if (fields.size() == 2) {
      const absl::string_view sign = absl::StripAsciiWhitespace(fields[1]);
      if (sign == "+1" || sign == "1") {
        update.kind = UpdateKind::kInsert;
      } else if (sign == "-1") {
        update.kind = UpdateKind::kDelete;
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": update must be +1 or -1, got '", sign,
            "'"));
      }
    }
    stream.push_back(update);
  }
  return stream;
}

absl::StatusOr<Stream> ReadStream(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("Cannot open ", path, ": ", std::strerror(errno)));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("Failed reading ", path));
  }
  absl::StatusOr<Stream> stream = ParseStream(buffer.str());
  if (!stream.ok()) {
    return absl::Status(stream.status().code(),
                        absl::StrCat(path, ": ", stream.status().message()));
  }
  return stream;
}

absl::Status WriteStream(const Stream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("Cannot open ", path, " for writing: ",
                     std::strerror(errno)));
  }
  for (const StreamUpdate& update : stream) {
    out << update.user;
    if (update.kind == UpdateKind::kDelete) out << ",-1";
    out << '\n';
  }
  out.flush();
  if (!out) {
    return absl::DataLossError(absl::StrCat("Failed writing ", path));
  }
  return absl::OkStatus();
}

}  // namespace panpriv
