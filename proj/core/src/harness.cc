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

#include "panpriv/harness.h"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <type_traits>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "panpriv/bounds.h"
#include "panpriv/distinct_sampling.h"
#include "panpriv/mechanisms.h"
#include "panpriv/static_estimator.h"

namespace panpriv {
namespace {

constexpr uint64_t kStreamSeedTag = 0x73747265616d;  // "stream"

struct GridPoint {
  Variant variant;
  double epsilon;
  uint64_t sample_size;

  // Seed key that depends only on the point itself.
  uint64_t Key() const {
    return MixSeed(MixSeed(static_cast<uint64_t>(variant),
                           std::bit_cast<uint64_t>(epsilon)),
                   sample_size);
  }
};

std::vector<GridPoint> BuildGrid(const ExperimentConfig& config) {
  std::vector<Variant> variants = config.variants;
  std::vector<double> epsilons = config.epsilons;
  std::vector<uint64_t> sizes = config.sample_sizes;
  std::sort(variants.begin(), variants.end());
  variants.erase(std::unique(variants.begin(), variants.end()), variants.end());
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<GridPoint> grid;
  for (Variant v : variants) {
    for (double eps : epsilons) {
      for (uint64_t m : sizes) grid.push_back({v, eps, m});
    }
  }
  return grid;
}

uint64_t StreamSeed(const ExperimentConfig& config, int64_t rep) {
  if (config.fixed_stream) return MixSeed(config.base_seed, kStreamSeedTag);
  return MixSeed(MixSeed(config.base_seed, static_cast<uint64_t>(rep)),
                 kStreamSeedTag);
}

template <typename Estimator>
absl::Status Feed(Estimator& est, const Stream& stream) {
  for (const StreamUpdate& update : stream) {
    absl::Status s;
    if (update.kind == UpdateKind::kInsert) {
      s = est.Observe(update.user);
    } else if constexpr (std::is_same_v<Estimator, StaticEstimator>) {
      s = est.ObserveDelete(update.user);
    } else {
      s = absl::UnimplementedError(
          "Distinct sampling does not support delete updates");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> ParseDoubleList(absl::string_view value) {
  std::vector<double> out;
  for (absl::string_view item : absl::StrSplit(value, ',', absl::SkipEmpty())) {
    double d = 0;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(item), &d)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Invalid number '", item, "'"));
    }
    out.push_back(d);
  }
  return out;
}

absl::StatusOr<uint64_t> ParseUint(absl::string_view value) {
  uint64_t out = 0;
  if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(value), &out)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Invalid non-negative integer '", value, "'"));
  }
  return out;
}

}  // namespace

absl::StatusOr<TrialOutcome> RunTrial(Variant variant, const Stream& stream,
                                      uint64_t universe_size,
                                      uint64_t sample_size, double epsilon,
                                      uint64_t seed) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(epsilon);
  if (!budget.ok()) return budget.status();

  if (variant == Variant::kPpds) {
    absl::StatusOr<PpdsEstimator> est =
        PpdsEstimator::Create(universe_size, sample_size, *budget, seed);
    if (!est.ok()) return est.status();
    if (absl::Status s = Feed(*est, stream); !s.ok()) return s;
    const DensityEstimate d = est->Estimate();
    return TrialOutcome{.estimate = d.value, .level = d.level};
  }
  absl::StatusOr<StaticEstimator> est = StaticEstimator::Create(
      variant, universe_size, sample_size, *budget, seed);
  if (!est.ok()) return est.status();
  if (absl::Status s = Feed(*est, stream); !s.ok()) return s;
  return TrialOutcome{.estimate = est->Estimate().value,
                      .level = std::nullopt};
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& config) {
  if (config.variants.empty()) {
    return absl::InvalidArgumentError("At least one variant is required");
  }
  if (config.universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  if (config.epsilons.empty()) {
    return absl::InvalidArgumentError("At least one epsilon is required");
  }
  for (double eps : config.epsilons) {
    if (!(eps > 0 && eps <= kMaxGuaranteedEpsilon)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Epsilon ", eps, " outside (0, 1/2]"));
    }
  }
  if (config.sample_sizes.empty()) {
    return absl::InvalidArgumentError("At least one sample size is required");
  }
  for (uint64_t m : config.sample_sizes) {
    if (m == 0) return absl::InvalidArgumentError("Sample size must be >= 1");
  }
  if (!(config.alpha > 0) || !std::isfinite(config.alpha)) {
    return absl::InvalidArgumentError("Alpha must be positive");
  }
  if (config.repetitions < 1) {
    return absl::InvalidArgumentError("Repetitions must be at least 1");
  }
  if (config.threads < 1) {
    return absl::InvalidArgumentError("Thread count must be at least 1");
  }
  if (config.distribution == StreamDistribution::kZipf &&
      !(config.zipf_exponent > 0)) {
    return absl::InvalidArgumentError("Zipf exponent must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& text) {
  ExperimentConfig config;
  std::vector<double> fractions;
  bool have_sizes = false;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (const size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": expected key=value"));
    }
    const std::string key =
        absl::AsciiStrToLower(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value =
        absl::StripAsciiWhitespace(line.substr(eq + 1));
    auto fail = [&](const absl::Status& s) {
      return absl::InvalidArgumentError(absl::StrCat(
          "config line ", line_number, " (", key, "): ", s.message()));
    };

    if (key == "variants") {
      config.variants.clear();
      for (absl::string_view name :
           absl::StrSplit(value, ',', absl::SkipEmpty())) {
        absl::StatusOr<Variant> v =
            ParseVariant(absl::StripAsciiWhitespace(name));
        if (!v.ok()) return fail(v.status());
        config.variants.push_back(*v);
      }
    } else if (key == "dist") {
      const std::string lower = absl::AsciiStrToLower(value);
      if (lower == "uniform") {
        config.distribution = StreamDistribution::kUniform;
      } else if (lower == "zipf") {
        config.distribution = StreamDistribution::kZipf;
      } else {
        return fail(absl::InvalidArgumentError("expected uniform or zipf"));
      }
    } else if (key == "zipf_s") {
      if (!absl::SimpleAtod(value, &config.zipf_exponent)) {
        return fail(absl::InvalidArgumentError("invalid number"));
      }
    } else if (key == "universe" || key == "length" || key == "seed" ||
               key == "reps" || key == "threads") {
      absl::StatusOr<uint64_t> n = ParseUint(value);
      if (!n.ok()) return fail(n.status());
      if (key == "universe") config.universe_size = *n;
      if (key == "length") config.length = *n;
      if (key == "seed") config.base_seed = *n;
      if (key == "reps") config.repetitions = static_cast<int64_t>(*n);
      if (key == "threads") config.threads = static_cast<int>(*n);
    } else if (key == "eps") {
      absl::StatusOr<std::vector<double>> list = ParseDoubleList(value);
      if (!list.ok()) return fail(list.status());
      config.epsilons = *std::move(list);
    } else if (key == "sample") {
      config.sample_sizes.clear();
      for (absl::string_view item :
           absl::StrSplit(value, ',', absl::SkipEmpty())) {
        absl::StatusOr<uint64_t> n = ParseUint(item);
        if (!n.ok()) return fail(n.status());
        config.sample_sizes.push_back(*n);
      }
      have_sizes = true;
    } else if (key == "sample_fraction") {
      absl::StatusOr<std::vector<double>> list = ParseDoubleList(value);
      if (!list.ok()) return fail(list.status());
      fractions = *std::move(list);
    } else if (key == "alpha") {
      if (!absl::SimpleAtod(value, &config.alpha)) {
        return fail(absl::InvalidArgumentError("invalid number"));
      }
    } else if (key == "fixed_stream") {
      if (!absl::SimpleAtob(value, &config.fixed_stream)) {
        return fail(absl::InvalidArgumentError("expected true or false"));
      }
    } else if (key == "output") {
      config.output_path = std::string(value);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": unknown key '", key,
                       "'"));
    }
  }

  if (have_sizes && !fractions.empty()) {
    return absl::InvalidArgumentError(
        "Specify either sample or sample_fraction, not both");
  }
  for (double f : fractions) {
    if (!(f > 0 && f <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Sample fraction ", f, " outside (0, 1]"));
    }
    const double m = std::round(f * static_cast<double>(config.universe_size));
    config.sample_sizes.push_back(std::max<uint64_t>(1, static_cast<uint64_t>(m)));
  }
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("Cannot open ", path, ": ", std::strerror(errno)));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  absl::StatusOr<StreamGenerator> generator = StreamGenerator::Create(
      config.distribution, config.universe_size, config.zipf_exponent);
  if (!generator.ok()) return generator.status();

  const std::vector<GridPoint> grid = BuildGrid(config);
  const auto reps = static_cast<size_t>(config.repetitions);
  // errors[g * reps + r], levels likewise.
  std::vector<double> errors(grid.size() * reps);
  std::vector<int> levels(grid.size() * reps, -1);

  std::optional<Stream> shared_stream;
  std::optional<double> shared_truth;
  if (config.fixed_stream) {
    shared_stream = generator->Generate(config.length, StreamSeed(config, 0));
    absl::StatusOr<double> truth =
        TrueDensity(*shared_stream, config.universe_size);
    if (!truth.ok()) return truth.status();
    shared_truth = *truth;
  }

  const int threads =
      static_cast<int>(std::min<size_t>(config.threads, reps));
  std::vector<absl::Status> worker_status(threads);
  std::vector<size_t> failed_rep(threads, reps);
  auto work = [&](int worker) {
    for (size_t r = worker; r < reps; r += threads) {
      Stream local;
      double truth = 0;
      const Stream* stream = nullptr;
      if (shared_stream) {
        stream = &*shared_stream;
        truth = *shared_truth;
      } else {
        local = generator->Generate(config.length,
                                    StreamSeed(config, static_cast<int64_t>(r)));
        absl::StatusOr<double> t = TrueDensity(local, config.universe_size);
        if (!t.ok()) {
          worker_status[worker] = t.status();
          failed_rep[worker] = r;
          return;
        }
        truth = *t;
        stream = &local;
      }
      const uint64_t rep_seed = MixSeed(config.base_seed, r);
      for (size_t g = 0; g < grid.size(); ++g) {
        const GridPoint& p = grid[g];
        absl::StatusOr<TrialOutcome> outcome =
            RunTrial(p.variant, *stream, config.universe_size, p.sample_size,
                     p.epsilon, MixSeed(rep_seed, p.Key()));
        if (!outcome.ok()) {
          worker_status[worker] = outcome.status();
          failed_rep[worker] = r;
          return;
        }
        errors[g * reps + r] = outcome->estimate - truth;
        if (outcome->level) levels[g * reps + r] = *outcome->level;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  // Report the failure of the earliest repetition, independent of scheduling.
  size_t first = reps;
  absl::Status first_status;
  for (int w = 0; w < threads; ++w) {
    if (!worker_status[w].ok() && failed_rep[w] < first) {
      first = failed_rep[w];
      first_status = worker_status[w];
    }
  }
  if (!first_status.ok()) return first_status;

  ExperimentResult result;
  for (size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& p = grid[g];
    GridPointResult point;
    point.variant = p.variant;
    point.epsilon = p.epsilon;
    point.sample_size = p.sample_size;
    point.alpha = config.alpha;
    point.repetitions = config.repetitions;
    double sum = 0;
    double sum_sq = 0;
    double sum_sq_sq = 0;
    double bound_sum = 0;
    int64_t failures = 0;
    for (size_t r = 0; r < reps; ++r) {
      const double e = errors[g * reps + r];
      sum += e;
      sum_sq += e * e;
      sum_sq_sq += e * e * e * e;
      if (std::abs(e) >= config.alpha) ++failures;
      if (p.variant == Variant::kPpds) {
        bound_sum += *PpdsMseBound(levels[g * reps + r], config.universe_size,
                                   p.epsilon);
      }
    }
    const auto n = static_cast<double>(reps);
    point.error_probability = static_cast<double>(failures) / n;
    point.mse = sum_sq / n;
    point.bias = sum / n;
    point.mse_bound =
        p.variant == Variant::kPpds
            ? bound_sum / n
            : *MseBound(p.variant, static_cast<double>(p.sample_size),
                        p.epsilon);
    const double var_sq = std::max(0.0, sum_sq_sq / n - point.mse * point.mse);
    point.mse_stderr = reps > 1 ? std::sqrt(var_sq / (n - 1)) : 0.0;
    if (config.keep_trials) {
      point.errors.assign(errors.begin() + g * reps,
                          errors.begin() + (g + 1) * reps);
      if (p.variant == Variant::kPpds) {
        point.levels.assign(levels.begin() + g * reps,
                            levels.begin() + (g + 1) * reps);
      }
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

std::string FormatCsv(const ExperimentResult& result) {
  std::string out = "variant,eps,m,alpha,reps,err_prob,mse,bias,mse_bound\n";
  for (const GridPointResult& p : result.points) {
    absl::StrAppendFormat(&out, "%s,%.15g,%d,%.15g,%d,%.15g,%.15g,%.15g,%.15g\n",
                          VariantName(p.variant), p.epsilon, p.sample_size,
                          p.alpha, p.repetitions, p.error_probability, p.mse,
                          p.bias, p.mse_bound);
  }
  return out;
}

absl::Status WriteCsv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat(
        "Cannot open ", path, " for writing: ", std::strerror(errno)));
  }
  out << FormatCsv(result);
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("Failed writing ", path));
  return absl::OkStatus();
}

}  // namespace panpriv
