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

// Monte-Carlo experiment runner. Every trial is seeded from
// (base seed, repetition, grid point), so results do not depend on thread
// scheduling or on which other grid points are in the configuration.

#ifndef PANPRIV_HARNESS_H_
#define PANPRIV_HARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "panpriv/streamgen.h"
#include "panpriv/variant.h"

namespace panpriv {

struct TrialOutcome {
  double estimate = 0;
  std::optional<int> level;  // distinct sampling only
};

// One end-to-end run: build the estimator from `seed`, feed `stream`, return
// the (unclamped) estimate. Deterministic in its arguments.
absl::StatusOr<TrialOutcome> RunTrial(Variant variant, const Stream& stream,
                                      uint64_t universe_size,
                                      uint64_t sample_size, double epsilon,
                                      uint64_t seed);

struct ExperimentConfig {
  std::vector<Variant> variants;
  StreamDistribution distribution = StreamDistribution::kUniform;
  double zipf_exponent = 1.0;
  uint64_t universe_size = 0;
  uint64_t length = 0;
  std::vector<double> epsilons;
  // Absolute sample sizes. Fractions of the universe are converted when the
  // config is parsed.
  std::vector<uint64_t> sample_sizes;
  double alpha = 0.1;
  int64_t repetitions = 1;
  uint64_t base_seed = 0;
  // Reuse one stream for every repetition instead of drawing a fresh one.
  bool fixed_stream = false;
  std::string output_path;
  int threads = 1;
  // Keep per-repetition errors and levels in the result.
  bool keep_trials = false;
};

absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

// Flat "key = value" text; '#' starts a comment. Keys:
//   variants        comma list of dwork, optbern, ppds
//   dist            uniform | zipf
//   zipf_s          Zipf exponent (default 1)
//   universe        U
//   length          T
//   eps             comma list of epsilons in (0, 1/2]
//   sample          comma list of absolute sample sizes, or
//   sample_fraction comma list of fractions of U in (0, 1]
//   alpha           error threshold for the error probability
//   reps            repetitions per grid point
//   seed            base seed
//   fixed_stream    true | false (default false)
//   output          CSV path
//   threads         worker threads (default 1)
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const std::string& text);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

struct GridPointResult {
  Variant variant = Variant::kDwork;
  double epsilon = 0;
  uint64_t sample_size = 0;
  double alpha = 0;
  int64_t repetitions = 0;
  // Fraction of runs with |estimate - d(S)| >= alpha.
  double error_probability = 0;
  double mse = 0;
  double bias = 0;
  // Closed-form bound; for distinct sampling, the level-conditional bound
  // averaged over the observed final levels.
  double mse_bound = 0;
  double mse_stderr = 0;
  std::vector<double> errors;  // estimate - d(S), when keep_trials
  std::vector<int> levels;     // distinct sampling, when keep_trials
};

struct ExperimentResult {
  // Ordered by variant, then epsilon ascending, then sample size ascending.
  std::vector<GridPointResult> points;
};

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

// CSV with header variant,eps,m,alpha,reps,err_prob,mse,bias,mse_bound.
std::string FormatCsv(const ExperimentResult& result);
absl::Status WriteCsv(const ExperimentResult& result, const std::string& path);

}  // namespace panpriv

#endif  // PANPRIV_HARNESS_H_
