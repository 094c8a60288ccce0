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

#include "cli.h"

#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "panpriv/bounds.h"
#include "panpriv/harness.h"
#include "panpriv/mechanisms.h"
#include "panpriv/streamgen.h"
#include "panpriv/variant.h"

namespace panpriv {
namespace {

const std::map<std::string, Variant> kVariantMap = {
    {"dwork", Variant::kDwork},
    {"optbern", Variant::kOptBern},
    {"ppds", Variant::kPpds}};

const std::map<std::string, StreamDistribution> kDistributionMap = {
    {"uniform", StreamDistribution::kUniform},
    {"zipf", StreamDistribution::kZipf}};

std::string Num(double x) { return absl::StrFormat("%.17g", x); }

// Returns the explicit seed, or draws one from the OS and reports it.
uint64_t ResolveSeed(const std::optional<uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const uint64_t drawn = (static_cast<uint64_t>(rd()) << 32) | rd();
  err << "seed: " << drawn << "\n";
  return drawn;
}

void WarnOutsideGuarantee(double epsilon, std::ostream& err) {
  if (epsilon > kMaxGuaranteedEpsilon) {
    err << "warning: eps = " << epsilon
        << " exceeds 1/2; the estimators are not private there\n";
  }
}

// delta3 and delta4 only split the failure probability in the sample-size
// problem, so `bounds beta` omits them.
void PrintDeltas(const DeltaPoint& d, bool with_split, std::ostream& out) {
  out << "delta1=" << Num(d.delta1) << "\n"
      << "delta2=" << Num(d.delta2) << "\n";
  if (with_split) {
    out << "delta3=" << Num(d.delta3) << "\n"
        << "delta4=" << Num(d.delta4) << "\n";
  }
}

struct EstimateArgs {
  Variant variant = Variant::kOptBern;
  uint64_t universe = 0;
  uint64_t sample = 0;
  double epsilon = 0;
  std::optional<uint64_t> seed;
  std::string input;
};

absl::Status RunEstimate(const EstimateArgs& args, std::istream& in,
                         std::ostream& out, std::ostream& err) {
  absl::StatusOr<Stream> stream;
  if (args.input.empty() || args.input == "-") {
    const std::string text{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    stream = ParseStream(text);
  } else {
    stream = ReadStream(args.input);
  }
  if (!stream.ok()) return stream.status();
  const uint64_t seed = ResolveSeed(args.seed, err);
  absl::StatusOr<TrialOutcome> outcome = RunTrial(
      args.variant, *stream, args.universe, args.sample, args.epsilon, seed);
  if (!outcome.ok()) return outcome.status();
  out << Num(outcome->estimate) << "\n";
  return absl::OkStatus();
}

absl::Status RunTune(double epsilon, double center, std::ostream& out) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(epsilon);
  if (!budget.ok()) return budget.status();
  absl::StatusOr<BernoulliPair> dwork = MakeDworkPair(*budget);
  if (!dwork.ok()) return dwork.status();
  absl::StatusOr<BernoulliPair> optimal = MakeOptimalPair(*budget, center);
  if (!optimal.ok()) return optimal.status();

  out << "variant,p_init,p_upd,r0,r1,eps_actual\n";
  for (const auto& [name, pair] :
       {std::pair{"dwork", *dwork}, std::pair{"optbern", *optimal}}) {
    const StateRatios r = StatePrivacyRatios(pair);
    out << name << "," << Num(pair.p_init()) << "," << Num(pair.p_upd())
        << "," << Num(r.r0) << "," << Num(r.r1) << ","
        << Num(ActualBudget(pair)) << "\n";
  }
  return absl::OkStatus();
}

struct BoundsArgs {
  Variant variant = Variant::kOptBern;
  double epsilon = 0;
  double alpha = 0;
  double beta = 0;
  double sample = 0;
  int level = 0;
  uint64_t universe = 0;
};

absl::Status RunBoundsBeta(const BoundsArgs& args, std::ostream& out,
                           std::ostream& err) {
  WarnOutsideGuarantee(args.epsilon, err);
  absl::StatusOr<BoundResult> r =
      TightestBeta(args.variant, args.epsilon, args.alpha, args.sample);
  if (!r.ok()) return r.status();
  out << "beta=" << Num(r->value) << "\n";
  PrintDeltas(r->argmin, /*with_split=*/false, out);
  return absl::OkStatus();
}

absl::Status RunBoundsMsize(const BoundsArgs& args, std::ostream& out,
                            std::ostream& err) {
  WarnOutsideGuarantee(args.epsilon, err);
  absl::StatusOr<BoundResult> r =
      OptimalSampleSize(args.variant, args.epsilon, args.alpha, args.beta);
  if (!r.ok()) return r.status();
  out << "m=" << absl::StrFormat("%.0f", r->value) << "\n";
  PrintDeltas(r->argmin, /*with_split=*/true, out);
  return absl::OkStatus();
}

absl::Status RunBoundsMse(const BoundsArgs& args, std::ostream& out,
                          std::ostream& err) {
  WarnOutsideGuarantee(args.epsilon, err);
  absl::StatusOr<double> bound;
  if (args.variant == Variant::kPpds) {
    bound = PpdsMseBound(args.level, args.universe, args.epsilon);
  } else {
    bound = MseBound(args.variant, args.sample, args.epsilon);
  }
  if (!bound.ok()) return bound.status();
  out << "mse_bound=" << Num(*bound) << "\n";
  return absl::OkStatus();
}

struct ExperimentArgs {
  std::string config;
  std::optional<int> threads;
  std::optional<uint64_t> seed;
  std::string output;
  bool fixed_stream = false;
};

absl::Status RunExperimentCommand(const ExperimentArgs& args,
                                  std::ostream& out) {
  absl::StatusOr<ExperimentConfig> config = LoadExperimentConfig(args.config);
  if (!config.ok()) return config.status();
  if (args.threads) config->threads = *args.threads;
  if (args.seed) config->base_seed = *args.seed;
  if (!args.output.empty()) config->output_path = args.output;
  if (args.fixed_stream) config->fixed_stream = true;

  absl::StatusOr<ExperimentResult> result = RunExperiment(*config);
  if (!result.ok()) return result.status();
  if (config->output_path.empty() || config->output_path == "-") {
    out << FormatCsv(*result);
    return absl::OkStatus();
  }
  return WriteCsv(*result, config->output_path);
}

struct GenArgs {
  StreamDistribution distribution = StreamDistribution::kUniform;
  double exponent = 1.0;
  uint64_t universe = 0;
  uint64_t length = 0;
  std::optional<uint64_t> seed;
  std::string out;
};

absl::Status RunGen(const GenArgs& args, std::ostream& err) {
  StreamSpec spec;
  spec.distribution = args.distribution;
  spec.zipf_exponent = args.exponent;
  spec.universe_size = args.universe;
  spec.length = args.length;
  spec.seed = ResolveSeed(args.seed, err);
  absl::StatusOr<Stream> stream = Generate(spec);
  if (!stream.ok()) return stream.status();
  return WriteStream(*stream, args.out);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kUnavailable:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app{"Pan-private stream density estimation"};
  app.name("panpriv");
  app.require_subcommand(1);

  EstimateArgs estimate;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "Estimate the density of one stream");
  estimate_cmd->add_option("--variant", estimate.variant, "Estimator")
      ->required()
      ->transform(CLI::CheckedTransformer(kVariantMap, CLI::ignore_case));
  estimate_cmd->add_option("--universe", estimate.universe, "Universe size U")
      ->required();
  estimate_cmd->add_option("--sample", estimate.sample, "Sample size m")
      ->required();
  estimate_cmd->add_option("--eps", estimate.epsilon, "Privacy parameter")
      ->required();
  estimate_cmd->add_option("--seed", estimate.seed, "Random seed");
  estimate_cmd->add_option("--input", estimate.input,
                           "Stream file (default: standard input)");

  double tune_eps = 0;
  double tune_center = 0.5;
  CLI::App* tune_cmd =
      app.add_subcommand("tune", "Print the Bernoulli pairs for an epsilon");
  tune_cmd->add_option("--eps", tune_eps, "Privacy parameter")->required();
  tune_cmd->add_option("--c", tune_center,
                       "Center of the optimal pair, in (0, 0.8]")
      ->capture_default_str();

  BoundsArgs bounds;
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "Evaluate accuracy bounds");
  bounds_cmd->require_subcommand(1);
  CLI::App* beta_cmd =
      bounds_cmd->add_subcommand("beta", "Tightest failure probability");
  CLI::App* msize_cmd =
      bounds_cmd->add_subcommand("msize", "Smallest sufficient sample size");
  CLI::App* mse_cmd = bounds_cmd->add_subcommand("mse", "Mean squared error");
  for (CLI::App* cmd : {beta_cmd, msize_cmd, mse_cmd}) {
    cmd->add_option("--variant", bounds.variant, "Estimator")
        ->required()
        ->transform(CLI::CheckedTransformer(kVariantMap, CLI::ignore_case));
    cmd->add_option("--eps", bounds.epsilon, "Privacy parameter")->required();
  }
  beta_cmd->add_option("--alpha", bounds.alpha, "Accuracy")->required();
  beta_cmd->add_option("--sample", bounds.sample, "Sample size m")->required();
  msize_cmd->add_option("--alpha", bounds.alpha, "Accuracy")->required();
  msize_cmd->add_option("--beta", bounds.beta, "Failure probability")
      ->required();
  CLI::Option* mse_sample =
      mse_cmd->add_option("--sample", bounds.sample, "Sample size m");
  CLI::Option* mse_level =
      mse_cmd->add_option("--level", bounds.level, "Final level (ppds)");
  CLI::Option* mse_universe =
      mse_cmd->add_option("--universe", bounds.universe, "Universe size (ppds)");

  ExperimentArgs experiment;
  CLI::App* experiment_cmd =
      app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  experiment_cmd->add_option("--config", experiment.config, "Config file")
      ->required();
  experiment_cmd->add_option("--threads", experiment.threads,
                             "Worker threads (overrides the config)");
  experiment_cmd->add_option("--seed", experiment.seed,
                             "Base seed (overrides the config)");
  experiment_cmd->add_option("--output", experiment.output,
                             "CSV path (overrides the config; - for stdout)");
  experiment_cmd->add_flag("--fixed-stream", experiment.fixed_stream,
                           "Reuse one stream for all repetitions");

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic stream");
  gen_cmd->add_option("--dist", gen.distribution, "uniform or zipf")
      ->required()
      ->transform(CLI::CheckedTransformer(kDistributionMap, CLI::ignore_case));
  gen_cmd->add_option("--s", gen.exponent, "Zipf exponent")
      ->capture_default_str();
  gen_cmd->add_option("--universe", gen.universe, "Universe size U")
      ->required();
  gen_cmd->add_option("--length", gen.length, "Stream length T")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  absl::Status status;
  if (estimate_cmd->parsed()) {
    status = RunEstimate(estimate, in, out, err);
  } else if (tune_cmd->parsed()) {
    status = RunTune(tune_eps, tune_center, out);
  } else if (beta_cmd->parsed()) {
    status = RunBoundsBeta(bounds, out, err);
  } else if (msize_cmd->parsed()) {
    status = RunBoundsMsize(bounds, out, err);
  } else if (mse_cmd->parsed()) {
    if (bounds.variant == Variant::kPpds) {
      if (mse_level->count() == 0 || mse_universe->count() == 0) {
        err << "error: bounds mse --variant ppds needs --level and "
               "--universe\n";
        return kExitUsage;
      }
    } else if (mse_sample->count() == 0) {
      err << "error: bounds mse needs --sample\n";
      return kExitUsage;
    }
    status = RunBoundsMse(bounds, out, err);
  } else if (experiment_cmd->parsed()) {
    status = RunExperimentCommand(experiment, out);
  } else if (gen_cmd->parsed()) {
    status = RunGen(gen, err);
  }
  if (!status.ok()) err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

}  // namespace panpriv
