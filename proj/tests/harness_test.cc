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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "panpriv/bounds.h"
#include "testing/stats.h"
#include "testing/status_matchers.h"

namespace panpriv {
namespace {

using ::panpriv::testing::IsOk;
using ::panpriv::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::HasSubstr;
using ::testing::SizeIs;

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("panpriv_harness_" + name))
      .string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.variants = {Variant::kOptBern, Variant::kDwork, Variant::kPpds};
  c.universe_size = 2000;
  c.length = 2000;
  c.epsilons = {0.5, 0.1};
  c.sample_sizes = {200, 50};
  c.repetitions = 25;
  c.base_seed = 7;
  return c;
}

TEST(RunTrialTest, SameSeedSameEstimate) {
  const Stream s = *Generate({.length = 500, .universe_size = 1000, .seed = 1});
  for (Variant v : {Variant::kDwork, Variant::kOptBern, Variant::kPpds}) {
    auto a = RunTrial(v, s, 1000, 100, 0.3, 42);
    auto b = RunTrial(v, s, 1000, 100, 0.3, 42);
    auto c = RunTrial(v, s, 1000, 100, 0.3, 43);
    ASSERT_THAT(a, IsOk());
    EXPECT_EQ(a->estimate, b->estimate);
    EXPECT_NE(a->estimate, c->estimate);
    EXPECT_EQ(a->level.has_value(), v == Variant::kPpds);
  }
}

TEST(RunTrialTest, EmptyStreamIsUnbiasedAtZero) {
  constexpr int kSeeds = 20000;
  std::vector<double> xs(kSeeds);
  for (int seed = 0; seed < kSeeds; ++seed) {
    xs[seed] = RunTrial(Variant::kOptBern, {}, 500, 100, 0.5, seed)->estimate;
  }
  const testing::MeanAndVariance m = testing::Moments(xs);
  EXPECT_LE(std::abs(m.mean), 4 * std::sqrt(m.variance / kSeeds));
}

TEST(RunTrialTest, DistinctSamplingWithoutEvictionMatchesOptBern) {
  constexpr uint64_t kU = 400;
  const Stream s = *Generate({.length = 300, .universe_size = kU, .seed = 2});
  std::vector<double> ppds, optbern;
  for (int seed = 0; seed < 10000; ++seed) {
    ppds.push_back(RunTrial(Variant::kPpds, s, kU, kU + 1, 0.2, seed)->estimate);
    optbern.push_back(
        RunTrial(Variant::kOptBern, s, kU, kU, 0.2, seed + 1000000)->estimate);
  }
  EXPECT_GT(testing::TwoSampleKs(ppds, optbern).p_value, 0.01);
}

TEST(RunTrialTest, PropagatesErrors) {
  const Stream s{{.user = 3}, {.user = 3, .kind = UpdateKind::kDelete}};
  EXPECT_THAT(RunTrial(Variant::kDwork, s, 10, 5, 0.2, 1), IsOk());
  EXPECT_THAT(RunTrial(Variant::kPpds, s, 10, 5, 0.2, 1),
              StatusIs(absl::StatusCode::kUnimplemented, HasSubstr("delete")));
  EXPECT_THAT(RunTrial(Variant::kDwork, s, 10, 11, 0.2, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RunTrial(Variant::kDwork, s, 10, 5, 0.7, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RunTrial(Variant::kOptBern, s, 2, 1, 0.2, 1),
              StatusIs(absl::StatusCode::kOutOfRange));
}

TEST(RunExperimentTest, GridOrderAndAggregates) {
  auto result = RunExperiment(SmallConfig());
  ASSERT_THAT(result, IsOk());
  ASSERT_THAT(result->points, SizeIs(3 * 2 * 2));
  const Variant order[] = {Variant::kDwork, Variant::kOptBern, Variant::kPpds};
  for (size_t i = 0; i < result->points.size(); ++i) {
    const GridPointResult& p = result->points[i];
    EXPECT_EQ(p.variant, order[i / 4]);
    EXPECT_EQ(p.epsilon, (i / 2) % 2 == 0 ? 0.1 : 0.5);
    EXPECT_EQ(p.sample_size, i % 2 == 0 ? 50u : 200u);
    EXPECT_EQ(p.repetitions, 25);
    EXPECT_GE(p.error_probability, 0);
    EXPECT_LE(p.error_probability, 1);
    EXPECT_GE(p.mse, 0);
    EXPECT_LE(p.bias * p.bias, p.mse * (1 + 1e-12));
    EXPECT_GT(p.mse_bound, 0);
  }
}

TEST(RunExperimentTest, SingleRepetitionMseIsSquaredError) {
  ExperimentConfig c = SmallConfig();
  c.repetitions = 1;
  c.keep_trials = true;
  auto result = RunExperiment(c);
  ASSERT_THAT(result, IsOk());
  for (const GridPointResult& p : result->points) {
    ASSERT_THAT(p.errors, SizeIs(1));
    EXPECT_EQ(p.mse, p.errors[0] * p.errors[0]);
    EXPECT_EQ(p.bias, p.errors[0]);
    EXPECT_EQ(p.error_probability, std::abs(p.errors[0]) >= 0.1 ? 1.0 : 0.0);
  }
}

TEST(RunExperimentTest, ErrorProbabilityUsesRawErrors) {
  ExperimentConfig c = SmallConfig();
  c.keep_trials = true;
  c.alpha = 0.2;
  auto result = RunExperiment(c);
  ASSERT_THAT(result, IsOk());
  for (const GridPointResult& p : result->points) {
    int failures = 0;
    double sq = 0;
    for (double e : p.errors) {
      failures += std::abs(e) >= 0.2;
      sq += e * e;
    }
    EXPECT_EQ(p.error_probability, failures / 25.0);
    EXPECT_DOUBLE_EQ(p.mse, sq / 25);
    if (p.variant == Variant::kPpds) {
      ASSERT_THAT(p.levels, SizeIs(25));
      double bound = 0;
      for (int l : p.levels) bound += *PpdsMseBound(l, 2000, p.epsilon);
      EXPECT_DOUBLE_EQ(p.mse_bound, bound / 25);
    } else {
      EXPECT_TRUE(p.levels.empty());
      EXPECT_EQ(p.mse_bound,
                *MseBound(p.variant, static_cast<double>(p.sample_size),
                          p.epsilon));
    }
  }
}

TEST(RunExperimentTest, ThreadsDoNotChangeOutput) {
  ExperimentConfig c = SmallConfig();
  const std::string serial = FormatCsv(*RunExperiment(c));
  c.threads = 4;
  EXPECT_EQ(FormatCsv(*RunExperiment(c)), serial);
  c.threads = 100;
  EXPECT_EQ(FormatCsv(*RunExperiment(c)), serial);
}

TEST(RunExperimentTest, AddingGridPointsLeavesOthersAlone) {
  ExperimentConfig small = SmallConfig();
  small.variants = {Variant::kOptBern};
  small.epsilons = {0.1};
  small.sample_sizes = {50};
  small.keep_trials = true;
  ExperimentConfig big = SmallConfig();
  big.keep_trials = true;
  const GridPointResult alone = RunExperiment(small)->points[0];
  const absl::StatusOr<ExperimentResult> all = RunExperiment(big);
  ASSERT_THAT(all, IsOk());
  for (const GridPointResult& p : all->points) {
    if (p.variant == Variant::kOptBern && p.epsilon == 0.1 &&
        p.sample_size == 50) {
      EXPECT_EQ(p.errors, alone.errors);
      return;
    }
  }
  FAIL() << "grid point missing";
}

TEST(RunExperimentTest, FixedStreamReusesOneStream) {
  ExperimentConfig c = SmallConfig();
  c.variants = {Variant::kDwork};
  c.sample_sizes = {2000};
  c.keep_trials = true;
  c.fixed_stream = true;
  // With a fixed stream every repetition shares d(S); the regenerated mode
  // differs from it.
  const auto fixed = RunExperiment(c)->points;
  c.fixed_stream = false;
  const auto fresh = RunExperiment(c)->points;
  EXPECT_NE(fixed[0].errors, fresh[0].errors);
  EXPECT_THAT(fixed[0].errors, SizeIs(25));
}

TEST(RunExperimentTest, RejectsInvalidConfig) {
  ExperimentConfig c = SmallConfig();
  c.repetitions = 0;
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kInvalidArgument));
  c = SmallConfig();
  c.epsilons = {0.6};
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kInvalidArgument));
  c = SmallConfig();
  c.variants.clear();
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kInvalidArgument));
  c = SmallConfig();
  c.sample_sizes = {5000};
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kInvalidArgument));
}

// Static estimators on fresh streams and samples: empirical MSE tracks the
// closed-form variance at the stream's expected density.
TEST(RunExperimentTest, MseMatchesClosedFormVariance) {
  ExperimentConfig c;
  c.variants = {Variant::kDwork, Variant::kOptBern};
  c.universe_size = 1000;
  c.length = 1000;
  c.epsilons = {0.3};
  c.sample_sizes = {200};
  c.repetitions = 10000;
  c.base_seed = 11;
  auto result = RunExperiment(c);
  ASSERT_THAT(result, IsOk());
  const double d = 1 - std::pow(1 - 1e-3, 1000);
  for (const GridPointResult& p : result->points) {
    const double v = *ExactVariance(p.variant, 200, 0.3, d);
    EXPECT_THAT(p.mse, DoubleNear(v, 0.1 * v)) << VariantName(p.variant);
  }
}

TEST(RunExperimentTest, OptBernBeatsDworkOnErrorProbability) {
  ExperimentConfig c;
  c.variants = {Variant::kDwork, Variant::kOptBern};
  c.universe_size = 10000;
  c.length = 10000;
  c.epsilons = {0.1, 0.2, 0.3, 0.4, 0.5};
  c.sample_sizes = {500};
  c.repetitions = 300;
  c.base_seed = 5;
  auto result = RunExperiment(c);
  ASSERT_THAT(result, IsOk());
  const double margin = 4 * std::sqrt(1.0 / (4 * 300));
  for (size_t i = 0; i < 5; ++i) {
    const GridPointResult& dwork = result->points[i];
    const GridPointResult& opt = result->points[5 + i];
    ASSERT_EQ(dwork.epsilon, opt.epsilon);
    EXPECT_LE(opt.error_probability, dwork.error_probability + margin)
        << dwork.epsilon;
  }
}

TEST(CsvTest, HeaderAndRows) {
  const ExperimentConfig c = SmallConfig();
  const std::string csv = FormatCsv(*RunExperiment(c));
  std::vector<std::string> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_THAT(lines, SizeIs(1 + 12));
  EXPECT_EQ(lines[0], "variant,eps,m,alpha,reps,err_prob,mse,bias,mse_bound");
  EXPECT_THAT(lines[1], ::testing::StartsWith("dwork,0.1,50,0.1,25,"));
  EXPECT_THAT(lines[12], ::testing::StartsWith("ppds,0.5,200,0.1,25,"));
}

TEST(CsvTest, RerunIsByteIdentical) {
  const std::string a = TempPath("a.csv");
  const std::string b = TempPath("b.csv");
  ASSERT_THAT(WriteCsv(*RunExperiment(SmallConfig()), a), IsOk());
  ASSERT_THAT(WriteCsv(*RunExperiment(SmallConfig()), b), IsOk());
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  EXPECT_FALSE(ReadFile(a).empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(CsvTest, UnwritablePath) {
  EXPECT_THAT(WriteCsv({}, "/nonexistent/dir/out.csv"),
              StatusIs(absl::StatusCode::kPermissionDenied,
                       HasSubstr("/nonexistent/dir/out.csv")));
}

TEST(ConfigTest, ParsesAllKeys) {
  auto c = ParseExperimentConfig(R"(
# comment
variants = ppds, OptBern
dist = zipf
zipf_s = 1.2
universe = 1000
length = 5000
eps = 0.1, 0.2
sample = 10, 20
alpha = 0.05
reps = 7
seed = 99
fixed_stream = true
output = out.csv   # trailing comment
threads = 3
)");
  ASSERT_THAT(c, IsOk());
  EXPECT_EQ(c->variants,
            (std::vector<Variant>{Variant::kPpds, Variant::kOptBern}));
  EXPECT_EQ(c->distribution, StreamDistribution::kZipf);
  EXPECT_EQ(c->zipf_exponent, 1.2);
  EXPECT_EQ(c->universe_size, 1000u);
  EXPECT_EQ(c->length, 5000u);
  EXPECT_EQ(c->epsilons, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c->sample_sizes, (std::vector<uint64_t>{10, 20}));
  EXPECT_EQ(c->alpha, 0.05);
  EXPECT_EQ(c->repetitions, 7);
  EXPECT_EQ(c->base_seed, 99u);
  EXPECT_TRUE(c->fixed_stream);
  EXPECT_EQ(c->output_path, "out.csv");
  EXPECT_EQ(c->threads, 3);
}

TEST(ConfigTest, SampleFractionsBecomeSizes) {
  auto c = ParseExperimentConfig(
      "variants=dwork\nuniverse=100000\nlength=10\neps=0.2\n"
      "sample_fraction=0.001,0.05,1\n");
  ASSERT_THAT(c, IsOk());
  EXPECT_EQ(c->sample_sizes, (std::vector<uint64_t>{100, 5000, 100000}));
}

TEST(ConfigTest, RejectsBadInput) {
  const std::string base = "variants=dwork\nuniverse=100\nlength=10\n";
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2\nsample=5\nbogus=1\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("unknown key 'bogus'")));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2,x\nsample=5\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("line 4")));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2\nsample=5\nreps=0\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("Repetitions")));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.55\nsample=5\n"),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2\nsample_fraction=1.5\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("fraction")));
  EXPECT_THAT(
      ParseExperimentConfig(base + "eps=0.2\nsample=5\nsample_fraction=0.5\n"),
      StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("not both")));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2\nsample=5\nnot a pair\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("key=value")));
  EXPECT_THAT(ParseExperimentConfig(base + "eps=0.2\nsample=5\ndist=normal\n"),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(
      ParseExperimentConfig("variants=foo\nuniverse=10\neps=0.2\nsample=1\n"),
      StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("foo")));
}

TEST(ConfigTest, MissingFile) {
  EXPECT_THAT(LoadExperimentConfig("/nonexistent/config.txt"),
              StatusIs(absl::StatusCode::kNotFound));
}

}  // namespace
}  // namespace panpriv
