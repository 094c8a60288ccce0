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

// Closed-form accuracy bounds for the density estimators, and numerical
// tuning of the free splitting parameters delta_1..delta_4 in the
// Chernoff/Laplace tail bound to get (a) the tightest failure probability for
// a given sample size and (b) the smallest sample size for a given failure
// probability.
//
// The tail bound for an (alpha, beta)-approximation is
//   beta(d1, d2) = 2 exp(-2 m alpha^2 (1 - d1)^2)
//                + 2 exp(-2 m kappa alpha^2 d1^2 (1 - d2)^2)
//                +   exp(-eps alpha m d1 d2)
// with kappa = eps^2 / 16 for the Dwork pair and tanh^2(eps / 2) for the
// optimal pair.

#ifndef PANPRIV_BOUNDS_H_
#define PANPRIV_BOUNDS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "panpriv/variant.h"

namespace panpriv {

struct DeltaPoint {
  double delta1 = 0.5;
  double delta2 = 0.5;
  double delta3 = 0.5;
  double delta4 = 0.25;
};

struct BoundResult {
  // Tightest beta, or the optimal sample size m* (an integer, stored exactly).
  double value;
  DeltaPoint argmin;
  Variant variant;
  // False when epsilon lies outside (0, 1/2], where the estimators are not
  // private; such results are only meaningful as curves.
  bool within_guarantee;
};

struct SampleSizeTerms {
  double m1;  // sampling error of the user sample
  double m2;  // Bernoulli state noise
  double m3;  // Laplace output noise

  double Max() const;
};

struct OptimizerOptions {
  // Points per coordinate in the initial grid.
  int grid_points = 64;
  // Refinement stops once a halving stage improves the objective by less than
  // this relative amount.
  double tolerance = 1e-6;
  // Deltas are confined to [margin, 1 - margin], and delta3 + delta4 to at
  // most 1 - margin.
  double margin = 1e-6;
};

// Only kDwork and kOptBern have tail bounds; kPpds is rejected.
absl::StatusOr<double> BetaBound(Variant variant, double epsilon, double alpha,
                                 double sample_size, double delta1,
                                 double delta2);

absl::StatusOr<BoundResult> TightestBeta(Variant variant, double epsilon,
                                         double alpha, double sample_size,
                                         const OptimizerOptions& options = {});

absl::StatusOr<SampleSizeTerms> ComputeSampleSizeTerms(Variant variant,
                                                       double epsilon,
                                                       double alpha,
                                                       double beta,
                                                       const DeltaPoint& d);

// Minimizes max(m1, m2, m3) over feasible delta points and rounds up. The
// result always satisfies TightestBeta(variant, eps, alpha, m*) <= beta.
absl::StatusOr<BoundResult> OptimalSampleSize(
    Variant variant, double epsilon, double alpha, double beta,
    const OptimizerOptions& options = {});

// Mean squared error bounds for a fixed sample of size m.
absl::StatusOr<double> MseBound(Variant variant, double sample_size,
                                double epsilon);

// Distinct sampling conditioned on final level `level`: the optimal-pair bound
// with an effective sample of universe_size / 2^level users.
absl::StatusOr<double> PpdsMseBound(int level, uint64_t universe_size,
                                    double epsilon);

// Exact variance of the static estimators when each sampled user is present
// independently with probability `density`.
absl::StatusOr<double> ExactVariance(Variant variant, double sample_size,
                                     double epsilon, double density);

}  // namespace panpriv

#endif  // PANPRIV_BOUNDS_H_
