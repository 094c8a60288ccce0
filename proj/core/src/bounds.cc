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

#include "panpriv/bounds.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "panpriv/mechanisms.h"

namespace panpriv {
namespace {

absl::Status ValidateVariant(Variant variant) {
  if (variant == Variant::kPpds) {
    return absl::InvalidArgumentError(
        "Tail bounds are defined for the dwork and optbern variants only");
  }
  return absl::OkStatus();
}

absl::Status ValidatePositive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be finite and positive, but is ", value));
  }
  return absl::OkStatus();
}

absl::Status ValidateOpenUnit(double value, const char* name) {
  if (!(value > 0 && value < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must lie in (0, 1), but is ", value));
  }
  return absl::OkStatus();
}

absl::Status ValidateCommon(Variant variant, double epsilon, double alpha) {
  if (absl::Status s = ValidateVariant(variant); !s.ok()) return s;
  if (absl::Status s = ValidatePositive(epsilon, "Epsilon"); !s.ok()) return s;
  return ValidatePositive(alpha, "Alpha");
}

// Coefficient of m alpha^2 d1^2 (1 - d2)^2 / 2 in the state-noise exponent.
double StateNoiseKappa(Variant variant, double epsilon) {
  if (variant == Variant::kDwork) return epsilon * epsilon / 16;
  const double t = std::tanh(epsilon / 2);
  return t * t;
}

// Per-unit-m rates of the three exponential tail terms.
struct TailRates {
  double sampling;  // 2 alpha^2 (1 - d1)^2
  double state;     // 2 kappa alpha^2 d1^2 (1 - d2)^2
  double laplace;   // eps alpha d1 d2
};

TailRates ComputeRates(Variant variant, double epsilon, double alpha,
                       double delta1, double delta2) {
  const double a2 = alpha * alpha;
  const double kappa = StateNoiseKappa(variant, epsilon);
  return TailRates{
      .sampling = 2 * a2 * (1 - delta1) * (1 - delta1),
      .state = 2 * kappa * a2 * delta1 * delta1 * (1 - delta2) * (1 - delta2),
      .laplace = epsilon * alpha * delta1 * delta2};
}

double TailSum(const TailRates& r, double m) {
  return 2 * std::exp(-r.sampling * m) + 2 * std::exp(-r.state * m) +
         std::exp(-r.laplace * m);
}

struct Minimum2D {
  double x;
  double y;
  double value;
};

// Grid search followed by coordinate pattern search with step halving. The
// objectives here are smooth on the box, which this relies on.
Minimum2D Minimize2D(const std::function<double(double, double)>& f,
                     const OptimizerOptions& options) {
  const double lo = options.margin;
  const double hi = 1 - options.margin;
  const int n = std::max(options.grid_points, 2);
  const double spacing = (hi - lo) / (n - 1);

  Minimum2D best{.x = lo, .y = lo, .value = f(lo, lo)};
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * spacing;
    for (int j = 0; j < n; ++j) {
      const double y = lo + j * spacing;
      const double v = f(x, y);
      if (v < best.value) best = Minimum2D{.x = x, .y = y, .value = v};
    }
  }

  double step = spacing;
  double stage_start = best.value;
  constexpr double kMinStep = 1e-13;
  constexpr int kMinHalvings = 12;
  int halvings = 0;
  while (step > kMinStep) {
    bool moved = false;
    for (int coord = 0; coord < 2; ++coord) {
      for (double dir : {1.0, -1.0}) {
        double x = best.x;
        double y = best.y;
        double& c = coord == 0 ? x : y;
        c = std::clamp(c + dir * step, lo, hi);
        const double v = f(x, y);
        if (v < best.value) {
          best = Minimum2D{.x = x, .y = y, .value = v};
          moved = true;
          break;
        }
      }
    }
    if (moved) continue;
    step /= 2;
    ++halvings;
    const double improvement = stage_start - best.value;
    if (halvings >= kMinHalvings &&
        improvement <= options.tolerance * std::abs(best.value)) {
      break;
    }
    stage_start = best.value;
  }
  return best;
}

// Smallest m with TailSum(rates, m) <= beta. TailSum is strictly decreasing
// in m, so bisection brackets it; the upper end is returned so the result is
// always feasible.
double SmallestFeasibleM(const TailRates& rates, double beta) {
  double lo = 0;
  double hi = 1;
  while (TailSum(rates, hi) > beta) {
    lo = hi;
    hi *= 2;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = lo + (hi - lo) / 2;
    if (TailSum(rates, mid) > beta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// For fixed (d1, d2) the best (d3, d4) splits beta in proportion to the three
// tail terms evaluated at the smallest feasible m, where m1 = m2 = m3.
DeltaPoint BestSplit(const TailRates& rates, double beta, double delta1,
                     double delta2, double m, double margin) {
  DeltaPoint d{.delta1 = delta1, .delta2 = delta2};
  d.delta3 = std::clamp(2 * std::exp(-rates.sampling * m) / beta, margin,
                        1 - margin);
  d.delta4 = std::clamp(2 * std::exp(-rates.state * m) / beta, margin,
                        1 - margin);
  const double excess = d.delta3 + d.delta4 - (1 - margin);
  if (excess > 0) {
    const double scale = (1 - margin) / (d.delta3 + d.delta4);
    d.delta3 *= scale;
    d.delta4 *= scale;
  }
  return d;
}

SampleSizeTerms TermsUnchecked(Variant variant, double epsilon, double alpha,
                               double beta, const DeltaPoint& d) {
  const TailRates r =
      ComputeRates(variant, epsilon, alpha, d.delta1, d.delta2);
  return SampleSizeTerms{
      .m1 = std::log(2 / (beta * d.delta3)) / r.sampling,
      .m2 = std::log(2 / (beta * d.delta4)) / r.state,
      .m3 = std::log(1 / (beta * (1 - d.delta3 - d.delta4))) / r.laplace};
}

}  // namespace

double SampleSizeTerms::Max() const { return std::max({m1, m2, m3}); }

absl::StatusOr<double> BetaBound(Variant variant, double epsilon, double alpha,
                                 double sample_size, double delta1,
                                 double delta2) {
  if (absl::Status s = ValidateCommon(variant, epsilon, alpha); !s.ok()) {
    return s;
  }
  if (!(sample_size >= 1) || !std::isfinite(sample_size)) {
    return absl::InvalidArgumentError("Sample size must be at least 1");
  }
  if (absl::Status s = ValidateOpenUnit(delta1, "delta1"); !s.ok()) return s;
  if (absl::Status s = ValidateOpenUnit(delta2, "delta2"); !s.ok()) return s;
  return TailSum(ComputeRates(variant, epsilon, alpha, delta1, delta2),
                 sample_size);
}

absl::StatusOr<BoundResult> TightestBeta(Variant variant, double epsilon,
                                         double alpha, double sample_size,
                                         const OptimizerOptions& options) {
  if (absl::Status s = ValidateCommon(variant, epsilon, alpha); !s.ok()) {
    return s;
  }
  if (!(sample_size >= 1) || !std::isfinite(sample_size)) {
    return absl::InvalidArgumentError("Sample size must be at least 1");
  }
  const Minimum2D best = Minimize2D(
      [&](double d1, double d2) {
        return TailSum(ComputeRates(variant, epsilon, alpha, d1, d2),
                       sample_size);
      },
      options);
  return BoundResult{
      .value = best.value,
      .argmin = DeltaPoint{.delta1 = best.x, .delta2 = best.y},
      .variant = variant,
      .within_guarantee = epsilon <= kMaxGuaranteedEpsilon};
}

absl::StatusOr<SampleSizeTerms> ComputeSampleSizeTerms(Variant variant,
                                                       double epsilon,
                                                       double alpha,
                                                       double beta,
                                                       const DeltaPoint& d) {
  if (absl::Status s = ValidateCommon(variant, epsilon, alpha); !s.ok()) {
    return s;
  }
  if (absl::Status s = ValidateOpenUnit(beta, "beta"); !s.ok()) return s;
  if (absl::Status s = ValidateOpenUnit(d.delta1, "delta1"); !s.ok()) return s;
  if (absl::Status s = ValidateOpenUnit(d.delta2, "delta2"); !s.ok()) return s;
  if (absl::Status s = ValidateOpenUnit(d.delta3, "delta3"); !s.ok()) return s;
  if (absl::Status s = ValidateOpenUnit(d.delta4, "delta4"); !s.ok()) return s;
  if (!(d.delta3 + d.delta4 < 1)) {
    return absl::InvalidArgumentError("delta3 + delta4 must be less than 1");
  }
  return TermsUnchecked(variant, epsilon, alpha, beta, d);
}

absl::StatusOr<BoundResult> OptimalSampleSize(Variant variant, double epsilon,
                                              double alpha, double beta,
                                              const OptimizerOptions& options) {
  if (absl::Status s = ValidateCommon(variant, epsilon, alpha); !s.ok()) {
    return s;
  }
  if (absl::Status s = ValidateOpenUnit(beta, "beta"); !s.ok()) return s;

  auto split_at = [&](double d1, double d2) {
    const TailRates rates = ComputeRates(variant, epsilon, alpha, d1, d2);
    const double m = SmallestFeasibleM(rates, beta);
    return BestSplit(rates, beta, d1, d2, m, options.margin);
  };
  const Minimum2D best = Minimize2D(
      [&](double d1, double d2) {
        return TermsUnchecked(variant, epsilon, alpha, beta, split_at(d1, d2))
            .Max();
      },
      options);

  const DeltaPoint argmin = split_at(best.x, best.y);
  double m_star = std::ceil(best.value);
  // Discreteness guard: make sure the rounded size meets beta under the
  // independently optimized tail bound.
  constexpr int kMaxGuardSteps = 1000;
  for (int step = 0;; ++step) {
    absl::StatusOr<BoundResult> check =
        TightestBeta(variant, epsilon, alpha, m_star, options);
    if (!check.ok()) return check.status();
    if (check->value <= beta) break;
    if (step == kMaxGuardSteps) {
      return absl::InternalError(
          absl::StrCat("Sample size cross-check failed near m = ", m_star));
    }
    m_star += 1;
  }
  return BoundResult{.value = m_star,
                     .argmin = argmin,
                     .variant = variant,
                     .within_guarantee = epsilon <= kMaxGuaranteedEpsilon};
}

absl::StatusOr<double> MseBound(Variant variant, double sample_size,
                                double epsilon) {
  if (absl::Status s = ValidateVariant(variant); !s.ok()) return s;
  if (absl::Status s = ValidatePositive(epsilon, "Epsilon"); !s.ok()) return s;
  if (!(sample_size >= 1) || !std::isfinite(sample_size)) {
    return absl::InvalidArgumentError("Sample size must be at least 1");
  }
  const double m = sample_size;
  const double e2 = epsilon * epsilon;
  if (variant == Variant::kDwork) return 2 * (2 * m + 1) / (m * m * e2);
  const double t = std::tanh(epsilon / 2);
  return 1 / (4 * m * t * t) + 2 / (m * m * e2);
}

absl::StatusOr<double> PpdsMseBound(int level, uint64_t universe_size,
                                    double epsilon) {
  if (absl::Status s = ValidatePositive(epsilon, "Epsilon"); !s.ok()) return s;
  if (universe_size == 0) {
    return absl::InvalidArgumentError("Universe size must be positive");
  }
  if (level < 0 || level > 63) {
    return absl::InvalidArgumentError(
        absl::StrCat("Level must lie in [0, 63], but is ", level));
  }
  const double u = static_cast<double>(universe_size);
  const double t = std::tanh(epsilon / 2);
  return std::ldexp(1.0, level - 2) / (u * t * t) +
         std::ldexp(1.0, 2 * level + 1) / (u * u * epsilon * epsilon);
}

absl::StatusOr<double> ExactVariance(Variant variant, double sample_size,
                                     double epsilon, double density) {
  if (absl::Status s = ValidateVariant(variant); !s.ok()) return s;
  if (absl::Status s = ValidatePositive(epsilon, "Epsilon"); !s.ok()) return s;
  if (!(sample_size >= 1) || !std::isfinite(sample_size)) {
    return absl::InvalidArgumentError("Sample size must be at least 1");
  }
  if (!(density >= 0 && density <= 1)) {
    return absl::InvalidArgumentError("Density must lie in [0, 1]");
  }
  const double m = sample_size;
  const double e2 = epsilon * epsilon;
  const double laplace = 2 / (m * m * e2);
  if (variant == Variant::kDwork) {
    return 4 / (m * e2) - density * density / m + laplace;
  }
  const double t = std::tanh(epsilon / 2);
  return (1 / (4 * m)) * (1 / (t * t) - 1) + density * (1 - density) / m +
         laplace;
}

}  // namespace panpriv
