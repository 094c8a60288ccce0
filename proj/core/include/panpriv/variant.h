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

#ifndef PANPRIV_VARIANT_H_
#define PANPRIV_VARIANT_H_

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace panpriv {

// The three density estimators. kDwork and kOptBern share the static-sample
// state machine; kPpds is the adaptive distinct-sampling estimator.
enum class Variant { kDwork, kOptBern, kPpds };

// Lower-case name used on the command line and in CSV output.
absl::string_view VariantName(Variant variant);

absl::StatusOr<Variant> ParseVariant(absl::string_view name);

}  // namespace panpriv

#endif  // PANPRIV_VARIANT_H_
