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

#include "panpriv/variant.h"

#include <string>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace panpriv {

absl::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kDwork:
      return "dwork";
    case Variant::kOptBern:
      return "optbern";
    case Variant::kPpds:
      return "ppds";
  }
  return "unknown";
}

absl::StatusOr<Variant> ParseVariant(absl::string_view name) {
  const std::string lower = absl::AsciiStrToLower(name);
  if (lower == "dwork") return Variant::kDwork;
  if (lower == "optbern") return Variant::kOptBern;
  if (lower == "ppds") return Variant::kPpds;
  return absl::InvalidArgumentError(
      absl::StrCat("Unknown variant '", name,
                   "'; expected one of dwork, optbern, ppds"));
}

}  // namespace panpriv
