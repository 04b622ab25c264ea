/*
 * Copyright 2026 The treeshap-hd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREESHAP_HD_ERRORS_HPP_
#define TREESHAP_HD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace treeshap_hd {

// Root of every error raised by the library. The CLI maps subclasses onto
// exit codes: ValidationFailure -> 2, BudgetFailure -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or invariant problems that the caller can fix.
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

// Memory-budget refusals.
class BudgetFailure : public Error {
 public:
  using Error::Error;
};

#define TREESHAP_HD_DEFINE_ERROR(Name, Base) \
  class Name : public Base {                 \
   public:                                   \
    using Base::Base;                        \
  }

TREESHAP_HD_DEFINE_ERROR(ParseError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(ValidationError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(FeatureIndexError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(UnsupportedFeatureError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(NaNInputError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(EmptyBackgroundError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(MissingCoverError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(ZeroCoverError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(InvalidPairError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(LengthError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(StructureError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(TooManyFeaturesError, ValidationFailure);
TREESHAP_HD_DEFINE_ERROR(DepthCapError, BudgetFailure);
TREESHAP_HD_DEFINE_ERROR(SizeError, BudgetFailure);
TREESHAP_HD_DEFINE_ERROR(OutOfMemoryBudget, BudgetFailure);
TREESHAP_HD_DEFINE_ERROR(BudgetExceededError, BudgetFailure);

#undef TREESHAP_HD_DEFINE_ERROR

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_ERRORS_HPP_
