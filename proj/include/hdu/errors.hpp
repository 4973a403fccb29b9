// Copyright 2026 The hdu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDU_ERRORS_HPP
#define HDU_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdu {

/// Malformed or inconsistent input (bad dimensions, non-unitary gate, parse failure).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A light cone or region does not fit inside the simulated window.
struct GeometryError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// A parameter lies outside the domain of validity of a formula.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised by gate checks when the input is not unitary at all.
struct NotUnitaryError : InputError {
    using InputError::InputError;
};

/// A fixed measurement outcome has zero Born probability.
struct ZeroProbabilityError : InputError {
    ZeroProbabilityError(int row, int link, const std::string &msg)
        : InputError(msg), row(row), link(link) {
    }
    int row;
    int link;
};

}  // namespace hdu

#endif
