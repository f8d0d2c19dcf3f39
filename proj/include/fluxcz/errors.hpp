// Copyright 2026 The fluxcz Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace fluxcz {

/// Invalid user input: bad parameters, missing config fields, unknown presets.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A computation failed to meet its numerical contract.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

/// Dressed-state labelling could not produce a bijection.
struct LabelError : NumericalError {
    using NumericalError::NumericalError;
};

/// A perturbative denominator is too close to zero.
struct ResonanceError : NumericalError {
    using NumericalError::NumericalError;
};

/// Grid search found its optimum on the grid edge.
struct BoundaryError : NumericalError {
    using NumericalError::NumericalError;
};

inline void require(bool ok, const std::string &msg) {
    if (!ok) {
        throw ConfigError(msg);
    }
}

}  // namespace fluxcz
