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

#include <numbers>

namespace fluxcz {

// Energies are H/h in GHz, times in ns, phases in radians.
// A product GHz * ns is a number of cycles; multiply by kTwoPi for an angle.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// von Klitzing constant h/e^2 in ohm.
inline constexpr double kRK = 25812.807;

/// e^2/h expressed in GHz per inverse femtofarad: e^2 / (h * 1 fF).
inline constexpr double kE2OverHfF = 1.602176634e-19 * 1.602176634e-19 / 6.62607015e-34 / 1e-15 / 1e9;

/// Boltzmann constant over Planck constant in GHz per kelvin.
inline constexpr double kKbOverH = 20.8366;

}  // namespace fluxcz
