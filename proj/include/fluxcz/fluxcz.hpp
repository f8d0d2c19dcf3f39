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

#include "fluxcz/units.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"
#include "fluxcz/circuit.hpp"
#include "fluxcz/composite.hpp"
#include "fluxcz/perturbation.hpp"
#include "fluxcz/capnet.hpp"
#include "fluxcz/pulse.hpp"
#include "fluxcz/propagator.hpp"
#include "fluxcz/calibration.hpp"
#include "fluxcz/lindblad.hpp"
#include "fluxcz/parallel.hpp"
#include "fluxcz/robustness.hpp"
#include "fluxcz/config.hpp"
#include "fluxcz/pipeline.hpp"
