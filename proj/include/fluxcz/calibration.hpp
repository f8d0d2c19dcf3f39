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

#include <cmath>
#include <utility>

#include "fluxcz/composite.hpp"
#include "fluxcz/propagator.hpp"
#include "fluxcz/pulse.hpp"

namespace fluxcz {

/// Full and truncated spectra of one circuit, plus the drive system built on the truncation.
struct GateSetup {
    CircuitSpec spec;
    DressedSpectrum full;
    DressedSpectrum truncated;
    DriveSystem sys;
    InteractionConstants constants;
};

inline GateSetup make_gate_setup(const CircuitSpec &spec, int truncation = 45) {
    GateSetup g;
    g.spec = spec;
    g.full = build_composite(spec);
    g.truncated = truncate_dressed(g.full, truncation);
    g.sys = make_drive_system(g.truncated);
    g.constants = interaction_constants(g.full);
    return g;
}

/// Phase-model inputs with dressed coupler matrix elements normalised to <1,1,1|n_c|1,0,1>.
inline PhaseModelInputs phase_model_inputs(const GateSetup &g, double amplitude = 0.0, double tau = 0.0) {
    const DressedSpectrum &s = g.truncated;
    const RMat &k = g.sys.k;
    const double ref = k(s.index({1, 1, 1}), s.index({1, 0, 1}));
    auto ratio = [&](Label hi, Label lo) { return k(s.index(hi), s.index(lo)) / ref; };
    PhaseModelInputs in;
    in.alpha = g.constants.alpha;
    in.dchi_00 = g.constants.dchi_00();
    in.dchi_01 = g.constants.dchi_01();
    in.dchi_10 = g.constants.dchi_10();
    in.m_00 = ratio({0, 1, 0}, {0, 0, 0});
    in.m_01 = ratio({0, 1, 1}, {0, 0, 1});
    in.m_10 = ratio({1, 1, 0}, {1, 0, 0});
    if (s.has({1, 2, 1})) {
        in.m_12 = ratio({1, 2, 1}, {1, 1, 1}) / std::sqrt(2.0);
    }
    if (amplitude > 0 && tau > 0) {
        in.power_ratio = std::pow(amplitude / seed_amplitude(g.sys.n_drive, tau), 2);
    }
    return in;
}

struct CalibratedGate {
    PulseSpec pulse;
    GateResult gate;
    double omega_d = 0;
    int evaluations = 0;
};

/// Resonant drive with the amplitude calibrated for a full |1,0,1> return.
inline CalibratedGate calibrate_resonant(const GateSetup &g, double t_g, const IntegratorSpec &integ = {}) {
    CalibratedGate c;
    c.pulse = PulseSpec::from_gate_time(t_g);
    c.pulse.amplitude = calibrate_amplitude(g.sys, c.pulse, 0.2, 1e-6, integ);
    c.gate = simulate_gate(g.sys, c.pulse, integ);
    c.omega_d = drive_frequency(g.sys, c.pulse);
    return c;
}

/// Analytic detuning seed, amplitude calibration at the seed, then a simplex polish on infidelity.
inline CalibratedGate calibrate_gate(const GateSetup &g, double t_g, const PolishSpec &polish = {},
                                     const IntegratorSpec &integ = {}) {
    PulseSpec p = PulseSpec::from_gate_time(t_g);
    p.detuning = optimal_detuning(phase_model_inputs(g), p.tau);
    p.amplitude = calibrate_amplitude(g.sys, p, 0.2, 1e-6, integ);
    OptimizeResult r = polish_drive(g.sys, p, polish, integ);
    CalibratedGate c;
    c.pulse = r.pulse;
    c.gate = r.gate;
    c.omega_d = drive_frequency(g.sys, r.pulse);
    c.evaluations = static_cast<int>(r.evaluations.size());
    return c;
}

/// The same physical drive (absolute frequency and amplitude) applied to another setup.
inline GateResult apply_fixed_drive(const GateSetup &g, const PulseSpec &pulse, double omega_d,
                                    const IntegratorSpec &integ = {}) {
    return gate_result(g.sys, evolve_computational(g.sys, pulse, omega_d, integ));
}

}  // namespace fluxcz
