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

#include <algorithm>
#include <cmath>
#include <vector>

#include "fluxcz/calibration.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/parallel.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

/// How the 1/f spectrum S = A^2/f is integrated into a variance.
enum class NoiseConvention {
    LogRatio,       // sigma^2 = A^2 ln(f_high / f_low)
    AngularPerHz,   // S(omega) = A^2/omega integrated with d omega / 2 pi: sigma^2 = A^2 ln(.) / 2 pi
    TwoSided,       // sigma^2 = 2 A^2 ln(.)
};

/// 1/f flux noise. Amplitude in micro flux quanta, cutoffs in Hz.
struct NoiseSpec {
    double amplitude = 5.0;
    double f_low = 1.0 / 3600.0;
    double f_high = 1e7;
    NoiseConvention convention = NoiseConvention::LogRatio;

    void validate() const {
        require(amplitude > 0, "noise: amplitude must be positive");
        require(f_low > 0 && f_low < f_high, "noise: need 0 < f_low < f_high");
    }
};

/// RMS flux (micro flux quanta) accumulated between the cutoffs.
inline double flux_sigma(const NoiseSpec &n) {
    n.validate();
    double var = n.amplitude * n.amplitude * std::log(n.f_high / n.f_low);
    switch (n.convention) {
    case NoiseConvention::LogRatio:
        break;
    case NoiseConvention::AngularPerHz:
        var /= kTwoPi;
        break;
    case NoiseConvention::TwoSided:
        var *= 2.0;
        break;
    }
    return std::sqrt(var);
}

/// delta phi_e = 2 pi delta Phi / Phi_0.
inline double micro_flux_to_phase(double micro_phi0) { return kTwoPi * micro_phi0 * 1e-6; }
inline double phase_to_micro_flux(double phase) { return phase / kTwoPi * 1e6; }

enum class FluxTarget { A, B, Both };

struct FluxPoint {
    double offset = 0;        // rad
    double offset_micro = 0;  // micro flux quanta
    double infidelity = 0;
    double leakage = 0;
    double phi_rel = 0;
};

/// Coherent error versus a static flux offset with the drive held at its nominal calibration.
/// Offsets are added to phi_ext of the target fluxonium(s); label failures propagate as LabelError.
inline std::vector<FluxPoint> flux_offset_sweep(const CircuitSpec &base, const std::vector<double> &offsets,
                                                const CalibratedGate &nominal, int truncation,
                                                FluxTarget target = FluxTarget::A, int workers = 1,
                                                const IntegratorSpec &integ = {}) {
    std::vector<FluxPoint> out(offsets.size());
    parallel_for(static_cast<int>(offsets.size()), workers, [&](int i) {
        CircuitSpec spec = base;
        if (target != FluxTarget::B) {
            spec.fluxonium_a.phi_ext += offsets[i];
        }
        if (target != FluxTarget::A) {
            spec.fluxonium_b.phi_ext += offsets[i];
        }
        const GateSetup g = make_gate_setup(spec, truncation);
        const GateResult r = apply_fixed_drive(g, nominal.pulse, nominal.omega_d, integ);
        out[i] = {offsets[i], phase_to_micro_flux(offsets[i]), r.infidelity, r.leakage, r.phi_rel};
    });
    return out;
}

/// `points` values of E_J spanning nominal * (1 +- rel_span).
inline std::vector<double> ej_grid(double nominal, double rel_span = 0.02, int points = 5) {
    require(points >= 1, "ej_grid: points must be positive");
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
        const double x = points == 1 ? 0.0 : -1.0 + 2.0 * i / (points - 1);
        v[i] = nominal * (1.0 + rel_span * x);
    }
    return v;
}

struct EjPoint {
    double e_j = 0;
    double t_g = 0;
    double infidelity = 0;        // recalibrated
    double leakage = 0;
    double phi_rel = 0;
    double fixed_infidelity = 0;  // nominal drive, no recalibration
    PulseSpec pulse;
};

struct EjSweepOptions {
    PolishSpec polish;
    int workers = 1;
    IntegratorSpec integ;
};

/// Coherent error versus E_J of fluxonium A, recalibrating the drive at every (E_J, t_g).
/// The polish starts from the better of the fresh analytic seed and the nominal drive, so the
/// recalibrated error never exceeds the fixed-drive error.
inline std::vector<EjPoint> ej_sweep(const CircuitSpec &base, const std::vector<double> &ej_values,
                                     const std::vector<double> &gate_times, int truncation,
                                     const EjSweepOptions &opt = {}) {
    const int n_t = static_cast<int>(gate_times.size());
    const int n_e = static_cast<int>(ej_values.size());
    std::vector<CalibratedGate> nominal(n_t);
    const GateSetup g0 = make_gate_setup(base, truncation);
    parallel_for(n_t, opt.workers, [&](int t) { nominal[t] = calibrate_gate(g0, gate_times[t], opt.polish, opt.integ); });

    std::vector<EjPoint> out(static_cast<size_t>(n_e) * n_t);
    parallel_for(n_e, opt.workers, [&](int e) {
        CircuitSpec spec = base;
        spec.fluxonium_a.e_j = ej_values[e];
        const GateSetup g = make_gate_setup(spec, truncation);
        for (int t = 0; t < n_t; ++t) {
            EjPoint &pt = out[static_cast<size_t>(e) * n_t + t];
            pt.e_j = ej_values[e];
            pt.t_g = gate_times[t];
            PulseSpec fixed = nominal[t].pulse;
            fixed.detuning = nominal[t].omega_d - g.sys.omega_res;
            const GateResult rf = simulate_gate(g.sys, fixed, opt.integ);
            pt.fixed_infidelity = rf.infidelity;

            PulseSpec seed = PulseSpec::from_gate_time(gate_times[t]);
            seed.detuning = optimal_detuning(phase_model_inputs(g), seed.tau);
            seed.amplitude = calibrate_amplitude(g.sys, seed, 0.2, 1e-6, opt.integ);
            const GateResult rs = simulate_gate(g.sys, seed, opt.integ);
            const PulseSpec &start = rs.infidelity <= rf.infidelity ? seed : fixed;

            OptimizeResult r = polish_drive(g.sys, start, opt.polish, opt.integ);
            pt.infidelity = r.gate.infidelity;
            pt.leakage = r.gate.leakage;
            pt.phi_rel = r.gate.phi_rel;
            pt.pulse = r.pulse;
        }
    });
    return out;
}

}  // namespace fluxcz
