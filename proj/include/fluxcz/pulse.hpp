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

#include <array>
#include <cmath>

#include "fluxcz/errors.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

/// Gaussian pulse with linear ramps and an optional derivative quadrature.
/// Time origin is the Gaussian peak; the pulse spans [-1.1 tau, 1.1 tau].
struct PulseSpec {
    double tau = 45.4545;
    double amplitude = 0.0;       // Omega_0 (GHz)
    double detuning = 0.0;        // drive offset from the |1,0,1> -> |1,1,1> resonance (GHz)
    double drag_scale = 0.0;      // d
    double drag_alpha = 0.07;     // GHz
    double amplitude_scale = 1.0; // a

    double t_gate() const { return 2.2 * tau; }
    double t_start() const { return -1.1 * tau; }
    double t_end() const { return 1.1 * tau; }

    static PulseSpec from_gate_time(double t_g) {
        PulseSpec p;
        p.tau = t_g / 2.2;
        return p;
    }

    void validate() const {
        require(tau > 0 && std::isfinite(tau), "pulse: tau must be positive");
        require(std::isfinite(amplitude) && std::isfinite(detuning), "pulse: amplitude and detuning must be finite");
        require(drag_scale == 0.0 || drag_alpha != 0.0, "pulse: drag_alpha must be nonzero when drag_scale is set");
    }
};

/// Omega(t): Gaussian on [-tau, tau], linear ramps to zero over tau/10 on each side.
inline double envelope(const PulseSpec &p, double t) {
    const double at = std::abs(t);
    if (at <= p.tau) {
        return p.amplitude * std::exp(-4.0 * t * t / (p.tau * p.tau));
    }
    if (at >= 1.1 * p.tau) {
        return 0.0;
    }
    return p.amplitude * std::exp(-4.0) * (1.1 * p.tau - at) / (0.1 * p.tau);
}

/// dOmega/dt of the ramped envelope.
inline double envelope_derivative(const PulseSpec &p, double t) {
    const double at = std::abs(t);
    if (at <= p.tau) {
        return -8.0 * t / (p.tau * p.tau) * p.amplitude * std::exp(-4.0 * t * t / (p.tau * p.tau));
    }
    if (at >= 1.1 * p.tau) {
        return 0.0;
    }
    return -(t > 0 ? 1.0 : -1.0) * p.amplitude * std::exp(-4.0) / (0.1 * p.tau);
}

/// a * (Omega cos(2 pi f t) + d * dOmega/dt * sin(2 pi f t) / alpha), with f = omega_d in GHz.
inline double drag_drive(const PulseSpec &p, double t, double omega_d) {
    double x = p.amplitude_scale * envelope(p, t) * std::cos(kTwoPi * omega_d * t);
    if (p.drag_scale != 0.0) {
        if (p.drag_alpha == 0.0) {
            throw ConfigError("drag_drive: drag_alpha is zero");
        }
        x += p.amplitude_scale * p.drag_scale * envelope_derivative(p, t) * std::sin(kTwoPi * omega_d * t) / p.drag_alpha;
    }
    return x;
}

/// Seed amplitude for a full Rabi cycle on a transition with charge element n: 2/(sqrt(pi) n tau).
inline double seed_amplitude(double n_drive, double tau) {
    return 2.0 / (std::sqrt(kPi) * std::abs(n_drive) * tau);
}

/// Population-transfer angle theta_0(t) = (pi/2)(1 + erf(2t/tau)).
inline double theta0(double t, double tau) {
    return 0.5 * kPi * (1.0 + std::erf(2.0 * t / tau));
}

struct StarkPrediction {
    double phi_00 = 0;
    double phi_01 = 0;
    double phi_10 = 0;
    double phi_11 = 0;
    double phi_rel = 0;
    double epsilon_phi = 0;
    double delta_opt = 0;
};

/// Coupler differential shifts and drive-element ratios consumed by the phase model.
struct PhaseModelInputs {
    double alpha = 0;
    double dchi_00 = 0;
    double dchi_01 = 0;
    double dchi_10 = 0;
    double m_00 = 1;
    double m_01 = 1;
    double m_10 = 1;
    /// <1,2,1|n_c|1,1,1> / (sqrt(2) <1,1,1|n_c|1,0,1>); 1 for a harmonic coupler ladder.
    double m_12 = 1;
    /// (Omega_0 / seed amplitude)^2; the phases scale with the drive power.
    double power_ratio = 1;
};

inline constexpr double kC1 = 0.612;
inline constexpr double kC2 = 0.485;
inline constexpr double kD1 = -0.488;
inline constexpr double kD2 = -0.387;

/// phi = sqrt(pi/2) |m|^2 / (dchi tau).
inline double stark_phase(double m, double dchi, double tau) {
    if (dchi == 0.0) {
        throw ConfigError("stark_phase: zero dchi");
    }
    return std::sqrt(kPi / 2.0) * m * m / (dchi * tau);
}

/// phi_11 = -1.58/(tau alpha) - 1.03 pi delta tau.
/// `scale` multiplies the first term (drive power and second-rung element, 1 by default).
inline double phi_11(double alpha, double tau, double detuning, double scale = 1.0) {
    if (alpha == 0.0) {
        throw ConfigError("phi_11: zero alpha");
    }
    return -1.58 * scale / (tau * alpha) - 1.03 * kPi * detuning * tau;
}

inline double relative_phase(double phi_00, double phi_01, double phi_10, double phi_11) {
    return phi_11 + phi_00 - phi_01 - phi_10;
}

/// 1 - (14 + 6 cos phi)/20.
inline double epsilon_phi(double phi) {
    return 1.0 - (14.0 + 6.0 * std::cos(phi)) / 20.0;
}

namespace detail {

inline double stark_bracket(const PhaseModelInputs &in) {
    return in.m_01 * in.m_01 / in.dchi_01 + in.m_10 * in.m_10 / in.dchi_10 - in.m_00 * in.m_00 / in.dchi_00;
}

}  // namespace detail

/// (1/tau^2) [c1/alpha + c2 (m01^2/dchi01 + m10^2/dchi10 - m00^2/dchi00)]^2.
inline double interference_error(const PhaseModelInputs &in, double tau) {
    double b = kC1 / in.alpha + kC2 * detail::stark_bracket(in);
    return b * b / (tau * tau);
}

/// (1/tau^2) [d1/alpha + d2 (m01^2/dchi01 + m10^2/dchi10 - m00^2/dchi00)].
inline double optimal_detuning(const PhaseModelInputs &in, double tau) {
    return (kD1 / in.alpha + kD2 * detail::stark_bracket(in)) / (tau * tau);
}

inline StarkPrediction stark_phases(const PhaseModelInputs &in, double tau, double detuning = 0.0) {
    StarkPrediction s;
    s.phi_00 = in.power_ratio * stark_phase(in.m_00, in.dchi_00, tau);
    s.phi_01 = in.power_ratio * stark_phase(in.m_01, in.dchi_01, tau);
    s.phi_10 = in.power_ratio * stark_phase(in.m_10, in.dchi_10, tau);
    s.phi_11 = phi_11(in.alpha, tau, detuning, in.power_ratio * in.m_12 * in.m_12);
    s.phi_rel = relative_phase(s.phi_00, s.phi_01, s.phi_10, s.phi_11);
    s.epsilon_phi = epsilon_phi(s.phi_rel);
    s.delta_opt = optimal_detuning(in, tau);
    return s;
}

}  // namespace fluxcz
