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
#include <limits>
#include <string>

#include "fluxcz/composite.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

enum class Topology { Grounded, Differential };

/// How the network's resonator frequency is read.
enum class OmegaInput {
    Loaded,  // omega is the loaded coupler frequency; the bare design frequency is solved for
    Design,  // omega is the bare design frequency before capacitive loading
};

/// Capacitances in fF, impedance in ohm, frequency in GHz.
struct CapacitanceNetwork {
    Topology topology = Topology::Grounded;
    double c_f = 7.27;
    double c_fp = 0.0;  // differential only
    double c_c = 2.45;
    double c_ab = 0.01;
    double z_in = 193.0;
    double omega = 7.08;
    OmegaInput omega_input = OmegaInput::Loaded;

    void validate() const {
        require(c_f >= 0 && c_fp >= 0 && c_c >= 0 && c_ab >= 0, "capnet: capacitances must be >= 0");
        require(z_in > 0, "capnet: z_in must be positive");
        require(omega > 0, "capnet: omega must be positive");
        require(topology == Topology::Differential || c_fp == 0.0, "capnet: c_fp applies to the differential topology only");
        require(c_f > 0 || c_fp > 0, "capnet: fluxonium mode has no capacitance");
    }
};

struct EffectiveCircuit {
    double e_c_a = 0;
    double e_c_b = 0;
    double z_c_out = 0;      // ohm
    double omega_c_out = 0;  // GHz
    double j_ac = 0;
    double j_bc = 0;
    double j_ab = 0;
    double omega_in = 0;  // bare design frequency, GHz
    double c_r = 0;       // fF
    double l_r = 0;       // nH
};

/// Resonator capacitance in fF for impedance z (ohm) and frequency omega (GHz): 1 / (2 pi z omega).
inline double resonator_capacitance(double z, double omega) {
    return 1e6 / (kTwoPi * z * omega);
}

/// Node-basis capacitance matrix (fF) for a given bare resonator capacitance.
/// Grounded: nodes (A, r, B). Differential: (A1, A2, r, B1, B2).
inline RMat build_matrix(const CapacitanceNetwork &net, double c_r) {
    net.validate();
    require(c_r > 0, "capnet: resonator capacitance must be positive");
    const double cf = net.c_f, cfp = net.c_fp, cc = net.c_c, cab = net.c_ab;
    RMat c;
    if (net.topology == Topology::Grounded) {
        c.resize(3, 3);
        c << cf + cc + cab, -cc, -cab,
             -cc, c_r + 2 * cc, -cc,
             -cab, -cc, cf + cc + cab;
    } else {
        c.resize(5, 5);
        c << cf + cfp, -cf, 0, 0, 0,
             -cf, cf + cfp + cc + cab, -cc, 0, -cab,
             0, -cc, c_r + 2 * cc, 0, -cc,
             0, 0, 0, cfp + cf, -cf,
             0, -cab, -cc, -cf, cf + cfp + cc + cab;
    }
    return c;
}

/// Sum/difference mode matrix for the differential network. Symmetric and orthogonal.
inline RMat mode_transform() {
    const double s = 1.0 / std::sqrt(2.0);
    RMat m = RMat::Zero(5, 5);
    m(0, 0) = s, m(0, 1) = s;
    m(1, 0) = s, m(1, 1) = -s;
    m(2, 2) = 1.0;
    m(3, 3) = s, m(3, 4) = s;
    m(4, 3) = s, m(4, 4) = -s;
    return m;
}

/// Congruence (M^T)^-1 C M^-1, which equals M C M here. Modes: (sum A, diff A, r, sum B, diff B).
inline RMat differential_transform(const RMat &c) {
    require(c.rows() == 5 && c.cols() == 5, "capnet: differential_transform needs a 5x5 matrix");
    const RMat m = mode_transform();
    return m.transpose().inverse() * c * m.inverse();
}

/// Keep only the qubit difference modes and the resonator.
inline RMat truncate_modes(const RMat &c_tilde) {
    require(c_tilde.rows() == 5, "capnet: truncate_modes needs a 5x5 matrix");
    const int keep[3] = {1, 2, 4};
    RMat t(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t(i, j) = c_tilde(keep[i], keep[j]);
        }
    }
    return t;
}

namespace detail {

struct ModeIndex {
    int a, r, b;
};

inline ModeIndex mode_index(Topology t) {
    return t == Topology::Grounded ? ModeIndex{0, 1, 2} : ModeIndex{1, 2, 4};
}

/// Inverse capacitance matrix in the mode basis for bare design frequency omega_in.
inline RMat inverse_modes(const CapacitanceNetwork &net, double omega_in) {
    RMat c = build_matrix(net, resonator_capacitance(net.z_in, omega_in));
    if (net.topology == Topology::Differential) {
        c = differential_transform(c);
    }
    Eigen::LDLT<RMat> ldlt(c);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0) {
        throw ConfigError("capnet: capacitance matrix is singular or not positive definite");
    }
    return ldlt.solve(RMat::Identity(c.rows(), c.cols()));
}

inline double loaded_frequency(const CapacitanceNetwork &net, double omega_in) {
    const RMat ci = inverse_modes(net, omega_in);
    const int r = mode_index(net.topology).r;
    return omega_in * std::sqrt(resonator_capacitance(net.z_in, omega_in) * ci(r, r));
}

}  // namespace detail

/// Bare design frequency. For OmegaInput::Loaded this solves loaded(omega_in) = omega by bisection.
inline double design_frequency(const CapacitanceNetwork &net) {
    net.validate();
    if (net.omega_input == OmegaInput::Design) {
        return net.omega;
    }
    double lo = net.omega, hi = 2.0 * net.omega;
    while (detail::loaded_frequency(net, hi) < net.omega) {
        hi *= 2.0;
        if (hi > 1e3 * net.omega) {
            throw ConvergenceError("capnet: cannot bracket the design frequency");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (detail::loaded_frequency(net, mid) < net.omega ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Node-basis matrix with the resonator capacitance derived from the network's (z_in, omega).
inline RMat build_matrix(const CapacitanceNetwork &net) {
    return build_matrix(net, resonator_capacitance(net.z_in, design_frequency(net)));
}

/// Charging energies and couplings from the full inverse capacitance matrix.
/// E_C,i = (e^2/h)(C^-1)_ii / 2, J_ij = 4 (e^2/h)(C^-1)_ij; sum modes are eliminated after inversion.
inline EffectiveCircuit effective_circuit(const CapacitanceNetwork &net) {
    EffectiveCircuit e;
    e.omega_in = design_frequency(net);
    e.c_r = resonator_capacitance(net.z_in, e.omega_in);
    e.l_r = 1e6 / (std::pow(kTwoPi * e.omega_in, 2) * e.c_r);
    const RMat ci = detail::inverse_modes(net, e.omega_in);
    const auto [a, r, b] = detail::mode_index(net.topology);
    e.e_c_a = kE2OverHfF * ci(a, a) / 2.0;
    e.e_c_b = kE2OverHfF * ci(b, b) / 2.0;
    e.j_ac = 4.0 * kE2OverHfF * ci(a, r);
    e.j_bc = 4.0 * kE2OverHfF * ci(b, r);
    e.j_ab = 4.0 * kE2OverHfF * ci(a, b);
    const double c_eff = 1.0 / ci(r, r);
    e.z_c_out = std::sqrt(e.l_r / c_eff * 1e6);
    e.omega_c_out = 1e3 / (kTwoPi * std::sqrt(e.l_r * c_eff));
    return e;
}

/// Circuit with capacitive parameters from `e` and inductive parameters from `base`.
inline CircuitSpec apply_effective(const EffectiveCircuit &e, CircuitSpec base) {
    base.fluxonium_a.e_c = e.e_c_a;
    base.fluxonium_b.e_c = e.e_c_b;
    base.resonator.omega_c = e.omega_c_out;
    base.resonator.impedance = e.z_c_out;
    base.j_ac = e.j_ac;
    base.j_bc = e.j_bc;
    base.j_ab = e.j_ab;
    return base;
}

/// Exact static ZZ (GHz) of the network with inductive parameters from `base`.
inline double network_eta(const CapacitanceNetwork &net, const CircuitSpec &base) {
    const DressedSpectrum s = build_composite(apply_effective(effective_circuit(net), base));
    return interaction_constants(s).eta;
}

struct CabBound {
    double c_ab = 0;  // fF; +inf when unbounded
    double eta_nominal = 0;
    int evaluations = 0;
};

/// Largest C_AB >= net.c_ab with |eta| <= threshold (GHz), by bracketing and bisection.
inline CabBound zz_bound_cab(const CapacitanceNetwork &net, const CircuitSpec &base, double threshold,
                             double rel_tol = 1e-3) {
    require(threshold > 0, "capnet: threshold must be positive");
    CabBound out;
    if (std::isinf(threshold)) {
        out.c_ab = std::numeric_limits<double>::infinity();
        return out;
    }
    auto within = [&](double c_ab) {
        CapacitanceNetwork n = net;
        n.c_ab = c_ab;
        ++out.evaluations;
        const double eta = network_eta(n, base);
        if (c_ab == net.c_ab) {
            out.eta_nominal = eta;
        }
        return std::abs(eta) <= threshold;
    };
    if (!within(net.c_ab)) {
        throw BoundaryError("capnet: |eta| exceeds the threshold at the nominal C_AB");
    }
    double lo = net.c_ab;
    double step = std::max(0.01, net.c_ab);
    double hi = lo + step;
    while (within(hi)) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if (hi > 1e3 * (net.c_f + net.c_c + 1.0)) {
            out.c_ab = std::numeric_limits<double>::infinity();
            return out;
        }
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (within(mid) ? lo : hi) = mid;
    }
    out.c_ab = 0.5 * (lo + hi);
    return out;
}

}  // namespace fluxcz
