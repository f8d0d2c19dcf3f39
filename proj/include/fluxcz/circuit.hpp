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
#include <string>
#include <vector>

#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

struct FluxoniumSpec {
    double e_c = 2.0;
    double e_j = 7.0;
    double e_l = 0.3;
    double phi_ext = kPi;
    int basis_dim = 110;

    void validate() const {
        require(e_c > 0 && e_j >= 0 && e_l > 0, "fluxonium: e_c, e_l must be positive and e_j >= 0");
        require(basis_dim >= 20, "fluxonium: basis_dim must be >= 20");
        require(std::isfinite(phi_ext), "fluxonium: phi_ext must be finite");
    }
};

struct ResonatorSpec {
    double omega_c = 7.08;
    double impedance = 190.0;
    int basis_dim = 8;

    void validate() const {
        require(omega_c > 0, "resonator: omega_c must be positive");
        require(impedance > 0, "resonator: impedance must be positive");
        require(basis_dim >= 5, "resonator: basis_dim must be >= 5");
    }
};

/// Spectrum of a single circuit element. Energies are relative to the ground level.
struct ElementSpectrum {
    RVec energies;
    CMat charge_matrix;
    RMat phase_matrix;  // empty for the resonator
    std::vector<int> parity;  // +1/-1 per level, 0 when the element has no parity symmetry

    int size() const { return static_cast<int>(energies.size()); }
};

/// Zero-point charge fluctuation of the resonator, sqrt(R_K / (16 pi Z)).
inline double resonator_charge_zpf(double impedance) {
    return std::sqrt(kRK / (16.0 * kPi * impedance));
}

namespace detail {

inline RMat ladder(int n) {
    RMat a = RMat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return a;
}

}  // namespace detail

/// H = 4 E_C n^2 + (E_L/2) phi^2 - E_J cos(phi + phi_ext) in the L-C oscillator basis.
/// Keeps the lowest `levels` eigenstates (or all when levels <= 0).
inline ElementSpectrum diagonalize_fluxonium(const FluxoniumSpec &spec, int levels = 12) {
    spec.validate();
    const int n = spec.basis_dim;
    const int keep = (levels <= 0 || levels > n) ? n : levels;
    const double phi_zpf = std::pow(8.0 * spec.e_c / spec.e_l, 0.25) / std::sqrt(2.0);
    const double n_zpf = std::pow(spec.e_l / (8.0 * spec.e_c), 0.25) / std::sqrt(2.0);
    RMat a = detail::ladder(n);
    RMat phi = phi_zpf * (a + a.transpose());
    RMat k = n_zpf * (a.transpose() - a);  // n = i k

    Eigen::SelfAdjointEigenSolver<RMat> pe(phi);
    RVec c = (pe.eigenvalues().array() + spec.phi_ext).cos().matrix();
    RMat cosm = pe.eigenvectors() * c.asDiagonal() * pe.eigenvectors().transpose();

    RMat h = -4.0 * spec.e_c * (k * k) + 0.5 * spec.e_l * (phi * phi) - spec.e_j * cosm;
    h = 0.5 * (h + h.transpose()).eval();
    RVec values;
    RMat vectors;
    eigh(h, values, vectors);

    RMat v = vectors.leftCols(keep);
    ElementSpectrum out;
    out.energies = values.head(keep).array() - values(0);
    out.charge_matrix = cplx(0, 1) * (v.transpose() * k * v).cast<cplx>();
    out.phase_matrix = v.transpose() * phi * v;
    out.parity.assign(keep, 0);
    if (std::abs(std::sin(spec.phi_ext)) < 1e-12) {
        for (int l = 0; l < keep; ++l) {
            double p = 0;
            for (int m = 0; m < n; ++m) {
                p += (m % 2 == 0 ? 1.0 : -1.0) * v(m, l) * v(m, l);
            }
            out.parity[l] = p > 1 - 1e-8 ? 1 : (p < -1 + 1e-8 ? -1 : 0);
        }
    }
    return out;
}

/// Largest shift of the lowest 10 levels when basis_dim grows by 20% (GHz).
inline double fluxonium_basis_shift(const FluxoniumSpec &spec) {
    FluxoniumSpec big = spec;
    big.basis_dim = static_cast<int>(std::ceil(1.2 * spec.basis_dim));
    auto a = diagonalize_fluxonium(spec, 10);
    auto b = diagonalize_fluxonium(big, 10);
    return (a.energies - b.energies).cwiseAbs().maxCoeff();
}

/// Throws ConvergenceError if the lowest 10 levels move by more than 1 kHz.
inline void check_fluxonium_convergence(const FluxoniumSpec &spec, double tol = 1e-6) {
    double s = fluxonium_basis_shift(spec);
    if (!(s <= tol)) {
        throw ConvergenceError("fluxonium basis underflow: level shift " + std::to_string(s) +
                               " GHz at basis_dim " + std::to_string(spec.basis_dim));
    }
}

/// Ladder spectrum k * omega_c with n_c = zpf * i (c^dag - c).
inline ElementSpectrum resonator_spectrum(const ResonatorSpec &spec) {
    spec.validate();
    const int n = spec.basis_dim;
    RMat a = detail::ladder(n);
    ElementSpectrum out;
    out.energies = RVec::LinSpaced(n, 0.0, n - 1.0) * spec.omega_c;
    out.charge_matrix = cplx(0, resonator_charge_zpf(spec.impedance)) * (a.transpose() - a).cast<cplx>();
    for (int k = 0; k < n; ++k) {
        out.parity.push_back(k % 2 == 0 ? 1 : -1);
    }
    return out;
}

/// Charge matrix element n_jk between element eigenstates.
inline cplx charge_matrix_element(const ElementSpectrum &s, int j, int k) {
    if (j < 0 || k < 0 || j >= s.size() || k >= s.size()) {
        throw ConfigError("charge_matrix_element: level index out of range");
    }
    return s.charge_matrix(j, k);
}

/// Transition frequency E_k - E_j.
inline double transition(const ElementSpectrum &s, int j, int k) {
    return s.energies(k) - s.energies(j);
}

}  // namespace fluxcz
