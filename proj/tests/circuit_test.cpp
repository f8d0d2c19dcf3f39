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


#include "fluxcz/circuit.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"

using namespace fluxcz;

namespace {

/// Lowest levels of 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi + phi_e) on a uniform phase grid.
Eigen::VectorXd grid_levels(const FluxoniumSpec &s, int levels) {
    const int n = 6000;
    const double half = 30.0;
    const double h = 2.0 * half / (n + 1);
    Eigen::VectorXd diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) {
        const double phi = -half + (i + 1) * h;
        diag(i) = 8.0 * s.e_c / (h * h) + 0.5 * s.e_l * phi * phi - s.e_j * std::cos(phi + s.phi_ext);
    }
    off.setConstant(-4.0 * s.e_c / (h * h));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    return es.eigenvalues().head(levels);
}

}  // namespace

TEST(circuit, fluxonium_matrix_elements) {
    FluxoniumSpec s;
    auto sp = diagonalize_fluxonium(s, 6);
    EXPECT_NEAR(std::abs(charge_matrix_element(sp, 0, 1)), 0.04, 0.01);
    EXPECT_NEAR(std::abs(charge_matrix_element(sp, 1, 2)), 0.56, 0.05);
    EXPECT_NEAR(std::abs(charge_matrix_element(sp, 0, 3)), 0.48, 0.05);
    double w01 = transition(sp, 0, 1);
    EXPECT_GT(w01, 0.1);
    EXPECT_LT(w01, 0.3);
}

TEST(circuit, phase_space_oracle) {
    FluxoniumSpec s;
    s.e_j = 7.1;
    auto sp = diagonalize_fluxonium(s, 8);
    Eigen::VectorXd ref = grid_levels(s, 8);
    for (int k = 1; k < 8; ++k) {
        EXPECT_NEAR(sp.energies(k) - sp.energies(0), ref(k) - ref(0), 2e-4) << "level " << k;
    }
}

TEST(circuit, harmonic_limit) {
    FluxoniumSpec s;
    s.e_j = 0.0;
    s.e_c = 1.3;
    s.e_l = 0.7;
    auto sp = diagonalize_fluxonium(s, 5);
    const double w = std::sqrt(8.0 * s.e_c * s.e_l);
    for (int k = 1; k < 5; ++k) {
        EXPECT_NEAR(transition(sp, k - 1, k), w, 1e-9);
    }
    EXPECT_NEAR(std::abs(charge_matrix_element(sp, 0, 1)), std::pow(s.e_l / (8.0 * s.e_c), 0.25) / std::sqrt(2.0), 1e-9);
}

TEST(circuit, parity_selection) {
    FluxoniumSpec s;
    auto sp = diagonalize_fluxonium(s, 10);
    ASSERT_EQ(sp.parity.size(), 10u);
    for (int j = 0; j < 10; ++j) {
        for (int k = 0; k < 10; ++k) {
            if (sp.parity[j] == sp.parity[k]) {
                EXPECT_LT(std::abs(charge_matrix_element(sp, j, k)), 1e-9);
            }
        }
    }
    EXPECT_LT((sp.charge_matrix - sp.charge_matrix.adjoint()).norm(), 1e-12);
}

TEST(circuit, resonator_zpf) {
    EXPECT_NEAR(resonator_charge_zpf(191.0), 1.64, 0.01);
    EXPECT_NEAR(0.33 * resonator_charge_zpf(191.0), 0.54, 0.01);
    ResonatorSpec r;
    auto sp = resonator_spectrum(r);
    for (int k = 1; k < sp.size(); ++k) {
        EXPECT_NEAR(transition(sp, k - 1, k), r.omega_c, 1e-12);
        EXPECT_NEAR(std::abs(charge_matrix_element(sp, k - 1, k)), resonator_charge_zpf(r.impedance) * std::sqrt(k), 1e-12);
    }
}

TEST(circuit, basis_convergence) {
    FluxoniumSpec s;
    EXPECT_NO_THROW(check_fluxonium_convergence(s));
    EXPECT_LT(fluxonium_basis_shift(s), 1e-6);
}

TEST(circuit, rejects_bad_input) {
    FluxoniumSpec s;
    s.e_c = -1.0;
    EXPECT_THROW(diagonalize_fluxonium(s), ConfigError);
}
