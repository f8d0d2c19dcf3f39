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


#include "fluxcz/robustness.hpp"

#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"

using namespace fluxcz;

namespace {

CircuitSpec table1() {
    CircuitSpec s;
    s.fluxonium_a.e_j = 7.1;
    s.fluxonium_b.e_j = 7.2;
    return s;
}

PolishSpec quick_polish() {
    PolishSpec p;
    p.size_tol = 0.05;
    p.max_iterations = 60;
    return p;
}

}  // namespace

TEST(robustness, flux_sigma_values) {
    NoiseSpec n;
    n.f_low = 2.78e-4;
    n.f_high = 1e7;
    EXPECT_NEAR(flux_sigma(n), 5.0 * std::sqrt(std::log(1e7 / 2.78e-4)), 1e-12);
    EXPECT_NEAR(flux_sigma(n), 24.6, 0.06);
    NoiseSpec one = n;
    one.amplitude = 1.0;
    EXPECT_NEAR(flux_sigma(one) / flux_sigma(n), 0.2, 1e-15);
    one.amplitude = 1e-12;
    EXPECT_LT(flux_sigma(one), 1e-10);
    NoiseSpec two = n;
    two.convention = NoiseConvention::TwoSided;
    EXPECT_NEAR(flux_sigma(two), std::sqrt(2.0) * flux_sigma(n), 1e-12);
    NoiseSpec ang = n;
    ang.convention = NoiseConvention::AngularPerHz;
    EXPECT_NEAR(flux_sigma(ang), flux_sigma(n) / std::sqrt(kTwoPi), 1e-12);
}

TEST(robustness, noise_validation) {
    NoiseSpec n;
    n.amplitude = 0.0;
    EXPECT_THROW(flux_sigma(n), ConfigError);
    n.amplitude = 5.0;
    n.f_low = 1e8;
    EXPECT_THROW(flux_sigma(n), ConfigError);
}

TEST(robustness, flux_units) {
    EXPECT_NEAR(micro_flux_to_phase(1e6), kTwoPi, 1e-12);
    EXPECT_NEAR(phase_to_micro_flux(micro_flux_to_phase(24.6)), 24.6, 1e-12);
}

TEST(robustness, ej_grid) {
    auto v = ej_grid(7.1);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_NEAR(v.front(), 7.1 * 0.98, 1e-12);
    EXPECT_NEAR(v[2], 7.1, 1e-12);
    EXPECT_NEAR(v.back(), 7.1 * 1.02, 1e-12);
}

TEST(robustness, parallel_for_is_deterministic) {
    const int n = 37;
    auto run = [&](int workers) {
        std::vector<double> out(n);
        parallel_for(n, workers, [&](int i) { out[i] = std::sin(0.1 * i) * std::exp(-0.01 * i); });
        return out;
    };
    EXPECT_EQ(run(1), run(4));
    EXPECT_THROW(parallel_for(10, 3,
                              [](int i) {
                                  if (i == 7) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
    try {
        parallel_for(10, 3, [](int i) {
            if (i >= 4) throw std::runtime_error(std::to_string(i));
        });
    } catch (const std::runtime_error &e) {
        EXPECT_STREQ(e.what(), "4");
    }
}

TEST(robustness, flux_sweep_symmetry) {
    const GateSetup g = make_gate_setup(table1(), 16);
    const CalibratedGate nominal = calibrate_resonant(g, 40.0);
    const double d = micro_flux_to_phase(30.0);
    auto pts = flux_offset_sweep(table1(), {0.0, d, -d}, nominal, 16);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_NEAR(pts[0].infidelity, nominal.gate.infidelity, 1e-12);
    EXPECT_NEAR(pts[1].infidelity, pts[2].infidelity, 1e-9);
    EXPECT_NEAR(pts[1].offset_micro, 30.0, 1e-9);
    EXPECT_GT(std::abs(pts[1].infidelity - pts[0].infidelity), 0.0);
}

TEST(robustness, flux_sweep_smooth) {
    const GateSetup g = make_gate_setup(table1(), 16);
    const CalibratedGate nominal = calibrate_resonant(g, 40.0);
    std::vector<double> offsets;
    for (int u = 0; u <= 50; u += 25) {
        offsets.push_back(micro_flux_to_phase(u));
    }
    auto pts = flux_offset_sweep(table1(), offsets, nominal, 16, FluxTarget::A, 2);
    for (size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LT(std::abs(pts[i].infidelity - pts[i - 1].infidelity), 0.1 * pts[0].infidelity);
    }
}

TEST(robustness, ej_recalibration_dominates) {
    EjSweepOptions opt;
    opt.polish = quick_polish();
    auto pts = ej_sweep(table1(), {7.1 * 0.98, 7.1 * 1.02}, {40.0}, 16, opt);
    ASSERT_EQ(pts.size(), 2u);
    for (const auto &p : pts) {
        EXPECT_LE(p.infidelity, p.fixed_infidelity) << p.e_j;
        EXPECT_EQ(p.t_g, 40.0);
    }
}
