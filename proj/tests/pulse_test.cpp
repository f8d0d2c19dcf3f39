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


#include "fluxcz/pulse.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace fluxcz;

namespace {

PulseSpec sample() {
    PulseSpec p = PulseSpec::from_gate_time(100.0);
    p.amplitude = 0.02;
    return p;
}

}  // namespace

TEST(pulse, envelope_endpoints) {
    PulseSpec p = sample();
    EXPECT_DOUBLE_EQ(envelope(p, 0.0), p.amplitude);
    EXPECT_EQ(envelope(p, p.t_end()), 0.0);
    EXPECT_EQ(envelope(p, p.t_start()), 0.0);
    EXPECT_NEAR(p.t_gate(), 100.0, 1e-12);
}

TEST(pulse, envelope_symmetry_and_continuity) {
    PulseSpec p = sample();
    for (double t = 0.0; t < 1.2 * p.tau; t += 0.37) {
        EXPECT_DOUBLE_EQ(envelope(p, t), envelope(p, -t));
        EXPECT_DOUBLE_EQ(envelope_derivative(p, t), -envelope_derivative(p, -t));
    }
    const double e = 1e-9 * p.tau;
    EXPECT_NEAR(envelope(p, p.tau - e), envelope(p, p.tau + e), 1e-10);
}

TEST(pulse, envelope_derivative_matches_difference) {
    PulseSpec p = sample();
    const double h = 1e-5;
    for (double t : {-40.0, -12.3, 3.1, 20.0, 47.0, 49.5}) {
        const double fd = (envelope(p, t + h) - envelope(p, t - h)) / (2 * h);
        EXPECT_NEAR(envelope_derivative(p, t), fd, 1e-8);
    }
}

TEST(pulse, drag_off_is_plain_carrier) {
    PulseSpec p = sample();
    for (double t : {-30.0, 0.0, 11.0}) {
        EXPECT_DOUBLE_EQ(drag_drive(p, t, 6.7), envelope(p, t) * std::cos(kTwoPi * 6.7 * t));
    }
    p.drag_scale = 0.5;
    p.drag_alpha = 0.0;
    EXPECT_THROW(drag_drive(p, 1.0, 6.7), ConfigError);
}

TEST(pulse, stark_phase_values) {
    EXPECT_NEAR(stark_phase(1.0, -0.1, 45.45), -0.2758, 1e-4);
    EXPECT_NEAR(stark_phase(1.0, -1e12, 45.45), 0.0, 1e-12);
    EXPECT_NEAR(phi_11(0.07, 45.45, 0.0), -0.4966, 1e-4);
    const double tau = 45.45;
    const double cancel = -1.58 / (tau * 0.07) / (1.03 * kPi * tau);
    EXPECT_NEAR(phi_11(0.07, tau, cancel), 0.0, 1e-12);
}

TEST(pulse, relative_phase_identities) {
    EXPECT_EQ(relative_phase(0, 0, 0, 0), 0.0);
    EXPECT_NEAR(relative_phase(-0.3, 0, 0, 0.3), 0.0, 1e-15);
}

TEST(pulse, epsilon_phi_values) {
    EXPECT_EQ(epsilon_phi(0.0), 0.0);
    EXPECT_NEAR(epsilon_phi(0.1), 1.49875e-3, 1e-8);
    EXPECT_NEAR(epsilon_phi(0.1), 3.0 * 0.01 / 20.0, 2e-6);
    EXPECT_NEAR(epsilon_phi(kPi), 0.6, 1e-15);
}

TEST(pulse, detuning_seed) {
    PhaseModelInputs in;
    in.alpha = 0.07;
    in.dchi_00 = -0.25;
    in.dchi_01 = -0.10;
    in.dchi_10 = -0.08;
    const double d = optimal_detuning(in, 45.45);
    EXPECT_NEAR(optimal_detuning(in, 2 * 45.45), d / 4, 1e-15);
    in.alpha = -kD1 / (kD2 * detail::stark_bracket(in));
    EXPECT_NEAR(optimal_detuning(in, 45.45), 0.0, 1e-15);
}

TEST(pulse, interference_error_limits) {
    PhaseModelInputs in;
    in.alpha = 0.07;
    in.dchi_00 = -0.25;
    in.dchi_01 = -0.10;
    in.dchi_10 = -0.08;
    const double with = interference_error(in, 45.45);
    in.alpha = 1e12;
    const double only_chi = interference_error(in, 45.45);
    EXPECT_GT(only_chi, with);
    in.alpha = -kC1 / (kC2 * detail::stark_bracket(in));
    EXPECT_NEAR(interference_error(in, 45.45), 0.0, 1e-20);
}

TEST(pulse, seed_amplitude_area) {
    const double tau = 45.45, n = 1.3;
    double area = 0;
    const int steps = 20000;
    PulseSpec p;
    p.tau = tau;
    p.amplitude = seed_amplitude(n, tau);
    for (int i = 0; i < steps; ++i) {
        const double t = -tau + (i + 0.5) * 2 * tau / steps;
        area += envelope(p, t) * 2 * tau / steps;
    }
    EXPECT_NEAR(area * n, std::erf(2.0), 1e-6);
}

TEST(pulse, validate) {
    PulseSpec p;
    p.tau = -1;
    EXPECT_THROW(p.validate(), ConfigError);
}
