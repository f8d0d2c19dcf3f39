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

#include "fluxcz/circuit.hpp"
#include "fluxcz/composite.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"

namespace fluxcz {

/// Element transition data consumed by the analytic estimators.
struct PerturbationInputs {
    double j_ac = 0, j_bc = 0, j_ab = 0;
    double n_c01 = 0, omega_c = 0;
    double n_a12 = 0, n_a03 = 0, w_a01 = 0, w_a12 = 0, w_a03 = 0, w_a23 = 0;
    double n_b12 = 0, n_b03 = 0, w_b01 = 0, w_b12 = 0, w_b03 = 0, w_b23 = 0;
};

inline PerturbationInputs perturbation_inputs(const CircuitSpec &spec) {
    spec.validate();
    auto a = diagonalize_fluxonium(spec.fluxonium_a, 6);
    auto b = diagonalize_fluxonium(spec.fluxonium_b, 6);
    auto c = resonator_spectrum(spec.resonator);
    PerturbationInputs p;
    p.j_ac = spec.j_ac;
    p.j_bc = spec.j_bc;
    p.j_ab = spec.j_ab;
    p.n_c01 = std::abs(charge_matrix_element(c, 0, 1));
    p.omega_c = spec.resonator.omega_c;
    p.n_a12 = std::abs(charge_matrix_element(a, 1, 2));
    p.n_a03 = std::abs(charge_matrix_element(a, 0, 3));
    p.w_a01 = transition(a, 0, 1);
    p.w_a12 = transition(a, 1, 2);
    p.w_a03 = transition(a, 0, 3);
    p.w_a23 = transition(a, 2, 3);
    p.n_b12 = std::abs(charge_matrix_element(b, 1, 2));
    p.n_b03 = std::abs(charge_matrix_element(b, 0, 3));
    p.w_b01 = transition(b, 0, 1);
    p.w_b12 = transition(b, 1, 2);
    p.w_b03 = transition(b, 0, 3);
    p.w_b23 = transition(b, 2, 3);
    return p;
}

/// Two-level plasmon / coupler exchange model.
struct PlasmonCouplerModel {
    double delta_a = 0, delta_b = 0;  // omega_12 - omega_c (GHz)
    double g_a = 0, g_b = 0;          // J_ic |n_i12 n_c01| (GHz)
    double j_ab_eff = 0;              // J_AB |n_A12 n_B12| (GHz), flip-flop between plasmons
};

inline PlasmonCouplerModel plasmon_coupler_model(const PerturbationInputs &p) {
    PlasmonCouplerModel m;
    m.delta_a = p.w_a12 - p.omega_c;
    m.delta_b = p.w_b12 - p.omega_c;
    m.g_a = p.j_ac * p.n_a12 * p.n_c01;
    m.g_b = p.j_bc * p.n_b12 * p.n_c01;
    m.j_ab_eff = p.j_ab * p.n_a12 * p.n_b12;
    return m;
}

struct ChiSet {
    double chi = 0;
    double chi_00 = 0;
    double chi_01 = 0;
    double chi_10 = 0;
};

namespace detail {

inline double checked_denominator(double d, const char *what) {
    if (std::abs(d) < 0.01) {
        throw ResonanceError(std::string("near-resonant denominator in ") + what + ": " + std::to_string(d) + " GHz");
    }
    return d;
}

}  // namespace detail

/// Second-order dispersive shifts through the 1-2 and 0-3 fluxonium transitions.
/// With `si_variant` the 0-3 denominators are Delta + omega_23 + omega_01 instead of omega_03 - omega_c.
inline ChiSet chi_second_order(const PerturbationInputs &p, bool si_variant = false) {
    const double da = detail::checked_denominator(p.w_a12 - p.omega_c, "Delta_A");
    const double db = detail::checked_denominator(p.w_b12 - p.omega_c, "Delta_B");
    const double d3a = detail::checked_denominator(si_variant ? da + p.w_a23 + p.w_a01 : p.w_a03 - p.omega_c, "omega_A03 - omega_c");
    const double d3b = detail::checked_denominator(si_variant ? db + p.w_b23 + p.w_b01 : p.w_b03 - p.omega_c, "omega_B03 - omega_c");
    const double nc2 = p.n_c01 * p.n_c01;
    const double pa = p.j_ac * p.j_ac * p.n_a12 * p.n_a12 * nc2 / da;
    const double pb = p.j_bc * p.j_bc * p.n_b12 * p.n_b12 * nc2 / db;
    const double qa = p.j_ac * p.j_ac * p.n_a03 * p.n_a03 * nc2 / d3a;
    const double qb = p.j_bc * p.j_bc * p.n_b03 * p.n_b03 * nc2 / d3b;
    ChiSet c;
    c.chi = -pa - pb;
    c.chi_10 = -pa - qb;
    c.chi_01 = -qa - pb;
    c.chi_00 = -qa - qb;
    return c;
}

/// 0-3 second-order corrections J_ic^2 |n_i03 n_c01|^2 / (omega_i03 - omega_c), positive in the usual regime.
struct Corrections03 {
    double a = 0;
    double b = 0;
};

inline Corrections03 corrections_03(const PerturbationInputs &p, bool si_variant = false) {
    const double nc2 = p.n_c01 * p.n_c01;
    const double da = p.w_a12 - p.omega_c, db = p.w_b12 - p.omega_c;
    const double d3a = detail::checked_denominator(si_variant ? da + p.w_a23 + p.w_a01 : p.w_a03 - p.omega_c, "omega_A03 - omega_c");
    const double d3b = detail::checked_denominator(si_variant ? db + p.w_b23 + p.w_b01 : p.w_b03 - p.omega_c, "omega_B03 - omega_c");
    Corrections03 k;
    k.a = p.j_ac * p.j_ac * p.n_a03 * p.n_a03 * nc2 / d3a;
    k.b = p.j_bc * p.j_bc * p.n_b03 * p.n_b03 * nc2 / d3b;
    return k;
}

/// Exchange-model shifts: chi from the three-state {|1,1,1>, |2,0,1>, |1,0,2>} block,
/// single-fluxonium square roots for chi_10 / chi_01, and 0-3 corrections.
/// For Delta_A = Delta_B and g_A = g_B the block gives chi = Delta/2 - sqrt(8 g^2 + Delta^2)/2.
inline ChiSet chi_jc_model(const PlasmonCouplerModel &m, const Corrections03 &k = {}) {
    ChiSet c;
    Eigen::Matrix3d h;
    h << 0, m.g_a, m.g_b, m.g_a, m.delta_a, 0, m.g_b, 0, m.delta_b;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(es.eigenvectors()(0, i)) > std::abs(es.eigenvectors()(0, best))) best = i;
    }
    c.chi = es.eigenvalues()(best);
    auto single = [](double d, double g) {
        // Root continuous with the coupler-like state.
        double r = std::sqrt(4.0 * g * g + d * d);
        return d >= 0 ? (d - r) / 2.0 : (d + r) / 2.0;
    };
    c.chi_10 = single(m.delta_a, m.g_a) - k.b;
    c.chi_01 = single(m.delta_b, m.g_b) - k.a;
    c.chi_00 = -k.a - k.b;
    return c;
}

/// alpha^(4) = 2 sum_i (g_i^2/Delta_i) sum_j (g_j^2/Delta_j^2), i.e. the 1/Delta^3 terms with g_i = J_i n_i12 n_c01.
inline double alpha_fourth_order(const PlasmonCouplerModel &m) {
    const double da = detail::checked_denominator(m.delta_a, "Delta_A");
    const double db = detail::checked_denominator(m.delta_b, "Delta_B");
    const double s1 = m.g_a * m.g_a / da + m.g_b * m.g_b / db;
    const double s2 = m.g_a * m.g_a / (da * da) + m.g_b * m.g_b / (db * db);
    return 2.0 * s1 * s2;
}

/// alpha from exact diagonalisation of the two-plasmon Jaynes-Cummings truncation
/// in the one- and two-excitation sectors (energies relative to the coupler frame).
inline double jc_truncated_alpha(const PlasmonCouplerModel &m) {
    const double ga = m.g_a, gb = m.g_b, j = m.j_ab_eff, da = m.delta_a, db = m.delta_b;
    Eigen::Matrix3d h1;
    h1 << 0, ga, gb, ga, da, j, gb, j, db;  // |0,1,0>, |1,0,0>, |0,0,1>
    Eigen::Matrix4d h2;
    const double s2 = std::sqrt(2.0);
    // |0,2,0>, |1,1,0>, |0,1,1>, |1,0,1>
    h2 << 0, s2 * ga, s2 * gb, 0,
          s2 * ga, da, j, gb,
          s2 * gb, j, db, ga,
          0, gb, ga, da + db;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> e1(h1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> e2(h2);
    Eigen::Index i1, i2;
    e1.eigenvectors().row(0).cwiseAbs().maxCoeff(&i1);
    e2.eigenvectors().row(0).cwiseAbs().maxCoeff(&i2);
    return e2.eigenvalues()(i2) - 2.0 * e1.eigenvalues()(i1);
}

struct EtaEstimates {
    double eta2 = 0;          // second order, four-term form
    double eta2_summary = 0;  // second order, ordered-pair summary sum
    double eta3 = 0;          // third order, pathways of all four computational states
    double eta3_101 = 0;      // third order, |1,0,1> pathways only (J_AB times the cancellation right-hand side)
    double eta3_compact = 0;  // compact expression, reported only
    double total() const { return eta2 + eta3; }
};

namespace detail {

/// Ordered-pair sum over i != j of |n_i12 n_j12|^2/(w_i12+w_j12) - |n_i12 n_j03|^2/(w_i12+w_j03) + |n_i03 n_j03|^2/(w_i03+w_j03).
inline double zz_pair_sum(const PerturbationInputs &p) {
    auto term = [](double ni12, double ni03, double wi12, double wi03, double nj12, double nj03, double wj12, double wj03) {
        return std::pow(ni12 * nj12, 2) / (wi12 + wj12) - std::pow(ni12 * nj03, 2) / (wi12 + wj03) +
               std::pow(ni03 * nj03, 2) / (wi03 + wj03);
    };
    return term(p.n_a12, p.n_a03, p.w_a12, p.w_a03, p.n_b12, p.n_b03, p.w_b12, p.w_b03) +
           term(p.n_b12, p.n_b03, p.w_b12, p.w_b03, p.n_a12, p.n_a03, p.w_a12, p.w_a03);
}

/// Four-term sum: T(12,12) - T(03,12) - T(12,03) + T(03,03).
inline double zz_four_term(const PerturbationInputs &p) {
    return std::pow(p.n_a12 * p.n_b12, 2) / (p.w_a12 + p.w_b12) - std::pow(p.n_a03 * p.n_b12, 2) / (p.w_a03 + p.w_b12) -
           std::pow(p.n_a12 * p.n_b03, 2) / (p.w_a12 + p.w_b03) + std::pow(p.n_a03 * p.n_b03, 2) / (p.w_a03 + p.w_b03);
}

/// Third-order |1,0,1> pathway sum divided by J_AB.
inline double zz_third_order_rhs(const PerturbationInputs &p) {
    const double ga = p.w_a12 + p.omega_c, gb = p.w_b12 + p.omega_c, gab = p.w_a12 + p.w_b12;
    return 2.0 * p.j_ac * p.j_bc * std::pow(p.n_c01, 2) * std::pow(p.n_a12, 2) * std::pow(p.n_b12, 2) *
           ((1.0 / gab) * (1.0 / ga + 1.0 / gb) + 1.0 / (ga * gb));
}

/// Third-order shift of |a,0,b> through the three cycles that excite one coupler photon
/// together with the dominant fluxonium transitions (1-2 from |1>, 0-3 from |0>).
inline double third_order_shift(const PerturbationInputs &p, int a, int b) {
    const double na = a == 1 ? p.n_a12 : p.n_a03, wa = a == 1 ? p.w_a12 : p.w_a03;
    const double nb = b == 1 ? p.n_b12 : p.n_b03, wb = b == 1 ? p.w_b12 : p.w_b03;
    const double gac = wa + p.omega_c, gbc = wb + p.omega_c, gab = wa + wb;
    return 2.0 * p.j_ac * p.j_bc * p.j_ab * std::pow(p.n_c01 * na * nb, 2) *
           (1.0 / (gac * gab) + 1.0 / (gbc * gab) + 1.0 / (gac * gbc));
}

}  // namespace detail

inline EtaEstimates eta_perturbative(const PerturbationInputs &p) {
    EtaEstimates e;
    e.eta2 = -p.j_ab * p.j_ab * detail::zz_four_term(p);
    e.eta2_summary = -p.j_ab * p.j_ab * detail::zz_pair_sum(p);
    e.eta3_101 = p.j_ab * detail::zz_third_order_rhs(p);
    e.eta3 = detail::third_order_shift(p, 1, 1) - detail::third_order_shift(p, 1, 0) -
             detail::third_order_shift(p, 0, 1) + detail::third_order_shift(p, 0, 0);
    e.eta3_compact = 2.0 * p.j_ac * p.j_bc * p.n_c01 * p.n_c01 * (1.0 / (p.w_a12 + p.omega_c) + 1.0 / (p.w_b12 + p.omega_c));
    return e;
}

struct ZzSolution {
    double j_ab = 0;
    bool positive = true;
    std::string warning;
};

/// J_AB from the linearised condition J_AB * S = R, with S the ordered-pair sum (or the
/// four-term sum when `four_term` is set) and R the third-order pathway sum.
inline ZzSolution solve_zz_cancellation(const PerturbationInputs &p, bool four_term = false) {
    ZzSolution z;
    if (p.j_ac == 0.0 || p.j_bc == 0.0) {
        return z;
    }
    const double s = four_term ? detail::zz_four_term(p) : detail::zz_pair_sum(p);
    if (s == 0.0) {
        throw ResonanceError("solve_zz_cancellation: vanishing second-order sum");
    }
    z.j_ab = detail::zz_third_order_rhs(p) / s;
    if (z.j_ab <= 0) {
        z.positive = false;
        z.warning = "no positive J_AB cancels the ZZ interaction";
    }
    return z;
}

/// Analytic and exact quantities side by side.
struct ComparisonRow {
    std::string quantity;
    double analytic;
    double exact;
    double rel_error() const { return exact == 0 ? 0 : (analytic - exact) / std::abs(exact); }
};

}  // namespace fluxcz
