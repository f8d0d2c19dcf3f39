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
#include <string>
#include <vector>

#include "fluxcz/composite.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"
#include "fluxcz/propagator.hpp"
#include "fluxcz/pulse.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

/// Loss rates and temperature. Rates are in 1/ns: kappa_c = omega_c / Q with omega_c in GHz.
struct DissipationSet {
    std::string label = "A";
    double q_factor = 5e6;
    double t1_fluxon_ms = 1.0;
    double t1_plasmon_us = 30.0;
    double temperature_mk = 30.0;

    void validate() const {
        require(q_factor > 0, "dissipation: q_factor must be positive");
        require(t1_fluxon_ms > 0, "dissipation: t1_fluxon_ms must be positive");
        require(t1_plasmon_us > 0, "dissipation: t1_plasmon_us must be positive");
        require(temperature_mk >= 0, "dissipation: temperature_mk must be >= 0");
    }
    double kappa_coupler(double omega_c) const { return omega_c / q_factor; }
    double kappa_fluxon() const { return 1.0 / (t1_fluxon_ms * 1e6); }
    double kappa_plasmon() const { return 1.0 / (t1_plasmon_us * 1e3); }
};

/// Rows A-F: optimistic rates (A-C) and conservative rates (D-F) at 30, 50, 100 mK.
inline DissipationSet dissipation_preset(const std::string &label) {
    static const char *names[] = {"A", "B", "C", "D", "E", "F"};
    static const double temps[] = {30, 50, 100};
    for (int i = 0; i < 6; ++i) {
        if (label == names[i]) {
            DissipationSet s;
            s.label = label;
            s.temperature_mk = temps[i % 3];
            if (i >= 3) {
                s.q_factor = 1e6;
                s.t1_fluxon_ms = 0.2;
                s.t1_plasmon_us = 10.0;
            }
            return s;
        }
    }
    throw ConfigError("dissipation: unknown set '" + label + "' (expected A-F)");
}

/// Bose factor 1/(exp(h omega / k_B T) - 1) for omega in GHz and T in mK.
inline double thermal_occupation(double omega, double temperature_mk) {
    require(temperature_mk >= 0, "thermal_occupation: temperature must be >= 0");
    require(omega > 0, "thermal_occupation: omega must be positive");
    if (temperature_mk == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(omega / (kKbOverH * temperature_mk * 1e-3));
}

enum class Channel { Fluxon, Plasmon, Coupler };
inline constexpr int kChannels = 3;

inline const char *channel_name(Channel c) {
    switch (c) {
        case Channel::Fluxon: return "fluxon";
        case Channel::Plasmon: return "plasmon";
        case Channel::Coupler: return "coupler";
    }
    return "";
}

/// sqrt(rate) times a bare jump operator, in the truncated dressed basis.
struct JumpOperator {
    std::string name;
    Channel channel = Channel::Fluxon;
    double rate = 0;  // 1/ns
    RMat op;
};

/// Coupler decay, fluxon decay and heating, plasmon decay; zero-rate operators are omitted.
inline std::vector<JumpOperator> build_jump_operators(const DressedSpectrum &s, const DissipationSet &set) {
    set.validate();
    require_labels(s, gate_labels());
    std::vector<JumpOperator> out;
    auto add = [&](const std::string &name, Channel ch, double rate, Element e, const RMat &bare) {
        if (rate <= 0) {
            return;
        }
        JumpOperator j;
        j.name = name;
        j.channel = ch;
        j.rate = rate;
        j.op = std::sqrt(rate) * dressed_operator(s, embed(s, e, bare));
        out.push_back(std::move(j));
    };
    auto proj = [](int n, int k, int l) {
        RMat m = RMat::Zero(n, n);
        m(k, l) = 1.0;
        return m;
    };
    add("coupler", Channel::Coupler, set.kappa_coupler(s.bare_omega_c), Element::Coupler, detail::ladder(s.dims[1]));
    const Element els[2] = {Element::A, Element::B};
    const ElementSpectrum *sp[2] = {&s.element_a, &s.element_b};
    const char *tag[2] = {"A", "B"};
    for (int q = 0; q < 2; ++q) {
        const int n = s.dims[q == 0 ? 0 : 2];
        const double nth = thermal_occupation(sp[q]->energies(1) - sp[q]->energies(0), set.temperature_mk);
        add(std::string("fluxon_down_") + tag[q], Channel::Fluxon, set.kappa_fluxon() * (nth + 1.0), els[q], proj(n, 0, 1));
        add(std::string("fluxon_up_") + tag[q], Channel::Fluxon, set.kappa_fluxon() * nth, els[q], proj(n, 1, 0));
        add(std::string("plasmon_") + tag[q], Channel::Plasmon, set.kappa_plasmon(), els[q], proj(n, 1, 2));
    }
    return out;
}

/// Lambda(|i><j|) restricted to the computational block, i,j in {00, 01, 10, 11}; entry 4 i + j.
using ProcessBlocks = std::array<CMat, 16>;

/// State-averaged fidelity of a process restricted to the computational subspace against CZ
/// followed by virtual Z rotations. The output |1,0,1> amplitude is multiplied by exp(i eta_phase)
/// (the qubit-frame correction). Reduces to [Tr(M M^dag) + |Tr M|^2]/20 for a unitary block.
inline double process_fidelity(const ProcessBlocks &x, double theta_a, double theta_b, double eta_phase) {
    const std::array<double, 4> th = {0.0, theta_b, theta_a, theta_a + theta_b};
    std::array<cplx, 4> w;
    for (int k = 0; k < 4; ++k) {
        w[k] = kCzDiag[k] * std::polar(1.0, th[k] - (k == 3 ? eta_phase : 0.0));
    }
    cplx coh = 0;
    double pop = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            coh += std::conj(w[i]) * x[4 * i + j](i, j) * w[j];
        }
        pop += x[5 * i].trace().real();
    }
    return (coh.real() + pop) / 20.0;
}

struct OpenGateResult {
    double infidelity = 0;  // total
    double coherent = 0;
    double incoherent = 0;
    double leakage = 0;
    std::array<double, kChannels> budget{};  // indexed by Channel
    double trace_error = 0;  // master-equation runs only; the first-order map is trace preserving by construction
    std::array<double, 2> virtual_z{};
    ProcessBlocks blocks;
};

namespace detail {

struct ChannelTerms {
    std::vector<RMat> ops;
    RMat g;  // sum of L^T L
};

inline std::array<ChannelTerms, kChannels> group_channels(const std::vector<JumpOperator> &jumps, int d) {
    std::array<ChannelTerms, kChannels> out;
    for (auto &c : out) {
        c.g = RMat::Zero(d, d);
    }
    for (const auto &j : jumps) {
        if (j.op.rows() != d) {
            throw ConfigError("lindblad: jump operator dimension does not match the drive system");
        }
        auto &c = out[static_cast<int>(j.channel)];
        c.ops.push_back(j.op);
        c.g += j.op.transpose() * j.op;
    }
    return out;
}

/// Rotates lab-frame blocks to the dressed rotating frame: X_kl *= exp(i 2 pi (E_k - E_l) t_g).
inline void to_rotating(const DriveSystem &sys, double tg, ProcessBlocks &x) {
    for (auto &b : x) {
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) {
                b(k, l) *= std::polar(1.0, kTwoPi * (sys.energies(sys.comp[k]) - sys.energies(sys.comp[l])) * tg);
            }
        }
    }
}

}  // namespace detail

/// Coherent process and first-order dissipative corrections, one per channel, in the rotating frame.
struct DysonBlocks {
    ProcessBlocks coherent;
    std::array<ProcessBlocks, kChannels> first_order;
};

/// First-order Dyson expansion in the dissipator:
/// delta = int_0^tg U(tg,s) D[U(s) rho U(s)^dag] U(tg,s)^dag ds, evaluated on the integrator grid
/// with backward states U(s) U(tg)^dag |k> propagated forward alongside U(s)|i>.
inline DysonBlocks dyson_blocks(const DriveSystem &sys, const std::vector<JumpOperator> &jumps, const PulseSpec &pulse,
                                double omega_d, const IntegratorSpec &integ = {}) {
    pulse.validate();
    const int d = sys.dim();
    auto drive = [&](double t) { return drag_drive(pulse, t, omega_d); };
    const double wmax = max_frequency(sys, omega_d);
    const double t0 = pulse.t_start(), t1 = pulse.t_end(), tg = pulse.t_gate();

    CMat u = CMat::Identity(d, d);
    integrate(sys, drive, t0, t1, u, wmax, integ);

    CMat start = CMat::Zero(d, 8);
    for (int k = 0; k < 4; ++k) {
        start(sys.comp[k], k) = 1.0;
        start.col(4 + k) = u.row(sys.comp[k]).adjoint();
    }
    const auto channels = detail::group_channels(jumps, d);

    using Acc = std::array<cplx, 256>;  // index ((i*4 + j)*4 + k)*4 + l
    std::array<Acc, kChannels> acc{}, prev{}, cur{};
    double t_prev = t0;
    bool first = true;
    CMat lpsi(d, 4), gpsi(d, 4);
    auto observer = [&](double t, const CMat &psi) {
        const auto p = psi.leftCols(4);
        const auto chi = psi.rightCols(4);
        const CMat o = chi.adjoint() * p;  // o(k, i) = <chi_k|psi_i>
        for (int c = 0; c < kChannels; ++c) {
            Acc &f = cur[c];
            f.fill(0.0);
            if (channels[c].ops.empty()) {
                continue;
            }
            std::vector<CMat> a;
            for (const auto &op : channels[c].ops) {
                lpsi.noalias() = op.cast<cplx>() * p;
                a.push_back(chi.adjoint() * lpsi);
            }
            gpsi.noalias() = channels[c].g.cast<cplx>() * p;
            const CMat b = chi.adjoint() * gpsi;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    for (int k = 0; k < 4; ++k) {
                        for (int l = 0; l < 4; ++l) {
                            cplx v = -0.5 * (b(k, i) * std::conj(o(l, j)) + o(k, i) * std::conj(b(l, j)));
                            for (const auto &al : a) {
                                v += al(k, i) * std::conj(al(l, j));
                            }
                            f[((i * 4 + j) * 4 + k) * 4 + l] = v;
                        }
                    }
                }
            }
        }
        if (!first) {
            const double w = 0.5 * (t - t_prev);
            for (int c = 0; c < kChannels; ++c) {
                for (int n = 0; n < 256; ++n) {
                    acc[c][n] += w * (prev[c][n] + cur[c][n]);
                }
            }
        }
        first = false;
        t_prev = t;
        prev = cur;
    };
    CMat psi = start;
    integrate_observed(sys, drive, t0, t1, psi, wmax, integ, observer);

    DysonBlocks out;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CMat b(4, 4);
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 4; ++l) {
                    b(k, l) = u(sys.comp[k], sys.comp[i]) * std::conj(u(sys.comp[l], sys.comp[j]));
                }
            }
            out.coherent[4 * i + j] = b;
            for (int c = 0; c < kChannels; ++c) {
                CMat db(4, 4);
                for (int k = 0; k < 4; ++k) {
                    for (int l = 0; l < 4; ++l) {
                        db(k, l) = acc[c][((i * 4 + j) * 4 + k) * 4 + l];
                    }
                }
                out.first_order[c][4 * i + j] = db;
            }
        }
    }
    detail::to_rotating(sys, tg, out.coherent);
    for (auto &f : out.first_order) {
        detail::to_rotating(sys, tg, f);
    }
    return out;
}

/// Exact RK4 master-equation evolution of density matrices over the gate window, integrated in the
/// interaction frame of the dressed energies (same step rule as the unitary integrator).
/// Returns the final states in the rotating frame.
inline std::vector<CMat> master_equation(const DriveSystem &sys, const std::vector<JumpOperator> &jumps,
                                         const PulseSpec &pulse, double omega_d, std::vector<CMat> rho,
                                         const IntegratorSpec &integ = {}) {
    pulse.validate();
    const int d = sys.dim();
    const double wmax = max_frequency(sys, omega_d);
    const double h_max = integ.step > 0 ? integ.step : 1.0 / (integ.steps_per_period * wmax);
    const double t0 = pulse.t_start(), tg = pulse.t_gate();
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(tg / h_max - 1e-9)));
    const double h = tg / static_cast<double>(n_steps);

    RMat g = RMat::Zero(d, d);
    std::vector<CMat> ls;
    for (const auto &j : jumps) {
        ls.push_back(j.op.cast<cplx>());
        g += j.op.transpose() * j.op;
    }
    const CMat gc = g.cast<cplx>();
    const CMat kc = sys.k.cast<cplx>();
    // P_ab(t) = exp(i 2 pi (E_a - E_b)(t - t0)); rho_I = P o rho_S.
    CMat phase(d, d), rs(d, d), os(d, d);
    auto set_phase = [&](double t) {
        for (int b = 0; b < d; ++b) {
            for (int a = 0; a < d; ++a) {
                phase(a, b) = std::polar(1.0, kTwoPi * (sys.energies(a) - sys.energies(b)) * (t - t0));
            }
        }
    };
    // d rho_S/dt without the E term: -i 2 pi s [n_c, rho] + sum L rho L^dag - {G, rho}/2, with n_c = i K.
    auto rhs = [&](double t, const CMat &r, CMat &out) {
        const double amp = kTwoPi * drag_drive(pulse, t, omega_d);
        rs = r.cwiseProduct(phase.conjugate());
        os.noalias() = -0.5 * (gc * rs + rs * gc);
        if (amp != 0.0) {
            os.noalias() += amp * (kc * rs - rs * kc);
        }
        for (const auto &l : ls) {
            os.noalias() += l * rs * l.adjoint();
        }
        out = os.cwiseProduct(phase);
    };
    for (const auto &r : rho) {
        if (r.rows() != d || r.cols() != d) {
            throw ConfigError("master_equation: density matrix dimension mismatch");
        }
    }
    CMat ph0(d, d), phm(d, d), ph1(d, d);
    CMat k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    for (long n = 0; n < n_steps; ++n) {
        const double t = t0 + n * h;
        set_phase(t);
        ph0 = phase;
        set_phase(t + 0.5 * h);
        phm = phase;
        set_phase(t + h);
        ph1 = phase;
        for (auto &r : rho) {
            phase = ph0;
            rhs(t, r, k1);
            phase = phm;
            tmp = r + (0.5 * h) * k1;
            rhs(t + 0.5 * h, tmp, k2);
            tmp = r + (0.5 * h) * k2;
            rhs(t + 0.5 * h, tmp, k3);
            phase = ph1;
            tmp = r + h * k3;
            rhs(t + h, tmp, k4);
            r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return rho;
}

enum class OpenMethod {
    FirstOrder,     // Dyson expansion to first order in the rates
    MasterEquation  // RK4 on all 16 computational dyads
};

namespace detail {

inline ProcessBlocks sum_blocks(const ProcessBlocks &a, const ProcessBlocks &b, double scale = 1.0) {
    ProcessBlocks out;
    for (int n = 0; n < 16; ++n) {
        out[n] = a[n] + scale * b[n];
    }
    return out;
}

inline OpenGateResult finish(const DriveSystem &sys, const PulseSpec &pulse, const ProcessBlocks &coherent,
                             const ProcessBlocks &total, const std::array<double, 2> &vz) {
    const double eta_phase = -kTwoPi * sys.eta * pulse.t_gate();
    OpenGateResult r;
    r.virtual_z = vz;
    r.coherent = 1.0 - process_fidelity(coherent, vz[0], vz[1], eta_phase);
    r.infidelity = 1.0 - process_fidelity(total, vz[0], vz[1], eta_phase);
    r.incoherent = r.infidelity - r.coherent;
    double pop = 0;
    for (int i = 0; i < 4; ++i) {
        pop += total[5 * i].trace().real();
    }
    r.leakage = 1.0 - pop / 4.0;
    r.blocks = total;
    return r;
}

}  // namespace detail

/// Open-system gate error. Virtual-Z angles come from the unitary calibration of the same pulse.
inline OpenGateResult propagate_lindblad(const DriveSystem &sys, const std::vector<JumpOperator> &jumps,
                                         const PulseSpec &pulse, double omega_d, const IntegratorSpec &integ = {},
                                         OpenMethod method = OpenMethod::FirstOrder) {
    const GateResult unitary = gate_result(sys, evolve_computational(sys, pulse, omega_d, integ));
    if (method == OpenMethod::FirstOrder) {
        const DysonBlocks db = dyson_blocks(sys, jumps, pulse, omega_d, integ);
        ProcessBlocks total = db.coherent;
        for (const auto &f : db.first_order) {
            total = detail::sum_blocks(total, f);
        }
        OpenGateResult r = detail::finish(sys, pulse, db.coherent, total, unitary.virtual_z);
        const double eta_phase = -kTwoPi * sys.eta * pulse.t_gate();
        const double f0 = process_fidelity(db.coherent, unitary.virtual_z[0], unitary.virtual_z[1], eta_phase);
        for (int c = 0; c < kChannels; ++c) {
            r.budget[c] = f0 - process_fidelity(detail::sum_blocks(db.coherent, db.first_order[c]),
                                                unitary.virtual_z[0], unitary.virtual_z[1], eta_phase);
        }
        return r;
    }
    const int d = sys.dim();
    std::vector<CMat> rho;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CMat r = CMat::Zero(d, d);
            r(sys.comp[i], sys.comp[j]) = 1.0;
            rho.push_back(r);
        }
    }
    const std::vector<CMat> out = master_equation(sys, jumps, pulse, omega_d, rho, integ);
    const std::vector<CMat> pure = master_equation(sys, {}, pulse, omega_d, rho, integ);
    ProcessBlocks total, coherent;
    double trace_err = 0;
    for (int n = 0; n < 16; ++n) {
        total[n].resize(4, 4);
        coherent[n].resize(4, 4);
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) {
                total[n](k, l) = out[n](sys.comp[k], sys.comp[l]);
                coherent[n](k, l) = pure[n](sys.comp[k], sys.comp[l]);
            }
        }
        const cplx expect = (n % 5 == 0) ? 1.0 : 0.0;
        trace_err = std::max(trace_err, std::abs(out[n].trace() - expect));
    }
    if (trace_err > 1e-7) {
        throw NumericalError("propagate_lindblad: trace drift " + std::to_string(trace_err));
    }
    OpenGateResult r = detail::finish(sys, pulse, coherent, total, unitary.virtual_z);
    r.trace_error = trace_err;
    return r;
}

/// Runs each channel in isolation and reports its error contribution alongside the all-channel total.
/// With OpenMethod::FirstOrder the isolated runs share one propagation.
inline OpenGateResult error_budget(const DriveSystem &sys, const std::vector<JumpOperator> &jumps,
                                   const PulseSpec &pulse, double omega_d, const IntegratorSpec &integ = {},
                                   OpenMethod method = OpenMethod::FirstOrder) {
    OpenGateResult total = propagate_lindblad(sys, jumps, pulse, omega_d, integ, method);
    if (method == OpenMethod::FirstOrder) {
        return total;
    }
    for (int c = 0; c < kChannels; ++c) {
        std::vector<JumpOperator> only;
        for (const auto &j : jumps) {
            if (static_cast<int>(j.channel) == c) {
                only.push_back(j);
            }
        }
        total.budget[c] = only.empty() ? 0.0 : propagate_lindblad(sys, only, pulse, omega_d, integ, method).incoherent;
    }
    return total;
}

struct LossEstimates {
    double fluxon = 0;
    double coupler = 0;
    double plasmon = 0;
    double total() const { return fluxon + coupler + plasmon; }
};

/// Dressed matrix element |<1,0,1| n_e |1,1,1>|.
inline double drive_matrix_element(const DressedSpectrum &s, Element e) {
    const ElementSpectrum &es = e == Element::A ? s.element_a : (e == Element::B ? s.element_b : s.element_c);
    const RMat op = embed(s, e, detail::charge_k(es));
    const auto v101 = s.vectors.col(s.index({1, 0, 1}));
    const auto v111 = s.vectors.col(s.index({1, 1, 1}));
    return std::abs(v101.dot(op * v111));
}

/// Per-channel closed-form estimates with t_g = 2.2 tau.
inline LossEstimates loss_estimates(const DressedSpectrum &s, const DissipationSet &set, double tau) {
    set.validate();
    require(tau > 0, "loss_estimates: tau must be positive");
    LossEstimates e;
    const double tg = 2.2 * tau;
    const double na = thermal_occupation(s.element_a.energies(1) - s.element_a.energies(0), set.temperature_mk);
    const double nb = thermal_occupation(s.element_b.energies(1) - s.element_b.energies(0), set.temperature_mk);
    const double k01 = set.kappa_fluxon();
    e.fluxon = 0.8 * tg * (0.5 * k01 * (2 * na + 1) + 0.5 * k01 * (2 * nb + 1));
    e.coupler = tau * std::pow(drive_matrix_element(s, Element::Coupler), 2) * set.kappa_coupler(s.bare_omega_c) / 8.0;
    e.plasmon = (std::pow(drive_matrix_element(s, Element::A), 2) + std::pow(drive_matrix_element(s, Element::B), 2)) *
                set.kappa_plasmon() * tau / 8.0;
    return e;
}

}  // namespace fluxcz
