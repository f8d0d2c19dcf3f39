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
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "fluxcz/composite.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"
#include "fluxcz/pulse.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

/// Truncated dressed system with the coupler drive operator n_c = i K.
struct DriveSystem {
    RVec energies;
    RMat k;
    std::array<int, 4> comp{};  // dressed indices of |0,0,0>, |0,0,1>, |1,0,0>, |1,0,1>
    int idx_111 = -1;
    double omega_res = 0;  // E(1,1,1) - E(1,0,1)
    double eta = 0;
    double n_drive = 0;    // |<1,1,1| n_c |1,0,1>|
    std::vector<int> parity;  // per dressed state, 0 when undefined

    int dim() const { return static_cast<int>(energies.size()); }
};

inline DriveSystem make_drive_system(const DressedSpectrum &s) {
    require_labels(s, gate_labels());
    DriveSystem sys;
    sys.energies = s.energies.array() - s.energies(0);
    sys.k = dressed_charge_k(s, Element::Coupler);
    sys.k = 0.5 * (sys.k - sys.k.transpose()).eval();
    sys.comp = {s.index({0, 0, 0}), s.index({0, 0, 1}), s.index({1, 0, 0}), s.index({1, 0, 1})};
    sys.idx_111 = s.index({1, 1, 1});
    sys.omega_res = sys.energies(sys.idx_111) - sys.energies(sys.comp[3]);
    sys.eta = sys.energies(sys.comp[3]) - sys.energies(sys.comp[2]) - sys.energies(sys.comp[1]) + sys.energies(sys.comp[0]);
    sys.n_drive = std::abs(sys.k(sys.idx_111, sys.comp[3]));
    const int d = sys.dim();
    sys.parity.assign(d, 0);
    bool all_defined = true;
    for (int i = 0; i < d && all_defined; ++i) {
        double p = 0;
        for (int r = 0; r < s.vectors.rows(); ++r) {
            Label l = s.product_label(r);
            int pa = s.element_a.parity.empty() ? 0 : s.element_a.parity[l.a];
            int pb = s.element_b.parity.empty() ? 0 : s.element_b.parity[l.b];
            p += pa * pb * (l.c % 2 == 0 ? 1 : -1) * s.vectors(r, i) * s.vectors(r, i);
        }
        if (std::abs(std::abs(p) - 1.0) < 1e-8) {
            sys.parity[i] = p > 0 ? 1 : -1;
        } else {
            all_defined = false;
        }
    }
    if (!all_defined) {
        std::fill(sys.parity.begin(), sys.parity.end(), 0);
    }
    return sys;
}

enum class Frame { Interaction, Lab };

struct IntegratorSpec {
    double steps_per_period = 40.0;  // steps per period of the fastest frequency
    double step = 0.0;               // explicit step (ns); 0 selects the automatic step
    Frame frame = Frame::Interaction;
    double norm_tol = 1e-7;
};

namespace detail {

/// y = K x for real x, using the parity block structure when available.
class KernelK {
   public:
    explicit KernelK(const DriveSystem &sys) : d_(sys.dim()) {
        bool use = std::none_of(sys.parity.begin(), sys.parity.end(), [](int p) { return p == 0; });
        if (use) {
            for (int i = 0; i < d_; ++i) {
                (sys.parity[i] > 0 ? even_ : odd_).push_back(i);
            }
            for (int i : even_) {
                for (int j : even_) {
                    if (std::abs(sys.k(i, j)) > 1e-12) use = false;
                }
            }
            for (int i : odd_) {
                for (int j : odd_) {
                    if (std::abs(sys.k(i, j)) > 1e-12) use = false;
                }
            }
        }
        if (use && !even_.empty() && !odd_.empty()) {
            blocked_ = true;
            perm_.resize(d_);
            int p = 0;
            for (int i : even_) perm_[p++] = i;
            for (int i : odd_) perm_[p++] = i;
            ne_ = static_cast<int>(even_.size());
            b_.resize(ne_, d_ - ne_);
            for (int i = 0; i < ne_; ++i) {
                for (int j = 0; j < d_ - ne_; ++j) {
                    b_(i, j) = sys.k(even_[i], odd_[j]);
                }
            }
            bt_ = b_.transpose();
        } else {
            k_ = sys.k;
        }
    }

    bool blocked() const { return blocked_; }
    const std::vector<int> &perm() const { return perm_; }

    /// x and y in the internal ordering (permuted when blocked).
    void apply(const RMat &x, RMat &y) const {
        if (blocked_) {
            const int no = d_ - ne_;
            y.topRows(ne_).noalias() = b_ * x.bottomRows(no);
            y.bottomRows(no).noalias() = -bt_ * x.topRows(ne_);
        } else {
            y.noalias() = k_ * x;
        }
    }

   private:
    int d_;
    bool blocked_ = false;
    int ne_ = 0;
    std::vector<int> even_, odd_, perm_;
    RMat b_, bt_, k_;
};

}  // namespace detail

struct NoObserver {
    void operator()(double, const CMat &) const {}
};

/// Fixed-step RK4 integration of i d(psi)/dt = 2 pi (H0 + s(t) n_c) psi from t_a to t_b.
/// `psi` holds Schroedinger-picture columns at t_a and is overwritten with the state at t_b.
/// `obs(t, psi_t)` sees the Schroedinger-picture state at t_a and after every step.
template <class DriveFn, class Observer>
void integrate_observed(const DriveSystem &sys, DriveFn &&drive, double t_a, double t_b, CMat &psi,
                        double omega_max, const IntegratorSpec &integ, Observer &&obs) {
    constexpr bool observed = !std::is_same_v<std::decay_t<Observer>, NoObserver>;
    const int d = sys.dim();
    const int m = static_cast<int>(psi.cols());
    if (psi.rows() != d) {
        throw ConfigError("integrate: state dimension mismatch");
    }
    const double span = t_b - t_a;
    if (span == 0.0) {
        return;
    }
    double h_max = integ.step > 0 ? integ.step : 1.0 / (integ.steps_per_period * omega_max);
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / h_max - 1e-9)));
    const double h = span / static_cast<double>(n_steps);

    detail::KernelK kern(sys);
    std::vector<int> perm(d);
    if (kern.blocked()) {
        perm = kern.perm();
    } else {
        for (int i = 0; i < d; ++i) perm[i] = i;
    }
    Eigen::ArrayXd e(d);
    for (int i = 0; i < d; ++i) e(i) = sys.energies(perm[i]);

    // x = [Re | Im], d x 2m, internal ordering.
    RMat x(d, 2 * m);
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c < m; ++c) {
            x(i, c) = psi(perm[i], c).real();
            x(i, m + c) = psi(perm[i], c).imag();
        }
    }
    RMat y(d, 2 * m), z(d, 2 * m), k1(d, 2 * m), k2(d, 2 * m), k3(d, 2 * m), k4(d, 2 * m), tmp(d, 2 * m);
    const bool lab = integ.frame == Frame::Lab;

    Eigen::ArrayXd c0(d), s0(d), cm(d), sm(d), c1(d), s1(d), cr(d), sr(d);
    cr = (kTwoPi * e * (0.5 * h)).cos();
    sr = (kTwoPi * e * (0.5 * h)).sin();
    auto exact = [&](double tp, Eigen::ArrayXd &c, Eigen::ArrayXd &s) {
        c = (kTwoPi * e * tp).cos();
        s = (kTwoPi * e * tp).sin();
    };
    auto rotate = [&](const Eigen::ArrayXd &ca, const Eigen::ArrayXd &sa, Eigen::ArrayXd &cb, Eigen::ArrayXd &sb) {
        cb = ca * cr - sa * sr;
        sb = sa * cr + ca * sr;
    };

    // Interaction frame: f = 2 pi s(t) D K D^* x with D = exp(i 2 pi E (t - t_a)).
    auto rhs_int = [&](double t, const Eigen::ArrayXd &c, const Eigen::ArrayXd &s, const RMat &in, RMat &out) {
        const double amp = kTwoPi * drive(t);
        if (amp == 0.0) {
            out.setZero();
            return;
        }
        auto ire = in.leftCols(m).array();
        auto iim = in.rightCols(m).array();
        y.leftCols(m).array() = ire.colwise() * c + iim.colwise() * s;
        y.rightCols(m).array() = iim.colwise() * c - ire.colwise() * s;
        kern.apply(y, z);
        auto zre = z.leftCols(m).array();
        auto zim = z.rightCols(m).array();
        out.leftCols(m).array() = amp * (zre.colwise() * c - zim.colwise() * s);
        out.rightCols(m).array() = amp * (zim.colwise() * c + zre.colwise() * s);
    };
    // Lab frame: f = -i 2 pi E x + 2 pi s(t) K x.
    auto rhs_lab = [&](double t, const RMat &in, RMat &out) {
        const double amp = kTwoPi * drive(t);
        kern.apply(in, z);
        out.leftCols(m).array() = amp * z.leftCols(m).array() + (in.rightCols(m).array().colwise() * (kTwoPi * e));
        out.rightCols(m).array() = amp * z.rightCols(m).array() - (in.leftCols(m).array().colwise() * (kTwoPi * e));
    };

    CMat snap;
    auto emit = [&](double t, const Eigen::ArrayXd *c, const Eigen::ArrayXd *s) {
        snap.resize(d, m);
        for (int i = 0; i < d; ++i) {
            const double ci = c ? (*c)(i) : 1.0, si = c ? (*s)(i) : 0.0;
            for (int col = 0; col < m; ++col) {
                const double re = x(i, col), im = x(i, m + col);
                snap(perm[i], col) = cplx(re * ci + im * si, im * ci - re * si);
            }
        }
        obs(t, static_cast<const CMat &>(snap));
    };

    exact(0.0, c0, s0);
    if constexpr (observed) {
        emit(t_a, nullptr, nullptr);
    }
    for (long n = 0; n < n_steps; ++n) {
        const double t = t_a + n * h;
        if (lab) {
            rhs_lab(t, x, k1);
            tmp = x + (0.5 * h) * k1;
            rhs_lab(t + 0.5 * h, tmp, k2);
            tmp = x + (0.5 * h) * k2;
            rhs_lab(t + 0.5 * h, tmp, k3);
            tmp = x + h * k3;
            rhs_lab(t + h, tmp, k4);
        } else {
            if (n % 64 == 0) {
                exact(n * h, c0, s0);
            }
            rotate(c0, s0, cm, sm);
            rotate(cm, sm, c1, s1);
            rhs_int(t, c0, s0, x, k1);
            tmp = x + (0.5 * h) * k1;
            rhs_int(t + 0.5 * h, cm, sm, tmp, k2);
            tmp = x + (0.5 * h) * k2;
            rhs_int(t + 0.5 * h, cm, sm, tmp, k3);
            tmp = x + h * k3;
            rhs_int(t + h, c1, s1, tmp, k4);
            c0 = c1;
            s0 = s1;
        }
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if constexpr (observed) {
            if (lab) {
                emit(t + h, nullptr, nullptr);
            } else {
                emit(t + h, &c0, &s0);
            }
        }
    }
    if (!lab) {
        // Back to the Schroedinger picture: psi = D^* x at t_b.
        exact(span, c0, s0);
        RMat xr = x.leftCols(m), xi = x.rightCols(m);
        x.leftCols(m).array() = xr.array().colwise() * c0 + xi.array().colwise() * s0;
        x.rightCols(m).array() = xi.array().colwise() * c0 - xr.array().colwise() * s0;
    }
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c < m; ++c) {
            psi(perm[i], c) = cplx(x(i, c), x(i, m + c));
        }
    }
}

template <class DriveFn>
void integrate(const DriveSystem &sys, DriveFn &&drive, double t_a, double t_b, CMat &psi, double omega_max,
               const IntegratorSpec &integ = {}) {
    integrate_observed(sys, drive, t_a, t_b, psi, omega_max, integ, NoObserver{});
}

/// Largest frequency the integrator must resolve.
inline double max_frequency(const DriveSystem &sys, double omega_d) {
    return (sys.energies.maxCoeff() - sys.energies.minCoeff()) + std::abs(omega_d);
}

/// Drive frequency for a pulse: resonance plus detuning.
inline double drive_frequency(const DriveSystem &sys, const PulseSpec &p) {
    return sys.omega_res + p.detuning;
}

/// Propagates `initial` across the gate window. Returns the state in the dressed rotating frame,
/// i.e. with free evolution exp(-i 2 pi E t_g) removed.
inline CMat propagate(const DriveSystem &sys, const PulseSpec &pulse, double omega_d, const CMat &initial,
                      const IntegratorSpec &integ = {}) {
    pulse.validate();
    CMat psi = initial;
    auto drive = [&](double t) { return drag_drive(pulse, t, omega_d); };
    integrate(sys, drive, pulse.t_start(), pulse.t_end(), psi, max_frequency(sys, omega_d), integ);
    const double tg = pulse.t_gate();
    for (int i = 0; i < sys.dim(); ++i) {
        psi.row(i) *= std::polar(1.0, kTwoPi * sys.energies(i) * tg);
    }
    for (int c = 0; c < psi.cols(); ++c) {
        double n0 = initial.col(c).norm();
        if (std::abs(psi.col(c).norm() - n0) > integ.norm_tol * std::max(1.0, n0)) {
            std::ostringstream msg;
            msg << "propagate: norm drift " << std::scientific << psi.col(c).norm() - n0 << " exceeds " << integ.norm_tol
                << "; reduce integrator.step or raise steps_per_period";
            throw NumericalError(msg.str());
        }
    }
    return psi;
}

struct EvolutionResult {
    CMat final_states;     // d x 4, rotating frame, columns |00>,|01>,|10>,|11>
    CMat block;            // 4 x 4 computational restriction
    std::array<double, 4> phases{};  // phi_00, phi_01, phi_10, phi_11
    std::array<double, 4> leakage{};
    RMat state_populations;  // d x 4
    double t_gate = 0;
};

inline CMat computational_initial(const DriveSystem &sys) {
    CMat init = CMat::Zero(sys.dim(), 4);
    for (int c = 0; c < 4; ++c) {
        init(sys.comp[c], c) = 1.0;
    }
    return init;
}

inline EvolutionResult evolve_computational(const DriveSystem &sys, const PulseSpec &pulse, double omega_d,
                                            const IntegratorSpec &integ = {}) {
    EvolutionResult r;
    r.t_gate = pulse.t_gate();
    r.final_states = propagate(sys, pulse, omega_d, computational_initial(sys), integ);
    r.block.resize(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            r.block(i, j) = r.final_states(sys.comp[i], j);
        }
    }
    r.state_populations = r.final_states.cwiseAbs2();
    for (int j = 0; j < 4; ++j) {
        double in = 0;
        for (int i = 0; i < 4; ++i) {
            in += std::norm(r.block(i, j));
        }
        r.leakage[j] = std::clamp(1.0 - in, 0.0, 1.0);
    }
    // Superposition (|000> + |i0j>)/sqrt(2): phase of the off-diagonal coherence relative to |000>.
    const cplx u00 = r.block(0, 0);
    if (std::abs(u00) < 1e-6) {
        throw NumericalError("measure_phases: |0,0,0> lost coherence");
    }
    r.phases[0] = -std::arg(u00);
    for (int k = 1; k < 4; ++k) {
        CVec psi = (r.final_states.col(0) + r.final_states.col(k)) / std::sqrt(2.0);
        cplx rho = psi(sys.comp[k]) * std::conj(psi(sys.comp[0]));
        if (std::abs(rho) < 1e-6) {
            throw NumericalError("measure_phases: vanishing coherence for state " + std::to_string(k));
        }
        if (k == 3) {
            rho = -rho;
        }
        r.phases[k] = std::remainder(r.phases[0] - std::arg(rho), kTwoPi);
    }
    return r;
}

/// Conditional phases phi_ij with free evolution at the dressed energies removed;
/// phi_11 has the CZ sign removed.
inline std::array<double, 4> measure_phases(const DriveSystem &sys, const PulseSpec &pulse, double omega_d,
                                            const IntegratorSpec &integ = {}) {
    return evolve_computational(sys, pulse, omega_d, integ).phases;
}

struct GateResult {
    double fidelity = 0;
    double infidelity = 1;
    double leakage = 0;
    std::array<double, 4> leakage_per_state{};
    std::array<double, 2> virtual_z{};  // theta_A, theta_B
    std::array<double, 4> phases{};
    double phi_rel = 0;
};

inline const std::array<double, 4> kCzDiag = {1, 1, 1, -1};

/// F = [Tr(M M^dag) + |Tr M|^2]/20 with M = CZ^dag U_z U and U_z = diag(1, e^{-i tB}, e^{-i tA}, e^{-i(tA+tB)}).
inline double average_gate_fidelity_at(const CMat &u, double theta_a, double theta_b) {
    const std::array<double, 4> th = {0.0, theta_b, theta_a, theta_a + theta_b};
    cplx tr = 0;
    for (int k = 0; k < 4; ++k) {
        tr += kCzDiag[k] * std::polar(1.0, -th[k]) * u(k, k);
    }
    return ((u * u.adjoint()).trace().real() + std::norm(tr)) / 20.0;
}

/// Maximises the fidelity over virtual-Z angles starting from the given seed.
inline GateResult average_gate_fidelity(const CMat &u, double seed_a, double seed_b) {
    std::array<cplx, 4> c;
    for (int k = 0; k < 4; ++k) {
        c[k] = kCzDiag[k] * u(k, k);
    }
    double ta = seed_a, tb = seed_b;
    // Coordinate ascent: Tr M = x + e^{-i theta} y for each angle in turn.
    for (int it = 0; it < 200; ++it) {
        cplx xa = c[0] + std::polar(1.0, -tb) * c[1];
        cplx ya = c[2] + std::polar(1.0, -tb) * c[3];
        double na = (std::abs(ya) > 0 && std::abs(xa) > 0) ? std::arg(ya) - std::arg(xa) : ta;
        cplx xb = c[0] + std::polar(1.0, -na) * c[2];
        cplx yb = c[1] + std::polar(1.0, -na) * c[3];
        double nb = (std::abs(yb) > 0 && std::abs(xb) > 0) ? std::arg(yb) - std::arg(xb) : tb;
        double change = std::abs(std::remainder(na - ta, kTwoPi)) + std::abs(std::remainder(nb - tb, kTwoPi));
        ta = na;
        tb = nb;
        if (change < 1e-15) {
            break;
        }
    }
    GateResult g;
    double f_seed = average_gate_fidelity_at(u, seed_a, seed_b);
    double f = average_gate_fidelity_at(u, ta, tb);
    if (f_seed > f) {
        f = f_seed;
        ta = seed_a;
        tb = seed_b;
    }
    g.fidelity = f;
    g.infidelity = 1.0 - f;
    g.virtual_z = {std::remainder(ta, kTwoPi), std::remainder(tb, kTwoPi)};
    return g;
}

/// Computational block in the frame of the dressed single-qubit frequencies.
/// This restores the static ZZ phase that the dressed rotating frame removes from |1,0,1>.
inline CMat qubit_frame_block(const DriveSystem &sys, const EvolutionResult &r) {
    CMat u = r.block;
    u.row(3) *= std::polar(1.0, -kTwoPi * sys.eta * r.t_gate);
    return u;
}

inline GateResult gate_result(const DriveSystem &sys, const EvolutionResult &r) {
    CMat u = qubit_frame_block(sys, r);
    std::array<double, 4> ph = r.phases;
    ph[3] += kTwoPi * sys.eta * r.t_gate;
    GateResult g = average_gate_fidelity(u, ph[0] - ph[2], ph[0] - ph[1]);
    g.phases = r.phases;
    g.phi_rel = std::remainder(relative_phase(r.phases[0], r.phases[1], r.phases[2], r.phases[3]), kTwoPi);
    g.leakage_per_state = r.leakage;
    g.leakage = (r.leakage[0] + r.leakage[1] + r.leakage[2] + r.leakage[3]) / 4.0;
    return g;
}

inline GateResult simulate_gate(const DriveSystem &sys, const PulseSpec &pulse, const IntegratorSpec &integ = {}) {
    return gate_result(sys, evolve_computational(sys, pulse, drive_frequency(sys, pulse), integ));
}

struct LeakageBudget {
    std::array<double, 4> per_state{};
    double mean = 0;
    RMat populations;  // d x 4 final populations per dressed state
};

inline LeakageBudget leakage_budget(const DriveSystem &sys, const PulseSpec &pulse, double omega_d,
                                    const IntegratorSpec &integ = {}) {
    auto r = evolve_computational(sys, pulse, omega_d, integ);
    LeakageBudget b;
    b.per_state = r.leakage;
    b.mean = (r.leakage[0] + r.leakage[1] + r.leakage[2] + r.leakage[3]) / 4.0;
    b.populations = r.state_populations;
    return b;
}

/// Amplitude giving a full Rabi return of |1,0,1> at the given detuning, by golden-section search
/// on the residual |1,0,1> depopulation within +-`span` of the closed-form seed.
inline double calibrate_amplitude(const DriveSystem &sys, PulseSpec pulse, double span = 0.25,
                                  double rel_tol = 1e-6, const IntegratorSpec &integ = {}) {
    const double seed = seed_amplitude(sys.n_drive, pulse.tau);
    CMat init = CMat::Zero(sys.dim(), 1);
    init(sys.comp[3], 0) = 1.0;
    auto cost = [&](double amp) {
        pulse.amplitude = amp;
        CMat out = propagate(sys, pulse, drive_frequency(sys, pulse), init, integ);
        return 1.0 - std::norm(out(sys.comp[3], 0));
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = seed * (1.0 - span), b = seed * (1.0 + span);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = cost(x1), f2 = cost(x2);
    while ((b - a) > rel_tol * seed) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cost(x2);
        }
    }
    return 0.5 * (a + b);
}

struct GridSpec {
    double amp_span = 0.03;   // relative half-width around the amplitude seed
    int amp_points = 25;
    double det_span = 0.002;  // GHz half-width around the detuning seed
    int det_points = 41;
    int refine_factor = 5;
    int refine_passes = 1;
    int widen_retries = 2;
    std::vector<double> drag_values;  // empty: keep the template drag_scale
};

struct GridPoint {
    double amplitude;
    double detuning;
    double drag_scale;
    double infidelity;
    double leakage;
};

struct OptimizeResult {
    PulseSpec pulse;
    GateResult gate;
    std::vector<GridPoint> evaluations;
};

namespace detail {

inline std::vector<double> grid_axis(double center, double half, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? center : center - half + 2.0 * half * i / (n - 1);
    }
    return v;
}

}  // namespace detail

/// Grid search over amplitude x detuning, then refinement passes around the minimum.
/// `evaluate` must be deterministic; results are merged in grid order.
inline OptimizeResult optimize_drive(const DriveSystem &sys, const PulseSpec &pulse_template, double seed_amplitude_,
                                     double seed_detuning, const GridSpec &grid = {},
                                     const IntegratorSpec &integ = {}) {
    require(grid.amp_points >= 1 && grid.det_points >= 1, "optimize_drive: grid sizes must be positive");
    OptimizeResult best;
    best.gate.infidelity = 2.0;
    std::vector<double> drags = grid.drag_values;
    if (drags.empty()) {
        drags.push_back(pulse_template.drag_scale);
    }
    for (double drag : drags) {
        double amp_c = seed_amplitude_, det_c = seed_detuning;
        double amp_h = grid.amp_span * seed_amplitude_, det_h = grid.det_span;
        int n_amp = grid.amp_points, n_det = grid.det_points;
        int retries = grid.widen_retries;
        OptimizeResult local;
        local.gate.infidelity = 2.0;
        for (int pass = 0; pass <= grid.refine_passes; ++pass) {
            auto amps = detail::grid_axis(amp_c, amp_h, n_amp);
            auto dets = detail::grid_axis(det_c, det_h, n_det);
            int bi = -1, bj = -1;
            double bval = 2.0;
            for (int i = 0; i < static_cast<int>(amps.size()); ++i) {
                for (int j = 0; j < static_cast<int>(dets.size()); ++j) {
                    PulseSpec p = pulse_template;
                    p.amplitude = amps[i];
                    p.detuning = dets[j];
                    p.drag_scale = drag;
                    GateResult g = simulate_gate(sys, p, integ);
                    best.evaluations.push_back({amps[i], dets[j], drag, g.infidelity, g.leakage});
                    if (g.infidelity < bval) {
                        bval = g.infidelity;
                        bi = i;
                        bj = j;
                    }
                    if (g.infidelity < local.gate.infidelity) {
                        local.gate = g;
                        local.pulse = p;
                    }
                }
            }
            bool edge = (n_amp > 1 && (bi == 0 || bi == n_amp - 1)) || (n_det > 1 && (bj == 0 || bj == n_det - 1));
            if (edge && pass == 0) {
                if (retries-- <= 0) {
                    throw BoundaryError("optimize_drive: optimum on grid boundary after widening");
                }
                amp_c = amps[bi];
                det_c = dets[bj];
                --pass;
                continue;
            }
            // The refined grid spans one step each side at refine_factor times the resolution.
            amp_h = n_amp > 1 ? 2.0 * amp_h / (n_amp - 1) : 0.0;
            det_h = n_det > 1 ? 2.0 * det_h / (n_det - 1) : 0.0;
            amp_c = amps[bi];
            det_c = dets[bj];
            n_amp = n_amp > 1 ? 2 * grid.refine_factor + 1 : 1;
            n_det = n_det > 1 ? 2 * grid.refine_factor + 1 : 1;
        }
        if (local.gate.infidelity < best.gate.infidelity) {
            best.gate = local.gate;
            best.pulse = local.pulse;
        }
    }
    return best;
}

struct PolishSpec {
    double amp_step = 0.005;  // initial simplex step, relative to the start amplitude
    double det_step = 2e-4;   // initial simplex step in detuning, GHz
    double size_tol = 2e-3;   // simplex size at convergence, in units of the initial steps
    int max_iterations = 120;
};

/// Nelder-Mead polish of (amplitude, detuning) on the coherent infidelity, from `start`.
/// Deterministic for a fixed start and spec.
inline OptimizeResult polish_drive(const DriveSystem &sys, const PulseSpec &start, const PolishSpec &spec = {},
                                   const IntegratorSpec &integ = {}) {
    require(start.amplitude > 0, "polish_drive: start amplitude must be positive");
    require(spec.amp_step > 0 && spec.det_step > 0 && spec.size_tol > 0, "polish_drive: steps must be positive");
    struct Context {
        const DriveSystem *sys;
        const IntegratorSpec *integ;
        const PulseSpec *start;
        const PolishSpec *spec;
        OptimizeResult best;
        std::exception_ptr error;
    } ctx{&sys, &integ, &start, &spec, {}, nullptr};
    ctx.best.gate.infidelity = 2.0;
    gsl_multimin_function fn;
    fn.n = 2;
    fn.params = &ctx;
    fn.f = [](const gsl_vector *x, void *params) {
        auto &c = *static_cast<Context *>(params);
        PulseSpec p = *c.start;
        p.amplitude = c.start->amplitude * (1.0 + c.spec->amp_step * gsl_vector_get(x, 0));
        p.detuning = c.start->detuning + c.spec->det_step * gsl_vector_get(x, 1);
        if (p.amplitude <= 0 || c.error) {
            return 2.0;
        }
        GateResult g;
        try {
            g = simulate_gate(*c.sys, p, *c.integ);
        } catch (...) {
            c.error = std::current_exception();
            return 2.0;
        }
        c.best.evaluations.push_back({p.amplitude, p.detuning, p.drag_scale, g.infidelity, g.leakage});
        if (g.infidelity < c.best.gate.infidelity) {
            c.best.gate = g;
            c.best.pulse = p;
        }
        return g.infidelity;
    };
    gsl_vector *x = gsl_vector_calloc(2);
    gsl_vector *step = gsl_vector_alloc(2);
    gsl_vector_set_all(step, 1.0);
    gsl_multimin_fminimizer *m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(m, &fn, x, step);
    int status = GSL_CONTINUE;
    for (int it = 0; it < spec.max_iterations && status == GSL_CONTINUE && !ctx.error; ++it) {
        if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) {
            break;
        }
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), spec.size_tol);
    }
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(step);
    gsl_vector_free(x);
    if (ctx.error) {
        std::rethrow_exception(ctx.error);
    }
    if (status != GSL_SUCCESS) {
        throw ConvergenceError("polish_drive: simplex did not converge");
    }
    return ctx.best;
}

}  // namespace fluxcz
