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
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fluxcz/circuit.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/linalg.hpp"

namespace fluxcz {

struct CircuitSpec {
    FluxoniumSpec fluxonium_a;
    FluxoniumSpec fluxonium_b;
    ResonatorSpec resonator;
    double j_ac = 0.33;
    double j_bc = 0.33;
    double j_ab = 0.1;
    /// Fluxonium levels kept per element before the tensor product.
    int fluxonium_levels = 12;

    void validate() const {
        fluxonium_a.validate();
        fluxonium_b.validate();
        resonator.validate();
        require(std::isfinite(j_ac) && std::isfinite(j_bc) && std::isfinite(j_ab), "circuit: couplings must be finite");
        require(fluxonium_levels >= 4, "circuit: fluxonium_levels must be >= 4");
    }
};

/// Bare product label |a, c, b> (fluxonium A, coupler photons, fluxonium B).
struct Label {
    int a = -1;
    int c = -1;
    int b = -1;

    bool valid() const { return a >= 0; }
    auto operator<=>(const Label &) const = default;
    std::string str() const {
        return std::to_string(a) + "," + std::to_string(c) + "," + std::to_string(b);
    }
};

/// Which coupler reference frequency chi_ij is measured from.
enum class ChiReference {
    Bare,      // bare omega_c of the resonator
    Dressed00, // dressed E(0,1,0) - E(0,0,0), which makes chi_00 = 0
};

struct DressedSpectrum {
    std::array<int, 3> dims{};  // product dims (A, coupler, B)
    ElementSpectrum element_a;
    ElementSpectrum element_c;
    ElementSpectrum element_b;
    RVec energies;              // ascending, retained states only
    RMat vectors;               // product basis x retained
    std::vector<Label> labels;  // per retained dressed index; invalid when unlabelled
    std::vector<double> overlaps;
    std::map<Label, int> index_of;
    int truncation_dim = 0;
    double trace_h = 0;          // trace of the coupled Hamiltonian
    double full_energy_sum = 0;  // sum of all dressed energies before truncation
    double bare_omega_c = 0;

    int product_dim() const { return dims[0] * dims[1] * dims[2]; }
    int product_index(Label l) const { return (l.a * dims[1] + l.c) * dims[2] + l.b; }
    Label product_label(int p) const { return {p / (dims[1] * dims[2]), (p / dims[2]) % dims[1], p % dims[2]}; }
    bool has(Label l) const { return index_of.count(l) > 0; }
    int index(Label l) const {
        auto it = index_of.find(l);
        if (it == index_of.end()) {
            throw LabelError("missing labelled dressed state |" + l.str() + ">");
        }
        return it->second;
    }
    double energy(Label l) const { return energies(index(l)); }
};

enum class Element { A, Coupler, B };

namespace detail {

inline RMat kron3(const RMat &a, const RMat &c, const RMat &b) {
    RMat ac(a.rows() * c.rows(), a.cols() * c.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            ac.block(i * c.rows(), j * c.cols(), c.rows(), c.cols()) = a(i, j) * c;
        }
    }
    RMat out(ac.rows() * b.rows(), ac.cols() * b.cols());
    for (Eigen::Index i = 0; i < ac.rows(); ++i) {
        for (Eigen::Index j = 0; j < ac.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = ac(i, j) * b;
        }
    }
    return out;
}

/// Imaginary part of an element charge matrix; charge operators are i times a real matrix.
inline RMat charge_k(const ElementSpectrum &s) {
    return s.charge_matrix.imag();
}

}  // namespace detail

/// Real product-basis Hamiltonian. Charge products n_i n_j = -K_i K_j are real.
inline RMat composite_hamiltonian(const ElementSpectrum &ea, const ElementSpectrum &ec, const ElementSpectrum &eb,
                                  double j_ac, double j_bc, double j_ab) {
    const int na = ea.size(), nc = ec.size(), nb = eb.size();
    RMat ia = RMat::Identity(na, na), ic = RMat::Identity(nc, nc), ib = RMat::Identity(nb, nb);
    RMat ka = detail::charge_k(ea), kc = detail::charge_k(ec), kb = detail::charge_k(eb);
    RMat h = -j_ac * detail::kron3(ka, kc, ib) - j_bc * detail::kron3(ia, kc, kb) - j_ab * detail::kron3(ka, ic, kb);
    int p = 0;
    for (int a = 0; a < na; ++a) {
        for (int c = 0; c < nc; ++c) {
            for (int b = 0; b < nb; ++b) {
                h(p, p) += ea.energies(a) + ec.energies(c) + eb.energies(b);
                ++p;
            }
        }
    }
    return h;
}

/// Labels dressed states greedily by descending overlap with bare product states.
/// Dressed states whose best available overlap is below `min_overlap` stay unlabelled.
inline void assign_labels(DressedSpectrum &s, double min_overlap = 0.34) {
    const int np = static_cast<int>(s.vectors.rows());
    const int nd = static_cast<int>(s.vectors.cols());
    struct Cand {
        double w;
        int p;
        int d;
    };
    std::vector<Cand> cands;
    for (int d = 0; d < nd; ++d) {
        for (int p = 0; p < np; ++p) {
            double w = s.vectors(p, d) * s.vectors(p, d);
            if (w >= min_overlap) {
                cands.push_back({w, p, d});
            }
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand &x, const Cand &y) {
        if (x.w != y.w) return x.w > y.w;
        if (x.d != y.d) return x.d < y.d;
        return x.p < y.p;
    });
    std::vector<char> bare_used(np, 0);
    s.labels.assign(nd, Label{});
    s.overlaps.assign(nd, 0.0);
    s.index_of.clear();
    for (const auto &c : cands) {
        if (bare_used[c.p] || s.labels[c.d].valid()) {
            continue;
        }
        bare_used[c.p] = 1;
        s.labels[c.d] = s.product_label(c.p);
        s.overlaps[c.d] = c.w;
        s.index_of[s.labels[c.d]] = c.d;
    }
}

/// Table of the largest bare overlaps for one dressed state.
inline std::string overlap_table(const DressedSpectrum &s, int d, int rows = 4) {
    std::vector<std::pair<double, int>> w;
    for (int p = 0; p < s.vectors.rows(); ++p) {
        w.push_back({s.vectors(p, d) * s.vectors(p, d), p});
    }
    std::partial_sort(w.begin(), w.begin() + rows, w.end(), std::greater<>());
    std::ostringstream os;
    os << "dressed " << d << " (E=" << s.energies(d) << "):";
    for (int r = 0; r < rows; ++r) {
        os << " |" << s.product_label(w[r].second).str() << ">=" << w[r].first;
    }
    return os.str();
}

/// Checks that each label in `needed` is assigned; throws LabelError with diagnostics otherwise.
/// Returns a warning for each needed label with overlap below 0.5.
inline std::vector<std::string> require_labels(const DressedSpectrum &s, const std::vector<Label> &needed) {
    std::vector<std::string> warnings;
    for (const auto &l : needed) {
        if (!s.has(l)) {
            std::ostringstream os;
            os << "label assignment failed for |" << l.str() << ">";
            int p = s.product_index(l);
            if (p >= 0 && p < s.vectors.rows()) {
                Eigen::Index d;
                s.vectors.row(p).cwiseAbs2().maxCoeff(&d);
                os << "; best dressed candidate " << d << " claimed as |" << s.labels[d].str() << ">; "
                   << overlap_table(s, static_cast<int>(d));
            }
            throw LabelError(os.str());
        }
        int d = s.index(l);
        if (s.overlaps[d] < 0.5) {
            warnings.push_back("low overlap " + std::to_string(s.overlaps[d]) + " for |" + l.str() + ">");
        }
    }
    return warnings;
}

/// States needed for the gate and the interaction constants.
inline std::vector<Label> gate_labels() {
    std::vector<Label> out;
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                out.push_back({a, c, b});
            }
        }
    }
    return out;
}

inline std::vector<Label> constant_labels() {
    auto out = gate_labels();
    out.push_back({1, 2, 1});
    out.push_back({2, 0, 1});
    out.push_back({1, 0, 2});
    return out;
}

/// Diagonalises the coupled three-element Hamiltonian and labels all dressed states.
inline DressedSpectrum build_composite(const CircuitSpec &spec) {
    spec.validate();
    DressedSpectrum s;
    s.element_a = diagonalize_fluxonium(spec.fluxonium_a, spec.fluxonium_levels);
    s.element_b = diagonalize_fluxonium(spec.fluxonium_b, spec.fluxonium_levels);
    s.element_c = resonator_spectrum(spec.resonator);
    s.dims = {s.element_a.size(), s.element_c.size(), s.element_b.size()};
    s.bare_omega_c = spec.resonator.omega_c;
    RMat h = composite_hamiltonian(s.element_a, s.element_c, s.element_b, spec.j_ac, spec.j_bc, spec.j_ab);
    s.trace_h = h.trace();
    const int np = static_cast<int>(h.rows());

    const auto &pa = s.element_a.parity;
    const auto &pb = s.element_b.parity;
    bool use_parity = std::none_of(pa.begin(), pa.end(), [](int x) { return x == 0; }) &&
                      std::none_of(pb.begin(), pb.end(), [](int x) { return x == 0; });

    RVec values(np);
    RMat vectors = RMat::Zero(np, np);
    if (use_parity) {
        std::vector<int> even, odd;
        for (int p = 0; p < np; ++p) {
            Label l = s.product_label(p);
            int par = pa[l.a] * pb[l.b] * (l.c % 2 == 0 ? 1 : -1);
            (par > 0 ? even : odd).push_back(p);
        }
        std::vector<std::pair<double, std::pair<int, int>>> order;
        std::vector<RVec> bvals(2);
        std::vector<RMat> bvecs(2);
        const std::vector<int> *blocks[2] = {&even, &odd};
        for (int k = 0; k < 2; ++k) {
            const auto &idx = *blocks[k];
            const int m = static_cast<int>(idx.size());
            RMat hb(m, m);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    hb(i, j) = h(idx[i], idx[j]);
                }
            }
            Eigen::SelfAdjointEigenSolver<RMat> es(hb);
            bvals[k] = es.eigenvalues();
            bvecs[k] = es.eigenvectors();
            for (int i = 0; i < m; ++i) {
                order.push_back({bvals[k](i), {k, i}});
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [](const auto &x, const auto &y) { return x.first < y.first; });
        for (int col = 0; col < np; ++col) {
            auto [k, i] = order[col].second;
            values(col) = order[col].first;
            const auto &idx = *blocks[k];
            for (size_t r = 0; r < idx.size(); ++r) {
                vectors(idx[r], col) = bvecs[k](static_cast<Eigen::Index>(r), i);
            }
        }
        fix_gauge(vectors);
    } else {
        eigh(h, values, vectors);
    }
    s.full_energy_sum = values.sum();
    s.energies = values;
    s.vectors = std::move(vectors);
    s.truncation_dim = np;
    assign_labels(s);
    return s;
}

/// Keeps the `d` lowest dressed states.
inline DressedSpectrum truncate_dressed(const DressedSpectrum &s, int d) {
    if (d < 16 || d > s.truncation_dim) {
        throw ConfigError("truncate_dressed: d must lie in [16, " + std::to_string(s.truncation_dim) + "]");
    }
    DressedSpectrum t = s;
    t.energies = s.energies.head(d);
    t.vectors = s.vectors.leftCols(d);
    t.labels.resize(d);
    t.overlaps.resize(d);
    t.truncation_dim = d;
    t.index_of.clear();
    for (int i = 0; i < d; ++i) {
        if (t.labels[i].valid()) {
            t.index_of[t.labels[i]] = i;
        }
    }
    for (const auto &l : gate_labels()) {
        if (!t.has(l)) {
            throw ConfigError("truncate_dressed: d = " + std::to_string(d) + " drops the gate state |" + l.str() + ">");
        }
    }
    return t;
}

/// Embeds an element operator into the product basis.
inline RMat embed(const DressedSpectrum &s, Element e, const RMat &op) {
    RMat ia = RMat::Identity(s.dims[0], s.dims[0]);
    RMat ic = RMat::Identity(s.dims[1], s.dims[1]);
    RMat ib = RMat::Identity(s.dims[2], s.dims[2]);
    switch (e) {
        case Element::A: return detail::kron3(op, ic, ib);
        case Element::Coupler: return detail::kron3(ia, op, ib);
        case Element::B: return detail::kron3(ia, ic, op);
    }
    return {};
}

/// V^T O V restricted to the retained dressed states.
inline CMat dressed_operator(const DressedSpectrum &s, const CMat &bare_op) {
    if (bare_op.rows() != s.vectors.rows() || bare_op.cols() != s.vectors.rows()) {
        throw ConfigError("dressed_operator: dimension mismatch");
    }
    CMat v = s.vectors.cast<cplx>();
    return v.adjoint() * bare_op * v;
}

inline RMat dressed_operator(const DressedSpectrum &s, const RMat &bare_op) {
    if (bare_op.rows() != s.vectors.rows() || bare_op.cols() != s.vectors.rows()) {
        throw ConfigError("dressed_operator: dimension mismatch");
    }
    return s.vectors.transpose() * bare_op * s.vectors;
}

/// Charge operator of one element in the dressed basis, as K with n = i K.
inline RMat dressed_charge_k(const DressedSpectrum &s, Element e) {
    const ElementSpectrum &es = e == Element::A ? s.element_a : (e == Element::B ? s.element_b : s.element_c);
    return dressed_operator(s, embed(s, e, detail::charge_k(es)));
}

struct InteractionConstants {
    double chi = 0;
    double chi_00 = 0;
    double chi_01 = 0;
    double chi_10 = 0;
    double alpha = 0;
    double eta = 0;
    double h_a = 0;
    double h_b = 0;
    double omega_ref = 0;
    ChiReference reference = ChiReference::Bare;
    std::vector<std::string> warnings;

    double dchi_00() const { return chi - chi_00; }
    double dchi_01() const { return chi - chi_01; }
    double dchi_10() const { return chi - chi_10; }
};

inline InteractionConstants interaction_constants(const DressedSpectrum &s, ChiReference ref = ChiReference::Bare) {
    InteractionConstants k;
    k.warnings = require_labels(s, constant_labels());
    k.reference = ref;
    auto e = [&](int a, int c, int b) { return s.energy({a, c, b}); };
    k.omega_ref = ref == ChiReference::Bare ? s.bare_omega_c : e(0, 1, 0) - e(0, 0, 0);
    auto chi = [&](int i, int j) { return e(i, 1, j) - e(i, 0, j) - k.omega_ref; };
    k.chi = chi(1, 1);
    k.chi_00 = chi(0, 0);
    k.chi_01 = chi(0, 1);
    k.chi_10 = chi(1, 0);
    k.alpha = (e(1, 2, 1) - e(1, 1, 1)) - (e(1, 1, 1) - e(1, 0, 1));
    k.eta = e(1, 0, 1) - e(1, 0, 0) - e(0, 0, 1) + e(0, 0, 0);
    int d111 = s.index({1, 1, 1});
    double va = s.vectors(s.product_index({2, 0, 1}), d111);
    double vb = s.vectors(s.product_index({1, 0, 2}), d111);
    k.h_a = va * va;
    k.h_b = vb * vb;
    return k;
}

}  // namespace fluxcz
