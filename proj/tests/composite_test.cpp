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


#include "fluxcz/composite.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace fluxcz;

namespace {

CircuitSpec table1() {
    CircuitSpec s;
    s.fluxonium_a.e_j = 7.1;
    s.fluxonium_b.e_j = 7.2;
    return s;
}

CircuitSpec decoupled() {
    CircuitSpec s = table1();
    s.j_ac = s.j_bc = s.j_ab = 0.0;
    return s;
}

}  // namespace

TEST(composite, decoupled_limit_energies) {
    auto s = build_composite(decoupled());
    for (int i = 0; i < 60; ++i) {
        const Label l = s.labels[i];
        ASSERT_TRUE(l.valid());
        const double sum = s.element_a.energies(l.a) + s.element_c.energies(l.c) + s.element_b.energies(l.b);
        EXPECT_NEAR(s.energies(i), sum, 1e-9);
        EXPECT_NEAR(s.overlaps[i], 1.0, 1e-9);
    }
}

TEST(composite, decoupled_limit_constants) {
    auto k = interaction_constants(build_composite(decoupled()));
    EXPECT_NEAR(k.chi, 0.0, 1e-9);
    EXPECT_NEAR(k.chi_00, 0.0, 1e-9);
    EXPECT_NEAR(k.chi_01, 0.0, 1e-9);
    EXPECT_NEAR(k.chi_10, 0.0, 1e-9);
    EXPECT_NEAR(k.alpha, 0.0, 1e-9);
    EXPECT_NEAR(k.eta, 0.0, 1e-9);
}

TEST(composite, decoupled_charge_block_structure) {
    auto s = truncate_dressed(build_composite(decoupled()), 40);
    RMat nc = dressed_charge_k(s, Element::Coupler);
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 40; ++j) {
            const Label a = s.labels[i], b = s.labels[j];
            if (a.a != b.a || a.b != b.b || std::abs(a.c - b.c) != 1) {
                EXPECT_LT(std::abs(nc(i, j)), 1e-9);
            }
        }
    }
}

TEST(composite, table1_constants) {
    auto k = interaction_constants(build_composite(table1()));
    EXPECT_NEAR(k.alpha, 0.070, 0.070 * 0.15);
    EXPECT_NEAR(std::abs(k.dchi_01()), 0.1, 0.025);
    EXPECT_NEAR(std::abs(k.dchi_10()), 0.1, 0.025);
    EXPECT_NEAR(k.eta, -1e-6, 1e-6);
    EXPECT_NEAR(k.h_a, 0.20, 0.04);
    EXPECT_NEAR(k.h_b, 0.14, 0.04);
}

TEST(composite, truncation_identity_and_order) {
    auto full = build_composite(table1());
    auto same = truncate_dressed(full, full.truncation_dim);
    EXPECT_EQ(same.truncation_dim, full.truncation_dim);
    EXPECT_LT((same.energies - full.energies).norm(), 1e-12);
    auto t = truncate_dressed(full, 45);
    EXPECT_EQ(t.truncation_dim, 45);
    for (int i = 1; i < 45; ++i) {
        EXPECT_LE(t.energies(i - 1), t.energies(i));
    }
    for (const Label &l : gate_labels()) {
        EXPECT_TRUE(t.has(l)) << l.str();
    }
}

TEST(composite, dressed_operators) {
    auto s = truncate_dressed(build_composite(table1()), 30);
    RMat id = dressed_operator(s, RMat(RMat::Identity(s.product_dim(), s.product_dim())));
    EXPECT_LT((id - RMat::Identity(30, 30)).norm(), 1e-10);
    for (Element e : {Element::A, Element::Coupler, Element::B}) {
        RMat k = dressed_charge_k(s, e);
        EXPECT_LT((k + k.transpose()).norm(), 1e-10);
    }
}

TEST(composite, trace_preserved) {
    auto s = build_composite(table1());
    EXPECT_NEAR(s.full_energy_sum, s.trace_h, 1e-8 * std::abs(s.trace_h));
}

TEST(composite, missing_label_throws) {
    auto s = truncate_dressed(build_composite(table1()), 20);
    EXPECT_THROW(s.index({5, 5, 5}), LabelError);
}
