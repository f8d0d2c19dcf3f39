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


// Acceptance suite: one PASS/FAIL line per criterion, JSON report with the numbers behind each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxcz/fluxcz.hpp"

#ifndef FLUXCZ_PRESET_DIR
#define FLUXCZ_PRESET_DIR "presets"
#endif

using namespace fluxcz;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
    json detail = json::object();
};

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

double degrees(double rad) { return rad * 180.0 / kPi; }

std::string fmt(double x, int digits = 3) {
    std::ostringstream s;
    s << std::setprecision(digits) << x;
    return s.str();
}

class Suite {
public:
    Suite(std::string preset_dir, int truncation) : preset_dir_(std::move(preset_dir)), truncation_(truncation) {}

    RunConfig config(const std::vector<std::string> &presets, const std::vector<std::string> &overrides = {}) const {
        json doc = {{"preset", presets}};
        return parse_config(merge_config(doc, {}, overrides, preset_dir_));
    }

    const CircuitSpec &circuit() {
        if (!circuit_) {
            circuit_ = config({"table1-main"}).circuit;
        }
        return *circuit_;
    }

    const GateSetup &setup() {
        if (!setup_) {
            setup_ = make_gate_setup(circuit(), truncation_);
        }
        return *setup_;
    }

    const CalibratedGate &resonant(double tg) {
        auto it = resonant_.find(tg);
        if (it == resonant_.end()) {
            it = resonant_.emplace(tg, calibrate_resonant(setup(), tg)).first;
        }
        return it->second;
    }

    const CalibratedGate &optimized(double tg) {
        auto it = optimized_.find(tg);
        if (it == optimized_.end()) {
            it = optimized_.emplace(tg, calibrate_gate(setup(), tg)).first;
            log("optimized t_g = " + fmt(tg) + " ns: eps = " + fmt(it->second.gate.infidelity));
        }
        return it->second;
    }

    void log(const std::string &msg) const {
        if (verbose) {
            std::cerr << "  .. " << msg << "\n";
        }
    }

    std::string preset_dir() const { return preset_dir_; }
    int truncation() const { return truncation_; }
    bool verbose = true;

private:
    std::string preset_dir_;
    int truncation_;
    std::optional<CircuitSpec> circuit_;
    std::optional<GateSetup> setup_;
    std::map<double, CalibratedGate> resonant_;
    std::map<double, CalibratedGate> optimized_;
};

Outcome static_constants(Suite &s) {
    const InteractionConstants &k = s.setup().constants;
    Outcome o;
    const bool alpha_ok = rel(k.alpha, 0.070) <= 0.15;
    const bool d01 = rel(std::abs(k.dchi_01()), 0.100) <= 0.25;
    const bool d10 = rel(std::abs(k.dchi_10()), 0.100) <= 0.25;
    const bool eta_ok = std::abs(k.eta - (-1e-6)) <= 1e-6;
    const bool ha = std::abs(k.h_a - 0.20) <= 0.04;
    const bool hb = std::abs(k.h_b - 0.14) <= 0.04;
    o.pass = alpha_ok && d01 && d10 && eta_ok && ha && hb;
    o.detail = {{"alpha_ghz", k.alpha},         {"dchi_00_ghz", k.dchi_00()}, {"dchi_01_ghz", k.dchi_01()},
                {"dchi_10_ghz", k.dchi_10()},   {"eta_ghz", k.eta},           {"h_a", k.h_a},
                {"h_b", k.h_b},                 {"chi_ghz", k.chi},           {"warnings", k.warnings}};
    o.summary = "alpha " + fmt(k.alpha * 1e3) + " MHz, dchi01/10 " + fmt(k.dchi_01() * 1e3) + "/" +
                fmt(k.dchi_10() * 1e3) + " MHz (dchi00 " + fmt(k.dchi_00() * 1e3) + ", info), eta " +
                fmt(k.eta * 1e6) + " kHz, h_A " + fmt(k.h_a) + ", h_B " + fmt(k.h_b);
    return o;
}

Outcome perturbation_vs_exact(Suite &s) {
    const CircuitSpec base = s.circuit();
    Outcome o;
    double worst = 0;
    json rows = json::array();
    for (int i = 0; i <= 6; ++i) {
        CircuitSpec spec = base;
        spec.resonator.omega_c = 6.6 + 0.1 * i;
        const InteractionConstants k = interaction_constants(build_composite(spec));
        const PerturbationInputs p = perturbation_inputs(spec);
        const ChiSet c = chi_jc_model(plasmon_coupler_model(p), corrections_03(p));
        const double e00 = rel(c.chi - c.chi_00, k.dchi_00());
        const double e01 = rel(c.chi - c.chi_01, k.dchi_01());
        const double e10 = rel(c.chi - c.chi_10, k.dchi_10());
        worst = std::max({worst, e00, e01, e10});
        rows.push_back({{"omega_c", spec.resonator.omega_c}, {"rel_dchi_00", e00}, {"rel_dchi_01", e01},
                        {"rel_dchi_10", e10}, {"rel_chi_info", rel(c.chi, k.chi)}});
    }
    const bool sweep_ok = worst <= 0.10;

    CircuitSpec no_ab = base;
    no_ab.j_ab = 0.0;
    const double eta = interaction_constants(build_composite(base)).eta;
    const double eta0 = interaction_constants(build_composite(no_ab)).eta;
    const EtaEstimates pt = eta_perturbative(perturbation_inputs(base));
    const double eta_err = rel(pt.total(), eta - eta0);
    const bool eta_ok = eta_err <= 0.05;

    const double sc = 0.1;
    CircuitSpec weak = base;
    weak.j_ac *= sc;
    weak.j_bc *= sc;
    weak.j_ab *= sc;
    const double chi_weak = interaction_constants(build_composite(weak)).chi / (sc * sc);
    const double chi_eq = chi_second_order(perturbation_inputs(base)).chi;
    const double weak_err = rel(chi_weak, chi_eq);
    const bool weak_ok = weak_err <= 0.01;

    o.pass = sweep_ok && eta_ok && weak_ok;
    o.detail = {{"sweep", rows},
                {"worst_dchi_rel", worst},
                {"eta_exact", eta},
                {"eta_exact_without_j_ab", eta0},
                {"eta_perturbative", pt.total()},
                {"eta_rel", eta_err},
                {"weak_scale", sc},
                {"chi_over_s2", chi_weak},
                {"chi_second_order", chi_eq},
                {"weak_rel", weak_err}};
    o.summary = "sweep worst " + fmt(100 * worst) + "% " + (sweep_ok ? "ok" : "FAIL") + ", eta2+eta3 " +
                fmt(100 * eta_err) + "% " + (eta_ok ? "ok" : "FAIL") + ", weak coupling " + fmt(100 * weak_err) +
                "% " + (weak_ok ? "ok" : "FAIL");
    return o;
}

json phase_rows(Suite &s, const std::string &detuning, double &worst, double &worst11) {
    worst = worst11 = 0;
    json rows = json::array();
    for (double tg : {60.0, 80.0, 100.0}) {
        const RunConfig cfg = s.config({"table1-main"}, {"pulse.t_gate=" + fmt(tg, 17), "pulse.detuning=" + detuning});
        const StageOutput st = detail::stage_gate(cfg);
        const auto &num = st.result["gate"]["phases"];
        const auto &an = st.result["analytic_phases"];
        json diffs = json::array();
        for (int k = 0; k < 4; ++k) {
            const double d = std::abs(degrees(std::remainder(num[k].get<double>() - an[k].get<double>(), kTwoPi)));
            diffs.push_back(d);
            if (k == 3) {
                worst11 = std::max(worst11, d);
            } else {
                worst = std::max(worst, d);
            }
        }
        rows.push_back({{"t_gate", tg}, {"abs_diff_deg", diffs}, {"numeric", num}, {"analytic", an}});
        s.log("phases at " + fmt(tg) + " ns, detuning " + detuning + ": " + diffs.dump());
    }
    return rows;
}

Outcome phase_model(Suite &s) {
    Outcome o;
    double worst = 0, worst11 = 0, dworst = 0, dworst11 = 0;
    const json resonant = phase_rows(s, "0", worst, worst11);
    const json detuned = phase_rows(s, "\"auto\"", dworst, dworst11);
    o.pass = worst <= 2.0 && worst11 <= 1.5;
    o.detail = {{"resonant", resonant}, {"worst_deg", worst}, {"worst_11_deg", worst11},
                {"detuned_info", detuned}, {"detuned_worst_deg", dworst}, {"detuned_worst_11_deg", dworst11}};
    o.summary = "resonant drive: max |analytic - numeric| " + fmt(worst) + " deg (phi00/01/10), " + fmt(worst11) +
                " deg (phi11); analytic detuning (info) " + fmt(dworst) + "/" + fmt(dworst11) + " deg";
    return o;
}

Outcome detuning_optimization(Suite &s) {
    Outcome o;
    json rows = json::array();
    double worst_ratio = 0, worst_phi = 0;
    for (double tg : {88.0, 100.0, 113.0}) {
        const CalibratedGate &r = s.resonant(tg);
        const CalibratedGate &g = s.optimized(tg);
        const double ratio = g.gate.infidelity / r.gate.infidelity;
        worst_ratio = std::max(worst_ratio, ratio);
        worst_phi = std::max(worst_phi, std::abs(g.gate.phi_rel));
        rows.push_back({{"t_gate", tg}, {"resonant", r.gate.infidelity}, {"optimized", g.gate.infidelity},
                        {"ratio", ratio}, {"phi_rel", g.gate.phi_rel}, {"leakage", g.gate.leakage},
                        {"detuning", g.pulse.detuning}, {"amplitude", g.pulse.amplitude}});
    }
    o.pass = worst_ratio <= 0.1 && worst_phi < 1e-3;
    o.detail = {{"rows", rows}};
    o.summary = "worst optimized/resonant " + fmt(worst_ratio) + ", worst |phi| " + fmt(worst_phi) + " rad";
    return o;
}

Outcome headline(Suite &s) {
    const CalibratedGate &g = s.optimized(100.0);
    Outcome o;
    o.pass = g.gate.infidelity <= 5e-6;
    o.detail = {{"infidelity", g.gate.infidelity}, {"leakage", g.gate.leakage}, {"phi_rel", g.gate.phi_rel}};
    o.summary = "eps(100 ns) = " + fmt(g.gate.infidelity) + " (leakage " + fmt(g.gate.leakage) + ")";
    return o;
}

Outcome scaling(Suite &s) {
    std::vector<double> x, y;
    for (double tg : {45.0, 55.0, 65.0, 75.0, 88.0, 100.0, 113.0}) {
        x.push_back(tg);
        y.push_back(s.optimized(tg).gate.infidelity);
    }
    const PowerLawFit f = fit_power_law(x, y);
    Outcome o;
    o.pass = f.exponent >= -5.2 && f.exponent <= -3.6;
    o.detail = {{"t_gate", x}, {"infidelity", y}, {"exponent", f.exponent}, {"sigma", f.sigma},
                {"prefactor", f.prefactor}};
    o.summary = "p = " + fmt(f.exponent) + " +- " + fmt(f.sigma, 2) + " over 45-113 ns";
    return o;
}

Outcome truncation(Suite &s) {
    const CalibratedGate &nominal = s.optimized(100.0);
    const GateSetup &g = s.setup();
    std::vector<double> eps;
    for (int d = 40; d <= 50; ++d) {
        GateSetup gd;
        gd.spec = g.spec;
        gd.truncated = truncate_dressed(g.full, d);
        gd.sys = make_drive_system(gd.truncated);
        eps.push_back(apply_fixed_drive(gd, nominal.pulse, nominal.omega_d).infidelity);
    }
    const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
    const double spread = (*hi - *lo) / nominal.gate.infidelity;

    const GateSetup small = make_gate_setup(s.circuit(), 28);
    const CalibratedGate g28 = calibrate_gate(small, 100.0);
    const double diff28 = rel(g28.gate.infidelity, nominal.gate.infidelity);
    Outcome o;
    o.pass = spread <= 0.005 && diff28 <= 0.10;
    o.detail = {{"d", "40..50"}, {"infidelity", eps}, {"spread", spread}, {"d28", g28.gate.infidelity},
                {"d45", nominal.gate.infidelity}, {"d28_rel", diff28}};
    o.summary = "spread d=40..50 " + fmt(100 * spread) + "%, d=28 vs 45 " + fmt(100 * diff28) + "%";
    return o;
}

struct OpenRun {
    OpenGateResult r;
    LossEstimates est;
};

OpenRun open_run(Suite &s, const std::string &label, double tg) {
    const GateSetup &g = s.setup();
    const CalibratedGate &c = s.optimized(tg);
    const DissipationSet set = dissipation_preset(label);
    OpenRun o;
    o.r = error_budget(g.sys, build_jump_operators(g.truncated, set), c.pulse, c.omega_d);
    o.est = loss_estimates(g.truncated, set, c.pulse.tau);
    s.log("set " + label + " at " + fmt(tg) + " ns: total " + fmt(o.r.infidelity));
    return o;
}

std::map<std::string, OpenRun> &open_runs(Suite &s) {
    static std::map<std::string, OpenRun> runs;
    if (runs.empty()) {
        for (const char *l : {"A", "B", "C"}) {
            runs[l] = open_run(s, l, 70.0);
        }
        for (const char *l : {"D", "E", "F"}) {
            runs[l] = open_run(s, l, 55.0);
        }
    }
    return runs;
}

Outcome open_headline(Suite &s) {
    auto &runs = open_runs(s);
    const double a = runs["A"].r.infidelity, b = runs["B"].r.infidelity, c = runs["C"].r.infidelity;
    const double d = runs["D"].r.infidelity;
    const bool a_ok = rel(a, 1.86e-4) <= 0.25;
    const bool d_ok = rel(d, 6e-4) <= 0.25;
    const double spread = (std::max({a, b, c}) - std::min({a, b, c})) / std::min({a, b, c});
    const bool abc_ok = spread <= 0.10;
    Outcome o;
    o.pass = a_ok && d_ok && abc_ok;
    json sets = json::object();
    for (const auto &[k, v] : runs) {
        sets[k] = {{"total", v.r.infidelity}, {"coherent", v.r.coherent}, {"incoherent", v.r.incoherent},
                   {"leakage", v.r.leakage}};
    }
    o.detail = {{"sets", sets}, {"abc_spread", spread}};
    o.summary = "A(70 ns) " + fmt(a) + " " + (a_ok ? "ok" : "FAIL") + ", D(55 ns) " + fmt(d) + " " +
                (d_ok ? "ok" : "FAIL") + ", A/B/C spread " + fmt(100 * spread) + "% " + (abc_ok ? "ok" : "FAIL");
    return o;
}

Outcome loss_estimate_check(Suite &s) {
    auto &runs = open_runs(s);
    Outcome o;
    double worst = 0;
    std::string worst_at;
    json sets = json::object();
    for (const auto &[k, v] : runs) {
        const double est[] = {v.est.fluxon, v.est.plasmon, v.est.coupler};
        json ch = json::object();
        for (int c = 0; c < kChannels; ++c) {
            const double e = rel(est[c], v.r.budget[c]);
            ch[channel_name(static_cast<Channel>(c))] = {{"budget", v.r.budget[c]}, {"estimate", est[c]}, {"rel", e}};
            if (e > worst) {
                worst = e;
                worst_at = k + "/" + channel_name(static_cast<Channel>(c));
            }
        }
        sets[k] = ch;
    }
    o.pass = worst <= 0.15;
    o.detail = {{"sets", sets}, {"worst_rel", worst}, {"worst_at", worst_at}};
    o.summary = "worst per-channel deviation " + fmt(100 * worst) + "% (" + worst_at + ")";
    return o;
}

Outcome capnet_round_trip(Suite &s) {
    Outcome o;
    double worst = 0;
    json rows = json::object();
    for (const char *name : {"si-grounded-main", "si-grounded-highZ", "si-differential", "si-differential-highZ"}) {
        const RunConfig cfg = s.config({name});
        const EffectiveCircuit e = effective_circuit(cfg.network.network);
        const json &x = cfg.expected;
        const double errs[] = {rel(e.e_c_a, x["e_c"]), rel(std::abs(e.j_ac), x["j_c"]),
                               rel(std::abs(e.j_ab), x["j_ab"]), rel(e.z_c_out, x["z_c"])};
        worst = std::max(worst, *std::max_element(std::begin(errs), std::end(errs)));
        rows[name] = {{"e_c", e.e_c_a}, {"j_c", std::abs(e.j_ac)}, {"j_ab", std::abs(e.j_ab)}, {"z_c", e.z_c_out},
                      {"rel", errs}};
    }
    json bounds = json::object();
    double worst_bound = 0;
    for (const char *name : {"si-grounded-main", "si-differential"}) {
        const RunConfig cfg = s.config({name});
        const CabBound b = zz_bound_cab(cfg.network.network, cfg.network.base, cfg.network.zz_threshold);
        const double printed = cfg.expected["c_ab_bound"];
        worst_bound = std::max(worst_bound, rel(b.c_ab, printed));
        bounds[name] = {{"c_ab_bound_ff", b.c_ab}, {"printed", printed}};
    }
    o.pass = worst <= 0.03 && worst_bound <= 0.5;
    o.detail = {{"rows", rows}, {"bounds", bounds}};
    o.summary = "table rows worst " + fmt(100 * worst) + "%, C_AB bounds worst " + fmt(100 * worst_bound) + "%";
    return o;
}

Outcome properties(Suite &s) {
    std::vector<std::pair<std::string, bool>> checks;
    auto check = [&checks](const std::string &name, bool ok) { checks.emplace_back(name, ok); };

    const ElementSpectrum fa = diagonalize_fluxonium(s.circuit().fluxonium_a);
    check("fluxonium charge operator Hermitian",
          (fa.charge_matrix - fa.charge_matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    const DressedSpectrum small = truncate_dressed(s.setup().full, 16);
    const DriveSystem sys = make_drive_system(small);
    bool parity_ok = true;
    for (int i = 0; i < sys.dim(); ++i) {
        for (int j = 0; j < sys.dim(); ++j) {
            if (sys.parity[i] != 0 && sys.parity[i] == sys.parity[j] && std::abs(sys.k(i, j)) > 1e-9) {
                parity_ok = false;
            }
        }
    }
    check("parity selection rule", parity_ok);

    PulseSpec p = PulseSpec::from_gate_time(40.0);
    p.amplitude = seed_amplitude(sys.n_drive, p.tau);
    const CMat u = propagate(sys, p, sys.omega_res, CMat::Identity(sys.dim(), sys.dim()));
    check("unitarity 1e-7", (u.adjoint() * u - CMat::Identity(sys.dim(), sys.dim())).norm() < 1e-7);

    DissipationSet set = dissipation_preset("D");
    std::vector<CMat> rho0 = {CMat::Zero(sys.dim(), sys.dim())};
    rho0[0](sys.comp[3], sys.comp[3]) = 1.0;
    PulseSpec shortp = PulseSpec::from_gate_time(10.0);
    shortp.amplitude = seed_amplitude(sys.n_drive, shortp.tau);
    const auto rho = master_equation(sys, build_jump_operators(small, set), shortp, sys.omega_res, rho0);
    check("master-equation trace 1e-8", std::abs(rho[0].trace() - 1.0) < 1e-8);
    check("density matrix Hermitian", (rho[0] - rho[0].adjoint()).norm() < 1e-10);

    CircuitSpec off = s.circuit();
    off.j_ac = off.j_bc = off.j_ab = 0.0;
    const InteractionConstants z = interaction_constants(build_composite(off));
    check("decoupled-limit zeros", std::abs(z.chi) + std::abs(z.chi_00) + std::abs(z.chi_01) + std::abs(z.chi_10) +
                                           std::abs(z.alpha) + std::abs(z.eta) <
                                       1e-9);

    const double w = 0.25, t = 30.0;
    const double n = thermal_occupation(w, t);
    check("Bose detailed balance", std::abs(n / (n + 1) - std::exp(-w / (kKbOverH * t * 1e-3))) < 1e-12);

    PulseSpec e = PulseSpec::from_gate_time(80.0);
    e.amplitude = 1.0;
    bool sym = true;
    for (double x = 0; x <= e.tau * 1.1; x += e.tau / 7) {
        sym = sym && std::abs(envelope(e, e.t_start() + x) - envelope(e, e.t_end() - x)) < 1e-10;
    }
    check("envelope symmetry", sym);

    CMat cz = CMat::Identity(4, 4);
    cz(3, 3) = -1.0;
    check("F(CZ) = 1", std::abs(average_gate_fidelity_at(cz, 0, 0) - 1.0) < 1e-14);
    bool eps_ok = true;
    for (double phi : {0.01, 0.1, 0.5, kPi}) {
        CMat v = cz;
        v(3, 3) *= std::polar(1.0, phi);
        eps_ok = eps_ok && std::abs(1.0 - average_gate_fidelity_at(v, 0, 0) - epsilon_phi(phi)) < 1e-14 &&
                 std::abs(epsilon_phi(phi) - (1.0 - (14.0 + 6.0 * std::cos(phi)) / 20.0)) < 1e-15;
    }
    check("eps(phi) identity", eps_ok);

    Outcome o;
    json d = json::object();
    std::string failed;
    for (const auto &[name, ok] : checks) {
        d[name] = ok;
        if (!ok) {
            o.pass = false;
            failed += (failed.empty() ? "" : ", ") + name;
        }
    }
    o.detail = d;
    o.summary = std::to_string(checks.size()) + " checks" + (failed.empty() ? "" : "; failed: " + failed);
    return o;
}

struct Criterion {
    int id;
    const char *title;
    std::function<Outcome(Suite &)> run;
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"fluxcz acceptance suite"};
    std::string preset_dir = FLUXCZ_PRESET_DIR;
    std::string report;
    std::vector<int> only;
    bool strict = false;
    bool quiet = false;
    app.add_option("--preset-dir", preset_dir, "directory holding <name>.json presets");
    app.add_option("--report", report, "write a JSON report here");
    app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 11));
    app.add_flag("--strict", strict, "exit non-zero when any criterion fails");
    app.add_flag("-q,--quiet", quiet, "suppress progress notes");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "static constants", static_constants},
        {2, "perturbation vs exact", perturbation_vs_exact},
        {3, "analytic phase model", phase_model},
        {4, "detuning optimization", detuning_optimization},
        {5, "headline coherent error", headline},
        {6, "scaling law", scaling},
        {7, "truncation convergence", truncation},
        {8, "open-system headline", open_headline},
        {9, "loss estimates", loss_estimate_check},
        {10, "capnet round trip", capnet_round_trip},
        {11, "property suite", properties},
    };

    Suite suite(preset_dir, 45);
    suite.verbose = !quiet;
    json out = {{"versions", versions()}, {"criteria", json::array()}};
    int failed = 0, errors = 0;
    const std::set<int> selected(only.begin(), only.end());
    for (const auto &c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        std::string status;
        try {
            r = c.run(suite);
            status = r.pass ? "PASS" : "FAIL";
        } catch (const std::exception &e) {
            r.pass = false;
            r.summary = std::string("error: ") + e.what();
            status = "ERROR";
            ++errors;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += r.pass ? 0 : 1;
        std::cout << "criterion " << std::setw(2) << c.id << "  " << status << "  " << c.title << ": " << r.summary
                  << "  [" << fmt(secs, 3) << " s]" << std::endl;
        out["criteria"].push_back({{"id", c.id},
                                   {"title", c.title},
                                   {"status", status},
                                   {"summary", r.summary},
                                   {"seconds", secs},
                                   {"detail", r.detail}});
    }
    std::cout << "acceptance: " << out["criteria"].size() - failed << " passed, " << failed << " failed" << std::endl;
    if (!report.empty()) {
        std::ofstream(report) << out.dump(2) << "\n";
    }
    if (errors > 0) {
        return 2;
    }
    return strict && failed > 0 ? 1 : 0;
}
