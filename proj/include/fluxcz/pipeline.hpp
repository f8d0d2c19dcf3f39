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

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <gsl/gsl_version.h>
#include <nlohmann/json.hpp>

#include "fluxcz/calibration.hpp"
#include "fluxcz/capnet.hpp"
#include "fluxcz/config.hpp"
#include "fluxcz/lindblad.hpp"
#include "fluxcz/parallel.hpp"
#include "fluxcz/perturbation.hpp"
#include "fluxcz/robustness.hpp"

namespace fluxcz {

inline constexpr const char *kVersion = "0.1.0";

inline const std::vector<std::string> &stage_names() {
    static const std::vector<std::string> names = {"spectrum", "constants", "perturb-compare", "gate", "optimize",
                                                   "sweep-tg", "sweep-flux", "sweep-ej", "lindblad", "capnet",
                                                   "fit-scaling"};
    return names;
}

/// Comma-separated table with a mandatory header row.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void add(std::vector<json> row) {
        require(row.size() == columns.size(), "csv: row width does not match the header");
        rows.push_back(std::move(row));
    }
};

/// Shortest round-trip decimal form; identical doubles always print identically.
inline std::string format_number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

inline std::string csv_cell(const json &v) {
    if (v.is_number()) {
        return format_number(v.get<double>());
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        return q + "\"";
    }
    return v.dump();
}

inline void write_csv(const CsvTable &t, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NumericalError("cannot write " + path.string());
    }
    for (size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << "\n";
    for (const auto &r : t.rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << csv_cell(r[i]);
        }
        out << "\n";
    }
}

/// Reads a CSV as written by write_csv; cells that parse as numbers become numbers.
inline CsvTable read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    CsvTable t;
    std::string line;
    auto split = [](const std::string &s) {
        std::vector<std::string> v(1);
        bool quoted = false;
        for (size_t i = 0; i < s.size(); ++i) {
            const char c = s[i];
            if (quoted && c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
                v.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                v.emplace_back();
            } else {
                v.back() += c;
            }
        }
        return v;
    };
    if (!std::getline(in, line)) {
        throw ConfigError(path.string() + ": empty file");
    }
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<json> row;
        for (const auto &c : split(line)) {
            double x = 0;
            auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), x);
            row.push_back(ec == std::errc() && p == c.data() + c.size() ? json(x) : json(c));
        }
        if (row.size() != t.columns.size()) {
            throw ConfigError(path.string() + ": ragged row");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct PowerLawFit {
    double exponent = 0;
    double sigma = 0;      // 1 sigma from fit residuals
    double prefactor = 0;  // y = prefactor * x^exponent
    int points = 0;
};

/// Least-squares line through (ln x, ln y).
inline PowerLawFit fit_power_law(const std::vector<double> &x, const std::vector<double> &y) {
    require(x.size() == y.size(), "fit_power_law: size mismatch");
    require(x.size() >= 3, "fit_power_law: need at least three points");
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        require(x[i] > 0 && y[i] > 0, "fit_power_law: values must be positive");
        lx(i) = std::log(x[i]);
        ly(i) = std::log(y[i]);
    }
    const double mx = lx.mean(), my = ly.mean();
    const double sxx = (lx.array() - mx).square().sum();
    require(sxx > 0, "fit_power_law: x values must not all coincide");
    PowerLawFit f;
    f.points = n;
    f.exponent = ((lx.array() - mx) * (ly.array() - my)).sum() / sxx;
    const double b = my - f.exponent * mx;
    f.prefactor = std::exp(b);
    const double ssr = (ly.array() - b - f.exponent * lx.array()).square().sum();
    f.sigma = std::sqrt(ssr / (n - 2) / sxx);
    return f;
}

inline json versions() {
    return {{"fluxcz", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"gsl", GSL_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                  "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
}

/// FNV-1a over the merged config with the output and worker settings removed.
inline std::string config_hash(const json &echo) {
    json j = echo;
    j.erase("output");
    j.erase("workers");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream o;
    o << std::hex << h;
    return o.str();
}

struct StageOutput {
    json result = json::object();
    CsvTable table;
};

namespace detail {

inline json to_json(const Label &l) { return json::array({l.a, l.c, l.b}); }

inline json to_json(const InteractionConstants &k) {
    return {{"chi", k.chi},       {"chi_00", k.chi_00},     {"chi_01", k.chi_01},     {"chi_10", k.chi_10},
            {"dchi_00", k.dchi_00()}, {"dchi_01", k.dchi_01()}, {"dchi_10", k.dchi_10()}, {"alpha", k.alpha},
            {"eta", k.eta},       {"h_a", k.h_a},           {"h_b", k.h_b},           {"omega_ref", k.omega_ref},
            {"warnings", k.warnings}};
}

inline json to_json(const PulseSpec &p) {
    return {{"t_gate", p.t_gate()}, {"tau", p.tau}, {"amplitude", p.amplitude}, {"detuning", p.detuning},
            {"drag_scale", p.drag_scale}, {"drag_alpha", p.drag_alpha}, {"amplitude_scale", p.amplitude_scale}};
}

inline json to_json(const GateResult &g) {
    return {{"fidelity", g.fidelity}, {"infidelity", g.infidelity}, {"leakage", g.leakage},
            {"leakage_per_state", g.leakage_per_state}, {"virtual_z", g.virtual_z}, {"phases", g.phases},
            {"phi_rel", g.phi_rel}};
}

inline json to_json(const EffectiveCircuit &e) {
    return {{"e_c_a", e.e_c_a}, {"e_c_b", e.e_c_b}, {"z_c_out", e.z_c_out}, {"omega_c_out", e.omega_c_out},
            {"j_ac", e.j_ac}, {"j_bc", e.j_bc}, {"j_ab", e.j_ab}, {"omega_in", e.omega_in},
            {"c_r", e.c_r}, {"l_r", e.l_r}};
}

/// Pulse for the gate stage: analytic detuning when requested, amplitude calibrated when not given.
inline PulseSpec prepare_pulse(const RunConfig &cfg, const GateSetup &g, double t_g) {
    PulseSpec p = cfg.pulse;
    p.tau = t_g / 2.2;
    if (cfg.optimize_detuning) {
        p.detuning = optimal_detuning(phase_model_inputs(g), p.tau);
    }
    if (cfg.calibrate_amplitude) {
        p.amplitude = calibrate_amplitude(g.sys, p, 0.2, 1e-6, cfg.integrator);
    }
    return p;
}

/// Numerically optimised drive at one gate time with the configured optimizer.
inline CalibratedGate optimize(const RunConfig &cfg, const GateSetup &g, double t_g, std::vector<GridPoint> *evals = nullptr) {
    if (cfg.optimizer.method == OptimizerMethod::Polish) {
        PulseSpec p = PulseSpec::from_gate_time(t_g);
        p.drag_scale = cfg.pulse.drag_scale;
        p.drag_alpha = cfg.pulse.drag_alpha;
        p.detuning = optimal_detuning(phase_model_inputs(g), p.tau);
        p.amplitude = calibrate_amplitude(g.sys, p, 0.2, 1e-6, cfg.integrator);
        OptimizeResult r = polish_drive(g.sys, p, cfg.optimizer.polish, cfg.integrator);
        if (evals) {
            *evals = r.evaluations;
        }
        return {r.pulse, r.gate, drive_frequency(g.sys, r.pulse), static_cast<int>(r.evaluations.size())};
    }
    PulseSpec p = PulseSpec::from_gate_time(t_g);
    p.drag_scale = cfg.pulse.drag_scale;
    p.drag_alpha = cfg.pulse.drag_alpha;
    const double det = optimal_detuning(phase_model_inputs(g), p.tau);
    p.detuning = det;
    const double amp = calibrate_amplitude(g.sys, p, 0.2, 1e-6, cfg.integrator);
    OptimizeResult r = optimize_drive(g.sys, p, amp, det, cfg.optimizer.grid, cfg.integrator);
    if (evals) {
        *evals = r.evaluations;
    }
    return {r.pulse, r.gate, drive_frequency(g.sys, r.pulse), static_cast<int>(r.evaluations.size())};
}

inline StageOutput stage_spectrum(const RunConfig &cfg) {
    const DressedSpectrum full = build_composite(cfg.resolved_circuit());
    const DressedSpectrum s = truncate_dressed(full, cfg.truncation);
    StageOutput o;
    o.table.columns = {"index", "a", "c", "b", "energy_ghz", "overlap"};
    json states = json::array();
    for (int i = 0; i < s.truncation_dim; ++i) {
        const Label l = s.labels[i];
        states.push_back({{"index", i}, {"label", to_json(l)}, {"energy", s.energies(i)}, {"overlap", s.overlaps[i]}});
        o.table.add({i, l.a, l.c, l.b, s.energies(i), s.overlaps[i]});
    }
    o.result = {{"dims", s.dims}, {"truncation", s.truncation_dim}, {"states", states}};
    return o;
}

inline StageOutput stage_constants(const RunConfig &cfg) {
    const CircuitSpec spec = cfg.resolved_circuit();
    const DressedSpectrum full = build_composite(spec);
    const InteractionConstants k = interaction_constants(full);
    const PerturbationInputs p = perturbation_inputs(spec);
    const PlasmonCouplerModel m = plasmon_coupler_model(p);
    const ChiSet jc = chi_jc_model(m, corrections_03(p));
    const EtaEstimates eta = eta_perturbative(p);
    StageOutput o;
    o.result = {{"exact", to_json(k)},
                {"model", {{"chi", jc.chi}, {"chi_00", jc.chi_00}, {"chi_01", jc.chi_01}, {"chi_10", jc.chi_10},
                           {"alpha_fourth_order", alpha_fourth_order(m)}, {"alpha_jc", jc_truncated_alpha(m)},
                           {"eta2", eta.eta2}, {"eta3", eta.eta3}, {"eta3_compact", eta.eta3_compact}}}};
    o.table.columns = {"quantity", "exact_ghz", "model_ghz"};
    o.table.add({"chi", k.chi, jc.chi});
    o.table.add({"chi_00", k.chi_00, jc.chi_00});
    o.table.add({"chi_01", k.chi_01, jc.chi_01});
    o.table.add({"chi_10", k.chi_10, jc.chi_10});
    o.table.add({"alpha", k.alpha, alpha_fourth_order(m)});
    o.table.add({"eta", k.eta, eta.total()});
    o.table.add({"h_a", k.h_a, json()});
    o.table.add({"h_b", k.h_b, json()});
    return o;
}

inline StageOutput stage_perturb_compare(const RunConfig &cfg) {
    const CircuitSpec base = cfg.resolved_circuit();
    std::vector<double> omegas = cfg.sweep.values;
    if (cfg.sweep.kind != SweepKind::CouplerFrequency || omegas.empty()) {
        omegas.clear();
        for (int i = 0; i <= 6; ++i) {
            omegas.push_back(6.6 + 0.1 * i);
        }
    }
    StageOutput o;
    o.table.columns = {"omega_c", "chi_exact", "chi_00_exact", "chi_01_exact", "chi_10_exact", "chi_model", "chi_00_model",
                       "chi_01_model", "chi_10_model", "dchi_00_exact", "dchi_01_exact", "dchi_10_exact",
                       "dchi_00_model", "dchi_01_model", "dchi_10_model", "alpha_exact", "alpha_fourth_order",
                       "alpha_jc", "eta_exact", "eta2", "eta3"};
    const int n = static_cast<int>(omegas.size());
    std::vector<std::vector<json>> rows(n);
    parallel_for(n, cfg.workers, [&](int i) {
        CircuitSpec spec = base;
        spec.resonator.omega_c = omegas[i];
        const InteractionConstants k = interaction_constants(build_composite(spec));
        const PerturbationInputs p = perturbation_inputs(spec);
        const PlasmonCouplerModel m = plasmon_coupler_model(p);
        const ChiSet c = chi_jc_model(m, corrections_03(p));
        const EtaEstimates e = eta_perturbative(p);
        rows[i] = {omegas[i], k.chi, k.chi_00, k.chi_01, k.chi_10, c.chi, c.chi_00, c.chi_01, c.chi_10,
                   k.dchi_00(), k.dchi_01(), k.dchi_10(), c.chi - c.chi_00, c.chi - c.chi_01, c.chi - c.chi_10,
                   k.alpha, alpha_fourth_order(m), jc_truncated_alpha(m), k.eta, e.eta2, e.eta3};
    });
    for (auto &r : rows) {
        o.table.add(std::move(r));
    }
    CircuitSpec no_ab = base;
    no_ab.j_ab = 0.0;
    const double eta_exact = interaction_constants(build_composite(base)).eta;
    const double eta_exact0 = interaction_constants(build_composite(no_ab)).eta;
    const EtaEstimates e = eta_perturbative(perturbation_inputs(base));
    const ZzSolution pair = solve_zz_cancellation(perturbation_inputs(base));
    const ZzSolution four = solve_zz_cancellation(perturbation_inputs(base), true);
    o.result = {{"eta", {{"exact", eta_exact}, {"exact_without_j_ab", eta_exact0},
                         {"exact_j_ab_part", eta_exact - eta_exact0}, {"eta2", e.eta2}, {"eta2_summary", e.eta2_summary},
                         {"eta3", e.eta3}, {"eta3_101", e.eta3_101}, {"eta3_compact", e.eta3_compact},
                         {"perturbative_total", e.total()}}},
                {"zz_cancellation", {{"j_ab_pair_form", pair.j_ab}, {"j_ab_four_term", four.j_ab},
                                     {"warning", pair.warning}}},
                {"points", n}};
    return o;
}

inline StageOutput stage_gate(const RunConfig &cfg) {
    const GateSetup g = make_gate_setup(cfg.resolved_circuit(), cfg.truncation);
    const PulseSpec p = prepare_pulse(cfg, g, cfg.pulse.t_gate());
    const double omega_d = drive_frequency(g.sys, p);
    const EvolutionResult ev = evolve_computational(g.sys, p, omega_d, cfg.integrator);
    const GateResult r = gate_result(g.sys, ev);
    const StarkPrediction sp = stark_phases(phase_model_inputs(g, p.amplitude, p.tau), p.tau, p.detuning);
    StageOutput o;
    o.result = {{"pulse", to_json(p)}, {"omega_d", omega_d}, {"gate", to_json(r)},
                {"analytic_phases", {sp.phi_00, sp.phi_01, sp.phi_10, sp.phi_11}}, {"analytic_phi_rel", sp.phi_rel},
                {"eta", g.sys.eta}};
    o.table.columns = {"state", "phase_numeric", "phase_analytic", "leakage"};
    const char *names[] = {"00", "01", "10", "11"};
    const double an[] = {sp.phi_00, sp.phi_01, sp.phi_10, sp.phi_11};
    for (int k = 0; k < 4; ++k) {
        o.table.add({names[k], r.phases[k], an[k], r.leakage_per_state[k]});
    }
    return o;
}

inline StageOutput stage_optimize(const RunConfig &cfg) {
    const GateSetup g = make_gate_setup(cfg.resolved_circuit(), cfg.truncation);
    const double tg = cfg.pulse.t_gate();
    const CalibratedGate res = calibrate_resonant(g, tg, cfg.integrator);
    std::vector<GridPoint> evals;
    const CalibratedGate opt = optimize(cfg, g, tg, &evals);
    StageOutput o;
    o.result = {{"pulse", to_json(opt.pulse)}, {"omega_d", opt.omega_d}, {"gate", to_json(opt.gate)},
                {"resonant", {{"pulse", to_json(res.pulse)}, {"gate", to_json(res.gate)}}},
                {"reduction", res.gate.infidelity / opt.gate.infidelity}, {"evaluations", opt.evaluations}};
    o.table.columns = {"amplitude", "detuning", "drag_scale", "infidelity", "leakage"};
    for (const auto &e : evals) {
        o.table.add({e.amplitude, e.detuning, e.drag_scale, e.infidelity, e.leakage});
    }
    return o;
}

inline StageOutput stage_sweep_tg(const RunConfig &cfg) {
    require(cfg.sweep.kind == SweepKind::GateTime, "config: stage sweep-tg needs sweep.kind = \"gate-time\"");
    const GateSetup g = make_gate_setup(cfg.resolved_circuit(), cfg.truncation);
    const auto &tgs = cfg.sweep.values;
    const int n = static_cast<int>(tgs.size());
    std::vector<std::vector<json>> rows(n);
    parallel_for(n, cfg.workers, [&](int i) {
        const CalibratedGate res = calibrate_resonant(g, tgs[i], cfg.integrator);
        const CalibratedGate opt = optimize(cfg, g, tgs[i]);
        rows[i] = {tgs[i], res.gate.infidelity, opt.gate.infidelity, opt.gate.leakage, opt.gate.phi_rel,
                   opt.pulse.amplitude, opt.pulse.detuning};
    });
    StageOutput o;
    o.table.columns = {"t_gate", "resonant_infidelity", "infidelity", "leakage", "phi_rel", "amplitude", "detuning"};
    for (auto &r : rows) {
        o.table.add(std::move(r));
    }
    o.result = {{"points", n}};
    return o;
}

inline StageOutput stage_sweep_flux(const RunConfig &cfg) {
    require(cfg.sweep.kind == SweepKind::Flux, "config: stage sweep-flux needs sweep.kind = \"flux\"");
    const CircuitSpec base = cfg.resolved_circuit();
    const GateSetup g = make_gate_setup(base, cfg.truncation);
    std::vector<double> offsets;
    for (double u : cfg.sweep.values) {
        offsets.push_back(micro_flux_to_phase(u));
    }
    StageOutput o;
    o.table.columns = {"t_gate", "offset_micro_phi0", "offset_rad", "infidelity", "leakage", "phi_rel"};
    json nominal = json::array();
    for (double tg : cfg.sweep.gate_times) {
        const CalibratedGate cal = optimize(cfg, g, tg);
        nominal.push_back({{"t_gate", tg}, {"pulse", to_json(cal.pulse)}, {"infidelity", cal.gate.infidelity}});
        for (const auto &pt : flux_offset_sweep(base, offsets, cal, cfg.truncation, cfg.sweep.flux_target, cfg.workers,
                                                cfg.integrator)) {
            o.table.add({tg, pt.offset_micro, pt.offset, pt.infidelity, pt.leakage, pt.phi_rel});
        }
    }
    const double sigma = flux_sigma(cfg.noise);
    o.result = {{"nominal", nominal}, {"sigma_micro_phi0", sigma}, {"sigma_markers", {-sigma, sigma}}};
    return o;
}

inline StageOutput stage_sweep_ej(const RunConfig &cfg) {
    require(cfg.sweep.kind == SweepKind::EJ, "config: stage sweep-ej needs sweep.kind = \"ej\" (values are relative offsets)");
    const CircuitSpec base = cfg.resolved_circuit();
    std::vector<double> ej;
    for (double v : cfg.sweep.values) {
        ej.push_back(base.fluxonium_a.e_j * (1.0 + v));
    }
    EjSweepOptions opt;
    opt.polish = cfg.optimizer.polish;
    opt.workers = cfg.workers;
    opt.integ = cfg.integrator;
    StageOutput o;
    o.table.columns = {"e_j_a", "t_gate", "infidelity", "fixed_infidelity", "leakage", "phi_rel"};
    for (const auto &pt : ej_sweep(base, ej, cfg.sweep.gate_times, cfg.truncation, opt)) {
        o.table.add({pt.e_j, pt.t_g, pt.infidelity, pt.fixed_infidelity, pt.leakage, pt.phi_rel});
    }
    o.result = {{"nominal_e_j_a", base.fluxonium_a.e_j}};
    return o;
}

inline StageOutput stage_lindblad(const RunConfig &cfg) {
    if (!cfg.dissipation) {
        throw ConfigError("config: missing required field 'dissipation' for stage lindblad");
    }
    const DissipationSet &set = *cfg.dissipation;
    const GateSetup g = make_gate_setup(cfg.resolved_circuit(), cfg.truncation);
    const double tg = cfg.pulse.t_gate();
    PulseSpec p;
    if (cfg.optimize_detuning && cfg.calibrate_amplitude) {
        p = optimize(cfg, g, tg).pulse;
    } else {
        p = prepare_pulse(cfg, g, tg);
    }
    const double omega_d = drive_frequency(g.sys, p);
    const auto jumps = build_jump_operators(g.truncated, set);
    const OpenGateResult r = error_budget(g.sys, jumps, p, omega_d, cfg.integrator, cfg.open_method);
    const LossEstimates est = loss_estimates(g.truncated, set, p.tau);
    StageOutput o;
    json budget = json::object();
    o.table.columns = {"channel", "budget", "estimate"};
    const double ests[] = {est.fluxon, est.plasmon, est.coupler};
    for (int c = 0; c < kChannels; ++c) {
        budget[channel_name(static_cast<Channel>(c))] = r.budget[c];
        o.table.add({channel_name(static_cast<Channel>(c)), r.budget[c], ests[c]});
    }
    o.table.add({"coherent", r.coherent, json()});
    o.table.add({"total", r.infidelity, est.total() + r.coherent});
    o.result = {{"set", {{"label", set.label}, {"q_factor", set.q_factor}, {"t1_fluxon_ms", set.t1_fluxon_ms},
                         {"t1_plasmon_us", set.t1_plasmon_us}, {"temperature_mk", set.temperature_mk}}},
                {"method", cfg.open_method == OpenMethod::FirstOrder ? "first-order" : "master-equation"},
                {"pulse", to_json(p)},
                {"infidelity", r.infidelity},
                {"coherent", r.coherent},
                {"incoherent", r.incoherent},
                {"leakage", r.leakage},
                {"budget", budget},
                {"estimates", {{"fluxon", est.fluxon}, {"plasmon", est.plasmon}, {"coupler", est.coupler}}},
                {"trace_error", r.trace_error},
                {"virtual_z", r.virtual_z}};
    return o;
}

inline StageOutput stage_capnet(const RunConfig &cfg) {
    if (cfg.source != CircuitSource::Network) {
        throw ConfigError("config: missing required field 'network' for stage capnet");
    }
    const NetworkSource &src = cfg.network;
    const EffectiveCircuit e = effective_circuit(src.network);
    const double n01 = resonator_charge_zpf(e.z_c_out);
    StageOutput o;
    o.result = {{"effective", to_json(e)}, {"n_c01", n01}, {"j_c_n_c01", std::abs(e.j_ac) * n01}};
    const json &x = cfg.expected;
    o.table.columns = {"quantity", "value", "printed"};
    auto add = [&](const char *name, double v, const char *key) {
        o.table.add({name, v, x.contains(key) ? x.at(key) : json()});
    };
    add("e_c", e.e_c_a, "e_c");
    add("z_c", e.z_c_out, "z_c");
    add("j_c", std::abs(e.j_ac), "j_c");
    add("j_c_n_c01", std::abs(e.j_ac) * n01, "j_c_n_c01");
    add("j_ab", std::abs(e.j_ab), "j_ab");
    if (src.zz_threshold > 0) {
        const CabBound b = zz_bound_cab(src.network, src.base, src.zz_threshold);
        o.result["c_ab_bound"] = {{"c_ab", b.c_ab}, {"eta_nominal", b.eta_nominal}, {"evaluations", b.evaluations},
                                  {"threshold", src.zz_threshold}};
        add("c_ab_bound", b.c_ab, "c_ab_bound");
    }
    return o;
}

}  // namespace detail

/// Result bundle writer. Every bundle carries the merged config, versions, and timing.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {}

    const RunConfig &config() const { return cfg_; }

    /// Runs one stage and writes <out>/<stage>.json and <out>/<stage>.csv. Returns the bundle.
    json run(const std::string &stage) {
        const auto t0 = std::chrono::steady_clock::now();
        StageOutput o = dispatch(stage);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json bundle = {{"stage", stage},
                       {"config", cfg_.echo},
                       {"config_hash", config_hash(cfg_.echo)},
                       {"versions", versions()},
                       {"timing", {{"wall_seconds", wall}, {"workers", cfg_.workers}}},
                       {"result", o.result}};
        std::filesystem::create_directories(cfg_.output_dir);
        const std::filesystem::path dir(cfg_.output_dir);
        if (cfg_.write_json) {
            std::ofstream(dir / (stage + ".json")) << bundle.dump(2) << "\n";
        }
        if (cfg_.write_csv && !o.table.columns.empty()) {
            write_csv(o.table, dir / (stage + ".csv"));
        }
        return bundle;
    }

private:
    StageOutput dispatch(const std::string &stage) {
        if (stage == "spectrum") return detail::stage_spectrum(cfg_);
        if (stage == "constants") return detail::stage_constants(cfg_);
        if (stage == "perturb-compare") return detail::stage_perturb_compare(cfg_);
        if (stage == "gate") return detail::stage_gate(cfg_);
        if (stage == "optimize") return detail::stage_optimize(cfg_);
        if (stage == "sweep-tg") return detail::stage_sweep_tg(cfg_);
        if (stage == "sweep-flux") return detail::stage_sweep_flux(cfg_);
        if (stage == "sweep-ej") return detail::stage_sweep_ej(cfg_);
        if (stage == "lindblad") return detail::stage_lindblad(cfg_);
        if (stage == "capnet") return detail::stage_capnet(cfg_);
        if (stage == "fit-scaling") return fit_scaling();
        throw ConfigError("unknown stage '" + stage + "'");
    }

    /// Uses fit.input when given, else the sweep-tg output in the output directory,
    /// re-running sweep-tg when its cached bundle was produced by a different config.
    StageOutput fit_scaling() {
        std::filesystem::path input = cfg_.fit_input;
        if (input.empty()) {
            const std::filesystem::path dir(cfg_.output_dir);
            input = dir / "sweep-tg.csv";
            bool fresh = false;
            std::ifstream cached(dir / "sweep-tg.json");
            if (cached && std::filesystem::exists(input)) {
                const json b = json::parse(cached, nullptr, false);
                fresh = !b.is_discarded() && b.value("config_hash", "") == config_hash(cfg_.echo);
            }
            if (!fresh) {
                run("sweep-tg");
            }
        }
        const CsvTable t = read_csv(input);
        auto column = [&](const std::string &name) {
            for (size_t i = 0; i < t.columns.size(); ++i) {
                if (t.columns[i] == name) {
                    return i;
                }
            }
            throw ConfigError(input.string() + ": missing column '" + name + "'");
        };
        const size_t ct = column("t_gate"), ce = column("infidelity");
        std::vector<double> x, y;
        for (const auto &r : t.rows) {
            x.push_back(r[ct].get<double>());
            y.push_back(r[ce].get<double>());
        }
        const PowerLawFit f = fit_power_law(x, y);
        StageOutput o;
        o.result = {{"input", input.string()}, {"exponent", f.exponent}, {"sigma", f.sigma},
                    {"prefactor", f.prefactor}, {"points", f.points}};
        o.table.columns = {"t_gate", "infidelity", "fit"};
        for (size_t i = 0; i < x.size(); ++i) {
            o.table.add({x[i], y[i], f.prefactor * std::pow(x[i], f.exponent)});
        }
        return o;
    }

    RunConfig cfg_;
};

}  // namespace fluxcz
