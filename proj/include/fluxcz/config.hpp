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

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxcz/capnet.hpp"
#include "fluxcz/composite.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/lindblad.hpp"
#include "fluxcz/propagator.hpp"
#include "fluxcz/pulse.hpp"
#include "fluxcz/robustness.hpp"

namespace fluxcz {

using json = nlohmann::json;

enum class CircuitSource { Circuit, Network };
enum class OptimizerMethod { Polish, Grid };
enum class SweepKind { None, GateTime, Flux, EJ, CouplerFrequency };

struct SweepSpec {
    SweepKind kind = SweepKind::None;
    std::vector<double> values;      // gate times (ns), flux offsets (micro Phi0), relative E_J offsets, or omega_c (GHz)
    std::vector<double> gate_times;  // flux and E_J sweeps
    FluxTarget flux_target = FluxTarget::A;
};

struct OptimizerSpec {
    OptimizerMethod method = OptimizerMethod::Polish;
    PolishSpec polish;
    GridSpec grid;
};

struct NetworkSource {
    CapacitanceNetwork network;
    CircuitSpec base;  // inductive parameters and truncation
    double zz_threshold = 4e-6;  // GHz; <= 0 skips the C_AB bound
};

struct RunConfig {
    std::vector<std::string> presets;
    CircuitSource source = CircuitSource::Circuit;
    CircuitSpec circuit;
    NetworkSource network;
    PulseSpec pulse;
    bool calibrate_amplitude = true;   // pulse.amplitude is 0 in the file
    bool optimize_detuning = false;    // pulse.detuning is "auto"
    std::optional<DissipationSet> dissipation;
    OpenMethod open_method = OpenMethod::FirstOrder;
    SweepSpec sweep;
    OptimizerSpec optimizer;
    NoiseSpec noise;
    IntegratorSpec integrator;
    int truncation = 45;
    std::string output_dir = "out";
    bool write_json = true;
    bool write_csv = true;
    int workers = 1;
    std::string fit_input;
    json expected = json::object();  // printed reference values carried by presets
    json echo;                        // fully merged document

    /// Circuit that the pipeline runs on; networks are converted through capnet.
    CircuitSpec resolved_circuit() const {
        if (source == CircuitSource::Circuit) {
            return circuit;
        }
        return apply_effective(effective_circuit(network.network), network.base);
    }
};

namespace detail {

/// Field reader that names the full path in every error.
class Reader {
public:
    Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError("config: '" + path_ + "' must be an object");
        }
    }

    bool has(const std::string &key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string &key, std::optional<double> fallback = std::nullopt) const {
        used_.insert(key);
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            throw ConfigError("config: missing required field '" + at(key) + "'");
        }
        const json &v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError("config: field '" + at(key) + "' must be a number");
        }
        return v.get<double>();
    }

    int integer(const std::string &key, int fallback) const {
        used_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError("config: field '" + at(key) + "' must be an integer");
        }
        return v.get<int>();
    }

    bool boolean(const std::string &key, bool fallback) const {
        used_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        if (!j_.at(key).is_boolean()) {
            throw ConfigError("config: field '" + at(key) + "' must be true or false");
        }
        return j_.at(key).get<bool>();
    }

    std::string string(const std::string &key, const std::string &fallback) const {
        used_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        if (!j_.at(key).is_string()) {
            throw ConfigError("config: field '" + at(key) + "' must be a string");
        }
        return j_.at(key).get<std::string>();
    }

    std::vector<double> numbers(const std::string &key) const {
        used_.insert(key);
        std::vector<double> v;
        if (!has(key)) {
            return v;
        }
        const json &a = j_.at(key);
        if (!a.is_array()) {
            throw ConfigError("config: field '" + at(key) + "' must be an array of numbers");
        }
        for (size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number()) {
                throw ConfigError("config: field '" + at(key) + "[" + std::to_string(i) + "]' must be a number");
            }
            v.push_back(a[i].get<double>());
        }
        return v;
    }

    Reader child(const std::string &key) const {
        used_.insert(key);
        return Reader(j_.at(key), at(key));
    }

    const json &raw(const std::string &key) const {
        used_.insert(key);
        return j_.at(key);
    }

    void mark(const std::string &key) const { used_.insert(key); }

    /// Rejects keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError("config: unknown field '" + at(it.key()) + "'");
            }
        }
    }

private:
    const json &j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

template<class E>
E choose(const Reader &r, const std::string &key, const std::vector<std::pair<std::string, E>> &options, E fallback) {
    if (!r.has(key)) {
        r.string(key, "");
        return fallback;
    }
    const std::string v = r.string(key, "");
    for (const auto &[name, e] : options) {
        if (name == v) {
            return e;
        }
    }
    std::string allowed;
    for (const auto &o : options) {
        allowed += (allowed.empty() ? "" : ", ") + o.first;
    }
    throw ConfigError("config: field '" + r.at(key) + "' must be one of: " + allowed);
}

inline FluxoniumSpec read_fluxonium(const Reader &r) {
    FluxoniumSpec f;
    f.e_c = r.number("e_c");
    f.e_j = r.number("e_j");
    f.e_l = r.number("e_l");
    f.phi_ext = r.number("phi_ext", kPi);
    f.basis_dim = r.integer("basis_dim", f.basis_dim);
    r.finish();
    return f;
}

inline void read_truncation(const json &root, CircuitSpec &c, int &dressed) {
    if (!root.contains("truncation")) {
        return;
    }
    Reader t(root.at("truncation"), "truncation");
    c.fluxonium_levels = t.integer("fluxonium_levels", c.fluxonium_levels);
    c.resonator.basis_dim = t.integer("coupler_levels", c.resonator.basis_dim);
    dressed = t.integer("dressed", dressed);
    t.finish();
}

inline CircuitSpec read_circuit(const Reader &r) {
    CircuitSpec c;
    c.fluxonium_a = read_fluxonium(r.child("fluxonium_a"));
    c.fluxonium_b = read_fluxonium(r.child("fluxonium_b"));
    Reader res = r.child("resonator");
    c.resonator.omega_c = res.number("omega_c");
    c.resonator.impedance = res.number("impedance");
    res.finish();
    c.j_ac = r.number("j_ac");
    c.j_bc = r.number("j_bc");
    c.j_ab = r.number("j_ab");
    r.finish();
    return c;
}

inline NetworkSource read_network(const Reader &r) {
    NetworkSource n;
    CapacitanceNetwork &net = n.network;
    net.topology = choose<Topology>(r, "topology", {{"grounded", Topology::Grounded}, {"differential", Topology::Differential}},
                                    Topology::Grounded);
    net.c_f = r.number("c_f");
    net.c_fp = r.number("c_fp", 0.0);
    net.c_c = r.number("c_c");
    net.c_ab = r.number("c_ab");
    net.z_in = r.number("z_in");
    net.omega = r.number("omega");
    net.omega_input = choose<OmegaInput>(r, "omega_input", {{"loaded", OmegaInput::Loaded}, {"design", OmegaInput::Design}},
                                         OmegaInput::Loaded);
    n.zz_threshold = r.number("zz_threshold_khz", 4.0) * 1e-6;
    Reader ind = r.child("inductive");
    n.base.fluxonium_a.e_j = ind.number("e_j_a");
    n.base.fluxonium_b.e_j = ind.number("e_j_b");
    n.base.fluxonium_a.e_l = ind.number("e_l_a");
    n.base.fluxonium_b.e_l = ind.number("e_l_b");
    ind.finish();
    r.finish();
    net.validate();
    return n;
}

inline DissipationSet read_dissipation(const Reader &r, OpenMethod &method) {
    DissipationSet d;
    if (r.has("preset")) {
        d = dissipation_preset(r.string("preset", ""));
    }
    d.label = r.string("label", d.label);
    d.q_factor = r.number("q_factor", d.q_factor);
    d.t1_fluxon_ms = r.number("t1_fluxon_ms", d.t1_fluxon_ms);
    d.t1_plasmon_us = r.number("t1_plasmon_us", d.t1_plasmon_us);
    d.temperature_mk = r.number("temperature_mk", d.temperature_mk);
    method = choose<OpenMethod>(r, "method", {{"first-order", OpenMethod::FirstOrder}, {"master-equation", OpenMethod::MasterEquation}},
                                OpenMethod::FirstOrder);
    r.finish();
    d.validate();
    return d;
}

}  // namespace detail

/// Preset fragments are JSON files named <preset>.json in `preset_dir`.
inline json load_preset(const std::string &name, const std::filesystem::path &preset_dir) {
    const auto path = preset_dir / (name + ".json");
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: unknown preset '" + name + "' (no " + path.string() + ")");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config: preset '" + name + "' does not parse: " + e.what());
    }
}

/// Applies "a.b.c=value". The value is parsed as JSON when possible, otherwise taken as a string.
inline void apply_override(json &doc, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("config: override '" + assignment + "' must look like key.path=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    json *node = &doc;
    size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            throw ConfigError("config: override key '" + key + "' has an empty component");
        }
        if (!node->is_object()) {
            throw ConfigError("config: override '" + key + "' descends into a non-object");
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        if (node->is_null()) {
            *node = json::object();
        }
        start = dot + 1;
    }
}

/// Preset expansion, then the document itself, then overrides; later layers win key by key.
inline json merge_config(const json &doc, const std::vector<std::string> &extra_presets,
                         const std::vector<std::string> &overrides, const std::filesystem::path &preset_dir) {
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    std::vector<std::string> names;
    if (doc.contains("preset")) {
        const json &p = doc.at("preset");
        if (p.is_string()) {
            names.push_back(p.get<std::string>());
        } else if (p.is_array()) {
            for (const auto &x : p) {
                if (!x.is_string()) {
                    throw ConfigError("config: field 'preset' must hold preset names");
                }
                names.push_back(x.get<std::string>());
            }
        } else {
            throw ConfigError("config: field 'preset' must be a string or an array of strings");
        }
    }
    names.insert(names.end(), extra_presets.begin(), extra_presets.end());
    json merged = json::object();
    auto layer = [&merged](const json &frag) {
        if (frag.contains("circuit") && merged.contains("network")) {
            merged.erase("network");
        }
        if (frag.contains("network") && merged.contains("circuit")) {
            merged.erase("circuit");
        }
        merged.merge_patch(frag);
    };
    for (const auto &n : names) {
        layer(load_preset(n, preset_dir));
    }
    json body = doc;
    body.erase("preset");
    layer(body);
    for (const auto &o : overrides) {
        apply_override(merged, o);
    }
    merged["preset"] = names;
    return merged;
}

/// Validates a merged document into a RunConfig.
inline RunConfig parse_config(const json &merged) {
    RunConfig c;
    c.echo = merged;
    detail::Reader root(merged, "");
    if (root.has("preset")) {
        for (const auto &p : root.raw("preset")) {
            c.presets.push_back(p.get<std::string>());
        }
    }
    const bool has_circuit = root.has("circuit"), has_network = root.has("network");
    if (has_circuit == has_network) {
        throw ConfigError(has_circuit ? "config: give exactly one of 'circuit' and 'network', not both"
                                      : "config: missing required field 'circuit' (or 'network')");
    }
    if (has_circuit) {
        c.source = CircuitSource::Circuit;
        c.circuit = detail::read_circuit(root.child("circuit"));
        detail::read_truncation(merged, c.circuit, c.truncation);
        c.circuit.validate();
    } else {
        c.source = CircuitSource::Network;
        c.network = detail::read_network(root.child("network"));
        detail::read_truncation(merged, c.network.base, c.truncation);
    }
    root.mark("truncation");
    require(c.truncation >= 16, "config: field 'truncation.dressed' must be >= 16");

    if (root.has("pulse")) {
        detail::Reader p = root.child("pulse");
        const double tg = p.number("t_gate", 100.0);
        require(tg > 0, "config: field 'pulse.t_gate' must be positive");
        c.pulse = PulseSpec::from_gate_time(tg);
        c.pulse.amplitude = p.number("amplitude", 0.0);
        c.calibrate_amplitude = c.pulse.amplitude == 0.0;
        if (p.has("detuning") && p.raw("detuning").is_string()) {
            if (p.string("detuning", "") != "auto") {
                throw ConfigError("config: field 'pulse.detuning' must be a number or \"auto\"");
            }
            c.optimize_detuning = true;
        } else {
            c.pulse.detuning = p.number("detuning", 0.0);
        }
        c.pulse.drag_scale = p.number("drag_scale", 0.0);
        c.pulse.drag_alpha = p.number("drag_alpha", c.pulse.drag_alpha);
        c.pulse.amplitude_scale = p.number("amplitude_scale", 1.0);
        p.finish();
    } else {
        c.pulse = PulseSpec::from_gate_time(100.0);
    }
    c.pulse.validate();

    if (root.has("dissipation")) {
        c.dissipation = detail::read_dissipation(root.child("dissipation"), c.open_method);
    }

    if (root.has("sweep")) {
        detail::Reader s = root.child("sweep");
        c.sweep.kind = detail::choose<SweepKind>(s, "kind",
                                                 {{"none", SweepKind::None}, {"gate-time", SweepKind::GateTime},
                                                  {"flux", SweepKind::Flux}, {"ej", SweepKind::EJ},
                                                  {"coupler-frequency", SweepKind::CouplerFrequency}},
                                                 SweepKind::None);
        c.sweep.values = s.numbers("values");
        c.sweep.gate_times = s.numbers("gate_times");
        c.sweep.flux_target = detail::choose<FluxTarget>(s, "flux_target", {{"A", FluxTarget::A}, {"B", FluxTarget::B}, {"both", FluxTarget::Both}},
                                                         FluxTarget::A);
        s.finish();
        if (c.sweep.kind != SweepKind::None && c.sweep.values.empty()) {
            throw ConfigError("config: field 'sweep.values' must be non-empty");
        }
        if ((c.sweep.kind == SweepKind::Flux || c.sweep.kind == SweepKind::EJ) && c.sweep.gate_times.empty()) {
            throw ConfigError("config: field 'sweep.gate_times' must be non-empty for this sweep kind");
        }
    }

    if (root.has("optimizer")) {
        detail::Reader o = root.child("optimizer");
        c.optimizer.method = detail::choose<OptimizerMethod>(o, "method", {{"polish", OptimizerMethod::Polish}, {"grid", OptimizerMethod::Grid}},
                                                             OptimizerMethod::Polish);
        PolishSpec &ps = c.optimizer.polish;
        ps.amp_step = o.number("amp_step", ps.amp_step);
        ps.det_step = o.number("det_step", ps.det_step);
        ps.size_tol = o.number("size_tol", ps.size_tol);
        ps.max_iterations = o.integer("max_iterations", ps.max_iterations);
        GridSpec &g = c.optimizer.grid;
        g.amp_span = o.number("amp_span", g.amp_span);
        g.amp_points = o.integer("amp_points", g.amp_points);
        g.det_span = o.number("det_span", g.det_span);
        g.det_points = o.integer("det_points", g.det_points);
        g.refine_factor = o.integer("refine_factor", g.refine_factor);
        g.drag_values = o.numbers("drag_values");
        o.finish();
    }

    if (root.has("noise")) {
        detail::Reader n = root.child("noise");
        c.noise.amplitude = n.number("amplitude", c.noise.amplitude);
        c.noise.f_low = n.number("f_low", c.noise.f_low);
        c.noise.f_high = n.number("f_high", c.noise.f_high);
        c.noise.convention = detail::choose<NoiseConvention>(n, "convention",
                                                             {{"log-ratio", NoiseConvention::LogRatio},
                                                              {"angular-per-hz", NoiseConvention::AngularPerHz},
                                                              {"two-sided", NoiseConvention::TwoSided}},
                                                             NoiseConvention::LogRatio);
        n.finish();
        c.noise.validate();
    }

    if (root.has("integrator")) {
        detail::Reader i = root.child("integrator");
        c.integrator.steps_per_period = i.number("steps_per_period", c.integrator.steps_per_period);
        c.integrator.step = i.number("step", 0.0);
        c.integrator.frame = detail::choose<Frame>(i, "frame", {{"interaction", Frame::Interaction}, {"lab", Frame::Lab}},
                                                   Frame::Interaction);
        c.integrator.norm_tol = i.number("norm_tol", c.integrator.norm_tol);
        i.finish();
        require(c.integrator.steps_per_period >= 40.0, "config: field 'integrator.steps_per_period' must be >= 40");
        require(c.integrator.step >= 0.0, "config: field 'integrator.step' must be >= 0");
    }

    if (root.has("output")) {
        detail::Reader o = root.child("output");
        c.output_dir = o.string("dir", c.output_dir);
        c.write_json = o.boolean("json", true);
        c.write_csv = o.boolean("csv", true);
        o.finish();
    }
    c.workers = root.integer("workers", 1);
    require(c.workers >= 1, "config: field 'workers' must be >= 1");
    if (root.has("fit")) {
        detail::Reader f = root.child("fit");
        c.fit_input = f.string("input", "");
        f.finish();
    }
    if (root.has("expected")) {
        c.expected = root.raw("expected");
    }
    root.string("description", "");
    root.finish();
    return c;
}

/// Reads a config file, expands presets and applies overrides.
inline RunConfig load_config(const std::filesystem::path &path, const std::filesystem::path &preset_dir,
                             const std::vector<std::string> &extra_presets = {},
                             const std::vector<std::string> &overrides = {}) {
    json doc = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("config: cannot open " + path.string());
        }
        try {
            doc = json::parse(in, nullptr, true, true);
        } catch (const json::parse_error &e) {
            throw ConfigError("config: " + path.string() + " does not parse: " + e.what());
        }
    }
    return parse_config(merge_config(doc, extra_presets, overrides, preset_dir));
}

}  // namespace fluxcz
