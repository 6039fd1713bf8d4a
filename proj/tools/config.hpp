#pragma once

// Scenario configuration: strict JSON reader, validation and the normalized echo.

#include "oamclone/oamclone.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oamclone::cli {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// exit 2
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// exit 3
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { hom, clone, qudit, experiment, stokes };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::hom: return "hom";
        case Scenario::clone: return "clone";
        case Scenario::qudit: return "qudit";
        case Scenario::experiment: return "experiment";
        case Scenario::stokes: return "stokes";
    }
    return "?";
}

inline std::optional<Scenario> scenario_from_string(const std::string& s) {
    for (Scenario x : {Scenario::hom, Scenario::clone, Scenario::qudit, Scenario::experiment, Scenario::stokes})
        if (s == to_string(x)) return x;
    return std::nullopt;
}

// A qubit given either by table label or by explicit amplitudes.
struct StateEntry {
    std::string label;  // "h", "v", "-2", "+2", "a", "d" or "" for explicit
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};

    QubitSpec spec() const;
    std::string name() const;
};

struct OutputConfig {
    std::string out_dir = ".";
    std::string format = "both";
    bool svg = false;
};

struct ElementsConfig {
    bool oam_flip_on_reflection = true;
};

struct HomConfig {
    StateEntry photon_a{"+2"};
    StateEntry photon_b{"-2"};
    std::string polarization_a = "H";
    std::string polarization_b = "H";
    bool depolarize_b = false;
    double delay_min_um = -600.0;
    double delay_max_um = 600.0;
    std::int64_t steps = 121;
    double center_wavelength_nm = 795.0;
    double bandwidth_nm = 6.0;
    double baseline_counts = 0.0;  // 0: no sampling
};

inline std::vector<StateEntry> table_entries() {
    std::vector<StateEntry> out;
    for (OamQubit q : table_states()) out.push_back({to_string(q)});
    return out;
}

struct CloneConfig {
    std::vector<StateEntry> states = table_entries();
    std::int64_t random_states = 0;
    std::string ancilla = "exact";
    std::int64_t samples = 10000;
    double preparation_fidelity = 1.0;
    double enhancement = 2.0;
};

struct QuditConfig {
    std::int64_t d_min = 1;
    std::int64_t d_max = 8;
    bool oam_labels = false;
};

struct ExperimentConfig {
    double preparation_fidelity = 0.96;
    double enhancement = 1.97;
    double duration_s = 600.0;
    std::int64_t runs = 1;
    std::optional<double> coupling;
    LossBudget budget{};
};

struct StokesConfig {
    std::vector<StateEntry> states = table_entries();
    std::int64_t random_states = 0;
    double counts_per_setting = kTypicalCountsPerRun;
};

struct Config {
    std::optional<Scenario> scenario;
    std::uint64_t seed = 0;
    OutputConfig output;
    ElementsConfig elements;
    HomConfig hom;
    CloneConfig clone;
    QuditConfig qudit;
    ExperimentConfig experiment;
    StokesConfig stokes;
};

// ---------------------------------------------------------------------------

inline QubitSpec StateEntry::spec() const {
    for (OamQubit q : table_states())
        if (label == to_string(q)) return QubitSpec(q);
    return {alpha, beta};
}

inline std::string StateEntry::name() const { return label.empty() ? "custom" : label; }

inline std::optional<Jones> polarization_from_string(const std::string& s) {
    if (s == "H") return jones_H();
    if (s == "V") return jones_V();
    if (s == "L") return jones_L();
    if (s == "R") return jones_R();
    if (s == "D") return jones_linear(std::numbers::pi / 4);
    if (s == "A") return jones_linear(-std::numbers::pi / 4);
    return std::nullopt;
}

namespace detail {

inline std::string type_name(const Json& j) { return j.type_name(); }

// Object reader that remembers which keys were consumed.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(where() + ": expected an object, got " + type_name(j_));
    }

    std::string where() const { return path_.empty() ? "<root>" : path_; }
    std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const Json* find(const std::string& k) {
        seen_.insert(k);
        auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const std::string& k, double& out) {
        if (const Json* v = find(k)) out = as_double(*v, key_path(k));
    }
    void read(const std::string& k, bool& out) {
        if (const Json* v = find(k)) {
            if (!v->is_boolean()) throw mismatch(k, "a boolean", *v);
            out = v->get<bool>();
        }
    }
    void read(const std::string& k, std::string& out) {
        if (const Json* v = find(k)) {
            if (!v->is_string()) throw mismatch(k, "a string", *v);
            out = v->get<std::string>();
        }
    }
    void read(const std::string& k, std::int64_t& out) {
        if (const Json* v = find(k)) {
            if (!v->is_number_integer()) throw mismatch(k, "an integer", *v);
            if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
                throw ParseError(key_path(k) + ": integer out of range");
            out = v->get<std::int64_t>();
        }
    }
    void read(const std::string& k, std::optional<double>& out) {
        if (const Json* v = find(k)) {
            if (v->is_null())
                out.reset();
            else
                out = as_double(*v, key_path(k));
        }
    }

    std::optional<Reader> sub(const std::string& k) {
        if (const Json* v = find(k)) return Reader(*v, key_path(k));
        return std::nullopt;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ParseError(where() + ": unknown key '" + it.key() + "'");
    }

    static double as_double(const Json& v, const std::string& path) {
        if (!v.is_number()) throw ParseError(path + ": expected a number, got " + type_name(v));
        return v.get<double>();
    }

private:
    ParseError mismatch(const std::string& k, const char* want, const Json& v) const {
        return ParseError(key_path(k) + ": expected " + want + ", got " + type_name(v));
    }

    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline cplx read_complex(const Json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {Reader::as_double(v[0], path + "[0]"), Reader::as_double(v[1], path + "[1]")};
    throw ParseError(path + ": expected a number or [re, im]");
}

inline StateEntry read_state(const Json& v, const std::string& path) {
    if (v.is_string()) {
        StateEntry e{v.get<std::string>()};
        bool known = false;
        for (OamQubit q : table_states()) known = known || e.label == to_string(q);
        if (!known) throw ValidationError(path + ": unknown state label '" + e.label + "' (use h, v, -2, +2, a, d)");
        return e;
    }
    Reader r(v, path);
    StateEntry e{""};
    const Json* a = r.find("alpha");
    const Json* b = r.find("beta");
    if (!a || !b) throw ParseError(path + ": explicit state needs both 'alpha' and 'beta'");
    e.alpha = read_complex(*a, path + ".alpha");
    e.beta = read_complex(*b, path + ".beta");
    r.finish();
    return e;
}

inline std::vector<StateEntry> read_states(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path + ": expected an array of states");
    std::vector<StateEntry> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_state(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline void read_budget(Reader r, LossBudget& b) {
    r.read("source_rate_hz", b.source_rate_hz);
    r.read("qplate_efficiency", b.qplate_efficiency);
    r.read("transferrer_success", b.transferrer_success);
    if (const Json* fc = r.find("fiber_coupling")) {
        const std::string p = r.key_path("fiber_coupling");
        if (!fc->is_array() || fc->size() != 2) throw ParseError(p + ": expected [lo, hi]");
        b.fiber_coupling = {Reader::as_double((*fc)[0], p + "[0]"), Reader::as_double((*fc)[1], p + "[1]")};
    }
    r.read("cloning_probability", b.cloning_probability);
    r.read("split_factor", b.split_factor);
    r.finish();
}

inline std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Parses config text; defaults fill absent keys. Throws ParseError on syntax,
/// type and unknown-key problems, ValidationError on bad labels.
inline Config parse_config(const std::string& text, const std::string& source = "<config>") {
    Json root;
    try {
        root = Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        std::string msg = e.what();
        if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw ParseError(source + ": " + detail::position(text, e.byte) + ": " + msg);
    }

    Config c;
    detail::Reader r(root, "");
    if (const Json* s = r.find("scenario")) {
        if (!s->is_string()) throw ParseError("scenario: expected a string");
        c.scenario = scenario_from_string(s->get<std::string>());
        if (!c.scenario) throw ValidationError("scenario: unknown scenario '" + s->get<std::string>() + "'");
    }
    if (const Json* s = r.find("seed")) {
        if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<std::int64_t>() < 0))
            throw ParseError("seed: expected a nonnegative 64-bit integer");
        c.seed = s->get<std::uint64_t>();
    }
    if (auto o = r.sub("output")) {
        o->read("out_dir", c.output.out_dir);
        o->read("format", c.output.format);
        o->read("svg", c.output.svg);
        o->finish();
    }
    if (auto e = r.sub("elements")) {
        e->read("oam_flip_on_reflection", c.elements.oam_flip_on_reflection);
        e->finish();
    }
    if (auto h = r.sub("hom")) {
        if (const Json* v = h->find("photon_a")) c.hom.photon_a = detail::read_state(*v, "hom.photon_a");
        if (const Json* v = h->find("photon_b")) c.hom.photon_b = detail::read_state(*v, "hom.photon_b");
        h->read("polarization_a", c.hom.polarization_a);
        h->read("polarization_b", c.hom.polarization_b);
        h->read("depolarize_b", c.hom.depolarize_b);
        h->read("delay_min_um", c.hom.delay_min_um);
        h->read("delay_max_um", c.hom.delay_max_um);
        h->read("steps", c.hom.steps);
        h->read("center_wavelength_nm", c.hom.center_wavelength_nm);
        h->read("bandwidth_nm", c.hom.bandwidth_nm);
        h->read("baseline_counts", c.hom.baseline_counts);
        h->finish();
    }
    if (auto k = r.sub("clone")) {
        if (const Json* v = k->find("states")) c.clone.states = detail::read_states(*v, "clone.states");
        k->read("random_states", c.clone.random_states);
        k->read("ancilla", c.clone.ancilla);
        k->read("samples", c.clone.samples);
        k->read("preparation_fidelity", c.clone.preparation_fidelity);
        k->read("enhancement", c.clone.enhancement);
        k->finish();
    }
    if (auto q = r.sub("qudit")) {
        q->read("d_min", c.qudit.d_min);
        q->read("d_max", c.qudit.d_max);
        q->read("oam_labels", c.qudit.oam_labels);
        q->finish();
    }
    if (auto x = r.sub("experiment")) {
        x->read("preparation_fidelity", c.experiment.preparation_fidelity);
        x->read("enhancement", c.experiment.enhancement);
        x->read("duration_s", c.experiment.duration_s);
        x->read("runs", c.experiment.runs);
        x->read("coupling", c.experiment.coupling);
        if (auto b = x->sub("budget")) detail::read_budget(*b, c.experiment.budget);
        x->finish();
    }
    if (auto s = r.sub("stokes")) {
        if (const Json* v = s->find("states")) c.stokes.states = detail::read_states(*v, "stokes.states");
        s->read("random_states", c.stokes.random_states);
        s->read("counts_per_setting", c.stokes.counts_per_setting);
        s->finish();
    }
    r.finish();
    return c;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ValidationError(field + ": " + rule);
}

inline bool finite(double x) { return std::isfinite(x); }

inline void unit_interval(double x, const std::string& field) {
    require(finite(x) && x >= 0.0 && x <= 1.0, field, "must lie in [0, 1]");
}

inline void validate_state(const StateEntry& e, const std::string& field) {
    if (!e.label.empty()) return;
    const double w = std::norm(e.alpha) + std::norm(e.beta);
    require(std::abs(w - 1.0) <= 1e-12, field, "amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
}

inline void validate_states(const std::vector<StateEntry>& s, std::int64_t random, const std::string& section) {
    for (std::size_t i = 0; i < s.size(); ++i) validate_state(s[i], section + ".states[" + std::to_string(i) + "]");
    require(random >= 0 && random <= 100000, section + ".random_states", "must lie in [0, 100000]");
    require(!s.empty() || random > 0, section + ".states", "needs at least one state");
}

inline void validate_imperfection(double fp, double r, const std::string& section) {
    require(finite(fp) && fp >= 0.5 && fp <= 1.0, section + ".preparation_fidelity", "must lie in [0.5, 1]");
    require(finite(r) && r >= 1.0 && r <= 2.0, section + ".enhancement", "must lie in [1, 2]");
}

}  // namespace detail

/// Range checks. Messages name the offending field.
inline void validate(const Config& c) {
    using namespace detail;
    require(c.output.format == "csv" || c.output.format == "json" || c.output.format == "both", "output.format",
            "must be csv, json or both");
    require(!c.output.out_dir.empty(), "output.out_dir", "must not be empty");

    const auto& h = c.hom;
    validate_state(h.photon_a, "hom.photon_a");
    validate_state(h.photon_b, "hom.photon_b");
    require(polarization_from_string(h.polarization_a).has_value(), "hom.polarization_a", "must be H, V, D, A, L or R");
    require(polarization_from_string(h.polarization_b).has_value(), "hom.polarization_b", "must be H, V, D, A, L or R");
    require(finite(h.delay_min_um), "hom.delay_min_um", "must be finite");
    require(finite(h.delay_max_um) && h.delay_max_um > h.delay_min_um, "hom.delay_max_um",
            "must be finite and exceed hom.delay_min_um");
    require(h.steps >= 2 && h.steps <= 100000, "hom.steps", "must lie in [2, 100000]");
    require(finite(h.center_wavelength_nm) && h.center_wavelength_nm > 0, "hom.center_wavelength_nm", "must be positive");
    require(finite(h.bandwidth_nm) && h.bandwidth_nm > 0 && h.bandwidth_nm < h.center_wavelength_nm, "hom.bandwidth_nm",
            "must be positive and below the center wavelength");
    require(finite(h.baseline_counts) && h.baseline_counts >= 0 && h.baseline_counts <= 1e9, "hom.baseline_counts",
            "must lie in [0, 1e9]");

    validate_states(c.clone.states, c.clone.random_states, "clone");
    require(c.clone.ancilla == "exact" || c.clone.ancilla == "monte_carlo", "clone.ancilla", "must be exact or monte_carlo");
    require(c.clone.samples >= 1 && c.clone.samples <= 10000000, "clone.samples", "must lie in [1, 1e7]");
    validate_imperfection(c.clone.preparation_fidelity, c.clone.enhancement, "clone");

    require(c.qudit.d_min >= 1 && c.qudit.d_min <= 16, "qudit.d_min", "must lie in [1, 16]");
    require(c.qudit.d_max >= c.qudit.d_min && c.qudit.d_max <= 16, "qudit.d_max", "must lie in [qudit.d_min, 16]");

    const auto& x = c.experiment;
    validate_imperfection(x.preparation_fidelity, x.enhancement, "experiment");
    require(finite(x.duration_s) && x.duration_s > 0 && x.duration_s <= 1e9, "experiment.duration_s",
            "must lie in (0, 1e9]");
    require(x.runs >= 1 && x.runs <= 100000, "experiment.runs", "must lie in [1, 100000]");
    if (x.coupling) unit_interval(*x.coupling, "experiment.coupling");
    const auto& b = x.budget;
    require(finite(b.source_rate_hz) && b.source_rate_hz > 0, "experiment.budget.source_rate_hz", "must be positive");
    unit_interval(b.qplate_efficiency, "experiment.budget.qplate_efficiency");
    unit_interval(b.transferrer_success, "experiment.budget.transferrer_success");
    unit_interval(b.fiber_coupling.lo, "experiment.budget.fiber_coupling[0]");
    unit_interval(b.fiber_coupling.hi, "experiment.budget.fiber_coupling[1]");
    require(b.fiber_coupling.lo <= b.fiber_coupling.hi, "experiment.budget.fiber_coupling", "needs lo <= hi");
    unit_interval(b.cloning_probability, "experiment.budget.cloning_probability");
    unit_interval(b.split_factor, "experiment.budget.split_factor");

    validate_states(c.stokes.states, c.stokes.random_states, "stokes");
    require(finite(c.stokes.counts_per_setting) && c.stokes.counts_per_setting > 0 && c.stokes.counts_per_setting <= 1e12,
            "stokes.counts_per_setting", "must lie in (0, 1e12]");
}

// ---------------------------------------------------------------------------
// Normalized echo. Output location is left out so that runs into different
// directories produce identical files.

namespace detail {

inline OrderedJson complex_json(cplx z) { return OrderedJson::array({z.real(), z.imag()}); }

inline OrderedJson state_json(const StateEntry& e) {
    if (!e.label.empty()) return e.label;
    return OrderedJson{{"alpha", complex_json(e.alpha)}, {"beta", complex_json(e.beta)}};
}

inline OrderedJson states_json(const std::vector<StateEntry>& s) {
    OrderedJson a = OrderedJson::array();
    for (const auto& e : s) a.push_back(state_json(e));
    return a;
}

}  // namespace detail

inline OrderedJson config_echo(const Config& c) {
    using detail::state_json;
    using detail::states_json;
    OrderedJson j;
    j["scenario"] = c.scenario ? OrderedJson(to_string(*c.scenario)) : OrderedJson(nullptr);
    j["seed"] = c.seed;
    j["elements"] = {{"oam_flip_on_reflection", c.elements.oam_flip_on_reflection}};
    const auto& h = c.hom;
    j["hom"] = {{"photon_a", state_json(h.photon_a)},
                {"photon_b", state_json(h.photon_b)},
                {"polarization_a", h.polarization_a},
                {"polarization_b", h.polarization_b},
                {"depolarize_b", h.depolarize_b},
                {"delay_min_um", h.delay_min_um},
                {"delay_max_um", h.delay_max_um},
                {"steps", h.steps},
                {"center_wavelength_nm", h.center_wavelength_nm},
                {"bandwidth_nm", h.bandwidth_nm},
                {"baseline_counts", h.baseline_counts}};
    j["clone"] = {{"states", states_json(c.clone.states)},
                  {"random_states", c.clone.random_states},
                  {"ancilla", c.clone.ancilla},
                  {"samples", c.clone.samples},
                  {"preparation_fidelity", c.clone.preparation_fidelity},
                  {"enhancement", c.clone.enhancement}};
    j["qudit"] = {{"d_min", c.qudit.d_min}, {"d_max", c.qudit.d_max}, {"oam_labels", c.qudit.oam_labels}};
    const auto& x = c.experiment;
    const auto& b = x.budget;
    j["experiment"] = {{"preparation_fidelity", x.preparation_fidelity},
                       {"enhancement", x.enhancement},
                       {"duration_s", x.duration_s},
                       {"runs", x.runs},
                       {"coupling", x.coupling ? OrderedJson(*x.coupling) : OrderedJson(nullptr)},
                       {"budget",
                        {{"source_rate_hz", b.source_rate_hz},
                         {"qplate_efficiency", b.qplate_efficiency},
                         {"transferrer_success", b.transferrer_success},
                         {"fiber_coupling", {b.fiber_coupling.lo, b.fiber_coupling.hi}},
                         {"cloning_probability", b.cloning_probability},
                         {"split_factor", b.split_factor}}}};
    j["stokes"] = {{"states", states_json(c.stokes.states)},
                   {"random_states", c.stokes.random_states},
                   {"counts_per_setting", c.stokes.counts_per_setting}};
    return j;
}

}  // namespace oamclone::cli
