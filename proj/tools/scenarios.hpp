#pragma once

// Scenario runners. Each produces CSV rows, a JSON result block and
// optionally an SVG figure; writing them out is left to the caller.

#include "config.hpp"
#include "svg.hpp"

#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oamclone::cli {

inline std::string fmt(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string fmt(std::uint64_t x) { return std::to_string(x); }

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw std::logic_error("csv row width mismatch");
        rows_.push_back(std::move(cells));
    }

    std::string str(const std::vector<std::string>& preamble) const {
        std::string out;
        for (const auto& p : preamble) out += "# " + p + "\n";
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
            out += "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Artifacts {
    CsvTable csv{{}};
    OrderedJson results;
    std::optional<std::string> svg;
};

inline OrderedJson vec_json(const Eigen::Vector3d& v) { return OrderedJson::array({v[0], v[1], v[2]}); }

// Audit line embedded in every output.
inline std::string audit_text(const Config& c) {
    return std::string("oamclone ") + kVersion + " seed=" + std::to_string(c.seed) + " config=" + config_echo(c).dump();
}

// ---------------------------------------------------------------------------

inline Artifacts run_hom(const Config& c) {
    const auto& h = c.hom;
    const auto basis = build_basis(all_paths(), default_oam_set());
    const Jones pa = *polarization_from_string(h.polarization_a);
    const Jones pb = *polarization_from_string(h.polarization_b);
    const auto psi_a = oam_qubit_photon(basis, Path::a, pa, h.photon_a.spec().amplitudes());
    const auto photon_b = [&](const Jones& j) { return oam_qubit_photon(basis, Path::b, j, h.photon_b.spec().amplitudes()); };

    std::vector<WeightedInputPair> ensemble;
    if (h.depolarize_b) {
        const Jones perp(-std::conj(pb[1]), std::conj(pb[0]));
        ensemble = {{psi_a, photon_b(pb), 0.5}, {psi_a, photon_b(perp), 0.5}};
    } else {
        ensemble = {{psi_a, photon_b(pb), 1.0}};
    }

    const SpectralProfile profile{h.center_wavelength_nm, h.bandwidth_nm};
    const BeamSplitterConvention conv{c.elements.oam_flip_on_reflection};
    const auto scan = hom_curve(ensemble, linear_scan(h.delay_min_um, h.delay_max_um, static_cast<std::size_t>(h.steps)),
                                profile, conv);

    std::vector<std::uint64_t> counts;
    std::optional<EnhancementEstimate> est;
    std::string est_note;
    if (h.baseline_counts > 0) {
        std::mt19937_64 rng(c.seed);
        counts = sample_hom_counts(scan, h.baseline_counts, rng);
        try {
            est = estimate_enhancement(scan, counts, profile);
        } catch (const EstimateError& e) {
            est_note = e.what();
        }
    }

    std::vector<std::string> header{"delay_um", "delay_fs", "overlap", "expected_coincidences", "enhancement"};
    if (!counts.empty()) header.push_back("counts");
    Artifacts a{CsvTable(header), {}, {}};
    for (std::size_t i = 0; i < scan.delays_um.size(); ++i) {
        const double d = scan.delays_um[i];
        std::vector<std::string> row{fmt(d), fmt(delay_to_fs(d)), fmt(temporal_overlap(d, profile)),
                                     fmt(scan.coincidences[i]), fmt(scan.enhancement[i])};
        if (!counts.empty()) row.push_back(fmt(counts[i]));
        a.csv.row(std::move(row));
    }

    a.results["R"] = scan.R;
    a.results["mu"] = scan.R - 1.0;
    a.results["baseline"] = scan.baseline;
    a.results["coherence_length_um"] = coherence_length_um(profile);
    if (!counts.empty()) {
        if (est)
            a.results["estimated_R"] = {{"value", est->R}, {"sigma", est->sigma}};
        else
            a.results["estimated_R"] = {{"value", nullptr}, {"error", est_note}};
    }

    if (c.output.svg) {
        svg::Document doc(640, 420, audit_text(c));
        double ymax = 2.1;
        for (std::size_t i = 0; i < counts.size(); ++i)
            ymax = std::max(ymax, static_cast<double>(counts[i]) / h.baseline_counts * 1.05);
        const svg::Frame f{h.delay_min_um, h.delay_max_um, 0.0, ymax, 80, 40, 520, 300};
        doc.axes(f, "delay (um)", "coincidences / baseline");
        doc.line(f.px(h.delay_min_um), f.py(1.0), f.px(h.delay_max_um), f.py(1.0), "gray", "4 3");
        for (std::size_t i = 0; i < counts.size(); ++i)
            doc.circle(f.px(scan.delays_um[i]), f.py(static_cast<double>(counts[i]) / h.baseline_counts), 2.0, "black", "black");
        doc.polyline(f, scan.delays_um, scan.enhancement, "crimson");
        doc.text(f.left + f.w / 2, 24, "HOM enhancement R = " + svg::num(scan.R));
        a.svg = doc.str();
    }
    return a;
}

// ---------------------------------------------------------------------------

// Configured states followed by `random` Haar-random ones drawn from `rng`.
inline std::vector<std::pair<std::string, QubitSpec>> expand_states(const std::vector<StateEntry>& states,
                                                                     std::int64_t random, std::mt19937_64& rng) {
    std::vector<std::pair<std::string, QubitSpec>> out;
    for (const auto& e : states) out.push_back({e.name(), e.spec()});
    for (std::int64_t i = 0; i < random; ++i) out.push_back({"random" + std::to_string(i), QubitSpec::haar_random(rng)});
    return out;
}

inline Artifacts run_clone(const Config& c) {
    const auto& k = c.clone;
    ClonerOptions base;
    base.bs.oam_flip_on_reflection = c.elements.oam_flip_on_reflection;
    const ImperfectionModel model{k.preparation_fidelity, k.enhancement};
    const auto opts = cloner_options(model, base);

    std::mt19937_64 rng(c.seed);
    const auto states = expand_states(k.states, k.random_states, rng);
    const bool mc = k.ancilla == "monte_carlo";

    Artifacts a{CsvTable({"state_label", "alpha_re", "alpha_im", "beta_re", "beta_im", "input_x", "input_y", "input_z",
                          "fidelity", "success_prob", "both_ports_prob", "stokes_x", "stokes_y", "stokes_z"}),
                {},
                {}};
    OrderedJson rows = OrderedJson::array();
    double f_sum = 0, p_sum = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& [name, q] = states[i];
        const auto sampling = mc ? AncillaSampling::monte_carlo(static_cast<std::size_t>(k.samples), c.seed + i)
                                 : AncillaSampling::exact();
        const auto r = run_cloner_full(q, sampling, opts);
        const auto& amp = q.amplitudes();
        a.csv.row({name, fmt(amp[0].real()), fmt(amp[0].imag()), fmt(amp[1].real()), fmt(amp[1].imag()),
                   fmt(r.input_bloch[0]), fmt(r.input_bloch[1]), fmt(r.input_bloch[2]), fmt(r.fidelity),
                   fmt(r.success_probability), fmt(r.both_ports_probability()), fmt(r.stokes[0]), fmt(r.stokes[1]),
                   fmt(r.stokes[2])});
        OrderedJson row{{"state", name},
                        {"input_bloch", vec_json(r.input_bloch)},
                        {"fidelity", r.fidelity},
                        {"success_prob", r.success_probability},
                        {"both_ports_prob", r.both_ports_probability()},
                        {"stokes", vec_json(r.stokes)}};
        if (r.fidelity_stderr) row["fidelity_stderr"] = *r.fidelity_stderr;
        if (r.ancilla_mixedness) row["ancilla_mixedness"] = *r.ancilla_mixedness;
        rows.push_back(row);
        f_sum += r.fidelity;
        p_sum += r.success_probability;
    }
    const double n = static_cast<double>(states.size());
    a.results["fidelity"] = f_sum / n;
    a.results["success_prob"] = p_sum / n;
    a.results["predicted_fidelity"] = predicted_fidelity(model);
    a.results["states"] = rows;
    return a;
}

// ---------------------------------------------------------------------------

inline Artifacts run_qudit(const Config& c) {
    const auto& q = c.qudit;
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> g;
    Artifacts a{CsvTable({"d", "F_channel", "F_formula", "p_channel", "p_formula", "F_oracle", "p_oracle"}), {}, {}};
    OrderedJson rows = OrderedJson::array();
    double worst = 0;
    for (std::int64_t d = q.d_min; d <= q.d_max; ++d) {
        Eigen::VectorXcd v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(g(rng), g(rng));
        v.normalize();
        const QuditSpec spec{v};
        const QuditOptions opts{q.oam_labels};
        const auto ch = qudit_clone(spec, opts);
        const auto fo = qudit_formula(static_cast<int>(d));
        std::string fo_f, fo_p;
        OrderedJson row{{"d", d},
                        {"F_channel", ch.fidelity},
                        {"F_formula", fo.fidelity},
                        {"p_channel", ch.success_probability},
                        {"p_formula", fo.success_probability}};
        worst = std::max({worst, std::abs(ch.fidelity - fo.fidelity), std::abs(ch.success_probability - fo.success_probability)});
        if (static_cast<std::size_t>(d) <= kOracleMaxDimension) {
            const auto o = brute_force_oracle(spec, opts);
            fo_f = fmt(o.fidelity);
            fo_p = fmt(o.success_probability);
            row["F_oracle"] = o.fidelity;
            row["p_oracle"] = o.success_probability;
            worst = std::max({worst, std::abs(o.fidelity - fo.fidelity), std::abs(o.success_probability - fo.success_probability)});
        }
        a.csv.row({std::to_string(d), fmt(ch.fidelity), fmt(fo.fidelity), fmt(ch.success_probability),
                   fmt(fo.success_probability), fo_f, fo_p});
        rows.push_back(row);
    }
    a.results["max_deviation"] = worst;
    a.results["rows"] = rows;
    return a;
}

// ---------------------------------------------------------------------------

inline Artifacts run_experiment(const Config& c) {
    const auto& x = c.experiment;
    const ImperfectionModel model{x.preparation_fidelity, x.enhancement};
    const LossBudget budget = x.coupling ? x.budget.at_coupling(*x.coupling) : x.budget;
    const double rate = mid_budget_rate(budget);

    Artifacts a{CsvTable({"run", "state_label", "C1", "C2", "F_exp", "sigma"}), {}, {}};
    OrderedJson runs = OrderedJson::array();
    double mean = 0, var = 0, counts = 0;
    for (std::int64_t r = 0; r < x.runs; ++r) {
        const auto rep = table_one_run(model, budget, x.duration_s, c.seed + static_cast<std::uint64_t>(r));
        for (const auto& row : rep.rows) {
            a.csv.row({std::to_string(r), to_string(row.state), fmt(row.record.c1), fmt(row.record.c2),
                       fmt(*row.record.f_exp), fmt(row.record.poisson_error)});
            counts += static_cast<double>(row.record.total());
        }
        runs.push_back({{"run", r}, {"mean_fidelity", rep.mean_fidelity}, {"sigma", rep.mean_sigma}});
        mean += rep.mean_fidelity;
        var += rep.mean_sigma * rep.mean_sigma;
    }
    const double n = static_cast<double>(x.runs);
    const auto interval = rate_budget(x.budget);
    a.results["predicted_fidelity"] = predicted_fidelity(model);
    a.results["rate_budget_hz"] = {interval.lo, interval.hi};
    a.results["point_rate_hz"] = rate;
    a.results["expected_counts_per_state"] = rate * x.duration_s;
    a.results["mean_counts_per_state"] = counts / (n * 6.0);
    a.results["mean_fidelity"] = mean / n;
    a.results["standard_error"] = std::sqrt(var) / n;
    a.results["runs"] = runs;
    return a;
}

// ---------------------------------------------------------------------------

inline Artifacts run_stokes(const Config& c) {
    const auto& s = c.stokes;
    std::seed_seq sq{c.seed, std::uint64_t{1}};
    std::mt19937_64 draw(sq);
    const auto states = expand_states(s.states, s.random_states, draw);
    std::mt19937_64 rng(c.seed);
    ClonerOptions opts;
    opts.bs.oam_flip_on_reflection = c.elements.oam_flip_on_reflection;

    Artifacts a{CsvTable({"state_label", "input_x", "input_y", "input_z", "ideal_x", "ideal_y", "ideal_z", "measured_x",
                          "measured_y", "measured_z", "ideal_length", "measured_length"}),
                {},
                {}};
    std::vector<Eigen::Vector3d> in, out;
    double len = 0, ideal_len = 0;
    for (const auto& [name, q] : states) {
        const auto r = run_cloner_full(q, AncillaSampling::exact(), opts);
        const Eigen::Vector3d m = measure_stokes(r.stokes, s.counts_per_setting, rng);
        a.csv.row({name, fmt(r.input_bloch[0]), fmt(r.input_bloch[1]), fmt(r.input_bloch[2]), fmt(r.stokes[0]),
                   fmt(r.stokes[1]), fmt(r.stokes[2]), fmt(m[0]), fmt(m[1]), fmt(m[2]), fmt(r.stokes.norm()),
                   fmt(m.norm())});
        in.push_back(r.input_bloch);
        out.push_back(m);
        len += m.norm();
        ideal_len += r.stokes.norm();
    }
    const double n = static_cast<double>(states.size());
    a.results["mean_length"] = len / n;
    a.results["mean_ideal_length"] = ideal_len / n;
    a.results["shrink_factor"] = 2.0 / 3.0;

    if (c.output.svg) {
        svg::Document doc(780, 300, audit_text(c));
        const char* names[3][2] = {{"S1", "S2"}, {"S1", "S3"}, {"S2", "S3"}};
        const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int p = 0; p < 3; ++p) {
            const double cx = 130 + 260 * p, cy = 150, rad = 100;
            doc.circle(cx, cy, rad, "black");
            doc.circle(cx, cy, rad * 2.0 / 3.0, "gray");
            doc.line(cx - rad, cy, cx + rad, cy, "lightgray");
            doc.line(cx, cy - rad, cx, cy + rad, "lightgray");
            doc.text(cx + rad + 4, cy + 14, names[p][0], "end");
            doc.text(cx + 6, cy - rad + 12, names[p][1], "start");
            for (std::size_t i = 0; i < in.size(); ++i) {
                const double ix = cx + rad * in[i][axes[p][0]], iy = cy - rad * in[i][axes[p][1]];
                const double ox = cx + rad * out[i][axes[p][0]], oy = cy - rad * out[i][axes[p][1]];
                doc.line(ix, iy, ox, oy, "silver", "2 2");
                doc.circle(ix, iy, 3.5, "steelblue", "steelblue");
                doc.circle(ox, oy, 3.5, "crimson", "crimson");
            }
        }
        doc.text(390, 280, "input (blue) and measured clone (red); inner circle radius 2/3");
        a.svg = doc.str();
    }
    return a;
}

inline Artifacts run_scenario(const Config& c) {
    switch (*c.scenario) {
        case Scenario::hom: return run_hom(c);
        case Scenario::clone: return run_clone(c);
        case Scenario::qudit: return run_qudit(c);
        case Scenario::experiment: return run_experiment(c);
        case Scenario::stokes: return run_stokes(c);
    }
    throw std::logic_error("unreachable");
}

}  // namespace oamclone::cli
