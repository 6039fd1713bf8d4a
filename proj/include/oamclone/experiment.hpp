// experiment.hpp
// Imperfection and counting model for the cloning experiment: preparation
// infidelity, reduced coalescence enhancement, loss budget and Poissonian
// coincidence counts.

#pragma once

#include "oamclone/cloning.hpp"
#include "oamclone/errors.hpp"
#include "oamclone/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oamclone {

struct ImperfectionModel {
    double preparation_fidelity = 0.96;  // F_prep
    double enhancement = 1.97;           // R

    void validate() const {
        if (!(preparation_fidelity >= 0.5 && preparation_fidelity <= 1.0))
            throw ConfigurationError("F_prep must lie in [0.5, 1]");
        if (!(enhancement >= 1.0 && enhancement <= 2.0)) throw ConfigurationError("R must lie in [1, 2]");
    }

    static ImperfectionModel ideal() { return {1.0, 2.0}; }
};

/// F_th = (F_prep R + 1/2) / (R + 1).
inline double predicted_fidelity(const ImperfectionModel& m) {
    m.validate();
    return (m.preparation_fidelity * m.enhancement + 0.5) / (m.enhancement + 1.0);
}

/// Cloner options realising the model microscopically: the input is mixed
/// with its orthogonal state at weight 1 - F_prep and a fraction 2 - R of the
/// events is temporally distinguishable.
inline ClonerOptions cloner_options(const ImperfectionModel& m, ClonerOptions base = {}) {
    m.validate();
    base.preparation_fidelity = m.preparation_fidelity;
    base.temporal_visibility = m.enhancement - 1.0;
    return base;
}

inline double simulated_imperfect_fidelity(const QubitSpec& input, const ImperfectionModel& m) {
    return run_cloner_full(input, AncillaSampling::exact(), cloner_options(m)).fidelity;
}

// ---------------------------------------------------------------------------

struct Interval {
    double lo;
    double hi;

    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

struct LossBudget {
    double source_rate_hz = 5000.0;
    double qplate_efficiency = 0.80;
    double transferrer_success = 0.5;
    Interval fiber_coupling{0.15, 0.25};
    double cloning_probability = 3.0 / 8.0;  // single beam-splitter port
    double split_factor = 0.5;               // both photons split at the fiber splitter

    void validate() const {
        auto unit = [](double x, const char* name) {
            if (!(x >= 0.0 && x <= 1.0)) throw ConfigurationError(std::string(name) + " must lie in [0,1]");
        };
        if (!(source_rate_hz >= 0.0) || !std::isfinite(source_rate_hz))
            throw ConfigurationError("source_rate_hz must be nonnegative");
        unit(qplate_efficiency, "qplate_efficiency");
        unit(transferrer_success, "transferrer_success");
        unit(fiber_coupling.lo, "fiber_coupling.lo");
        unit(fiber_coupling.hi, "fiber_coupling.hi");
        if (fiber_coupling.lo > fiber_coupling.hi) throw ConfigurationError("fiber_coupling interval is reversed");
        unit(cloning_probability, "cloning_probability");
        unit(split_factor, "split_factor");
    }

    double preparation_probability() const { return qplate_efficiency * transferrer_success; }

    Interval detection_probability() const {
        const double base = qplate_efficiency * transferrer_success;
        return {base * fiber_coupling.lo, base * fiber_coupling.hi};
    }

    LossBudget at_coupling(double coupling) const {
        LossBudget b = *this;
        b.fiber_coupling = {coupling, coupling};
        return b;
    }
};

/// C_source p_prep^2 p_clon p_det^2 split, evaluated at both ends of the
/// fiber-coupling interval.
inline Interval rate_budget(const LossBudget& b) {
    b.validate();
    const double p_prep = b.preparation_probability();
    const Interval p_det = b.detection_probability();
    const double common = b.source_rate_hz * p_prep * p_prep * b.cloning_probability * b.split_factor;
    return {common * p_det.lo * p_det.lo, common * p_det.hi * p_det.hi};
}

/// Point rate at the middle of the coupling interval.
inline double mid_budget_rate(const LossBudget& b) { return rate_budget(b.at_coupling(b.fiber_coupling.mid())).lo; }

// ---------------------------------------------------------------------------

struct FidelityEstimate {
    double fidelity;
    double sigma;
    bool degenerate;  // C1 == 0 or C2 == 0: binomial error collapses to zero
};

/// F_exp = C1 / (C1 + C2), sigma = sqrt(F (1 - F) / C_tot).
inline FidelityEstimate fidelity_from_counts(std::uint64_t c1, std::uint64_t c2) {
    const std::uint64_t total = c1 + c2;
    if (total == 0) throw EstimateError("fidelity_from_counts: no counts");
    const double f = static_cast<double>(c1) / static_cast<double>(total);
    return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(total)), c1 == 0 || c2 == 0};
}

struct CountRecord {
    std::uint64_t c1 = 0;  // D_T x D_1: photon found in the cloned state
    std::uint64_t c2 = 0;  // D_T x D_2: photon found in the orthogonal state
    double duration_s = 0;
    std::optional<double> f_exp;  // undefined without counts
    double poisson_error = 0;

    std::uint64_t total() const { return c1 + c2; }
};

inline CountRecord simulate_counts(const QubitSpec& /*input: the channel is universal*/, const ImperfectionModel& model,
                                   const LossBudget& budget, double duration_s, std::mt19937_64& rng,
                                   std::optional<double> coupling = std::nullopt) {
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) throw ConfigurationError("duration must be >= 0");
    const double f = predicted_fidelity(model);
    const double rate = coupling ? rate_budget(budget.at_coupling(*coupling)).lo : mid_budget_rate(budget);
    auto draw = [&rng](double mean) -> std::uint64_t {
        return mean > 0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;
    };
    CountRecord r;
    r.duration_s = duration_s;
    r.c1 = draw(duration_s * rate * f);
    r.c2 = draw(duration_s * rate * (1.0 - f));
    if (r.total() > 0) {
        const auto est = fidelity_from_counts(r.c1, r.c2);
        r.f_exp = est.fidelity;
        r.poisson_error = est.sigma;
    }
    return r;
}

inline CountRecord simulate_counts(const QubitSpec& input, const ImperfectionModel& model, const LossBudget& budget,
                                   double duration_s, std::uint64_t seed, std::optional<double> coupling = std::nullopt) {
    std::mt19937_64 rng(seed);
    return simulate_counts(input, model, budget, duration_s, rng, coupling);
}

struct TableRow {
    OamQubit state;
    CountRecord record;
};

struct TableReport {
    std::vector<TableRow> rows;
    double mean_fidelity = 0;
    double mean_sigma = 0;  // standard error of the mean over rows
};

/// One simulated run of the six-state universality table.
inline TableReport table_one_run(const ImperfectionModel& model, const LossBudget& budget, double duration_s,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TableReport rep;
    double var = 0;
    for (OamQubit q : table_states()) {
        auto rec = simulate_counts(QubitSpec(q), model, budget, duration_s, rng);
        if (!rec.f_exp) throw EstimateError("table_one_run: a state recorded no counts");
        rep.mean_fidelity += *rec.f_exp;
        var += rec.poisson_error * rec.poisson_error;
        rep.rows.push_back({q, rec});
    }
    const double n = static_cast<double>(rep.rows.size());
    rep.mean_fidelity /= n;
    rep.mean_sigma = std::sqrt(var) / n;
    return rep;
}

// ---------------------------------------------------------------------------
// Stokes tomography with counting noise.

inline constexpr double kTypicalCountsPerRun = 400.0;  // ~400 coincidences per 600 s

/// Each component measured as (N+ - N-)/(N+ + N-) with N+- Poisson of mean
/// counts (1 +- S_i)/2.
inline Eigen::Vector3d measure_stokes(const Eigen::Vector3d& stokes, double counts_per_setting, std::mt19937_64& rng) {
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
        const double up = counts_per_setting * (1.0 + stokes[i]) / 2.0;
        const double down = counts_per_setting * (1.0 - stokes[i]) / 2.0;
        const double np = up > 0 ? static_cast<double>(std::poisson_distribution<std::uint64_t>(up)(rng)) : 0.0;
        const double nm = down > 0 ? static_cast<double>(std::poisson_distribution<std::uint64_t>(down)(rng)) : 0.0;
        out[i] = np + nm > 0 ? (np - nm) / (np + nm) : 0.0;
    }
    return out;
}

struct StokesRow {
    OamQubit state;
    Eigen::Vector3d input_bloch;
    Eigen::Vector3d ideal;     // channel output
    Eigen::Vector3d measured;  // with counting noise
};

struct StokesReport {
    std::vector<StokesRow> rows;
    double mean_length = 0;        // mean |S_measured|
    double mean_ideal_length = 0;  // mean |S_ideal|
};

inline StokesReport stokes_run(const std::vector<OamQubit>& states, double counts_per_setting, std::uint64_t seed,
                               const ClonerOptions& opts = {}) {
    if (states.empty()) throw ConfigurationError("stokes_run: no states");
    std::mt19937_64 rng(seed);
    StokesReport rep;
    for (OamQubit q : states) {
        const auto res = run_cloner_full(QubitSpec(q), AncillaSampling::exact(), opts);
        StokesRow row{q, res.input_bloch, res.stokes, measure_stokes(res.stokes, counts_per_setting, rng)};
        rep.mean_length += row.measured.norm();
        rep.mean_ideal_length += row.ideal.norm();
        rep.rows.push_back(row);
    }
    rep.mean_length /= static_cast<double>(states.size());
    rep.mean_ideal_length /= static_cast<double>(states.size());
    return rep;
}

}  // namespace oamclone
