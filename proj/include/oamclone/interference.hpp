// interference.hpp
// Two-photon coalescence at the beam splitter with partial temporal
// distinguishability: coincidence curves and enhancement ratios.

#pragma once

#include "oamclone/elements.hpp"
#include "oamclone/errors.hpp"
#include "oamclone/fock.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oamclone {

struct SpectralProfile {
    double center_wavelength_nm = 795.0;
    double bandwidth_nm = 6.0;  // FWHM of the (gaussian) intensity spectrum

    void validate() const {
        if (!(center_wavelength_nm > 0.0) || !std::isfinite(center_wavelength_nm))
            throw ConfigurationError("center wavelength must be positive");
        if (!(bandwidth_nm > 0.0) || !std::isfinite(bandwidth_nm))
            throw ConfigurationError("bandwidth must be positive");
    }
};

inline constexpr double kSpeedOfLightUmPerFs = 0.299792458;

/// l_c = lambda^2 / delta_lambda, in micrometres.
inline double coherence_length_um(const SpectralProfile& p) {
    p.validate();
    const double lambda_um = p.center_wavelength_nm * 1e-3;
    return lambda_um * lambda_um / (p.bandwidth_nm * 1e-3);
}

inline double delay_to_fs(double delay_um) { return delay_um / kSpeedOfLightUmPerFs; }

// For a gaussian intensity spectrum whose FWHM in wavenumber is 2 pi / l_c,
// the wavepacket overlap at path delay d is exp(-kappa (d / l_c)^2) with
// kappa = pi^2 / (4 ln 2).
inline const double kOverlapExponent = std::numbers::pi * std::numbers::pi / (4.0 * std::numbers::ln2);

/// Amplitude overlap of two identical gaussian wavepackets offset by `delay_um`.
inline double temporal_overlap(double delay_um, const SpectralProfile& p) {
    if (!std::isfinite(delay_um)) throw ConfigurationError("delay must be finite");
    const double x = delay_um / coherence_length_um(p);
    return std::exp(-kOverlapExponent * x * x);
}

struct CoalescenceTerms {
    double p_indistinguishable;  // both photons in a', identical temporal modes
    double p_distinguishable;    // both photons in a', fully distinguishable
    double mu;                   // p_ind / p_dist - 1
};

namespace detail {

inline Path sole_path(const PhotonState& psi, const char* who) {
    const auto paths = psi.occupied_paths();
    if (paths.size() != 1 || (*paths.begin() != Path::a && *paths.begin() != Path::b))
        throw PreconditionError(std::string(who) + " must occupy exactly one input path (a or b)");
    return *paths.begin();
}

inline void check_hom_inputs(const PhotonState& psi_a, const PhotonState& psi_b) {
    require_same_basis(psi_a.basis(), psi_b.basis(), "coincidence_expectation");
    if (!psi_a.is_normalized() || !psi_b.is_normalized())
        throw InvalidStateError("coincidence inputs must be normalized");
    if (sole_path(psi_a, "first photon") == sole_path(psi_b, "second photon"))
        throw PreconditionError("photons must enter on distinct input paths");
}

}  // namespace detail

/// Coalescence terms from the full two-photon beam-splitter evolution.
inline CoalescenceTerms coalescence_terms(const PhotonState& psi_a, const PhotonState& psi_b,
                                          BeamSplitterConvention conv = {}) {
    detail::check_hom_inputs(psi_a, psi_b);
    const auto& basis = psi_a.basis();
    const auto bs = beam_splitter(basis, conv);
    const auto post = path_filter(Path::a_prime, basis);

    const auto pair = apply(bs, symmetrize_product(psi_a, psi_b)).state;
    const double p_ind = apply(post, pair).state.weight();

    const double pa = apply(post, apply(bs, psi_a).state).state.weight();
    const double pb = apply(post, apply(bs, psi_b).state).state.weight();
    const double p_dist = pa * pb;
    return {p_ind, p_dist, p_ind / p_dist - 1.0};
}

/// mu = |<psi_a | Phi psi_b>|^2 on the internal (polarization, OAM) labels.
inline double internal_overlap_direct(const PhotonState& psi_a, const PhotonState& psi_b,
                                      BeamSplitterConvention conv = {}) {
    detail::check_hom_inputs(psi_a, psi_b);
    const Path pa = detail::sole_path(psi_a, "first photon");
    const Path pb = detail::sole_path(psi_b, "second photon");
    PhotonState moved = relabel_path(psi_b, pb, pa);
    if (conv.oam_flip_on_reflection) moved = flip_oam(moved);
    return std::norm(psi_a.inner(moved));
}

/// Relative rate of post-selected both-in-a' events:
/// C(delay) = C_dist (1 + v(delay)^2 mu).
inline double coincidence_expectation(const PhotonState& psi_a, const PhotonState& psi_b, double delay_um,
                                      const SpectralProfile& profile, BeamSplitterConvention conv = {}) {
    const auto t = coalescence_terms(psi_a, psi_b, conv);
    const double v = temporal_overlap(delay_um, profile);
    return t.p_distinguishable * (1.0 + v * v * t.mu);
}

struct DelayScan {
    std::vector<double> delays_um;
    std::vector<double> coincidences;
    std::vector<double> enhancement;  // C(delay) / C(infinity)
    double baseline = 0.0;            // C(infinity)
    double R = 0.0;                   // C(0) / C(infinity)
};

struct WeightedInputPair {
    PhotonState psi_a;
    PhotonState psi_b;
    double weight;
};

/// Coincidence curve for a statistical mixture of pure input pairs.
inline DelayScan hom_curve(const std::vector<WeightedInputPair>& ensemble, const std::vector<double>& delays_um,
                           const SpectralProfile& profile, BeamSplitterConvention conv = {}) {
    if (delays_um.empty()) throw ConfigurationError("hom_curve: empty delay scan");
    if (ensemble.empty()) throw ConfigurationError("hom_curve: empty input ensemble");
    double base = 0.0, peak_excess = 0.0, total_w = 0.0;
    for (const auto& e : ensemble) {
        if (e.weight < 0) throw ConfigurationError("hom_curve: negative weight");
        const auto t = coalescence_terms(e.psi_a, e.psi_b, conv);
        base += e.weight * t.p_distinguishable;
        peak_excess += e.weight * t.p_distinguishable * t.mu;
        total_w += e.weight;
    }
    if (std::abs(total_w - 1.0) > 1e-12) throw ConfigurationError("hom_curve: weights do not sum to 1");

    DelayScan scan;
    scan.delays_um = delays_um;
    scan.baseline = base;
    for (double d : delays_um) {
        const double v = temporal_overlap(d, profile);
        const double c = base + v * v * peak_excess;
        scan.coincidences.push_back(c);
        scan.enhancement.push_back(c / base);
    }
    scan.R = (base + peak_excess) / base;
    return scan;
}

inline DelayScan hom_curve(const PhotonState& psi_a, const PhotonState& psi_b, const std::vector<double>& delays_um,
                           const SpectralProfile& profile, BeamSplitterConvention conv = {}) {
    return hom_curve({{psi_a, psi_b, 1.0}}, delays_um, profile, conv);
}

/// Evenly spaced delays from lo to hi inclusive.
inline std::vector<double> linear_scan(double lo, double hi, std::size_t steps) {
    if (steps < 2) return {lo};
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Counting statistics on a curve.

/// Poisson counts per scan point, scaled so the distinguishable baseline has
/// mean `baseline_counts`.
inline std::vector<std::uint64_t> sample_hom_counts(const DelayScan& scan, double baseline_counts, std::mt19937_64& rng) {
    std::vector<std::uint64_t> out;
    out.reserve(scan.coincidences.size());
    for (double c : scan.coincidences) {
        const double mean = baseline_counts * c / scan.baseline;
        out.push_back(mean > 0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0);
    }
    return out;
}

struct EnhancementEstimate {
    double R;
    double sigma;
};

/// R from counts: summed counts where v^2 >= peak_level over summed counts
/// where v^2 <= wing_level, each normalized by its point count.
inline EnhancementEstimate estimate_enhancement(const DelayScan& scan, const std::vector<std::uint64_t>& counts,
                                                const SpectralProfile& profile, double peak_level = 0.99,
                                                double wing_level = 1e-6) {
    if (counts.size() != scan.delays_um.size()) throw EstimateError("count vector does not match scan");
    double peak = 0, wing = 0;
    std::size_t n_peak = 0, n_wing = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double v = temporal_overlap(scan.delays_um[i], profile);
        if (v * v >= peak_level) {
            peak += static_cast<double>(counts[i]);
            ++n_peak;
        } else if (v * v <= wing_level) {
            wing += static_cast<double>(counts[i]);
            ++n_wing;
        }
    }
    if (n_peak == 0 || n_wing == 0 || peak == 0 || wing == 0)
        throw EstimateError("scan lacks populated peak or wing points");
    const double r = (peak / static_cast<double>(n_peak)) / (wing / static_cast<double>(n_wing));
    return {r, r * std::sqrt(1.0 / peak + 1.0 / wing)};
}

}  // namespace oamclone
