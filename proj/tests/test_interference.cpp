#include "oamclone/interference.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace oamclone;
using oamclone::testing::random_photon;

namespace {

BasisPtr full_basis() { return build_basis(all_paths(), default_oam_set()); }

PhotonState oam_photon(const BasisPtr& b, Path p, OamQubit q, const Jones& pol = jones_H()) {
    return oam_qubit_photon(b, p, pol, oam_qubit_amplitudes(q));
}

// Overlap of two wavepackets with a gaussian intensity spectrum, by direct
// numerical integration over wavenumber (Simpson's rule). The spectrum FWHM
// in wavelength is mapped to wavenumber to first order.
double numeric_overlap(double delay_um, double lambda_um, double dlambda_um) {
    const double k0 = 2 * std::numbers::pi / lambda_um;
    const double dk = 2 * std::numbers::pi * dlambda_um / (lambda_um * lambda_um);
    const double sigma = dk / (2 * std::sqrt(2 * std::log(2.0)));
    const int n = 20000;
    const double lo = k0 - 12 * sigma, hi = k0 + 12 * sigma, h = (hi - lo) / n;
    double num = 0, den = 0;
    for (int i = 0; i <= n; ++i) {
        const double k = lo + i * h;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        const double s = std::exp(-0.5 * std::pow((k - k0) / sigma, 2));
        num += w * s * std::cos((k - k0) * delay_um);
        den += w * s;
    }
    return num / den;
}

double enhancement_at_zero(const PhotonState& x, const PhotonState& y) {
    const SpectralProfile p;
    return coincidence_expectation(x, y, 0.0, p) / coincidence_expectation(x, y, 1e6, p);
}

}  // namespace

TEST(CoherenceLength, DefaultSpectrum) {
    EXPECT_NEAR(coherence_length_um({}), 105.3375, 1e-9);
    EXPECT_NEAR(coherence_length_um({}), 105.3, 0.05);
}

TEST(CoherenceLength, MatchesFourierWidthOracle) {
    // Half-maximum delay of the numerically transformed spectrum, inverted
    // through v = exp(-kappa (d/l_c)^2), must return lambda^2/dlambda.
    const SpectralProfile p;
    double lo = 0, hi = 500;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (numeric_overlap(mid, 0.795, 0.006) > 0.5 ? lo : hi) = mid;
    }
    const double lc = lo / std::sqrt(std::log(2.0) / kOverlapExponent);
    EXPECT_NEAR(lc / coherence_length_um(p), 1.0, 1e-6);
}

TEST(CoherenceLength, Scaling) {
    SpectralProfile p, q;
    q.bandwidth_nm = 12.0;
    EXPECT_NEAR(coherence_length_um(q), coherence_length_um(p) / 2, 1e-12);
    q.bandwidth_nm = 1e12;
    EXPECT_LT(coherence_length_um(q), 1e-9);
    q.bandwidth_nm = 0;
    EXPECT_THROW(coherence_length_um(q), ConfigurationError);
    q.bandwidth_nm = 6;
    q.center_wavelength_nm = -1;
    EXPECT_THROW(coherence_length_um(q), ConfigurationError);
}

TEST(TemporalOverlap, Shape) {
    const SpectralProfile p;
    EXPECT_EQ(temporal_overlap(0.0, p), 1.0);
    EXPECT_LT(temporal_overlap(1e4, p), 1e-300);
    double prev = 1.0;
    for (double d = 1; d < 400; d += 1) {
        const double v = temporal_overlap(d, p);
        EXPECT_LT(v, prev);
        EXPECT_EQ(v, temporal_overlap(-d, p));
        prev = v;
    }
    EXPECT_THROW(temporal_overlap(std::nan(""), p), ConfigurationError);
}

TEST(TemporalOverlap, MatchesWavepacketIntegral) {
    const SpectralProfile p;
    const double lc = coherence_length_um(p);
    for (double x : {0.25, 0.5, 1.0, 1.5}) EXPECT_NEAR(temporal_overlap(x * lc, p), numeric_overlap(x * lc, 0.795, 0.006), 1e-6);
}

TEST(CoincidenceExpectation, Examples) {
    auto b = full_basis();
    using Q = OamQubit;
    EXPECT_NEAR(enhancement_at_zero(oam_photon(b, Path::a, Q::plus2), oam_photon(b, Path::b, Q::minus2)), 2.0, 1e-12);
    EXPECT_NEAR(enhancement_at_zero(oam_photon(b, Path::a, Q::plus2), oam_photon(b, Path::b, Q::plus2)), 1.0, 1e-12);
    EXPECT_NEAR(enhancement_at_zero(oam_photon(b, Path::a, Q::h), oam_photon(b, Path::b, Q::v)), 1.0, 1e-12);
    EXPECT_NEAR(enhancement_at_zero(oam_photon(b, Path::a, Q::h), oam_photon(b, Path::b, Q::h)), 2.0, 1e-12);

    // Flat curve for equal OAM.
    const SpectralProfile p;
    const auto x = oam_photon(b, Path::a, Q::plus2), y = oam_photon(b, Path::b, Q::plus2);
    for (double d : {0.0, 30.0, 100.0}) EXPECT_NEAR(coincidence_expectation(x, y, d, p), 0.25, 1e-12);
}

TEST(CoincidenceExpectation, PolarizationMismatchReducesOverlap) {
    auto b = full_basis();
    const auto x = oam_photon(b, Path::a, OamQubit::plus2, jones_H());
    EXPECT_NEAR(enhancement_at_zero(x, oam_photon(b, Path::b, OamQubit::minus2, jones_V())), 1.0, 1e-12);
    EXPECT_NEAR(enhancement_at_zero(x, oam_photon(b, Path::b, OamQubit::minus2, jones_L())), 1.5, 1e-12);
}

TEST(CoincidenceExpectation, InputPathErrors) {
    auto b = full_basis();
    const auto x = oam_photon(b, Path::a, OamQubit::plus2);
    EXPECT_THROW(coincidence_expectation(x, x, 0, {}), PreconditionError);
    const auto spread = superposition_state(b, {{{Path::a, Pol::L, 2}, 1.0}, {{Path::b, Pol::L, 2}, 1.0}});
    EXPECT_THROW(coincidence_expectation(spread, oam_photon(b, Path::b, OamQubit::h), 0, {}), PreconditionError);
    EXPECT_THROW(coincidence_expectation(oam_photon(b, Path::a_prime, OamQubit::h), oam_photon(b, Path::b, OamQubit::h), 0, {}),
                 PreconditionError);
}

TEST(HomCurve, OppositeOamPeak) {
    auto b = full_basis();
    const SpectralProfile p;
    const double lc = coherence_length_um(p);
    const double half = lc / std::sqrt(2 * kOverlapExponent);  // 1/e point of the excess
    const auto scan = hom_curve(oam_photon(b, Path::a, OamQubit::plus2), oam_photon(b, Path::b, OamQubit::minus2),
                                {-half, 0.0, half, 1e5}, p);
    EXPECT_NEAR(scan.R, 2.0, 1e-12);
    EXPECT_NEAR(scan.enhancement[1], 2.0, 1e-12);
    EXPECT_NEAR(scan.enhancement[0] - 1.0, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(scan.enhancement[2] - 1.0, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(scan.enhancement[3], 1.0, 1e-12);
    EXPECT_THROW(hom_curve(oam_photon(b, Path::a, OamQubit::plus2), oam_photon(b, Path::b, OamQubit::minus2), {}, p),
                 ConfigurationError);
}

TEST(HomCurve, DepolarizedPartnerIsMixtureAverage) {
    auto b = full_basis();
    const SpectralProfile p;
    const auto x = oam_photon(b, Path::a, OamQubit::plus2, jones_H());
    const auto yh = oam_photon(b, Path::b, OamQubit::minus2, jones_H());
    const auto yv = oam_photon(b, Path::b, OamQubit::minus2, jones_V());
    const auto delays = linear_scan(-300, 300, 31);
    const auto mixed = hom_curve({{x, yh, 0.5}, {x, yv, 0.5}}, delays, p);
    const auto ch = hom_curve(x, yh, delays, p), cv = hom_curve(x, yv, delays, p);
    EXPECT_NEAR(mixed.R, 1.5, 1e-12);
    for (std::size_t i = 0; i < delays.size(); ++i)
        EXPECT_NEAR(mixed.coincidences[i], 0.5 * (ch.coincidences[i] + cv.coincidences[i]), 1e-14);
    EXPECT_THROW(hom_curve({{x, yh, 0.5}, {x, yv, 0.4}}, delays, p), ConfigurationError);
}

TEST(HomCurve, NoisyEstimateOfReducedEnhancement) {
    auto b = full_basis();
    const SpectralProfile p;
    const auto x = oam_photon(b, Path::a, OamQubit::plus2);
    // 97% of pairs matched, 3% orthogonal: R = 1.97.
    const auto scan = hom_curve({{x, oam_photon(b, Path::b, OamQubit::minus2), 0.97}, {x, oam_photon(b, Path::b, OamQubit::plus2), 0.03}},
                                linear_scan(-600, 600, 121), p);
    ASSERT_NEAR(scan.R, 1.97, 1e-12);
    std::mt19937_64 rng(2024);
    double sum = 0;
    const int runs = 200;
    for (int k = 0; k < runs; ++k) {
        const auto counts = sample_hom_counts(scan, 1000, rng);
        const auto est = estimate_enhancement(scan, counts, p);
        EXPECT_LT(std::abs(est.R - 1.97), 5 * est.sigma);
        EXPECT_LT(est.sigma, 0.06);
        sum += est.R;
    }
    EXPECT_NEAR(sum / runs, 1.97, 0.02);
}

TEST(EstimateEnhancement, Errors) {
    auto b = full_basis();
    const SpectralProfile p;
    const auto scan = hom_curve(oam_photon(b, Path::a, OamQubit::plus2), oam_photon(b, Path::b, OamQubit::minus2), {0.0, 1.0}, p);
    EXPECT_THROW(estimate_enhancement(scan, {1}, p), EstimateError);
    EXPECT_THROW(estimate_enhancement(scan, {10, 10}, p), EstimateError);  // no wing points
}

TEST(Interference, RandomPairProperties) {
    auto b = full_basis();
    const SpectralProfile p;
    std::mt19937_64 rng(77);
    const auto delays = linear_scan(0, 300, 16);
    for (int k = 0; k < 1000; ++k) {
        const auto x = random_photon(b, rng, {Path::a}), y = random_photon(b, rng, {Path::b});
        const auto t = coalescence_terms(x, y);
        ASSERT_GE(t.mu, -1e-12);
        ASSERT_LE(t.mu, 1.0 + 1e-12);
        ASSERT_NEAR(t.mu, internal_overlap_direct(x, y), 1e-10);
        const auto scan = hom_curve(x, y, delays, p);
        ASSERT_NEAR(scan.R, 1.0 + t.mu, 1e-10);
        ASSERT_GE(scan.R, 1.0 - 1e-12);
        ASSERT_LE(scan.R, 2.0 + 1e-12);
        for (std::size_t i = 1; i < delays.size(); ++i) ASSERT_LE(scan.coincidences[i], scan.coincidences[i - 1] + 1e-15);
        if (k % 10 == 0) {
            for (double d : {0.0, 40.0, 120.0}) {
                const double c = coincidence_expectation(x, y, d, p);
                ASSERT_NEAR(c, coincidence_expectation(x, y, -d, p), 1e-15);
                ASSERT_NEAR(c, coincidence_expectation(y, x, d, p), 1e-12);
            }
        }
    }
}

TEST(Interference, MuWithoutReflectionFlip) {
    auto b = full_basis();
    const BeamSplitterConvention plain{false};
    const auto x = oam_photon(b, Path::a, OamQubit::plus2), y = oam_photon(b, Path::b, OamQubit::plus2);
    EXPECT_NEAR(coalescence_terms(x, y, plain).mu, 1.0, 1e-12);
    EXPECT_NEAR(internal_overlap_direct(x, y, plain), 1.0, 1e-12);
}

TEST(DelayConversion, MicronsToFemtoseconds) {
    EXPECT_NEAR(delay_to_fs(299.792458), 1000.0, 1e-9);
    const auto s = linear_scan(-1, 1, 5);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_DOUBLE_EQ(s[1], -0.5);
}
