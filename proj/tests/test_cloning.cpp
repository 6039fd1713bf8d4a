#include "oamclone/cloning.hpp"
#include "oamclone/experiment.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace oamclone;

namespace {

constexpr double kF = 5.0 / 6.0;

BasisPtr full_basis() { return build_basis(all_paths(), default_oam_set()); }

// Optimal symmetric clone of a pure qubit: (2/3)|phi><phi| + I/6.
QubitDensity optimal_clone(const QubitSpec& q) {
    return (2.0 / 3.0) * q.density() + QubitDensity::Identity() / 6.0;
}

}  // namespace

TEST(BellBasis, Orthonormal) {
    const auto bb = bell_basis(full_basis());
    const std::vector<const TwoPhotonState*> all{&bb.phi_plus, &bb.phi_minus, &bb.psi_plus, &bb.psi_minus};
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < all.size(); ++j)
            EXPECT_NEAR(std::abs(all[i]->inner(*all[j])), i == j ? 1.0 : 0.0, 1e-14);
    EXPECT_THROW(bell_basis(full_basis(), Path::a, Path::a), ConfigurationError);
}

TEST(BellBasis, PsiMinusVanishesInOneMode) {
    auto b = full_basis();
    auto ket = [&](int m, int n) {
        return symmetrize_product(product_photon(b, Path::a_prime, jones_H(), {{m, 1.0}}),
                                  product_photon(b, Path::a_prime, jones_H(), {{n, 1.0}}));
    };
    EXPECT_NEAR((ket(2, -2) - ket(-2, 2)).weight(), 0.0, 1e-28);
    const auto c = coalesced_bell_states(b);
    EXPECT_NEAR(c.phi_plus.weight(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(c.phi_plus.inner(c.psi_plus)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c.phi_plus.inner(c.phi_minus)), 0.0, 1e-14);
}

TEST(StokesVector, Examples) {
    EXPECT_LT(stokes_vector(QubitDensity::Identity() / 2).norm(), 1e-15);
    EXPECT_LT((bloch_vector(QubitSpec(OamQubit::plus2)) - Eigen::Vector3d(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((bloch_vector(QubitSpec(OamQubit::minus2)) - Eigen::Vector3d(0, 0, -1)).norm(), 1e-15);
    EXPECT_LT((bloch_vector(QubitSpec(OamQubit::h)) - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
    EXPECT_LT((bloch_vector(QubitSpec(OamQubit::d)) - Eigen::Vector3d(0, -1, 0)).norm(), 1e-15);
    const QubitSpec q = QubitSpec::from_bloch(1.1, 0.4);
    const Eigen::Vector3d s = stokes_vector(optimal_clone(q));
    EXPECT_NEAR(s.norm(), 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(s.normalized().dot(bloch_vector(q)), 1.0, 1e-14);
}

TEST(QubitSpec, Validation) {
    EXPECT_THROW(QubitSpec(1.0, 1.0), InvalidStateError);
    EXPECT_NO_THROW(QubitSpec(0.6, cplx(0, 0.8)));
    const QubitSpec q(0.6, cplx(0, 0.8));
    EXPECT_NEAR(std::abs(q.amplitudes().dot(q.orthogonal().amplitudes())), 0.0, 1e-15);
}

TEST(RunClonerFull, TableStates) {
    for (OamQubit s : table_states()) {
        const auto r = run_cloner_full(QubitSpec(s));
        EXPECT_NEAR(r.fidelity, kF, 1e-12) << to_string(s);
        EXPECT_NEAR(r.success_probability, 3.0 / 8.0, 1e-12);
        EXPECT_NEAR(r.both_ports_probability(), 0.75, 1e-12);
        EXPECT_LT((r.clone_density - optimal_clone(QubitSpec(s))).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(RunClonerFull, PlusTwoGivesDiagonalClone) {
    const auto r = run_cloner_full(QubitSpec(OamQubit::plus2));
    QubitDensity expect = QubitDensity::Zero();
    expect(0, 0) = kF;
    expect(1, 1) = 1.0 / 6.0;
    EXPECT_LT((r.clone_density - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunClonerFull, PureMatchedAncillaAlwaysCoalesces) {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 20; ++k) {
        const auto q = QubitSpec::haar_random(rng);
        ClonerOptions o;
        o.pure_ancilla = matched_ancilla(q);
        const auto r = run_cloner_full(q, AncillaSampling::exact(), o);
        EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
        EXPECT_NEAR(r.success_probability, 0.5, 1e-12);

        // Without the reflection flip the ancilla is the input itself.
        ClonerOptions plain;
        plain.bs.oam_flip_on_reflection = false;
        plain.pure_ancilla = q;
        const auto r2 = run_cloner_full(q, AncillaSampling::exact(), plain);
        EXPECT_NEAR(r2.fidelity, 1.0, 1e-12);
        EXPECT_NEAR(r2.success_probability, 0.5, 1e-12);
    }
}

TEST(RunClonerFull, PolarizationChoiceIrrelevant) {
    ClonerOptions o;
    o.polarization = jones_L();
    const auto r = run_cloner_full(QubitSpec(OamQubit::a), AncillaSampling::exact(), o);
    EXPECT_NEAR(r.fidelity, kF, 1e-12);
    EXPECT_NEAR(r.success_probability, 0.375, 1e-12);
}

TEST(RunClonerFull, RejectsBasisWithoutQubitSector) {
    ClonerOptions o;
    o.basis = build_basis(all_paths(), {-1, 0, 1});
    EXPECT_THROW(run_cloner_full(QubitSpec(OamQubit::h), AncillaSampling::exact(), o), BasisError);
    ClonerOptions bad;
    bad.preparation_fidelity = 1.5;
    EXPECT_THROW(run_cloner_full(QubitSpec(OamQubit::h), AncillaSampling::exact(), bad), ConfigurationError);
}

TEST(RunClonerProjector, AgreesWithFullEvolution) {
    std::mt19937_64 rng(12);
    std::vector<QubitSpec> inputs;
    for (OamQubit s : table_states()) inputs.emplace_back(s);
    for (int k = 0; k < 50; ++k) inputs.push_back(QubitSpec::haar_random(rng));
    for (const auto& q : inputs) {
        const auto full = run_cloner_full(q);
        const auto proj = run_cloner_projector(q);
        ASSERT_LT((full.clone_density - proj.clone_density).cwiseAbs().maxCoeff(), 1e-10);
        ASSERT_NEAR(full.success_probability, proj.success_probability, 1e-12);
        ASSERT_NEAR(proj.fidelity, kF, 1e-12);
        ASSERT_LT((proj.stokes - (2.0 / 3.0) * proj.input_bloch).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(RunClonerFull, BothPortsGiveSameClone) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 50; ++k) {
        const auto q = QubitSpec::haar_random(rng);
        const auto r = run_cloner_full(q);
        ASSERT_TRUE(r.other_port.has_value());
        ASSERT_LT((r.other_port->clone_density - r.clone_density).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_NEAR(r.other_port->success_probability, 0.375, 1e-12);
    }
}

TEST(RunClonerFull, UniversalityProperty) {
    std::mt19937_64 rng(99);
    std::vector<double> fs;
    const int n = 1000;
    for (int k = 0; k < n; ++k) {
        const auto q = QubitSpec::haar_random(rng);
        const auto r = run_cloner_full(q);
        fs.push_back(r.fidelity);
        ASSERT_NEAR(r.success_probability, 0.375, 1e-12);
        ASSERT_LE(r.stokes.norm(), 1.0 + 1e-10);
        // parallel with ratio 2/3
        ASSERT_LT((r.stokes - (2.0 / 3.0) * r.input_bloch).norm(), 1e-10);
        ASSERT_NEAR(r.clone_density.trace().real(), 1.0, 1e-12);
    }
    double mean = 0, var = 0;
    for (double f : fs) mean += f / n;
    for (double f : fs) var += (f - mean) * (f - mean) / n;
    EXPECT_LT(std::sqrt(var), 1e-10);
    EXPECT_NEAR(mean, kF, 1e-12);
}

TEST(RunClonerFull, MonteCarloAncillaConverges) {
    const auto q = QubitSpec(OamQubit::a);
    const auto exact = run_cloner_full(q);
    const auto mc = run_cloner_full(q, AncillaSampling::monte_carlo(10000, 5));
    ASSERT_TRUE(mc.fidelity_stderr.has_value());
    ASSERT_TRUE(mc.ancilla_mixedness.has_value());
    EXPECT_GT(*mc.fidelity_stderr, 0.0);
    EXPECT_LT(std::abs(mc.fidelity - exact.fidelity), 3 * *mc.fidelity_stderr);
    EXPECT_GT(*mc.ancilla_mixedness, 0.99);

    // O(1/sqrt N): a 16x smaller sample has roughly 4x the error bar.
    const auto small = run_cloner_full(q, AncillaSampling::monte_carlo(625, 5));
    EXPECT_NEAR(*small.fidelity_stderr / *mc.fidelity_stderr, 4.0, 1.0);

    const auto again = run_cloner_full(q, AncillaSampling::monte_carlo(625, 5));
    EXPECT_EQ(again.fidelity, small.fidelity);

    ClonerOptions o;
    o.pure_ancilla = q;
    EXPECT_THROW(run_cloner_full(q, AncillaSampling::monte_carlo(10, 1), o), ConfigurationError);
    EXPECT_THROW(run_cloner_full(q, AncillaSampling::monte_carlo(0, 1)), ConfigurationError);
}

TEST(UniversalitySweep, IdealAndImperfect) {
    const auto s = universality_sweep(1000, 3);
    EXPECT_EQ(s.count, 1006u);
    ASSERT_EQ(s.table_states.size(), 6u);
    for (const auto& [state, f] : s.table_states) EXPECT_NEAR(f, kF, 1e-12) << to_string(state);
    EXPECT_LT(s.max - s.min, 1e-10);
    EXPECT_LT(s.stddev, 1e-10);

    const auto imperfect = universality_sweep(20, 3, cloner_options({0.96, 1.97}));
    EXPECT_NEAR(imperfect.mean, 0.805, 5e-4);
    EXPECT_LT(imperfect.max - imperfect.min, 1e-10);

    // Preparation infidelity alone.
    ClonerOptions prep;
    prep.preparation_fidelity = 0.96;
    EXPECT_NEAR(universality_sweep(5, 1, prep).mean, (0.96 * 2 + 0.5) / 3, 1e-12);
    EXPECT_THROW(universality_sweep(0, 1), ConfigurationError);
}

TEST(PartialTrace, PairLevelMixtureGivesOptimalClone) {
    // Mix the post-selected pair states first, then trace out one photon.
    auto b = full_basis();
    const auto bs = beam_splitter(b);
    const auto post = path_filter(Path::a_prime, b);
    const auto in = oam_qubit_photon(b, Path::a, jones_H(), {1.0, 0.0});
    std::vector<std::pair<DensityOperator, double>> parts;
    for (const Eigen::Vector2cd& anc : {Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)}) {
        const auto pair = apply(post, apply(bs, symmetrize_product(in, oam_qubit_photon(b, Path::b, jones_H(), anc))).state).state;
        parts.push_back({pure_density(pair), 0.5});
    }
    const auto rho1 = partial_trace_to_single(mix(parts));
    EXPECT_NEAR(rho1.trace(), 0.375, 1e-12);
    QubitDensity block = internal_block(rho1, Path::a_prime, jones_H(), {2, -2});
    block /= block.trace().real();
    QubitDensity expect = QubitDensity::Zero();
    expect(0, 0) = kF;
    expect(1, 1) = 1.0 / 6.0;
    EXPECT_LT((block - expect).cwiseAbs().maxCoeff(), 1e-12);
}
