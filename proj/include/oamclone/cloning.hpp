// cloning.hpp
// 1 -> 2 universal cloning of an OAM qubit by bosonic symmetrization: the
// photon to clone enters port a, a maximally mixed ancilla enters port b,
// and only events with both photons leaving through a' are kept.

#pragma once

#include "oamclone/elements.hpp"
#include "oamclone/errors.hpp"
#include "oamclone/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oamclone {

using QubitDensity = Eigen::Matrix2cd;

/// Pure OAM qubit alpha|+2> + beta|-2>.
class QubitSpec {
public:
    QubitSpec(cplx alpha, cplx beta) : amp_(alpha, beta) {
        if (std::abs(amp_.squaredNorm() - 1.0) > 1e-12) throw InvalidStateError("qubit amplitudes not normalized");
    }
    explicit QubitSpec(OamQubit label) : amp_(oam_qubit_amplitudes(label)) {}

    /// Polar angle theta from |+2>, azimuth phi.
    static QubitSpec from_bloch(double theta, double phi) {
        return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
    }

    template <typename Rng>
    static QubitSpec haar_random(Rng& rng) {
        std::normal_distribution<double> g;
        Eigen::Vector2cd v(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
        v.normalize();
        return {v[0], v[1]};
    }

    const Eigen::Vector2cd& amplitudes() const { return amp_; }
    QubitSpec orthogonal() const { return {-std::conj(amp_[1]), std::conj(amp_[0])}; }
    QubitDensity density() const { return amp_ * amp_.adjoint(); }

private:
    Eigen::Vector2cd amp_;
};

/// Expectation values of the three qubit observables with eigenbases
/// {h,v}, {a,d}, {+2,-2}, divided by the trace.
inline Eigen::Vector3d stokes_vector(const QubitDensity& rho) {
    auto expval = [&](OamQubit q) { return oam_qubit_amplitudes(q).dot(rho * oam_qubit_amplitudes(q)).real(); };
    const double tr = rho.trace().real();
    if (!(tr > 0)) throw InvalidStateError("stokes_vector: zero-trace operator");
    return Eigen::Vector3d(expval(OamQubit::h) - expval(OamQubit::v), expval(OamQubit::a) - expval(OamQubit::d),
                           expval(OamQubit::plus2) - expval(OamQubit::minus2)) /
           tr;
}

inline Eigen::Vector3d bloch_vector(const QubitSpec& q) { return stokes_vector(q.density()); }

inline double fidelity(const QubitSpec& target, const QubitDensity& rho) {
    return target.amplitudes().dot(rho * target.amplitudes()).real() / rho.trace().real();
}

// ---------------------------------------------------------------------------

struct ClonerOptions {
    BasisPtr basis = build_basis(all_paths(), default_oam_set());
    Jones polarization = jones_H();
    BeamSplitterConvention bs{};
    // Input photon is prepared as F|phi><phi| + (1-F)|phi_perp><phi_perp|.
    double preparation_fidelity = 1.0;
    // Fraction of events in which the two photons are temporally
    // indistinguishable (v^2 = R - 1 in terms of the coalescence enhancement).
    double temporal_visibility = 1.0;
    // Replaces the maximally mixed ancilla by this pure state on port b.
    std::optional<QubitSpec> pure_ancilla;

    void validate() const {
        if (!(preparation_fidelity >= 0.0 && preparation_fidelity <= 1.0))
            throw ConfigurationError("preparation_fidelity must lie in [0,1]");
        if (!(temporal_visibility >= 0.0 && temporal_visibility <= 1.0))
            throw ConfigurationError("temporal_visibility must lie in [0,1]");
        for (int m : {-2, 2})
            if (!basis->oam_values().count(m)) throw BasisError("cloner basis must contain OAM +2 and -2");
    }
};

struct AncillaSampling {
    enum class Mode { exact, monte_carlo };
    Mode mode = Mode::exact;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;

    static AncillaSampling exact() { return {}; }
    static AncillaSampling monte_carlo(std::size_t n, std::uint64_t seed) { return {Mode::monte_carlo, n, seed}; }
};

struct PortOutcome {
    double success_probability = 0;
    QubitDensity clone_density = QubitDensity::Zero();
};

struct CloneResult {
    QubitDensity clone_density = QubitDensity::Zero();  // a' port, normalized
    double success_probability = 0;                     // a' port
    double fidelity = 0;
    Eigen::Vector3d stokes = Eigen::Vector3d::Zero();
    Eigen::Vector3d input_bloch = Eigen::Vector3d::Zero();
    // b' port with the reflection relabelling undone, when computed.
    std::optional<PortOutcome> other_port;
    // Monte-Carlo ancilla mode only.
    std::optional<double> fidelity_stderr;
    std::optional<double> ancilla_mixedness;  // fidelity of the sampled ancilla state to I/2

    double both_ports_probability() const {
        return success_probability + (other_port ? other_port->success_probability : 0.0);
    }
};

namespace detail {

struct Weighted {
    PhotonState state;
    double weight;
};

inline std::vector<Weighted> prepared_input(const QubitSpec& q, const ClonerOptions& o) {
    std::vector<Weighted> out;
    if (o.preparation_fidelity > 0)
        out.push_back({oam_qubit_photon(o.basis, Path::a, o.polarization, q.amplitudes()), o.preparation_fidelity});
    if (o.preparation_fidelity < 1)
        out.push_back({oam_qubit_photon(o.basis, Path::a, o.polarization, q.orthogonal().amplitudes()),
                       1.0 - o.preparation_fidelity});
    return out;
}

inline std::vector<Weighted> exact_ancilla(const ClonerOptions& o) {
    if (o.pure_ancilla) return {{oam_qubit_photon(o.basis, Path::b, o.polarization, o.pure_ancilla->amplitudes()), 1.0}};
    return {{oam_qubit_photon(o.basis, Path::b, o.polarization, {1.0, 0.0}), 0.5},
            {oam_qubit_photon(o.basis, Path::b, o.polarization, {0.0, 1.0}), 0.5}};
}

// Reflection relabelling on the qubit: |+2> <-> |-2>.
inline QubitDensity flip_qubit(const QubitDensity& rho) {
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    return x * rho * x;
}

inline PortOutcome port_outcome(const DensityOperator& rho1, Path port, const ClonerOptions& o, bool undo_flip) {
    const Eigen::MatrixXcd block = internal_block(rho1, port, o.polarization, {2, -2});
    PortOutcome out;
    out.success_probability = rho1.trace();
    QubitDensity q = block;
    q /= q.trace().real();
    out.clone_density = undo_flip ? flip_qubit(q) : q;
    return out;
}

// Single-photon subnormalized state when the two photons are distinguishable:
// each photon independently reaches `port`; the analysed photon is either one.
inline DensityOperator distinguishable_port_density(const PhotonState& in, const PhotonState& anc,
                                                    const ElementOperator& bs, const ElementOperator& post) {
    const auto x = apply(post, apply(bs, in).state).state;
    const auto y = apply(post, apply(bs, anc).state).state;
    const double px = x.weight(), py = y.weight();
    const Eigen::MatrixXcd m = 0.5 * (py * pure_density(x).matrix() + px * pure_density(y).matrix());
    return {in.basis(), DensityKind::single, m};
}

// Subnormalized single-photon state at `port` for one pure input/ancilla pair,
// combining the indistinguishable and distinguishable fractions.
inline DensityOperator port_density(const PhotonState& in, const PhotonState& anc, const ClonerOptions& o,
                                    const ElementOperator& bs, const ElementOperator& post) {
    const auto pair = apply(post, apply(bs, symmetrize_product(in, anc)).state).state;
    DensityOperator rho = reduced_density(pair);
    if (o.temporal_visibility < 1.0) {
        const auto dist = distinguishable_port_density(in, anc, bs, post);
        rho = mix({{rho, o.temporal_visibility}, {dist, 1.0 - o.temporal_visibility}});
    }
    return rho;
}

// Exact ancilla mixture. The partial trace is linear, so each pure branch is
// reduced on its own and the reduced states are mixed.
inline DensityOperator exact_port_density(const QubitSpec& q, const ClonerOptions& o, Path port) {
    const auto bs = beam_splitter(o.basis, o.bs);
    const auto post = path_filter(port, o.basis);
    std::vector<std::pair<DensityOperator, double>> parts;
    for (const auto& in : prepared_input(q, o))
        for (const auto& anc : exact_ancilla(o))
            parts.push_back({port_density(in.state, anc.state, o, bs, post), in.weight * anc.weight});
    return mix(parts);
}

inline CloneResult finish(const QubitSpec& q, PortOutcome a, std::optional<PortOutcome> b) {
    CloneResult r;
    r.clone_density = a.clone_density;
    r.success_probability = a.success_probability;
    r.fidelity = fidelity(q, a.clone_density);
    r.stokes = stokes_vector(a.clone_density);
    r.input_bloch = bloch_vector(q);
    r.other_port = b;
    return r;
}

}  // namespace detail

/// Full simulation: prepare, evolve through the beam splitter, post-select
/// on both photons in a' (and separately b'), trace out one photon.
inline CloneResult run_cloner_full(const QubitSpec& input, AncillaSampling sampling = AncillaSampling::exact(),
                                   const ClonerOptions& opts = {}) {
    opts.validate();
    const bool flip = opts.bs.oam_flip_on_reflection;
    if (sampling.mode == AncillaSampling::Mode::exact) {
        const auto a = detail::port_outcome(detail::exact_port_density(input, opts, Path::a_prime), Path::a_prime, opts, false);
        const auto b = detail::port_outcome(detail::exact_port_density(input, opts, Path::b_prime), Path::b_prime, opts, flip);
        return detail::finish(input, a, b);
    }

    // Monte-Carlo ancilla: the b photon leaves the source at |H,0>, passes a
    // half-wave plate at a uniformly random angle and the pi -> o2 transferrer.
    if (sampling.samples == 0) throw ConfigurationError("monte-carlo ancilla needs at least one sample");
    if (opts.pure_ancilla) throw ConfigurationError("monte-carlo sampling applies to the mixed ancilla only");
    std::mt19937_64 rng(sampling.seed);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    const auto& basis = opts.basis;
    const auto bs = beam_splitter(basis, opts.bs);
    const auto post = path_filter(Path::a_prime, basis);
    const auto transfer = transferrer_pi_to_o2(basis, {Path::b});
    const auto source_b = product_photon(basis, Path::b, jones_H(), {{0, 1.0}});
    const auto inputs = detail::prepared_input(input, opts);
    const Eigen::Vector2cd phi = input.amplitudes();

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis->size()),
                                                  static_cast<Eigen::Index>(basis->size()));
    QubitDensity ancilla_avg = QubitDensity::Zero();
    std::vector<double> p(sampling.samples), f(sampling.samples);
    for (std::size_t s = 0; s < sampling.samples; ++s) {
        const auto rotated = apply(half_wave_plate(angle(rng), basis, {Path::b}), source_b).state;
        const auto anc = apply(transfer, rotated).state.normalized();
        const Eigen::Vector2cd anc_q(anc.amplitude({Path::b, Pol::L, 2}) / jones_H()[0],
                                     anc.amplitude({Path::b, Pol::L, -2}) / jones_H()[0]);
        ancilla_avg += anc_q * anc_q.adjoint();
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(sum.rows(), sum.cols());
        for (const auto& in : inputs) rho += in.weight * detail::port_density(in.state, anc, opts, bs, post).matrix();
        sum += rho;
        const Eigen::MatrixXcd block = internal_block({basis, DensityKind::single, rho}, Path::a_prime, opts.polarization, {2, -2});
        p[s] = rho.trace().real();
        f[s] = phi.dot(block * phi).real();
    }
    const double n = static_cast<double>(sampling.samples);
    const DensityOperator rho1(basis, DensityKind::single, sum / n);
    auto a = detail::port_outcome(rho1, Path::a_prime, opts, false);
    CloneResult r = detail::finish(input, a, std::nullopt);

    // Ratio estimator F = sum f / sum p; delta-method standard error.
    double mp = 0, mf = 0;
    for (std::size_t s = 0; s < sampling.samples; ++s) {
        mp += p[s];
        mf += f[s];
    }
    mp /= n;
    mf /= n;
    const double ratio = mf / mp;
    double var = 0;
    for (std::size_t s = 0; s < sampling.samples; ++s) {
        const double e = f[s] - ratio * p[s];
        var += e * e;
    }
    var /= (n > 1 ? n - 1 : 1);
    r.fidelity_stderr = std::sqrt(var / n) / mp;

    ancilla_avg /= n;
    Eigen::SelfAdjointEigenSolver<QubitDensity> es(ancilla_avg);
    double root = 0;
    for (int k = 0; k < 2; ++k) root += std::sqrt(std::max(0.0, es.eigenvalues()[k]) / 2.0);
    r.ancilla_mixedness = root * root;
    return r;
}

/// The ancilla that reaches a' in the same internal state as `q`
/// (its reflection image).
inline QubitSpec matched_ancilla(const QubitSpec& q, BeamSplitterConvention bs = {}) {
    if (!bs.oam_flip_on_reflection) return q;
    return {q.amplitudes()[1], q.amplitudes()[0]};
}

// ---------------------------------------------------------------------------
// Projector route.

struct BellBasis {
    TwoPhotonState phi_plus, phi_minus, psi_plus, psi_minus;
};

/// Bell states with one photon on `x` and one on `y` (x != y), OAM on {+2,-2}
/// and common polarization `pol`.
inline BellBasis bell_basis(const BasisPtr& basis, Path x = Path::a, Path y = Path::b, const Jones& pol = jones_H()) {
    if (x == y) throw ConfigurationError("bell_basis: paths must differ");
    auto ket = [&](int m, int n) {
        return symmetrize_product(product_photon(basis, x, pol, {{m, 1.0}}), product_photon(basis, y, pol, {{n, 1.0}}));
    };
    const auto pp = ket(2, 2), mm = ket(-2, -2), pm = ket(2, -2), mp = ket(-2, 2);
    return {(pp + mm).scaled(kInvSqrt2), (pp - mm).scaled(kInvSqrt2), (pm + mp).scaled(kInvSqrt2),
            (pm - mp).scaled(kInvSqrt2)};
}

struct CoalescedBellStates {
    TwoPhotonState phi_plus, phi_minus, psi_plus;  // psi_minus vanishes for bosons in one mode
};

inline CoalescedBellStates coalesced_bell_states(const BasisPtr& basis, Path port = Path::a_prime,
                                                 const Jones& pol = jones_H()) {
    auto ket = [&](int m, int n) {
        return symmetrize_product(product_photon(basis, port, pol, {{m, 1.0}}),
                                  product_photon(basis, port, pol, {{n, 1.0}}));
    };
    const auto pp = ket(2, 2), mm = ket(-2, -2);
    return {(pp + mm).scaled(kInvSqrt2), (pp - mm).scaled(kInvSqrt2), ket(2, -2)};
}

/// Same channel computed by applying
///   P = |Psi+>_{a'}<Phi+|_{ab} + |Phi+>_{a'}<Psi+|_{ab} + |Phi->_{a'}<Psi-|_{ab}
/// to the input pair. On the both-in-a' sector the beam splitter equals
/// (i/sqrt2) P, so the success probability is |P psi|^2 / 2.
inline CloneResult run_cloner_projector(const QubitSpec& input, const ClonerOptions& opts = {}) {
    opts.validate();
    const auto& basis = opts.basis;
    const auto ab = bell_basis(basis, Path::a, Path::b, opts.polarization);
    const auto out = coalesced_bell_states(basis, Path::a_prime, opts.polarization);
    const auto phi_a = oam_qubit_photon(basis, Path::a, opts.polarization, input.amplitudes());

    std::vector<std::pair<DensityOperator, double>> parts;
    for (const auto& anc : detail::exact_ancilla(opts)) {
        const auto in = symmetrize_product(phi_a, anc.state);
        const auto projected = out.psi_plus.scaled(ab.phi_plus.inner(in)) + out.phi_plus.scaled(ab.psi_plus.inner(in)) +
                               out.phi_minus.scaled(ab.psi_minus.inner(in));
        parts.push_back({reduced_density(projected.scaled(kInvSqrt2)), anc.weight});
    }
    const auto rho1 = mix(parts);
    return detail::finish(input, detail::port_outcome(rho1, Path::a_prime, opts, false), std::nullopt);
}

// ---------------------------------------------------------------------------

struct SweepSummary {
    std::size_t count = 0;
    double min = 0, max = 0, mean = 0, stddev = 0;
    std::vector<std::pair<OamQubit, double>> table_states;  // fidelity per named state
};

/// Cloner over the six named states plus `n` Haar-random qubits.
inline SweepSummary universality_sweep(std::size_t n, std::uint64_t seed, const ClonerOptions& opts = {}) {
    if (n < 1) throw ConfigurationError("universality_sweep: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> fs;
    SweepSummary s;
    for (OamQubit q : table_states()) {
        const double f = run_cloner_full(QubitSpec(q), AncillaSampling::exact(), opts).fidelity;
        s.table_states.push_back({q, f});
        fs.push_back(f);
    }
    for (std::size_t k = 0; k < n; ++k)
        fs.push_back(run_cloner_full(QubitSpec::haar_random(rng), AncillaSampling::exact(), opts).fidelity);
    s.count = fs.size();
    s.min = *std::min_element(fs.begin(), fs.end());
    s.max = *std::max_element(fs.begin(), fs.end());
    double sum = 0;
    for (double f : fs) sum += f;
    s.mean = sum / static_cast<double>(fs.size());
    double var = 0;
    for (double f : fs) var += (f - s.mean) * (f - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(fs.size()));
    return s;
}

}  // namespace oamclone
