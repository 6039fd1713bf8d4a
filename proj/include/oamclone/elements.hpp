// elements.hpp
// Optical elements as linear maps on the single-photon mode space, lifted to
// two-photon states as U (x) U.

#pragma once

#include "oamclone/errors.hpp"
#include "oamclone/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oamclone {

// unitary:     U^dag U = I on the element's defined domain
// projective:  P^2 = P, output weight is the pass probability
// contraction: anything with singular values <= 1 (lossy q-plates, composites)
enum class ElementKind { unitary, projective, contraction };

struct ElementOperator {
    BasisPtr basis;
    Eigen::MatrixXcd matrix;
    ElementKind kind = ElementKind::unitary;
    std::set<Path> touched_paths;
    std::string success_semantics;
    // Modes whose image would leave the OAM truncation set. Populating one is an error.
    std::set<std::size_t> undefined_modes;
    // When set, inputs on touched paths must carry exactly this OAM value.
    std::optional<int> required_input_oam;
};

template <typename State>
struct Applied {
    State state;
    double weight;  // output weight / input weight
};

namespace detail {

inline Eigen::MatrixXcd identity_for(const ModeBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    return Eigen::MatrixXcd::Identity(n, n);
}

inline Eigen::Index idx(const ModeBasis& basis, const ModeIndex& m) {
    return static_cast<Eigen::Index>(basis.index_of(m));
}

// Places a 2x2 polarization matrix (circular basis) on every (path, oam) block
// of the touched paths.
inline Eigen::MatrixXcd polarization_matrix(const ModeBasis& basis, const std::set<Path>& paths,
                                            const Eigen::Matrix2cd& jones) {
    Eigen::MatrixXcd m = identity_for(basis);
    for (Path p : paths) {
        if (!basis.paths().count(p)) continue;
        for (int oam : basis.oam_values()) {
            const Eigen::Index l = idx(basis, {p, Pol::L, oam}), r = idx(basis, {p, Pol::R, oam});
            m(l, l) = jones(0, 0);
            m(l, r) = jones(0, 1);
            m(r, l) = jones(1, 0);
            m(r, r) = jones(1, 1);
        }
    }
    return m;
}

// Linear-basis retarder R(theta) diag(1, e^{i delta}) R(-theta), converted to
// the circular basis through the H/V Jones vectors.
inline Eigen::Matrix2cd retarder_circular(double theta, double retardance) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d rot;
    rot << c, -s, s, c;
    Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
    diag(0, 0) = 1.0;
    diag(1, 1) = std::polar(1.0, retardance);
    const Eigen::Matrix2cd lin = rot.cast<cplx>() * diag * rot.transpose().cast<cplx>();
    Eigen::Matrix2cd to_circ;
    to_circ.col(0) = jones_H();
    to_circ.col(1) = jones_V();
    return to_circ * lin * to_circ.adjoint();
}

inline std::set<Path> resolve_paths(const ModeBasis& basis, const std::set<Path>& requested) {
    if (requested.empty()) return basis.paths();
    return requested;
}

}  // namespace detail

/// Half-wave plate with fast axis at `theta` from horizontal.
inline ElementOperator half_wave_plate(double theta, const BasisPtr& basis, const std::set<Path>& paths = {}) {
    const auto touched = detail::resolve_paths(*basis, paths);
    return {basis, detail::polarization_matrix(*basis, touched, detail::retarder_circular(theta, std::numbers::pi)),
            ElementKind::unitary, touched, "lossless", {}, std::nullopt};
}

inline ElementOperator quarter_wave_plate(double theta, const BasisPtr& basis, const std::set<Path>& paths = {}) {
    const auto touched = detail::resolve_paths(*basis, paths);
    return {basis,
            detail::polarization_matrix(*basis, touched, detail::retarder_circular(theta, std::numbers::pi / 2)),
            ElementKind::unitary, touched, "lossless", {}, std::nullopt};
}

struct QPlateSpec {
    double charge = 1.0;
    double conversion_efficiency = 1.0;

    void validate() const {
        if (!(conversion_efficiency >= 0.0 && conversion_efficiency <= 1.0))
            throw ConfigurationError("q-plate conversion_efficiency must lie in [0,1]");
        const double twice = 2.0 * charge;
        if (std::abs(twice - std::round(twice)) > 1e-12)
            throw ConfigurationError("q-plate charge must be a half-integer");
    }
    int oam_shift() const { return static_cast<int>(std::lround(2.0 * charge)); }
};

// Which circular handedness gains +2q of OAM at a q-plate.
enum class Handedness { left_gains, right_gains };

// What happens to a mode whose converted OAM falls outside the truncation set.
enum class OutOfRange { error, discard };

/// q-plate: |L,m> -> |R,m+2q>, |R,m> -> |L,m-2q> (for left_gains).
/// Efficiency eta < 1 scales the converted branch by sqrt(eta); the
/// unconverted remainder is treated as heralded loss.
inline ElementOperator q_plate(const QPlateSpec& spec, const BasisPtr& basis, const std::set<Path>& paths = {},
                               Handedness handedness = Handedness::left_gains,
                               OutOfRange out_of_range = OutOfRange::error) {
    spec.validate();
    const auto& b = *basis;
    const auto touched = detail::resolve_paths(b, paths);
    Eigen::MatrixXcd m = detail::identity_for(b);
    const double amp = std::sqrt(spec.conversion_efficiency);
    const int shift = spec.oam_shift();
    std::set<std::size_t> undefined;
    bool discarded = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const ModeIndex& in = b[j];
        if (!touched.count(in.path)) continue;
        const auto jj = static_cast<Eigen::Index>(j);
        m(jj, jj) = 0.0;
        const bool gains = (in.pol == Pol::L) == (handedness == Handedness::left_gains);
        const ModeIndex out{in.path, in.pol == Pol::L ? Pol::R : Pol::L, in.oam + (gains ? shift : -shift)};
        if (!b.contains(out)) {
            if (out_of_range == OutOfRange::error)
                undefined.insert(j);
            else
                discarded = true;
            continue;
        }
        m(detail::idx(b, out), jj) = amp;
    }
    const bool lossless = spec.conversion_efficiency == 1.0 && !discarded;
    return {basis,
            std::move(m),
            lossless ? ElementKind::unitary : ElementKind::contraction,
            touched,
            lossless ? "lossless" : "converted branch kept; unconverted fraction counted as loss",
            std::move(undefined),
            std::nullopt};
}

/// Ideal linear polarizer passing polarization at `angle` from horizontal.
inline ElementOperator polarizer(double angle, const BasisPtr& basis, const std::set<Path>& paths = {}) {
    const auto touched = detail::resolve_paths(*basis, paths);
    const Jones j = jones_linear(angle);
    return {basis, detail::polarization_matrix(*basis, touched, j * j.adjoint()), ElementKind::projective, touched,
            "weight = pass probability", {}, std::nullopt};
}

inline ElementOperator polarizer_H(const BasisPtr& basis, const std::set<Path>& paths = {}) {
    return polarizer(0.0, basis, paths);
}

/// Single-mode fiber coupler: keeps only OAM 0 on the touched paths.
inline ElementOperator smf_filter(const BasisPtr& basis, const std::set<Path>& paths = {}) {
    const auto& b = *basis;
    const auto touched = detail::resolve_paths(b, paths);
    Eigen::MatrixXcd m = detail::identity_for(b);
    for (std::size_t j = 0; j < b.size(); ++j)
        if (touched.count(b[j].path) && b[j].oam != 0) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 0.0;
    return {basis, std::move(m), ElementKind::projective, touched, "weight = fiber coupling probability", {}, std::nullopt};
}

/// Projector onto the modes of one path (post-selection on output port occupancy).
inline ElementOperator path_filter(Path keep, const BasisPtr& basis) {
    const auto& b = *basis;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t j = 0; j < b.size(); ++j)
        if (b[j].path == keep) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    return {basis, std::move(m), ElementKind::projective, b.paths(), "weight = port occupancy probability", {},
            std::nullopt};
}

struct BeamSplitterConvention {
    // Reflection maps OAM m -> -m. Disabled for abstract-label qudit runs.
    bool oam_flip_on_reflection = true;
};

/// Balanced beam splitter: a' = (a + i Phi(b))/sqrt2, b' = (i Phi(a) + b)/sqrt2,
/// a -> a' transmitted. The output ports are routed back onto the input
/// labels by the adjoint block so the full matrix is unitary (and Hermitian).
inline ElementOperator beam_splitter(const BasisPtr& basis, BeamSplitterConvention conv = {}) {
    const auto& b = *basis;
    for (Path p : {Path::a, Path::b, Path::a_prime, Path::b_prime})
        if (!b.paths().count(p)) throw BasisError("beam_splitter: basis lacks path " + to_string(p));
    if (conv.oam_flip_on_reflection)
        for (int m : b.oam_values())
            if (!b.oam_values().count(-m))
                throw BasisError("beam_splitter: OAM set not closed under m -> -m (" + std::to_string(m) + ")");

    const auto n = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd fwd = Eigen::MatrixXcd::Zero(n, n);
    const cplx t(kInvSqrt2, 0.0), r(0.0, kInvSqrt2);
    for (std::size_t j = 0; j < b.size(); ++j) {
        const ModeIndex& in = b[j];
        if (in.path != Path::a && in.path != Path::b) continue;
        const int reflected = conv.oam_flip_on_reflection ? -in.oam : in.oam;
        const Path through = in.path == Path::a ? Path::a_prime : Path::b_prime;
        const Path across = in.path == Path::a ? Path::b_prime : Path::a_prime;
        const auto jj = static_cast<Eigen::Index>(j);
        fwd(detail::idx(b, {through, in.pol, in.oam}), jj) = t;
        fwd(detail::idx(b, {across, in.pol, reflected}), jj) = r;
    }
    Eigen::MatrixXcd m = fwd + fwd.adjoint();
    return {basis, std::move(m), ElementKind::unitary, b.paths(), "lossless", {}, std::nullopt};
}

/// Product `second * first` (light passes `first` then `second`).
inline ElementOperator compose(const ElementOperator& second, const ElementOperator& first) {
    require_same_basis(second.basis, first.basis, "compose");
    ElementOperator out;
    out.basis = first.basis;
    out.matrix = second.matrix * first.matrix;
    out.kind = (first.kind == ElementKind::unitary && second.kind == ElementKind::unitary && second.undefined_modes.empty())
                   ? ElementKind::unitary
                   : ElementKind::contraction;
    out.touched_paths = first.touched_paths;
    out.touched_paths.insert(second.touched_paths.begin(), second.touched_paths.end());
    out.success_semantics = "composite: weight = product of stage weights";
    out.undefined_modes = first.undefined_modes;
    for (std::size_t j = 0; j < first.basis->size(); ++j)
        for (std::size_t u : second.undefined_modes)
            if (first.matrix(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j)) != cplx{})
                out.undefined_modes.insert(j);
    out.required_input_oam = first.required_input_oam;
    return out;
}

/// polarization qubit at OAM 0 -> |H> (x) OAM qubit on {+2q, -2q}; ideal weight 1/2.
inline ElementOperator transferrer_pi_to_o2(const BasisPtr& basis, const std::set<Path>& paths = {},
                                            const QPlateSpec& qp = {}, Handedness h = Handedness::left_gains) {
    auto op = compose(polarizer_H(basis, paths), q_plate(qp, basis, paths, h, OutOfRange::error));
    op.required_input_oam = 0;
    op.success_semantics = "weight = q-plate efficiency x 1/2";
    return op;
}

/// |H> (x) OAM qubit -> polarization qubit at OAM 0; ideal weight 1/2.
/// Branches leaving the OAM truncation are exactly those the fiber rejects,
/// so the q-plate stage discards them.
inline ElementOperator transferrer_o2_to_pi(const BasisPtr& basis, const std::set<Path>& paths = {},
                                            const QPlateSpec& qp = {}, Handedness h = Handedness::left_gains) {
    auto op = compose(smf_filter(basis, paths), q_plate(qp, basis, paths, h, OutOfRange::discard));
    op.success_semantics = "weight = q-plate efficiency x 1/2";
    return op;
}

inline ElementOperator identity_element(const BasisPtr& basis) {
    return {basis, detail::identity_for(*basis), ElementKind::unitary, {}, "identity", {}, std::nullopt};
}

// ---------------------------------------------------------------------------

inline bool is_unitary(const ElementOperator& op, double tol = 1e-10) {
    const auto n = op.matrix.cols();
    std::vector<Eigen::Index> domain;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!op.undefined_modes.count(static_cast<std::size_t>(j))) domain.push_back(j);
    Eigen::MatrixXcd cols(op.matrix.rows(), static_cast<Eigen::Index>(domain.size()));
    for (std::size_t c = 0; c < domain.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = op.matrix.col(domain[c]);
    const Eigen::MatrixXcd gram = cols.adjoint() * cols;
    return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_idempotent(const ElementOperator& op, double tol = 1e-10) {
    return (op.matrix * op.matrix - op.matrix).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

inline void check_input(const ElementOperator& op, const std::vector<std::size_t>& populated) {
    const auto& b = *op.basis;
    for (std::size_t j : populated) {
        if (op.required_input_oam && op.touched_paths.count(b[j].path) && b[j].oam != *op.required_input_oam)
            throw PreconditionError("element requires input OAM " + std::to_string(*op.required_input_oam) +
                                    ", got mode " + to_string(b[j]));
        if (op.undefined_modes.count(j))
            throw BasisError("basis closure: image of mode " + to_string(b[j]) + " lies outside the OAM truncation");
    }
}

}  // namespace detail

inline Applied<PhotonState> apply(const ElementOperator& op, const PhotonState& state) {
    require_same_basis(op.basis, state.basis(), "apply");
    std::vector<std::size_t> populated;
    for (std::size_t j = 0; j < state.basis()->size(); ++j)
        if (state[j] != cplx{}) populated.push_back(j);
    detail::check_input(op, populated);
    PhotonState out(state.basis(), op.matrix * state.amplitudes());
    const double w_in = state.weight();
    return {out, w_in > 0 ? out.weight() / w_in : 0.0};
}

/// Two-photon action U (x) U on the bosonic pair map, evaluated sparsely:
/// each a_i^dag is replaced by sum_k U_ki a_k^dag.
inline Applied<TwoPhotonState> apply(const ElementOperator& op, const TwoPhotonState& state) {
    require_same_basis(op.basis, state.basis(), "apply");
    const std::size_t n = state.basis()->size();
    std::vector<std::size_t> populated;
    for (const auto& [k, c] : state.amplitudes()) {
        populated.push_back(k.first);
        populated.push_back(k.second);
    }
    detail::check_input(op, populated);

    std::vector<std::vector<std::pair<std::size_t, cplx>>> columns(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx u = op.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
            if (u != cplx{}) columns[j].push_back({k, u});
        }

    TwoPhotonState out(state.basis());
    for (const auto& [key, c] : state.amplitudes()) {
        const auto [i, j] = key;
        // Stored c on {i,i} is the coefficient of (a_i^dag)^2/sqrt2.
        const cplx coeff = i == j ? c * kInvSqrt2 : c;
        for (const auto& [k, uki] : columns[i])
            for (const auto& [l, ulj] : columns[j]) out.add_creation_product(k, l, coeff * uki * ulj);
    }
    out.prune();
    const double w_in = state.weight();
    return {out, w_in > 0 ? out.weight() / w_in : 0.0};
}

/// Reflection relabelling m -> -m on every mode (internal-state map Phi).
inline PhotonState flip_oam(const PhotonState& psi) {
    const auto& b = *psi.basis();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.amplitudes().size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (psi[j] == cplx{}) continue;
        const ModeIndex target{b[j].path, b[j].pol, -b[j].oam};
        if (!b.contains(target)) throw BasisError("flip_oam: basis not closed under m -> -m");
        out[detail::idx(b, target)] = psi[j];
    }
    return {psi.basis(), out};
}

/// Moves a photon's amplitudes from path `from` to path `to` unchanged.
inline PhotonState relabel_path(const PhotonState& psi, Path from, Path to) {
    const auto& b = *psi.basis();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.amplitudes().size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (psi[j] == cplx{}) continue;
        ModeIndex target = b[j];
        if (target.path == from) target.path = to;
        out[detail::idx(b, target)] += psi[j];
    }
    return {psi.basis(), out};
}

}  // namespace oamclone
