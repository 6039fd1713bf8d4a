// fock.hpp
// Mode basis and one-/two-photon bosonic state algebra.
//
// A single-photon mode is labelled by (spatial path, circular polarization,
// OAM value). Two-photon states are stored sparsely over unordered mode pairs
// {i <= j}. The coefficient c_ij multiplies
//     a_i^dag a_j^dag |0>              for i <  j
//     (a_i^dag)^2 / sqrt(2) |0>        for i == j
// so that every key is a normalized Fock state and sum |c|^2 is the norm.

#pragma once

#include "oamclone/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oamclone {

using cplx = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

enum class Path : unsigned char { a, b, a_prime, b_prime };
enum class Pol : unsigned char { L, R };

inline std::string to_string(Path p) {
    switch (p) {
        case Path::a: return "a";
        case Path::b: return "b";
        case Path::a_prime: return "a'";
        case Path::b_prime: return "b'";
    }
    return "?";
}

inline std::string to_string(Pol p) { return p == Pol::L ? "L" : "R"; }

struct ModeIndex {
    Path path;
    Pol pol;
    int oam;

    auto operator<=>(const ModeIndex&) const = default;
};

inline std::string to_string(const ModeIndex& m) {
    return "(" + to_string(m.path) + "," + to_string(m.pol) + "," + std::to_string(m.oam) + ")";
}

// Ordered list of distinct modes with a bijective index lookup.
class ModeBasis {
public:
    explicit ModeBasis(std::vector<ModeIndex> modes) : modes_(std::move(modes)) {
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            auto [it, inserted] = lookup_.emplace(modes_[i], i);
            if (!inserted) throw ConfigurationError("duplicate mode " + to_string(modes_[i]));
            paths_.insert(modes_[i].path);
            oams_.insert(modes_[i].oam);
        }
    }

    std::size_t size() const { return modes_.size(); }
    const std::vector<ModeIndex>& modes() const { return modes_; }
    const ModeIndex& operator[](std::size_t i) const { return modes_[i]; }
    const std::set<Path>& paths() const { return paths_; }
    const std::set<int>& oam_values() const { return oams_; }

    bool contains(const ModeIndex& m) const { return lookup_.count(m) != 0; }

    std::size_t index_of(const ModeIndex& m) const {
        auto it = lookup_.find(m);
        if (it == lookup_.end()) throw BasisError("mode " + to_string(m) + " not in basis");
        return it->second;
    }

    bool operator==(const ModeBasis& other) const { return modes_ == other.modes_; }

private:
    std::vector<ModeIndex> modes_;
    std::map<ModeIndex, std::size_t> lookup_;
    std::set<Path> paths_;
    std::set<int> oams_;
};

using BasisPtr = std::shared_ptr<const ModeBasis>;

inline bool same_basis(const BasisPtr& x, const BasisPtr& y) {
    return x == y || (x && y && *x == *y);
}

inline void require_same_basis(const BasisPtr& x, const BasisPtr& y, const char* what) {
    if (!same_basis(x, y)) throw BasisError(std::string(what) + ": basis mismatch");
}

/// Enumerates every (path, pol, oam) combination. Order is path-major
/// (a, b, a', b'), then polarization (L, R), then ascending OAM.
inline BasisPtr build_basis(const std::set<Path>& paths, const std::set<int>& oam_set) {
    if (paths.empty()) throw ConfigurationError("build_basis: empty path set");
    if (oam_set.empty()) throw ConfigurationError("build_basis: empty OAM set");
    std::vector<ModeIndex> modes;
    modes.reserve(paths.size() * 2 * oam_set.size());
    for (Path p : paths)
        for (Pol s : {Pol::L, Pol::R})
            for (int m : oam_set) modes.push_back({p, s, m});
    return std::make_shared<const ModeBasis>(std::move(modes));
}

inline const std::set<int>& default_oam_set() {
    static const std::set<int> set{-2, 0, 2};
    return set;
}

inline const std::set<Path>& all_paths() {
    static const std::set<Path> set{Path::a, Path::b, Path::a_prime, Path::b_prime};
    return set;
}

// ---------------------------------------------------------------------------
// Polarization (Jones vectors in the circular basis, components (L, R)).
// H = (L + R)/sqrt2, V = -i (L - R)/sqrt2.

using Jones = Eigen::Vector2cd;

inline Jones jones_L() { return Jones(1.0, 0.0); }
inline Jones jones_R() { return Jones(0.0, 1.0); }
inline Jones jones_H() { return Jones(kInvSqrt2, kInvSqrt2); }
inline Jones jones_V() { return Jones(cplx(0, -kInvSqrt2), cplx(0, kInvSqrt2)); }

/// Linear polarization at angle `angle` from horizontal: cos H + sin V.
inline Jones jones_linear(double angle) {
    return std::cos(angle) * jones_H() + std::sin(angle) * jones_V();
}

inline const Jones& pol_component(Pol p) {
    static const Jones l = jones_L(), r = jones_R();
    return p == Pol::L ? l : r;
}

// ---------------------------------------------------------------------------
// OAM qubit in the {+2, -2} subspace: amplitudes (alpha, beta) on (+2, -2).

enum class OamQubit { h, v, minus2, plus2, a, d };

inline std::string to_string(OamQubit q) {
    switch (q) {
        case OamQubit::h: return "h";
        case OamQubit::v: return "v";
        case OamQubit::minus2: return "-2";
        case OamQubit::plus2: return "+2";
        case OamQubit::a: return "a";
        case OamQubit::d: return "d";
    }
    return "?";
}

// h = (|+2> + |-2>)/sqrt2, v = (|+2> - |-2>)/(i sqrt2), a = (h + v)/sqrt2, d = (h - v)/sqrt2.
inline Eigen::Vector2cd oam_qubit_amplitudes(OamQubit q) {
    const cplx i(0, 1);
    const Eigen::Vector2cd h(kInvSqrt2, kInvSqrt2);
    const Eigen::Vector2cd v = Eigen::Vector2cd(1.0, -1.0) / (i * kSqrt2);
    switch (q) {
        case OamQubit::h: return h;
        case OamQubit::v: return v;
        case OamQubit::plus2: return {1.0, 0.0};
        case OamQubit::minus2: return {0.0, 1.0};
        case OamQubit::a: return (h + v) * kInvSqrt2;
        case OamQubit::d: return (h - v) * kInvSqrt2;
    }
    return {1.0, 0.0};
}

// The six states of the cloning universality table, in table order.
inline const std::vector<OamQubit>& table_states() {
    static const std::vector<OamQubit> s{OamQubit::h, OamQubit::v, OamQubit::minus2,
                                         OamQubit::plus2, OamQubit::a, OamQubit::d};
    return s;
}

// ---------------------------------------------------------------------------

/// One-photon amplitude vector. Amplitudes are kept raw: after a projective
/// element the squared norm is the success weight, nothing is renormalized.
class PhotonState {
public:
    PhotonState(BasisPtr basis, Eigen::VectorXcd amplitudes)
        : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
        if (!basis_) throw BasisError("PhotonState: null basis");
        if (static_cast<std::size_t>(amp_.size()) != basis_->size())
            throw BasisError("PhotonState: amplitude count does not match basis");
    }

    const BasisPtr& basis() const { return basis_; }
    const Eigen::VectorXcd& amplitudes() const { return amp_; }
    cplx operator[](std::size_t i) const { return amp_[static_cast<Eigen::Index>(i)]; }
    cplx amplitude(const ModeIndex& m) const { return (*this)[basis_->index_of(m)]; }

    double weight() const { return amp_.squaredNorm(); }
    bool is_normalized(double tol = kNormTolerance) const { return std::abs(weight() - 1.0) <= tol; }

    PhotonState normalized() const {
        const double w = weight();
        if (!(w > 0.0)) throw InvalidStateError("cannot normalize a zero state");
        return {basis_, amp_ / std::sqrt(w)};
    }

    /// Paths with nonzero amplitude.
    std::set<Path> occupied_paths(double tol = 1e-14) const {
        std::set<Path> out;
        for (std::size_t i = 0; i < basis_->size(); ++i)
            if (std::abs((*this)[i]) > tol) out.insert((*basis_)[i].path);
        return out;
    }

    cplx inner(const PhotonState& other) const {
        require_same_basis(basis_, other.basis_, "PhotonState::inner");
        return amp_.dot(other.amp_);
    }

private:
    BasisPtr basis_;
    Eigen::VectorXcd amp_;
};

inline PhotonState zero_state(const BasisPtr& basis) {
    return {basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
}

/// Normalized superposition of basis modes. Repeated modes add.
inline PhotonState superposition_state(const BasisPtr& basis,
                                       const std::vector<std::pair<ModeIndex, cplx>>& terms) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    for (const auto& [mode, c] : terms) amp[static_cast<Eigen::Index>(basis->index_of(mode))] += c;
    if (amp.squaredNorm() == 0.0) throw InvalidStateError("superposition_state: all amplitudes zero");
    return PhotonState(basis, amp).normalized();
}

/// Photon on `path` with polarization `pol` and OAM amplitudes on the listed values.
inline PhotonState product_photon(const BasisPtr& basis, Path path, const Jones& pol,
                                  const std::vector<std::pair<int, cplx>>& oam_terms) {
    std::vector<std::pair<ModeIndex, cplx>> terms;
    for (const auto& [m, c] : oam_terms) {
        terms.push_back({{path, Pol::L, m}, c * pol[0]});
        terms.push_back({{path, Pol::R, m}, c * pol[1]});
    }
    return superposition_state(basis, terms);
}

/// OAM qubit alpha|+2> + beta|-2> on `path` with polarization `pol`.
inline PhotonState oam_qubit_photon(const BasisPtr& basis, Path path, const Jones& pol,
                                    const Eigen::Vector2cd& qubit) {
    return product_photon(basis, path, pol, {{2, qubit[0]}, {-2, qubit[1]}});
}

// ---------------------------------------------------------------------------

using PairKey = std::pair<std::size_t, std::size_t>;

inline PairKey make_pair_key(std::size_t i, std::size_t j) { return i <= j ? PairKey{i, j} : PairKey{j, i}; }

inline constexpr double kPruneAmplitude = 1e-15;

/// Bosonic two-photon amplitude map over unordered mode pairs.
class TwoPhotonState {
public:
    using Map = std::map<PairKey, cplx>;

    explicit TwoPhotonState(BasisPtr basis) : basis_(std::move(basis)) {
        if (!basis_) throw BasisError("TwoPhotonState: null basis");
    }
    TwoPhotonState(BasisPtr basis, Map amps) : TwoPhotonState(std::move(basis)) {
        for (auto& [k, c] : amps) {
            if (k.first > k.second) throw InvalidStateError("TwoPhotonState: key not ordered");
            if (k.second >= basis_->size()) throw BasisError("TwoPhotonState: key out of range");
            if (std::abs(c) > kPruneAmplitude) amps_.emplace(k, c);
        }
    }

    const BasisPtr& basis() const { return basis_; }
    const Map& amplitudes() const { return amps_; }

    cplx amplitude(std::size_t i, std::size_t j) const {
        auto it = amps_.find(make_pair_key(i, j));
        return it == amps_.end() ? cplx{} : it->second;
    }
    cplx amplitude(const ModeIndex& x, const ModeIndex& y) const {
        return amplitude(basis_->index_of(x), basis_->index_of(y));
    }

    double weight() const {
        double s = 0;
        for (const auto& [k, c] : amps_) s += std::norm(c);
        return s;
    }
    bool is_normalized(double tol = kNormTolerance) const { return std::abs(weight() - 1.0) <= tol; }

    TwoPhotonState normalized() const {
        const double w = weight();
        if (!(w > 0.0)) throw InvalidStateError("cannot normalize a zero two-photon state");
        return scaled(1.0 / std::sqrt(w));
    }

    TwoPhotonState scaled(cplx s) const {
        Map out;
        for (const auto& [k, c] : amps_) out.emplace(k, c * s);
        return {basis_, std::move(out)};
    }

    TwoPhotonState operator+(const TwoPhotonState& other) const {
        require_same_basis(basis_, other.basis_, "TwoPhotonState::operator+");
        Map out = amps_;
        for (const auto& [k, c] : other.amps_) out[k] += c;
        return {basis_, std::move(out)};
    }
    TwoPhotonState operator-(const TwoPhotonState& other) const { return *this + other.scaled(-1.0); }

    cplx inner(const TwoPhotonState& other) const {
        require_same_basis(basis_, other.basis_, "TwoPhotonState::inner");
        cplx s{};
        for (const auto& [k, c] : amps_) {
            auto it = other.amps_.find(k);
            if (it != other.amps_.end()) s += std::conj(c) * it->second;
        }
        return s;
    }

    /// Adds coeff * a_i^dag a_j^dag |0> (ordered creation product) to the state.
    void add_creation_product(std::size_t i, std::size_t j, cplx coeff) {
        if (i == j) coeff *= kSqrt2;
        amps_[make_pair_key(i, j)] += coeff;
    }

    void prune(double tol = kPruneAmplitude) {
        std::erase_if(amps_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    }

private:
    BasisPtr basis_;
    Map amps_;
};

/// Bosonic symmetrization a^dag(psi_a) a^dag(psi_b)|0>, normalized.
inline TwoPhotonState symmetrize_product(const PhotonState& psi_a, const PhotonState& psi_b) {
    require_same_basis(psi_a.basis(), psi_b.basis(), "symmetrize_product");
    if (!psi_a.is_normalized() || !psi_b.is_normalized())
        throw InvalidStateError("symmetrize_product: inputs must be normalized");
    TwoPhotonState out(psi_a.basis());
    const std::size_t n = psi_a.basis()->size();
    for (std::size_t i = 0; i < n; ++i) {
        if (psi_a[i] == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (psi_b[j] == cplx{}) continue;
            out.add_creation_product(i, j, psi_a[i] * psi_b[j]);
        }
    }
    out.prune();
    return out.normalized();
}

// ---------------------------------------------------------------------------
// Pair-basis indexing: all unordered pairs (i <= j) in lexicographic order.

inline std::size_t pair_count(std::size_t n) { return n * (n + 1) / 2; }

inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    return i * n - (i * (i - 1)) / 2 + (j - i);
}

enum class DensityKind { single, pair };

/// Hermitian PSD operator over the single-photon modes or the two-photon pair
/// basis. The trace is 1 for normalized states and equals the post-selection
/// success probability for subnormalized ones.
class DensityOperator {
public:
    DensityOperator(BasisPtr basis, DensityKind kind, Eigen::MatrixXcd matrix)
        : basis_(std::move(basis)), kind_(kind), m_(std::move(matrix)) {
        if (!basis_) throw BasisError("DensityOperator: null basis");
        const auto dim = static_cast<Eigen::Index>(kind_ == DensityKind::single ? basis_->size()
                                                                                 : pair_count(basis_->size()));
        if (m_.rows() != dim || m_.cols() != dim) throw BasisError("DensityOperator: dimension mismatch");
    }

    const BasisPtr& basis() const { return basis_; }
    DensityKind kind() const { return kind_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    double trace() const { return m_.trace().real(); }

    bool is_hermitian(double tol = 1e-12) const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    DensityOperator normalized() const {
        const double t = trace();
        if (!(t > 0.0)) throw InvalidStateError("cannot normalize a zero-trace density operator");
        return {basis_, kind_, m_ / t};
    }

    DensityOperator scaled(double s) const { return {basis_, kind_, m_ * s}; }

private:
    BasisPtr basis_;
    DensityKind kind_;
    Eigen::MatrixXcd m_;
};

inline DensityOperator pure_density(const PhotonState& psi) {
    const auto& v = psi.amplitudes();
    return {psi.basis(), DensityKind::single, v * v.adjoint()};
}

inline Eigen::VectorXcd pair_vector(const TwoPhotonState& psi) {
    const std::size_t n = psi.basis()->size();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(pair_count(n)));
    for (const auto& [k, c] : psi.amplitudes()) v[static_cast<Eigen::Index>(pair_index(k.first, k.second, n))] = c;
    return v;
}

inline DensityOperator pure_density(const TwoPhotonState& psi) {
    const std::size_t n = psi.basis()->size();
    const auto dim = static_cast<Eigen::Index>(pair_count(n));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [k, c] : psi.amplitudes())
        for (const auto& [l, d] : psi.amplitudes())
            m(static_cast<Eigen::Index>(pair_index(k.first, k.second, n)),
              static_cast<Eigen::Index>(pair_index(l.first, l.second, n))) = c * std::conj(d);
    return {psi.basis(), DensityKind::pair, std::move(m)};
}

/// Convex combination. Weights must be nonnegative and sum to 1.
inline DensityOperator mix(const std::vector<std::pair<DensityOperator, double>>& states) {
    if (states.empty()) throw ConfigurationError("mix: no states");
    double total = 0;
    for (const auto& [rho, w] : states) {
        if (w < 0) throw ConfigurationError("mix: negative weight");
        require_same_basis(rho.basis(), states.front().first.basis(), "mix");
        if (rho.kind() != states.front().first.kind()) throw BasisError("mix: density kinds differ");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigurationError("mix: weights do not sum to 1");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(states.front().first.matrix().rows(),
                                                states.front().first.matrix().cols());
    for (const auto& [rho, w] : states) m += w * rho.matrix();
    return {states.front().first.basis(), states.front().first.kind(), std::move(m)};
}

/// One-body reduced state of a bosonic pair: trace out one of the two
/// (indistinguishable) photons. The trace of the input is preserved.
inline DensityOperator partial_trace_to_single(const DensityOperator& rho2) {
    if (rho2.kind() != DensityKind::pair) throw BasisError("partial_trace_to_single: expected a pair-basis operator");
    const std::size_t n = rho2.basis()->size();
    const auto& d = rho2.matrix();
    // Ordered-tensor amplitude of pair {i,j}: c/sqrt2 off the diagonal, c on it.
    auto f = [](std::size_t i, std::size_t j) { return i == j ? 1.0 : kInvSqrt2; };
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            cplx s{};
            for (std::size_t m = 0; m < n; ++m) {
                const cplx e = d(static_cast<Eigen::Index>(pair_index(k, m, n)),
                                 static_cast<Eigen::Index>(pair_index(l, m, n)));
                if (e != cplx{}) s += f(k, m) * f(l, m) * e;
            }
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = s;
        }
    return {rho2.basis(), DensityKind::single, std::move(out)};
}

/// Reduced single-photon state of a pure pair, computed without forming the
/// pair-basis density: rho = T T^dag with T the symmetric ordered tensor.
inline DensityOperator reduced_density(const TwoPhotonState& psi) {
    const auto n = static_cast<Eigen::Index>(psi.basis()->size());
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [k, c] : psi.amplitudes()) {
        const auto i = static_cast<Eigen::Index>(k.first), j = static_cast<Eigen::Index>(k.second);
        if (i == j) {
            t(i, i) = c;
        } else {
            t(i, j) = c * kInvSqrt2;
            t(j, i) = c * kInvSqrt2;
        }
    }
    return {psi.basis(), DensityKind::single, t * t.adjoint()};
}

/// Block of a single-photon operator on the internal states
/// |path, pol, m> for m in `oams`, with a fixed polarization Jones vector.
/// Not renormalized.
inline Eigen::MatrixXcd internal_block(const DensityOperator& rho, Path path, const Jones& pol,
                                       const std::vector<int>& oams) {
    if (rho.kind() != DensityKind::single) throw BasisError("internal_block: expected a single-photon operator");
    const auto& basis = *rho.basis();
    const auto d = static_cast<Eigen::Index>(oams.size());
    // Columns of `embed` are the states |path, pol, m>.
    Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.size()), d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const auto m = oams[static_cast<std::size_t>(c)];
        embed(static_cast<Eigen::Index>(basis.index_of({path, Pol::L, m})), c) = pol[0];
        embed(static_cast<Eigen::Index>(basis.index_of({path, Pol::R, m})), c) = pol[1];
    }
    return embed.adjoint() * rho.matrix() * embed;
}

}  // namespace oamclone
