// qudit.hpp
// Symmetrization cloning for d-level internal states.

#pragma once

#include "oamclone/elements.hpp"
#include "oamclone/errors.hpp"
#include "oamclone/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace oamclone {

struct QuditSpec {
    Eigen::VectorXcd amplitudes;
    std::size_t capacity = 16;

    std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }

    void validate() const {
        if (amplitudes.size() < 1) throw ConfigurationError("qudit dimension must be >= 1");
        if (dimension() > capacity)
            throw ConfigurationError("qudit dimension " + std::to_string(dimension()) + " exceeds capacity " +
                                     std::to_string(capacity));
        if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-12) throw InvalidStateError("qudit amplitudes not normalized");
    }

    static QuditSpec basis_state(std::size_t d, std::size_t k = 0) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
        v[static_cast<Eigen::Index>(k)] = 1.0;
        return {v};
    }
};

struct QuditOptions {
    // true: labels are OAM values and reflection maps m -> -m.
    // false: abstract labels, reflection leaves them unchanged.
    bool oam_labels = false;
};

/// OAM labels {-(d-1), -(d-3), ..., d-1}; closed under m -> -m.
inline std::vector<int> qudit_labels(std::size_t d) {
    std::vector<int> out;
    for (std::size_t k = 0; k < d; ++k) out.push_back(-static_cast<int>(d) + 1 + 2 * static_cast<int>(k));
    return out;
}

/// Orthonormal basis whose first column is `v`; the rest come from
/// Gram-Schmidt over e_0, e_1, ... in that order, skipping dependent pivots.
inline Eigen::MatrixXcd orthonormal_completion(const Eigen::VectorXcd& v) {
    const Eigen::Index d = v.size();
    Eigen::MatrixXcd q(d, d);
    q.col(0) = v.normalized();
    Eigen::Index filled = 1;
    for (Eigen::Index pivot = 0; pivot < d && filled < d; ++pivot) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Unit(d, pivot);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index c = 0; c < filled; ++c) e -= q.col(c).dot(e) * q.col(c);
        if (e.norm() < 1e-6) continue;
        q.col(filled++) = e.normalized();
    }
    return q;
}

struct QuditCloneResult {
    double fidelity;
    double success_probability;       // both ports
    double single_port_probability;   // a' only
    Eigen::MatrixXcd clone_density;   // a' port, normalized, d x d in label order
};

/// Channel simulation: photon in |phi> on a, ancilla I/d on b realised as an
/// exact mixture over a basis containing the state that meets |phi> in a'.
inline QuditCloneResult qudit_clone(const QuditSpec& spec, QuditOptions opts = {}) {
    spec.validate();
    const std::size_t d = spec.dimension();
    const auto labels = qudit_labels(d);
    const auto basis = build_basis(all_paths(), std::set<int>(labels.begin(), labels.end()));
    const BeamSplitterConvention conv{opts.oam_labels};
    const auto bs = beam_splitter(basis, conv);
    const auto to_a = path_filter(Path::a_prime, basis);
    const auto to_b = path_filter(Path::b_prime, basis);

    auto photon = [&](Path p, const Eigen::VectorXcd& amps) {
        std::vector<std::pair<int, cplx>> terms;
        for (std::size_t k = 0; k < d; ++k) terms.push_back({labels[k], amps[static_cast<Eigen::Index>(k)]});
        return product_photon(basis, p, jones_L(), terms);
    };

    // Reflection reverses the label order when labels are OAM values.
    Eigen::VectorXcd seed = spec.amplitudes;
    if (opts.oam_labels) seed = spec.amplitudes.reverse().eval();
    const Eigen::MatrixXcd ancilla_basis = orthonormal_completion(seed);

    const auto in = photon(Path::a, spec.amplitudes);
    const auto n = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    double pa = 0, pb = 0;
    for (std::size_t k = 0; k < d; ++k) {
        const auto anc = photon(Path::b, ancilla_basis.col(static_cast<Eigen::Index>(k)));
        const auto out = apply(bs, symmetrize_product(in, anc)).state;
        const auto in_a = apply(to_a, out).state;
        pa += in_a.weight();
        pb += apply(to_b, out).state.weight();
        rho += reduced_density(in_a).matrix();
    }
    const double inv_d = 1.0 / static_cast<double>(d);
    const DensityOperator rho1(basis, DensityKind::single, rho * inv_d);
    Eigen::MatrixXcd clone = internal_block(rho1, Path::a_prime, jones_L(), labels);
    clone /= clone.trace().real();
    const double f = spec.amplitudes.dot(clone * spec.amplitudes).real();
    return {f, (pa + pb) * inv_d, pa * inv_d, clone};
}

struct QuditFormula {
    double fidelity;
    double success_probability;
};

/// F = 1/2 + 1/(d+1), p = (d+1)/(2d).
inline QuditFormula qudit_formula(int d) {
    if (d < 1) throw ConfigurationError("qudit_formula: d must be >= 1");
    const double dd = d;
    return {0.5 + 1.0 / (dd + 1.0), (dd + 1.0) / (2.0 * dd)};
}

struct OracleResult {
    double fidelity;
    double success_probability;
    double case_identical_conditional;   // ancilla equal to the input
    double case_orthogonal_conditional;  // ancilla orthogonal to the input
    double case_identical_fidelity;
    double case_orthogonal_fidelity;
};

inline constexpr std::size_t kOracleMaxDimension = 8;

/// Brute-force enumeration in first quantization: ordered two-photon
/// amplitude tensors over (port x label), dense beam-splitter matrix,
/// ancilla basis from a Householder QR. Shares no code with qudit_clone.
inline OracleResult brute_force_oracle(const QuditSpec& spec, QuditOptions opts = {}) {
    spec.validate();
    const Eigen::Index d = spec.amplitudes.size();
    if (static_cast<std::size_t>(d) > kOracleMaxDimension)
        throw ConfigurationError("brute_force_oracle: d > " + std::to_string(kOracleMaxDimension));
    const Eigen::VectorXcd& phi = spec.amplitudes;

    Eigen::MatrixXcd flip = Eigen::MatrixXcd::Identity(d, d);
    if (opts.oam_labels) flip = flip.rowwise().reverse().eval();

    // Ports: index 0 is a / a', index 1 is b / b'.
    const cplx t(std::sqrt(0.5), 0), r(0, std::sqrt(0.5));
    Eigen::MatrixXcd bs(2 * d, 2 * d);
    bs << t * Eigen::MatrixXcd::Identity(d, d), r * flip, r * flip, t * Eigen::MatrixXcd::Identity(d, d);

    // Ancilla basis whose first element reaches a' as |phi>.
    const Eigen::VectorXcd target = flip * phi;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(target);
    Eigen::MatrixXcd anc = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
    anc.col(0) = target;

    std::vector<double> prob(static_cast<std::size_t>(d)), fid(static_cast<std::size_t>(d));
    double both_ports = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * d), y = Eigen::VectorXcd::Zero(2 * d);
        x.head(d) = phi;
        y.tail(d) = anc.col(k);
        const Eigen::MatrixXcd sym = (x * y.transpose() + y * x.transpose()) / std::sqrt(2.0);
        const Eigen::MatrixXcd out = bs * sym * bs.transpose();
        const Eigen::MatrixXcd aa = out.topLeftCorner(d, d), bb = out.bottomRightCorner(d, d);
        const double p = aa.squaredNorm();
        const Eigen::MatrixXcd reduced = aa * aa.adjoint();
        prob[static_cast<std::size_t>(k)] = p;
        fid[static_cast<std::size_t>(k)] = phi.dot(reduced * phi).real() / p;
        both_ports += p + bb.squaredNorm();
    }

    double total = 0;
    for (double p : prob) total += p;
    OracleResult res{};
    res.case_identical_conditional = prob[0] / total;
    res.case_orthogonal_conditional = 1.0 - res.case_identical_conditional;
    res.case_identical_fidelity = fid[0];
    double ortho_w = 0, ortho_f = 0;
    for (std::size_t k = 1; k < prob.size(); ++k) {
        ortho_w += prob[k];
        ortho_f += prob[k] * fid[k];
    }
    res.case_orthogonal_fidelity = ortho_w > 0 ? ortho_f / ortho_w : 0.0;
    res.fidelity = res.case_identical_conditional * res.case_identical_fidelity +
                   res.case_orthogonal_conditional * res.case_orthogonal_fidelity;
    res.success_probability = both_ports / static_cast<double>(d);
    return res;
}

}  // namespace oamclone
