// Reduced dynamics of a system coupled to a finite bath.
//
// The forward map ξ_f is generated by H_f = H_S + H_E + H_SE and the backward
// map ξ_b by H_b = -H_S + H_E + H_SE:
//
//   ξ(X)  = Tr_E[ U (X ⊗ ρ_E) U† ]            (Schrödinger direction)
//   ξ†(A) = Tr_E[ U† (A ⊗ I) U (I ⊗ ρ_E) ]    (adjoint / Heisenberg direction)
//
// Both are exact for the finite dilation; nothing here is a master equation.

#pragma once

#include "scramble/qops.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble::dynamics {

using qops::TensorLayout;

enum class Sense { forward, backward };
enum class Direction { schrodinger, adjoint };

using Applier = std::function<Matrix(const Matrix&)>;

// --------------------------- Single-time propagators ------------------------

struct JointPropagators {
    Matrix u_forward;   // exp(-i H_f t)
    Matrix u_backward;  // exp(-i H_b t)
    TensorLayout layout;
    double time = 0.0;

    const Matrix& pick(Sense s) const noexcept { return s == Sense::forward ? u_forward : u_backward; }
};

inline JointPropagators joint_propagators(const Matrix& h_system, const Matrix& h_bath, const Matrix& h_coupling,
                                          const TensorLayout& layout, double t) {
    const Index d = layout.total_dim();
    for (const Matrix* h : {&h_system, &h_bath, &h_coupling})
        if (h->rows() != d || h->cols() != d) throw std::invalid_argument("joint_propagators: dimension mismatch with layout");
    return {qops::propagator(h_system + h_bath + h_coupling, t), qops::propagator(-h_system + h_bath + h_coupling, t),
            layout, t};
}

namespace detail {

inline void require_square(const Matrix& m, Index d, const char* who, const char* what) {
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument(std::string(who) + ": " + what + " has dimension " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", expected " + std::to_string(d));
}

inline void require_state(const Matrix& rho, Index d, const char* who, const char* what) {
    require_square(rho, d, who, what);
    const double tr_err = std::abs(rho.trace() - cplx(1.0));
    if (tr_err > kPropagationTol)
        throw std::invalid_argument(std::string(who) + ": " + what + " is not a state (trace deviation " +
                                    std::to_string(tr_err) + ")");
    if (qops::hermiticity_error(rho) > kEigTol)
        throw std::invalid_argument(std::string(who) + ": " + what + " is not Hermitian");
}

}  // namespace detail

// ξ applied to an arbitrary system operator (not necessarily a state).
inline Matrix apply_channel_to_operator(const JointPropagators& jp, const Matrix& x, const Matrix& rho_bath, Sense sense) {
    const auto& l = jp.layout;
    detail::require_square(x, l.system_dim(), "apply_channel", "system operator");
    detail::require_state(rho_bath, l.bath_dim(), "apply_channel", "bath state");
    const Matrix& u = jp.pick(sense);
    return qops::partial_trace(u * qops::kron(x, rho_bath) * u.adjoint(), l, l.system_sites());
}

inline Matrix apply_channel(const JointPropagators& jp, const Matrix& rho_system, const Matrix& rho_bath, Sense sense) {
    detail::require_state(rho_system, jp.layout.system_dim(), "apply_channel", "system state");
    return apply_channel_to_operator(jp, rho_system, rho_bath, sense);
}

inline Matrix apply_adjoint_channel(const JointPropagators& jp, const Matrix& op_system, const Matrix& rho_bath, Sense sense) {
    const auto& l = jp.layout;
    detail::require_square(op_system, l.system_dim(), "apply_adjoint_channel", "system operator");
    detail::require_state(rho_bath, l.bath_dim(), "apply_adjoint_channel", "bath state");
    const Matrix& u = jp.pick(sense);
    const Matrix heis = u.adjoint() * qops::kron(op_system, qops::identity(l.bath_dim())) * u;
    return qops::partial_trace(heis * qops::kron(qops::identity(l.system_dim()), rho_bath), l, l.system_sites());
}

// --------------------------- Superoperators ---------------------------------

struct QuantumChannelRep {
    Matrix matrix;  // d² x d², acts on row-major vec
    Direction direction = Direction::schrodinger;
    Sense sense = Sense::forward;
    TensorLayout layout;

    Index system_dim() const noexcept { return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows())))); }

    Matrix apply(const Matrix& x) const {
        const Index d = system_dim();
        detail::require_square(x, d, "QuantumChannelRep::apply", "operator");
        return qops::devectorize(matrix * qops::vectorize(x), d, d);
    }
};

// Column k = vec(applier(|i><j|)), k = i*d + j.
inline QuantumChannelRep channel_superoperator(const Applier& applier, Index d, Direction direction = Direction::schrodinger,
                                               Sense sense = Sense::forward) {
    if (d < 1) throw std::invalid_argument("channel_superoperator: dimension must be >= 1");
    QuantumChannelRep rep;
    rep.direction = direction;
    rep.sense = sense;
    rep.layout = TensorLayout({d}, {qops::SiteRole::system});
    rep.matrix = Matrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            const Matrix image = applier(qops::matrix_unit(d, i, j));
            detail::require_square(image, d, "channel_superoperator", "applier output");
            rep.matrix.col(i * d + j) = qops::vectorize(image);
        }
    return rep;
}

// Choi matrix Σ_ij |i><j| ⊗ Λ(|i><j|).
inline Matrix choi_matrix(const QuantumChannelRep& rep) {
    const Index d = rep.system_dim();
    Matrix c(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            for (Index a = 0; a < d; ++a)
                for (Index b = 0; b < d; ++b) c(i * d + a, j * d + b) = rep.matrix(a * d + b, i * d + j);
    return c;
}

// (Λ ⊗ Λ)(X) for X on H ⊗ H'. Entries of X are regrouped as
// M[(r,c),(r',c')] = X[(r,r'),(c,c')], so the two copies act as S M S^T.
inline Matrix tensor_square_apply(const QuantumChannelRep& rep, const Matrix& big_op) {
    const Index d = rep.system_dim();
    const Index dd = d * d;
    detail::require_square(big_op, dd, "tensor_square_apply", "operator");
    Matrix m(dd, dd);
    for (Index r = 0; r < d; ++r)
        for (Index rp = 0; rp < d; ++rp)
            for (Index c = 0; c < d; ++c)
                for (Index cp = 0; cp < d; ++cp) m(r * d + c, rp * d + cp) = big_op(r * d + rp, c * d + cp);
    const Matrix out = rep.matrix * m * rep.matrix.transpose();
    Matrix x(dd, dd);
    for (Index a = 0; a < d; ++a)
        for (Index ap = 0; ap < d; ++ap)
            for (Index b = 0; b < d; ++b)
                for (Index bp = 0; bp < d; ++bp) x(a * d + ap, b * d + bp) = out(a * d + b, ap * d + bp);
    return x;
}

// --------------------------- Time-series engine -----------------------------

// Reduced dynamics as a sum of dilations. Each part is one system ⊗ register
// Hilbert space with its own joint spectra and a (possibly sub-normalized) bath
// operator; the channel is the sum of the parts. The dense model is a single
// part with a normalized bath state; the collective LMG path has one part per
// total-spin sector, weighted by multiplicity.
//
// Spectra of H_f and H_b are computed once per part. Operators are moved into
// the eigenbasis once ("prepared"), after which each time point costs one
// dense product per part.
class OpenDynamics {
public:
    struct Part {
        Index bath_dim = 0;
        qops::Spectrum forward, backward;
        Matrix bath;  // bath operator, trace = weight of this part
        // Eigenvectors with rows reordered bath-major, and V† (I ⊗ ρ_E) with
        // columns reordered the same way, so each bath index is a contiguous block.
        Matrix forward_rows, backward_rows;
        Matrix to_system_forward, to_system_backward;
    };

    // Eigenbasis images of one operator for one (direction, sense).
    struct Prepared {
        Direction direction = Direction::schrodinger;
        Sense sense = Sense::forward;
        std::vector<Matrix> coeffs;  // per part
    };

    OpenDynamics() = default;
    explicit OpenDynamics(Index system_dim) : system_dim_(system_dim) {
        if (system_dim < 1) throw std::invalid_argument("OpenDynamics: system dimension must be >= 1");
    }

    // Dense dilation from operators on one layout.
    static OpenDynamics dilation(const Matrix& h_system, const Matrix& h_bath, const Matrix& h_coupling,
                                 const TensorLayout& layout, const Matrix& rho_bath) {
        const Index d = layout.total_dim();
        for (const Matrix* h : {&h_system, &h_bath, &h_coupling})
            detail::require_square(*h, d, "OpenDynamics::dilation", "Hamiltonian");
        detail::require_state(rho_bath, layout.bath_dim(), "OpenDynamics::dilation", "bath state");
        OpenDynamics dyn(layout.system_dim());
        dyn.add_part(h_system + h_bath + h_coupling, -h_system + h_bath + h_coupling, rho_bath);
        return dyn;
    }

    // Add a register with joint Hamiltonians on (system ⊗ register) and a bath
    // operator on the register.
    void add_part(const Matrix& h_forward, const Matrix& h_backward, const Matrix& bath) {
        if (bath.rows() != bath.cols() || bath.rows() < 1) throw std::invalid_argument("OpenDynamics::add_part: bath operator must be square");
        const Index n = system_dim_ * bath.rows();
        detail::require_square(h_forward, n, "OpenDynamics::add_part", "forward Hamiltonian");
        detail::require_square(h_backward, n, "OpenDynamics::add_part", "backward Hamiltonian");
        Part p;
        p.bath_dim = bath.rows();
        p.forward = qops::eig_hermitian(h_forward);
        p.backward = qops::eig_hermitian(h_backward);
        p.bath = bath;
        const Matrix lift = qops::kron(qops::identity(system_dim_), bath);
        p.forward_rows = bath_major(p.forward.eigenvectors, p.bath_dim);
        p.backward_rows = bath_major(p.backward.eigenvectors, p.bath_dim);
        p.to_system_forward = bath_major(Matrix(lift.adjoint() * p.forward.eigenvectors), p.bath_dim).adjoint();
        p.to_system_backward = bath_major(Matrix(lift.adjoint() * p.backward.eigenvectors), p.bath_dim).adjoint();
        parts_.push_back(std::move(p));
    }

    Index system_dim() const noexcept { return system_dim_; }
    const std::vector<Part>& parts() const noexcept { return parts_; }

    double bath_weight() const {
        double w = 0.0;
        for (const auto& p : parts_) w += p.bath.trace().real();
        return w;
    }

    Prepared prepare(Direction direction, Sense sense, const Matrix& x) const {
        detail::require_square(x, system_dim_, "OpenDynamics::prepare", "operator");
        Prepared out{direction, sense, {}};
        out.coeffs.reserve(parts_.size());
        for (const auto& p : parts_) {
            const Matrix& v = spectrum(p, sense).eigenvectors;
            const Matrix lifted = direction == Direction::schrodinger ? qops::kron(x, p.bath)
                                                                      : qops::kron(x, qops::identity(p.bath_dim));
            out.coeffs.push_back(v.adjoint() * lifted * v);
        }
        return out;
    }

    Matrix evaluate(const Prepared& prep, double t) const {
        if (prep.coeffs.size() != parts_.size()) throw std::invalid_argument("OpenDynamics::evaluate: prepared for a different dynamics");
        Matrix out = Matrix::Zero(system_dim_, system_dim_);
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const Part& p = parts_[k];
            const qops::Spectrum& s = spectrum(p, prep.sense);
            const Index n = s.dim();
            // U X U† in the eigenbasis multiplies entry (m,n) by exp(-i(E_m - E_n)t);
            // U† X U uses the conjugate phase.
            const double sign = prep.direction == Direction::schrodinger ? -1.0 : 1.0;
            Vector phase(n);
            for (Index m = 0; m < n; ++m) phase(m) = std::exp(kI * (sign * s.eigenvalues(m) * t));
            const Matrix z = phase.asDiagonal() * prep.coeffs[k] * phase.conjugate().asDiagonal();
            const Matrix& rows = prep.sense == Sense::forward ? p.forward_rows : p.backward_rows;
            const Matrix vz = rows * z;
            const Index ds = system_dim_;
            const Matrix& right = prep.direction == Direction::schrodinger
                                      ? rows
                                      : (prep.sense == Sense::forward ? p.to_system_forward : p.to_system_backward);
            for (Index e = 0; e < p.bath_dim; ++e) {
                if (prep.direction == Direction::schrodinger)
                    out.noalias() += vz.middleRows(e * ds, ds) * right.middleRows(e * ds, ds).adjoint();
                else
                    out.noalias() += vz.middleRows(e * ds, ds) * right.middleCols(e * ds, ds);
            }
        }
        return out;
    }

    Matrix apply(Direction direction, Sense sense, const Matrix& x, double t) const {
        return evaluate(prepare(direction, sense, x), t);
    }

    Applier applier(Direction direction, Sense sense, double t) const {
        return [this, direction, sense, t](const Matrix& x) { return apply(direction, sense, x, t); };
    }

    QuantumChannelRep superoperator(Direction direction, Sense sense, double t) const {
        return channel_superoperator(applier(direction, sense, t), system_dim_, direction, sense);
    }

private:
    // Row (s, e) of a system ⊗ bath index moves to row (e, s).
    static Matrix bath_major(const Matrix& m, Index db) {
        const Index ds = m.rows() / db;
        Matrix out(m.rows(), m.cols());
        for (Index si = 0; si < ds; ++si)
            for (Index e = 0; e < db; ++e) out.row(e * ds + si) = m.row(si * db + e);
        return out;
    }

    static const qops::Spectrum& spectrum(const Part& p, Sense s) noexcept {
        return s == Sense::forward ? p.forward : p.backward;
    }

    Index system_dim_ = 0;
    std::vector<Part> parts_;
};

}  // namespace scramble::dynamics
