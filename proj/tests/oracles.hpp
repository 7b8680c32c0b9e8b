// Independent reference implementations used only by the tests.
#pragma once

#include "scramble/qops.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using scramble::cplx;
using scramble::Index;
using scramble::Matrix;

// exp(M) by scaling and squaring with a truncated Taylor series.
inline Matrix expm_taylor(const Matrix& m) {
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
    const Matrix a = m / std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

inline Matrix propagator(const Matrix& h, double t) { return expm_taylor(scramble::cplx(0.0, -t) * h); }

// Tr over the trailing factor of dimension d_b, by explicit index sums.
inline Matrix trace_out_last(const Matrix& m, Index d_b) {
    const Index d_a = m.rows() / d_b;
    Matrix out = Matrix::Zero(d_a, d_a);
    for (Index i = 0; i < d_a; ++i)
        for (Index j = 0; j < d_a; ++j)
            for (Index e = 0; e < d_b; ++e) out(i, j) += m(i * d_b + e, j * d_b + e);
    return out;
}

// Tr over the leading factor of dimension d_a.
inline Matrix trace_out_first(const Matrix& m, Index d_a) {
    const Index d_b = m.rows() / d_a;
    Matrix out = Matrix::Zero(d_b, d_b);
    for (Index i = 0; i < d_b; ++i)
        for (Index j = 0; j < d_b; ++j)
            for (Index e = 0; e < d_a; ++e) out(i, j) += m(e * d_b + i, e * d_b + j);
    return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix channel(const Matrix& u, const Matrix& x, const Matrix& rho_bath) {
    return trace_out_last(u * kron(x, rho_bath) * u.adjoint(), rho_bath.rows());
}

inline Matrix adjoint_channel(const Matrix& u, const Matrix& a, const Matrix& rho_bath) {
    const Index db = rho_bath.rows();
    const Index ds = a.rows();
    return trace_out_last(u.adjoint() * kron(a, Matrix::Identity(db, db)) * u * kron(Matrix::Identity(ds, ds), rho_bath), db);
}

// Open interferometer on a system ⊗ bath ⊗ control register. Each evolution
// step attaches a fresh bath in rho_bath and traces it out afterwards.
inline cplx open_protocol(const Matrix& h_forward, const Matrix& h_backward, const Matrix& rho_system, const Matrix& rho_bath,
                          const Matrix& a, const Matrix& b, double t) {
    const Index ds = rho_system.rows(), db = rho_bath.rows();
    const Matrix i2 = Matrix::Identity(2, 2), is = Matrix::Identity(ds, ds), ib = Matrix::Identity(db, db);
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    // system ⊗ control (control last) to system ⊗ bath ⊗ control and back
    auto attach = [&](const Matrix& sc) {
        Matrix out = Matrix::Zero(ds * db * 2, ds * db * 2);
        for (Index s = 0; s < ds; ++s)
            for (Index c = 0; c < 2; ++c)
                for (Index sp = 0; sp < ds; ++sp)
                    for (Index cp = 0; cp < 2; ++cp)
                        for (Index e = 0; e < db; ++e)
                            for (Index ep = 0; ep < db; ++ep)
                                out((s * db + e) * 2 + c, (sp * db + ep) * 2 + cp) = sc(s * 2 + c, sp * 2 + cp) * rho_bath(e, ep);
        return out;
    };
    auto detach = [&](const Matrix& sec) {
        Matrix out = Matrix::Zero(ds * 2, ds * 2);
        for (Index s = 0; s < ds; ++s)
            for (Index c = 0; c < 2; ++c)
                for (Index sp = 0; sp < ds; ++sp)
                    for (Index cp = 0; cp < 2; ++cp)
                        for (Index e = 0; e < db; ++e) out(s * 2 + c, sp * 2 + cp) += sec((s * db + e) * 2 + c, (sp * db + e) * 2 + cp);
        return out;
    };
    Matrix plus = Matrix::Constant(2, 2, 0.5);
    Matrix rho = kron(rho_system, plus);
    const Matrix s1 = kron(is, p0) + kron(b, p1);
    const Matrix s3 = kron(a, i2);
    const Matrix s5 = kron(b, p0) + kron(is, p1);
    const Matrix uf = kron(propagator(h_forward, t), i2);
    const Matrix ub = kron(propagator(h_backward, t), i2);
    rho = s1 * rho * s1.adjoint();
    rho = detach(uf * attach(rho) * uf.adjoint());
    rho = s3 * rho * s3.adjoint();
    rho = detach(ub * attach(rho) * ub.adjoint());
    rho = s5 * rho * s5.adjoint();
    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return (kron(is, x) * rho).trace();
}

}  // namespace oracle
