// Haar-averaged bipartite OTOC.
//
// The replicated space H ⊗ H' is ordered (A, B, A', B'). With d = d_A d_B:
//
//   closed:  G(U) = 1 - Tr(S_AA' U^⊗2 S_AA' U†^⊗2) / d²
//   open:    G(E) = Tr{ (S d_B - S_AA') (E†⊗E†)(S_AA') } / d²
//   oracle:  G    = E_{A,B} ‖[E†(A ⊗ I), I ⊗ B]‖² / (2d),  A, B Haar on H_A, H_B

#pragma once

#include "scramble/dynamics.hpp"
#include "scramble/parallel.hpp"
#include "scramble/qops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble::bipartite {

using dynamics::QuantumChannelRep;

struct Bipartition {
    Index d_a = 2;
    Index d_b = 2;

    Bipartition() = default;
    Bipartition(Index a, Index b) : d_a(a), d_b(b) {
        if (a < 1 || b < 1) throw std::invalid_argument("Bipartition: dimensions must be >= 1");
    }
    Index d() const noexcept { return d_a * d_b; }
};

struct SwapOps {
    Matrix s_full;  // |a b a' b'> -> |a' b' a b>
    Matrix s_aa;    // |a b a' b'> -> |a' b a b'>
    Matrix s_bb;    // |a b a' b'> -> |a b' a' b>
};

inline SwapOps build_swaps(const Bipartition& p) {
    const Index da = p.d_a, db = p.d_b, d = p.d(), n = d * d;
    auto idx = [&](Index a, Index b, Index ap, Index bp) { return ((a * db + b) * da + ap) * db + bp; };
    SwapOps s{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (Index a = 0; a < da; ++a)
        for (Index b = 0; b < db; ++b)
            for (Index ap = 0; ap < da; ++ap)
                for (Index bp = 0; bp < db; ++bp) {
                    const Index from = idx(a, b, ap, bp);
                    s.s_full(idx(ap, bp, a, b), from) = 1.0;
                    s.s_aa(idx(ap, b, a, bp), from) = 1.0;
                    s.s_bb(idx(a, bp, ap, b), from) = 1.0;
                }
    return s;
}

// value is clamped to [0, 1]; raw and imag are kept for tolerance checks.
struct BipartiteValue {
    double value = 0.0;
    double raw = 0.0;
    double imag = 0.0;
};

inline BipartiteValue bipartite_otoc_closed_detail(const Matrix& u, const Bipartition& p) {
    const Index d = p.d();
    if (u.rows() != d || u.cols() != d) throw std::invalid_argument("bipartite_otoc_closed: unitary does not match bipartition");
    if (qops::unitarity_error(u) > kPropagationTol) throw std::invalid_argument("bipartite_otoc_closed: input is not unitary");
    const auto s = build_swaps(p);
    const Matrix uu = qops::kron(u, u);
    const cplx tr = (s.s_aa * uu * s.s_aa * uu.adjoint()).trace();
    const double dd = static_cast<double>(d * d);
    const double raw = 1.0 - tr.real() / dd;
    return {std::clamp(raw, 0.0, 1.0), raw, tr.imag() / dd};
}

inline double bipartite_otoc_closed(const Matrix& u, const Bipartition& p) { return bipartite_otoc_closed_detail(u, p).value; }

inline BipartiteValue bipartite_otoc_open_detail(const QuantumChannelRep& rep, const Bipartition& p) {
    if (rep.direction != dynamics::Direction::adjoint) throw std::invalid_argument("bipartite_otoc_open: expected an adjoint channel");
    if (rep.system_dim() != p.d()) throw std::invalid_argument("bipartite_otoc_open: channel does not match bipartition");
    const auto s = build_swaps(p);
    const Matrix evolved = dynamics::tensor_square_apply(rep, s.s_aa);
    const Matrix left = s.s_full * static_cast<double>(p.d_b) - s.s_aa;
    const cplx tr = (left * evolved).trace();
    const double dd = static_cast<double>(p.d() * p.d());
    const double raw = tr.real() / dd;
    return {std::clamp(raw, 0.0, 1.0), raw, tr.imag() / dd};
}

inline double bipartite_otoc_open(const QuantumChannelRep& rep, const Bipartition& p) { return bipartite_otoc_open_detail(rep, p).value; }

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kMinSamples = 100;
inline constexpr std::size_t kSumBlock = 64;

namespace detail {

// Sum in fixed blocks so the result does not depend on the worker count.
inline double block_sum(const std::vector<double>& v) {
    double total = 0.0;
    for (std::size_t lo = 0; lo < v.size(); lo += kSumBlock) {
        double part = 0.0;
        for (std::size_t k = lo; k < std::min(v.size(), lo + kSumBlock); ++k) part += v[k];
        total += part;
    }
    return total;
}

}  // namespace detail

// Sample k draws A then B from substream(seed, k).
inline MonteCarloEstimate bipartite_otoc_haar_mc(const dynamics::Applier& adjoint, const Bipartition& p, std::size_t samples,
                                                 std::uint64_t seed) {
    if (samples < kMinSamples) throw std::invalid_argument("bipartite_otoc_haar_mc: need at least 100 samples");
    const Index d = p.d();
    const Matrix ia = qops::identity(p.d_a), ib = qops::identity(p.d_b);
    std::vector<double> vals(samples);
    parallel_for(samples, [&](std::size_t k) {
        auto rng = qops::substream(seed, k);
        const Matrix a = qops::haar_unitary(p.d_a, rng);
        const Matrix b = qops::haar_unitary(p.d_b, rng);
        const Matrix evolved = adjoint(qops::kron(a, ib));
        if (evolved.rows() != d || evolved.cols() != d) throw std::invalid_argument("bipartite_otoc_haar_mc: applier does not match bipartition");
        const Matrix c = qops::commutator(evolved, qops::kron(ia, b));
        vals[k] = c.squaredNorm() / (2.0 * static_cast<double>(d));
    });
    const double n = static_cast<double>(samples);
    const double mean = detail::block_sum(vals) / n;
    std::vector<double> dev(samples);
    for (std::size_t k = 0; k < samples; ++k) dev[k] = (vals[k] - mean) * (vals[k] - mean);
    const double var = detail::block_sum(dev) / (n - 1.0);
    return {mean, std::sqrt(var / n), samples};
}

// max |mean(U ⊗ U†) - S/d| over Haar samples, S the swap on C^d ⊗ C^d.
inline double haar_identity_check(Index dim, std::size_t samples, qops::Rng& rng) {
    if (samples < kMinSamples) throw std::invalid_argument("haar_identity_check: need at least 100 samples");
    if (dim < 1) throw std::invalid_argument("haar_identity_check: dimension must be >= 1");
    const Index n = dim * dim;
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < samples; ++k) {
        const Matrix u = qops::haar_unitary(dim, rng);
        acc += qops::kron(u, u.adjoint());
    }
    acc /= static_cast<double>(samples);
    Matrix swap = Matrix::Zero(n, n);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) swap(j * dim + i, i * dim + j) = 1.0;
    return qops::max_abs(acc - swap / static_cast<double>(dim));
}

}  // namespace scramble::bipartite
