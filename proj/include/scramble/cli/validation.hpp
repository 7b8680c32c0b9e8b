// Self-checks run by the `validate` scenario.
//
// Each check reports the largest error it measured against its tolerance.

#pragma once

#include "scramble/bipartite.hpp"
#include "scramble/open_models.hpp"
#include "scramble/otoc.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace scramble::cli {

struct CheckResult {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

namespace detail {

inline Matrix random_state(Index d, qops::Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
    Matrix rho = m * m.adjoint();
    return rho / rho.trace();
}

inline Matrix random_hermitian(Index d, qops::Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (m + m.adjoint());
}

inline models::IsingLMGParams random_lmg(std::size_t ns, std::size_t nb, qops::Rng& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    models::IsingLMGParams p;
    p.n_system = ns;
    p.n_bath = nb;
    p.omega = u(rng);
    p.j_coupling = u(rng);
    p.lambda = u(rng);
    p.omega_c = u(rng);
    p.temperature = 2.0 * u(rng);
    return p;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
    return e;
}

inline CheckResult verdict(std::string name, double error, double tol) {
    return {std::move(name), error, tol, std::isfinite(error) && error <= tol};
}

}  // namespace detail

inline CheckResult check_closed_protocol(std::uint64_t seed) {
    auto rng = qops::substream(seed, 1);
    double err = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Index d = k % 2 ? 4 : 2;
        otoc::OtocRequest req{qops::haar_unitary(d, rng), qops::haar_unitary(d, rng), 0, 0, detail::random_state(d, rng),
                              otoc::uniform_grid(5.0, 11), false};
        const Matrix h = detail::random_hermitian(d, rng);
        err = std::max(err, detail::max_diff(otoc::fotoc_closed(h, req).values, otoc::fotoc_protocol_closed(h, req).values));
    }
    return detail::verdict("closed protocol vs formula", err, 1e-10);
}

inline CheckResult check_open_protocol(std::uint64_t seed) {
    auto rng = qops::substream(seed, 2);
    double err = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t ns = 1 + k % 2, nb = 1 + (k / 2) % 2;
        const auto dyn = models::ising_lmg_dense(detail::random_lmg(ns, nb, rng));
        const Index d = dyn.system_dim();
        otoc::OtocRequest req{qops::haar_unitary(d, rng), qops::haar_unitary(d, rng), 0, 0, detail::random_state(d, rng),
                              otoc::uniform_grid(5.0, 6), false};
        err = std::max(err, detail::max_diff(otoc::fotoc_open(dyn, req).values, otoc::fotoc_protocol_open(dyn, req).values));
    }
    return detail::verdict("open protocol vs formula", err, 1e-10);
}

inline CheckResult check_duality(std::uint64_t seed) {
    auto rng = qops::substream(seed, 3);
    const auto dyn = models::ising_lmg_dense(detail::random_lmg(1, 2, rng));
    double err = 0.0;
    std::uniform_real_distribution<double> t(0.0, 5.0);
    for (int k = 0; k < 10; ++k) {
        const double tk = t(rng);
        const Matrix a = detail::random_hermitian(2, rng) + kI * detail::random_hermitian(2, rng);
        const Matrix rho = detail::random_state(2, rng);
        for (auto sense : {dynamics::Sense::forward, dynamics::Sense::backward}) {
            const cplx lhs = (a * dyn.apply(dynamics::Direction::schrodinger, sense, rho, tk)).trace();
            const cplx rhs = (dyn.apply(dynamics::Direction::adjoint, sense, a, tk) * rho).trace();
            err = std::max(err, std::abs(lhs - rhs));
        }
    }
    return detail::verdict("adjoint channel duality", err, 1e-10);
}

inline CheckResult check_choi_positivity(std::uint64_t seed) {
    auto rng = qops::substream(seed, 4);
    const auto dyn = models::ising_lmg_dense(detail::random_lmg(2, 2, rng));
    double worst = 0.0;
    for (double t : {0.3, 1.7, 4.1})
        for (auto dir : {dynamics::Direction::schrodinger, dynamics::Direction::adjoint}) {
            const Matrix c = dynamics::choi_matrix(dyn.superoperator(dir, dynamics::Sense::forward, t));
            worst = std::max(worst, -qops::eig_hermitian(0.5 * (c + c.adjoint())).eigenvalues.minCoeff());
        }
    return detail::verdict("Choi matrix positivity (-min eigenvalue)", std::max(worst, 0.0), 1e-9);
}

inline CheckResult check_commutator_identity(std::uint64_t seed) {
    auto rng = qops::substream(seed, 5);
    double err = 0.0;
    for (int k = 0; k < 20; ++k) {
        otoc::OtocRequest req{qops::haar_unitary(4, rng), qops::haar_unitary(4, rng), 0, 0, detail::random_state(4, rng),
                              otoc::uniform_grid(5.0, 11), false};
        err = std::max(err, otoc::commutator_identity_error(detail::random_hermitian(4, rng), req));
    }
    return detail::verdict("C = 1 - Re F for unitary A, B", err, 1e-10);
}

inline CheckResult check_swap_algebra() {
    double err = 0.0;
    for (auto [da, db] : {std::pair<Index, Index>{2, 2}, {2, 4}, {4, 2}}) {
        const bipartite::Bipartition p(da, db);
        const auto s = bipartite::build_swaps(p);
        const Matrix id = qops::identity(p.d() * p.d());
        for (const Matrix& m : {Matrix(s.s_full * s.s_full - id), Matrix(s.s_aa * s.s_aa - id), Matrix(s.s_bb * s.s_bb - id),
                                Matrix(s.s_aa * s.s_bb - s.s_full)})
            err = std::max(err, qops::max_abs(m));
    }
    return detail::verdict("swap operator algebra", err, 1e-12);
}

inline CheckResult check_haar_identity(std::uint64_t seed, std::size_t samples) {
    double err = 0.0;
    for (Index d : {2, 4}) {
        auto rng = qops::substream(seed, 6 + static_cast<std::uint64_t>(d));
        err = std::max(err, bipartite::haar_identity_check(d, samples, rng));
    }
    return detail::verdict("Haar second-moment identity", err, 5.0 / std::sqrt(static_cast<double>(samples)));
}

inline CheckResult check_mc_vs_formula(std::uint64_t seed, std::size_t samples) {
    models::IsingLMGParams p;
    p.n_system = 2;
    p.n_bath = 2;
    p.lambda = 1.0;
    const auto dyn = models::ising_lmg_dense(p);
    const bipartite::Bipartition bp(2, 2);
    const double exact = bipartite::bipartite_otoc_open(dyn.superoperator(dynamics::Direction::adjoint, dynamics::Sense::forward, 1.0), bp);
    const auto est = bipartite::bipartite_otoc_haar_mc(dyn.applier(dynamics::Direction::adjoint, dynamics::Sense::forward, 1.0), bp, samples,
                                                       qops::splitmix64(seed ^ 0x5151));
    return detail::verdict("bipartite OTOC: Monte Carlo vs swap formula", std::abs(est.mean - exact), 3.0 * est.std_error);
}

inline CheckResult check_fast_path(std::uint64_t seed) {
    auto rng = qops::substream(seed, 11);
    double err = 0.0;
    for (std::size_t nb = 1; nb <= 6; ++nb) {
        const auto p = detail::random_lmg(2, nb, rng);
        const auto dense = models::ising_lmg_dense(p), fast = models::ising_lmg_collective(p);
        const auto l = qops::TensorLayout::spins(2);
        otoc::OtocRequest req{qops::pauli_at(l, 1, qops::Axis::z), qops::pauli_at(l, 0, qops::Axis::z), 1, 0,
                              models::tilted_product_state(2), otoc::uniform_grid(5.0, 6), false};
        err = std::max(err, detail::max_diff(otoc::fotoc_open(dense, req).values, otoc::fotoc_open(fast, req).values));
        for (double t : {0.5, 2.0}) {
            const double gd = bipartite::bipartite_otoc_open(dense.superoperator(dynamics::Direction::adjoint, dynamics::Sense::forward, t), {2, 2});
            const double gf = bipartite::bipartite_otoc_open(fast.superoperator(dynamics::Direction::adjoint, dynamics::Sense::forward, t), {2, 2});
            err = std::max(err, std::abs(gd - gf));
        }
    }
    return detail::verdict("collective fast path vs dense", err, 1e-8);
}

inline std::vector<CheckResult> run_validation(std::uint64_t seed, std::size_t samples) {
    return {check_closed_protocol(seed), check_open_protocol(seed), check_duality(seed),       check_choi_positivity(seed),
            check_commutator_identity(seed), check_swap_algebra(),  check_haar_identity(seed, samples),
            check_mc_vs_formula(seed, samples), check_fast_path(seed)};
}

}  // namespace scramble::cli
