#include "scramble/models.hpp"
#include "scramble/open_models.hpp"
#include "scramble/otoc.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace scramble;
using namespace scramble::models;
using qops::Axis;

namespace {

Matrix diag(std::initializer_list<double> v) {
    Matrix m = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
    Index k = 0;
    for (double x : v) m(k, k) = x, ++k;
    return m;
}

Matrix total_z(const TensorLayout& l, const std::vector<std::size_t>& sites) {
    Matrix z = Matrix::Zero(l.total_dim(), l.total_dim());
    for (auto s : sites) z += qops::pauli_at(l, s, Axis::z);
    return z;
}

// Permutation matrix exchanging qubits i and j of an n-qubit register.
Matrix site_swap(std::size_t n, std::size_t i, std::size_t j) {
    const Index d = Index{1} << n;
    Matrix p = Matrix::Zero(d, d);
    for (Index x = 0; x < d; ++x) {
        const Index bi = (x >> (n - 1 - i)) & 1, bj = (x >> (n - 1 - j)) & 1;
        Index y = x & ~(Index{1} << (n - 1 - i)) & ~(Index{1} << (n - 1 - j));
        y |= bj << (n - 1 - i);
        y |= bi << (n - 1 - j);
        p(y, x) = 1.0;
    }
    return p;
}

}  // namespace

TEST(IsingChain, SingleSpin) {
    IsingLMGParams p;
    p.n_system = 1;
    p.n_bath = 1;
    const auto sys = TensorLayout::spins(1);
    EXPECT_EQ(qops::max_abs(build_ising_chain(p, sys) - 2.0 * qops::pauli(Axis::z)), 0.0);
}

TEST(IsingChain, TwoSpinsByHand) {
    IsingLMGParams p;
    p.n_system = 2;
    EXPECT_LE(qops::max_abs(build_ising_chain(p, TensorLayout::spins(2)) - diag({4.5, -0.5, -0.5, -3.5})), 1e-15);
}

TEST(IsingChain, DiagonalAndRealOnFullLayout) {
    IsingLMGParams p;
    p.n_system = 3;
    p.n_bath = 2;
    p.omega = 1.3;
    p.j_coupling = -0.7;
    const Matrix h = build_ising_chain(p, TensorLayout::spins(3, 2));
    Matrix off = h;
    off.diagonal().setZero();
    EXPECT_EQ(qops::max_abs(off), 0.0);
    EXPECT_EQ(h.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(IsingChain, PerSiteOverrides) {
    IsingLMGParams p;
    p.n_system = 2;
    p.omega_per_site = {1.0, 3.0};
    p.j_per_bond = {0.0};
    EXPECT_LE(qops::max_abs(build_ising_chain(p, TensorLayout::spins(2)) - diag({4, -2, 2, -4})), 1e-15);
    p.j_per_bond = {0.0, 1.0};
    EXPECT_THROW(build_ising_chain(p, TensorLayout::spins(2)), std::invalid_argument);
}

TEST(IsingChain, LayoutMismatchThrows) {
    IsingLMGParams p;
    p.n_system = 2;
    EXPECT_THROW(build_ising_chain(p, TensorLayout::spins(3)), std::invalid_argument);
}

TEST(LmgBath, SingleBathSpin) {
    IsingLMGParams p;
    p.n_system = 1;
    p.n_bath = 1;
    const auto l = TensorLayout::spins(0, 1);
    EXPECT_EQ(qops::max_abs(build_lmg_bath(p, l) - 4.0 * qops::pauli(Axis::z)), 0.0);
}

TEST(LmgBath, TwoBathSpinsSpectrum) {
    IsingLMGParams p;
    p.n_bath = 2;
    p.lambda = 1.0;
    p.omega_c = 4.0;
    const auto s = qops::eig_hermitian(build_lmg_bath(p, TensorLayout::spins(0, 2)));
    const std::vector<double> expect{-8, -1, 1, 8};
    for (Index k = 0; k < 4; ++k) EXPECT_NEAR(s.eigenvalues(k), expect[static_cast<std::size_t>(k)], 1e-12);
}

TEST(LmgBath, ConservesMagnetization) {
    for (std::size_t n : {2u, 3u, 4u}) {
        IsingLMGParams p;
        p.n_system = 1;
        p.n_bath = n;
        p.lambda = 0.77;
        p.omega_c = 1.9;
        const auto l = TensorLayout::spins(1, n);
        EXPECT_LE(qops::max_abs(qops::commutator(build_lmg_bath(p, l), total_z(l, l.bath_sites()))), 1e-12);
    }
}

TEST(LmgCoupling, ZeroCouplingIsZero) {
    IsingLMGParams p;
    p.n_system = 2;
    p.n_bath = 2;
    p.lambda_tilde = 0.0;
    EXPECT_EQ(qops::max_abs(build_lmg_coupling(p, TensorLayout::spins(2, 2))), 0.0);
}

TEST(LmgCoupling, OneByOne) {
    IsingLMGParams p;
    p.n_system = 1;
    p.n_bath = 1;
    p.lambda_tilde = 1.0;
    const Matrix expect = 0.5 * (qops::kron(qops::pauli(Axis::x), qops::pauli(Axis::x)) + qops::kron(qops::pauli(Axis::y), qops::pauli(Axis::y)));
    EXPECT_LE(qops::max_abs(build_lmg_coupling(p, TensorLayout::spins(1, 1)) - expect), 1e-15);
}

TEST(LmgCoupling, Hermitian) {
    IsingLMGParams p;
    p.n_system = 2;
    p.n_bath = 3;
    p.lambda = 0.31;
    EXPECT_LE(qops::hermiticity_error(build_lmg_coupling(p, TensorLayout::spins(2, 3))), 1e-12);
}

TEST(Tfim, Limits) {
    TFIMParams p;
    p.n_system = 1;
    p.theta = 0.0;
    p.b_field = 0.8;
    EXPECT_LE(qops::max_abs(build_tfim(p, TensorLayout::spins(1)) - 0.8 * qops::pauli(Axis::z)), 1e-15);
    p.theta = std::numbers::pi / 2;
    p.b_field = 0.5;
    EXPECT_LE(qops::max_abs(build_tfim(p, TensorLayout::spins(1)) - 0.5 * qops::pauli(Axis::x)), 1e-15);
}

TEST(Tfim, TransverseParity) {
    TFIMParams p;
    p.n_system = 3;
    p.j_coupling = 0.0;
    const auto l = TensorLayout::spins(3);
    const Matrix parity = qops::pauli_at(l, 0, Axis::x) * qops::pauli_at(l, 1, Axis::x) * qops::pauli_at(l, 2, Axis::x);
    EXPECT_LE(qops::max_abs(qops::commutator(build_tfim(p, l), parity)), 1e-12);
}

TEST(AnisoBath, Limits) {
    TFIMParams p;
    p.n_system = 1;
    p.n_bath = 3;
    p.lambda_z = 0.4;
    const auto l = TensorLayout::spins(0, 3);
    auto ring = [&](Axis a) {
        Matrix h = Matrix::Zero(8, 8);
        for (std::size_t k = 0; k < 3; ++k) h += qops::pauli_at(l, k, a) * qops::pauli_at(l, (k + 1) % 3, a);
        return h;
    };
    const Matrix field = 0.4 * total_z(l, {0, 1, 2});
    p.gamma = 0.0;
    EXPECT_LE(qops::max_abs(build_aniso_bath(p, l) - (0.5 * ring(Axis::x) + 0.5 * ring(Axis::y) + field)), 1e-14);
    p.gamma = 1.0;
    EXPECT_LE(qops::max_abs(build_aniso_bath(p, l) - (ring(Axis::x) + field)), 1e-14);
}

TEST(AnisoBath, TwoSiteRingDoublesBond) {
    TFIMParams p;
    p.n_bath = 2;
    p.gamma = 1.0;
    p.lambda_z = 0.0;
    EXPECT_LE(qops::max_abs(build_aniso_bath(p, TensorLayout::spins(0, 2)) - 2.0 * qops::kron(qops::pauli(Axis::x), qops::pauli(Axis::x))), 1e-15);
}

TEST(AnisoBath, RingTooSmallThrows) {
    TFIMParams p;
    p.n_bath = 1;
    EXPECT_THROW(build_aniso_bath(p, TensorLayout::spins(0, 1)), std::invalid_argument);
}

TEST(EdgeCoupling, ZeroAndLocality) {
    TFIMParams p;
    p.n_system = 2;
    p.n_bath = 2;
    const auto l = TensorLayout::spins(2, 2);
    p.g = 0.0;
    EXPECT_EQ(qops::max_abs(build_edge_coupling(p, l)), 0.0);
    p.g = 0.9;
    const Matrix h = build_edge_coupling(p, l);
    EXPECT_LE(qops::hermiticity_error(h), 1e-15);
    EXPECT_LE(qops::max_abs(qops::commutator(h, qops::pauli_at(l, 0, Axis::z))), 1e-15);
    EXPECT_GT(qops::max_abs(qops::commutator(h, qops::pauli_at(l, 1, Axis::z))), 0.1);
}

TEST(LmgClosed, IsotropicSymmetries) {
    LMGClosedParams p;
    p.n_spins = 4;
    p.gamma = 1.0;
    const auto l = TensorLayout::spins(4);
    const Matrix h = build_lmg_closed(p);
    EXPECT_LE(qops::max_abs(qops::commutator(h, total_z(l, {0, 1, 2, 3}))), 1e-12);
    p.n_spins = 3;
    const Matrix h3 = build_lmg_closed(p);
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
        const Matrix s = site_swap(3, i, j);
        EXPECT_LE(qops::max_abs(s * h3 * s.adjoint() - h3), 1e-12);
    }
}

TEST(LmgClosed, TwoSpinByHand) {
    LMGClosedParams p;
    p.n_spins = 2;
    p.lambda = 1.0;
    p.gamma = 0.0;
    p.omega_c = 0.0;
    EXPECT_LE(qops::max_abs(build_lmg_closed(p) - 0.5 * qops::kron(qops::pauli(Axis::x), qops::pauli(Axis::x))), 1e-15);
}

TEST(LmgClosed, TooFewSpinsThrows) {
    LMGClosedParams p;
    p.n_spins = 1;
    EXPECT_THROW(build_lmg_closed(p), std::invalid_argument);
}

TEST(Builders, AllHermitian) {
    IsingLMGParams ip;
    ip.n_system = 2;
    ip.n_bath = 3;
    const auto l = TensorLayout::spins(2, 3);
    TFIMParams tp;
    tp.n_system = 2;
    tp.n_bath = 3;
    tp.theta = 0.4;
    for (const Matrix& h : {build_ising_chain(ip, l), build_lmg_bath(ip, l), build_lmg_coupling(ip, l), build_tfim(tp, l),
                            build_aniso_bath(tp, l), build_edge_coupling(tp, l), build_lmg_closed(LMGClosedParams{})})
        EXPECT_LE(qops::hermiticity_error(h), 1e-12);
}

TEST(Builders, DecoupledTotalCommutesWithSystem) {
    IsingLMGParams p;
    p.n_system = 2;
    p.n_bath = 3;
    p.lambda_tilde = 0.0;
    const auto l = TensorLayout::spins(2, 3);
    const Matrix hs = build_ising_chain(p, l);
    const Matrix h = hs + build_lmg_bath(p, l) + build_lmg_coupling(p, l);
    EXPECT_LE(qops::max_abs(qops::commutator(h, hs)), 1e-10);
}

TEST(CollectiveBlocks, Multiplicities) {
    IsingLMGParams p;
    auto check = [&](std::size_t n, std::vector<std::pair<int, std::uint64_t>> expect) {
        const auto blocks = collective_blocks(n, p);
        ASSERT_EQ(blocks.size(), expect.size());
        Index total = 0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            EXPECT_EQ(blocks[k].twice_j, expect[k].first);
            EXPECT_EQ(blocks[k].multiplicity, expect[k].second);
            total += static_cast<Index>(blocks[k].multiplicity) * blocks[k].dim();
        }
        EXPECT_EQ(total, Index{1} << n);
    };
    check(1, {{1, 1}});
    check(2, {{2, 1}, {0, 1}});
    check(4, {{4, 1}, {2, 3}, {0, 2}});
    check(5, {{5, 1}, {3, 4}, {1, 5}});
    for (std::size_t n = 1; n <= 16; ++n) {
        Index total = 0;
        for (const auto& b : collective_blocks(n, p)) total += static_cast<Index>(b.multiplicity) * b.dim();
        EXPECT_EQ(total, Index{1} << n);
    }
}

TEST(CollectiveBlocks, LadderAlgebra) {
    for (int tj = 0; tj <= 6; ++tj) {
        const auto o = ladder_ops(tj);
        const double j = 0.5 * tj;
        EXPECT_LE(qops::max_abs(o.jx * o.jy - o.jy * o.jx - kI * o.jz), 1e-12);
        const Matrix casimir = o.jx * o.jx + o.jy * o.jy + o.jz * o.jz;
        EXPECT_LE(qops::max_abs(casimir - j * (j + 1) * qops::identity(tj + 1)), 1e-12);
    }
}

// The full bath spectrum is the union of block spectra with multiplicity.
TEST(CollectiveBlocks, SpectrumMatchesDenseBath) {
    IsingLMGParams p;
    p.lambda = 0.83;
    p.omega_c = 1.7;
    for (std::size_t n : {2u, 3u, 4u, 5u}) {
        p.n_bath = n;
        std::vector<double> fast;
        for (const auto& b : collective_blocks(n, p)) {
            const auto s = qops::eig_hermitian(b.block_hamiltonian);
            for (std::uint64_t m = 0; m < b.multiplicity; ++m)
                for (Index k = 0; k < s.dim(); ++k) fast.push_back(s.eigenvalues(k));
        }
        std::sort(fast.begin(), fast.end());
        const auto dense = qops::eig_hermitian(lmg_bath_register(p));
        ASSERT_EQ(static_cast<Index>(fast.size()), dense.dim());
        for (Index k = 0; k < dense.dim(); ++k) EXPECT_NEAR(fast[static_cast<std::size_t>(k)], dense.eigenvalues(k), 1e-10);
    }
}

TEST(CollectiveBlocks, FastPathMatchesDenseDynamics) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.2, 1.5);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 6u}) {
        IsingLMGParams p;
        p.n_system = 1 + n % 2;
        p.n_bath = n;
        p.omega = u(rng);
        p.j_coupling = u(rng);
        p.lambda = u(rng);
        p.omega_c = u(rng);
        p.temperature = 2.0 * u(rng);
        const auto dense = ising_lmg_dense(p);
        const auto fast = ising_lmg_collective(p);
        EXPECT_NEAR(fast.bath_weight(), 1.0, 1e-10);
        const Matrix rho = tilted_product_state(p.n_system);
        const Matrix b = qops::pauli_at(TensorLayout::spins(p.n_system), 0, Axis::z);
        for (double t : {0.4, 1.7}) {
            for (auto dir : {dynamics::Direction::schrodinger, dynamics::Direction::adjoint})
                for (auto sense : {dynamics::Sense::forward, dynamics::Sense::backward}) {
                    const Matrix x = dir == dynamics::Direction::schrodinger ? Matrix(b * rho) : b;
                    EXPECT_LE(qops::max_abs(dense.apply(dir, sense, x, t) - fast.apply(dir, sense, x, t)), 1e-8);
                }
        }
        otoc::OtocRequest req{qops::pauli_at(TensorLayout::spins(p.n_system), p.n_system - 1, Axis::z), b, p.n_system - 1, 0, rho,
                              otoc::uniform_grid(3.0, 7), false};
        const auto fd = otoc::fotoc_open(dense, req), ff = otoc::fotoc_open(fast, req);
        for (std::size_t k = 0; k < fd.values.size(); ++k) EXPECT_NEAR(fd.values[k], ff.values[k], 1e-8);
    }
}

TEST(CollectiveBlocks, ThermalWeightsMatchDenseGibbs) {
    IsingLMGParams p;
    p.n_system = 1;
    p.n_bath = 4;
    p.temperature = 0.7;
    // Probability of each bath energy level: dense vs weighted blocks
    const auto dyn = ising_lmg_collective(p);
    double total = 0.0;
    for (const auto& part : dyn.parts()) total += part.bath.trace().real();
    EXPECT_NEAR(total, 1.0, 1e-10);
    const Matrix rho = qops::thermal_state(lmg_bath_register(p), p.temperature);
    const Matrix hb = lmg_bath_register(p);
    double e_dense = (rho * hb).trace().real(), e_fast = 0.0;
    const auto blocks = collective_blocks(p.n_bath, p);
    for (std::size_t k = 0; k < blocks.size(); ++k) e_fast += (dyn.parts()[k].bath * blocks[k].block_hamiltonian).trace().real();
    EXPECT_NEAR(e_dense, e_fast, 1e-10);
}

TEST(OpenModels, BathStateParsing) {
    EXPECT_EQ(parse_bath_state("thermal"), BathState::thermal);
    EXPECT_EQ(parse_bath_state("maximally-mixed"), BathState::maximally_mixed);
    EXPECT_THROW(parse_bath_state("hot"), std::invalid_argument);
}

TEST(OpenModels, TiltedStateIsPure) {
    const Matrix rho = tilted_product_state(3);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
    EXPECT_LE(qops::max_abs(rho * rho - rho), 1e-14);
    EXPECT_NEAR(rho(0, 0).real(), std::pow(0.75, 3), 1e-14);
}
