// Hamiltonians for the spin systems and baths, plus the
// collective (total-spin) block decomposition of the all-to-all LMG bath.
//
// Builders return operators embedded on the full TensorLayout they are given
// (identity on every factor they do not touch).

#pragma once

#include "scramble/qops.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble::models {

using qops::Axis;
using qops::TensorLayout;

// Ising chain (system) coupled to an isotropic LMG bath.
struct IsingLMGParams {
    std::size_t n_system = 4;
    std::size_t n_bath = 5;
    double omega = 2.0;           // uniform transition frequency
    double j_coupling = 0.5;      // uniform nearest-neighbour zz coupling
    double lambda = 0.5;          // bath internal coupling
    std::optional<double> lambda_tilde;  // system-bath coupling; defaults to lambda
    double omega_c = 4.0;         // bath transition frequency
    double temperature = 10.0;
    std::vector<double> omega_per_site;  // optional override, size n_system
    std::vector<double> j_per_bond;      // optional override, size n_system - 1

    double coupling() const noexcept { return lambda_tilde.value_or(lambda); }
    double omega_at(std::size_t site) const { return omega_per_site.empty() ? omega : omega_per_site.at(site); }
    double j_at(std::size_t bond) const { return j_per_bond.empty() ? j_coupling : j_per_bond.at(bond); }

    void validate() const {
        if (n_system < 1) throw std::invalid_argument("IsingLMGParams: n_system must be >= 1");
        if (n_bath < 1) throw std::invalid_argument("IsingLMGParams: n_bath must be >= 1");
        if (!(temperature > 0.0)) throw std::invalid_argument("IsingLMGParams: temperature must be > 0");
        if (!omega_per_site.empty() && omega_per_site.size() != n_system)
            throw std::invalid_argument("IsingLMGParams: omega_per_site must have n_system entries");
        if (!j_per_bond.empty() && j_per_bond.size() + 1 != n_system)
            throw std::invalid_argument("IsingLMGParams: j_per_bond must have n_system - 1 entries");
    }
};

// Tilted-field Ising chain with an anisotropic XY ring attached to its last site.
struct TFIMParams {
    std::size_t n_system = 4;
    std::size_t n_bath = 6;
    double b_field = 0.5;
    double j_coupling = 0.5;
    double theta = 1.5707963267948966;
    double g = 0.5;
    double gamma = 0.5;
    double lambda_z = 1.0;
    double temperature = 10.0;

    void validate() const {
        if (n_system < 1) throw std::invalid_argument("TFIMParams: n_system must be >= 1");
        if (n_bath < 2) throw std::invalid_argument("TFIMParams: n_bath must be >= 2 (ring)");
        if (!(temperature > 0.0)) throw std::invalid_argument("TFIMParams: temperature must be > 0");
    }
};

struct LMGClosedParams {
    std::size_t n_spins = 6;
    double lambda = 1.0;
    double gamma = 1.0;
    double omega_c = 0.5;

    void validate() const {
        if (n_spins < 2) throw std::invalid_argument("LMGClosedParams: n_spins must be >= 2");
    }
};

namespace detail {

inline Matrix zero(const TensorLayout& layout) { return Matrix::Zero(layout.total_dim(), layout.total_dim()); }

inline void require_system(const TensorLayout& layout, std::size_t n, const char* who) {
    if (layout.n_system() != n)
        throw std::invalid_argument(std::string(who) + ": layout has " + std::to_string(layout.n_system()) +
                                    " system sites, expected " + std::to_string(n));
}

inline void require_bath(const TensorLayout& layout, std::size_t n, const char* who) {
    if (layout.n_bath() != n)
        throw std::invalid_argument(std::string(who) + ": layout has " + std::to_string(layout.n_bath()) +
                                    " bath sites, expected " + std::to_string(n));
}

inline Matrix pair(const TensorLayout& l, std::size_t i, Axis a, std::size_t j, Axis b) {
    return qops::pauli_at(l, i, a) * qops::pauli_at(l, j, b);
}

}  // namespace detail

// --------------------------- Ising chain + LMG bath -------------------------

// Σ_j ω_j σ^z_j + Σ_j J_j σ^z_j σ^z_{j+1}
inline Matrix build_ising_chain(const IsingLMGParams& p, const TensorLayout& layout) {
    p.validate();
    detail::require_system(layout, p.n_system, "build_ising_chain");
    Matrix h = detail::zero(layout);
    for (std::size_t j = 0; j < p.n_system; ++j) h += p.omega_at(j) * qops::pauli_at(layout, j, Axis::z);
    for (std::size_t j = 0; j + 1 < p.n_system; ++j) h += p.j_at(j) * detail::pair(layout, j, Axis::z, j + 1, Axis::z);
    return h;
}

// (λ/N) Σ_{i<j} (σ^x_i σ^x_j + σ^y_i σ^y_j) + ω_c Σ_i σ^z_i over bath sites
inline Matrix build_lmg_bath(const IsingLMGParams& p, const TensorLayout& layout) {
    if (p.n_bath < 1) throw std::invalid_argument("build_lmg_bath: n_bath must be >= 1");
    detail::require_bath(layout, p.n_bath, "build_lmg_bath");
    const auto bath = layout.bath_sites();
    const double n = static_cast<double>(p.n_bath);
    Matrix h = detail::zero(layout);
    for (std::size_t a = 0; a < bath.size(); ++a) {
        h += p.omega_c * qops::pauli_at(layout, bath[a], Axis::z);
        for (std::size_t b = a + 1; b < bath.size(); ++b) {
            h += (p.lambda / n) * (detail::pair(layout, bath[a], Axis::x, bath[b], Axis::x) +
                                   detail::pair(layout, bath[a], Axis::y, bath[b], Axis::y));
        }
    }
    return h;
}

// (λ̃/√N) Σ_j (σ^x_j J^x_N + σ^y_j J^y_N)
inline Matrix build_lmg_coupling(const IsingLMGParams& p, const TensorLayout& layout) {
    p.validate();
    detail::require_system(layout, p.n_system, "build_lmg_coupling");
    detail::require_bath(layout, p.n_bath, "build_lmg_coupling");
    const Matrix jx = qops::collective_j(layout, layout.bath_sites(), Axis::x);
    const Matrix jy = qops::collective_j(layout, layout.bath_sites(), Axis::y);
    Matrix h = detail::zero(layout);
    for (std::size_t j = 0; j < p.n_system; ++j)
        h += qops::pauli_at(layout, j, Axis::x) * jx + qops::pauli_at(layout, j, Axis::y) * jy;
    return (p.coupling() / std::sqrt(static_cast<double>(p.n_bath))) * h;
}

// --------------------------- TFIM + anisotropic ring ------------------------

// B Σ_i (sinθ σ^x_i + cosθ σ^z_i) + J Σ_i σ^z_i σ^z_{i+1}   (open chain)
inline Matrix build_tfim(const TFIMParams& p, const TensorLayout& layout) {
    detail::require_system(layout, p.n_system, "build_tfim");
    const double s = std::sin(p.theta), c = std::cos(p.theta);
    Matrix h = detail::zero(layout);
    for (std::size_t i = 0; i < p.n_system; ++i)
        h += p.b_field * (s * qops::pauli_at(layout, i, Axis::x) + c * qops::pauli_at(layout, i, Axis::z));
    for (std::size_t i = 0; i + 1 < p.n_system; ++i) h += p.j_coupling * detail::pair(layout, i, Axis::z, i + 1, Axis::z);
    return h;
}

// Σ_l [(1+γ)/2 σ^x_l σ^x_{l+1} + (1-γ)/2 σ^y_l σ^y_{l+1} + λ_z σ^z_l], periodic.
// For M = 2 the bonds (1,2) and (2,1) are both summed, doubling that bond.
inline Matrix build_aniso_bath(const TFIMParams& p, const TensorLayout& layout) {
    if (p.n_bath < 2) throw std::invalid_argument("build_aniso_bath: n_bath must be >= 2");
    detail::require_bath(layout, p.n_bath, "build_aniso_bath");
    const auto bath = layout.bath_sites();
    const std::size_t m = bath.size();
    Matrix h = detail::zero(layout);
    for (std::size_t l = 0; l < m; ++l) {
        const std::size_t a = bath[l], b = bath[(l + 1) % m];
        h += 0.5 * (1.0 + p.gamma) * detail::pair(layout, a, Axis::x, b, Axis::x);
        h += 0.5 * (1.0 - p.gamma) * detail::pair(layout, a, Axis::y, b, Axis::y);
        h += p.lambda_z * qops::pauli_at(layout, a, Axis::z);
    }
    return h;
}

// g (σ^x_last Σ_l σ^x_l + σ^y_last Σ_l σ^y_l)
inline Matrix build_edge_coupling(const TFIMParams& p, const TensorLayout& layout) {
    detail::require_system(layout, p.n_system, "build_edge_coupling");
    detail::require_bath(layout, p.n_bath, "build_edge_coupling");
    const std::size_t last = p.n_system - 1;
    Matrix sx = detail::zero(layout), sy = detail::zero(layout);
    for (auto l : layout.bath_sites()) {
        sx += qops::pauli_at(layout, l, Axis::x);
        sy += qops::pauli_at(layout, l, Axis::y);
    }
    return p.g * (qops::pauli_at(layout, last, Axis::x) * sx + qops::pauli_at(layout, last, Axis::y) * sy);
}

// --------------------------- Closed LMG -------------------------------------

// (λ/N) Σ_{i<j} (σ^x_i σ^x_j + γ σ^y_i σ^y_j) + ω_c Σ_i σ^z_i
inline Matrix build_lmg_closed(const LMGClosedParams& p) {
    p.validate();
    const auto layout = TensorLayout::spins(p.n_spins);
    const double n = static_cast<double>(p.n_spins);
    Matrix h = detail::zero(layout);
    for (std::size_t i = 0; i < p.n_spins; ++i) {
        h += p.omega_c * qops::pauli_at(layout, i, Axis::z);
        for (std::size_t j = i + 1; j < p.n_spins; ++j)
            h += (p.lambda / n) * (detail::pair(layout, i, Axis::x, j, Axis::x) +
                                   p.gamma * detail::pair(layout, i, Axis::y, j, Axis::y));
    }
    return h;
}

// --------------------------- Collective blocks ------------------------------

// Spin-j operators in the ladder basis m = j, j-1, …, -j.
struct LadderOps {
    Matrix jx, jy, jz;
};

inline LadderOps ladder_ops(int twice_j) {
    if (twice_j < 0) throw std::invalid_argument("ladder_ops: negative spin");
    const Index d = twice_j + 1;
    const double j = 0.5 * twice_j;
    Matrix jz = Matrix::Zero(d, d), jp = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        jz(k, k) = m;
        // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1
        if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    const Matrix jm = jp.adjoint();
    return {0.5 * (jp + jm), -0.5 * kI * (jp - jm), jz};
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Number of spin-j irreps in N spin-1/2: C(N, N/2-j) - C(N, N/2-j-1)
inline std::uint64_t spin_multiplicity(std::size_t n, int twice_j) {
    const auto tn = static_cast<long long>(n);
    if (twice_j < 0 || twice_j > tn || (tn - twice_j) % 2 != 0) return 0;
    const auto k = static_cast<std::uint64_t>((tn - twice_j) / 2);
    return binomial(n, k) - (k == 0 ? 0 : binomial(n, k - 1));
}

struct CollectiveBlock {
    int twice_j = 0;
    std::uint64_t multiplicity = 0;
    LadderOps ops;
    Matrix block_hamiltonian;  // LMG bath Hamiltonian restricted to one copy of the sector

    double j() const noexcept { return 0.5 * twice_j; }
    Index dim() const noexcept { return twice_j + 1; }
};

// One block per j = N/2, N/2 - 1, …, (0 or 1/2). The bath Hamiltonian depends
// on the bath only through J^k, so inside a sector it reads
// (λ/N)(2(J_x² + J_y²) - N) + 2 ω_c J_z.
inline std::vector<CollectiveBlock> collective_blocks(std::size_t n_bath, const IsingLMGParams& p) {
    if (n_bath < 1) throw std::invalid_argument("collective_blocks: n_bath must be >= 1");
    const double n = static_cast<double>(n_bath);
    std::vector<CollectiveBlock> out;
    for (int tj = static_cast<int>(n_bath); tj >= 0; tj -= 2) {
        CollectiveBlock b;
        b.twice_j = tj;
        b.multiplicity = spin_multiplicity(n_bath, tj);
        b.ops = ladder_ops(tj);
        const Index d = b.dim();
        b.block_hamiltonian = (p.lambda / n) * (2.0 * (b.ops.jx * b.ops.jx + b.ops.jy * b.ops.jy) - n * qops::identity(d)) +
                              2.0 * p.omega_c * b.ops.jz;
        // exact Hermitian symmetrization; the products above carry rounding
        b.block_hamiltonian = 0.5 * (b.block_hamiltonian + b.block_hamiltonian.adjoint()).eval();
        out.push_back(std::move(b));
    }
    return out;
}

// System ⊗ block coupling: (λ̃/√N) Σ_j (σ^x_j ⊗ J^x + σ^y_j ⊗ J^y)
inline Matrix block_lmg_coupling(const IsingLMGParams& p, const CollectiveBlock& block) {
    const auto sys = TensorLayout::spins(p.n_system);
    Matrix h = Matrix::Zero(sys.total_dim() * block.dim(), sys.total_dim() * block.dim());
    for (std::size_t j = 0; j < p.n_system; ++j)
        h += qops::kron(qops::pauli_at(sys, j, Axis::x), block.ops.jx) + qops::kron(qops::pauli_at(sys, j, Axis::y), block.ops.jy);
    return (p.coupling() / std::sqrt(static_cast<double>(p.n_bath))) * h;
}

}  // namespace scramble::models
