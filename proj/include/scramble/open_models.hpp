// Ready-made OpenDynamics for the two system-bath models.

#pragma once

#include "scramble/dynamics.hpp"
#include "scramble/models.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace scramble::models {

enum class BathState { thermal, maximally_mixed };

inline BathState parse_bath_state(const std::string& s) {
    if (s == "thermal") return BathState::thermal;
    if (s == "maximally-mixed") return BathState::maximally_mixed;
    throw std::invalid_argument("parse_bath_state: expected 'thermal' or 'maximally-mixed', got '" + s + "'");
}

// Bath-only Hamiltonian on its own register (for the bath Gibbs state).
inline Matrix lmg_bath_register(const IsingLMGParams& p) {
    IsingLMGParams bare = p;
    bare.n_system = 0;
    return build_lmg_bath(bare, TensorLayout::spins(0, p.n_bath));
}

inline Matrix aniso_bath_register(const TFIMParams& p) {
    return build_aniso_bath(p, TensorLayout::spins(0, p.n_bath));
}

inline Matrix bath_state(const Matrix& h_bath_register, BathState kind, double temperature) {
    if (kind == BathState::maximally_mixed) return qops::maximally_mixed(h_bath_register.rows());
    return qops::thermal_state(h_bath_register, temperature);
}

// Full-tensor reference path for the Ising chain in an LMG bath.
inline dynamics::OpenDynamics ising_lmg_dense(const IsingLMGParams& p, BathState kind = BathState::thermal) {
    p.validate();
    const auto layout = TensorLayout::spins(p.n_system, p.n_bath);
    const Matrix hs = build_ising_chain(p, layout);
    const Matrix he = build_lmg_bath(p, layout);
    const Matrix hse = build_lmg_coupling(p, layout);
    return dynamics::OpenDynamics::dilation(hs, he, hse, layout, bath_state(lmg_bath_register(p), kind, p.temperature));
}

// Collective fast path: the joint dynamics never leaves a total-spin sector of
// the bath, so each sector contributes one system ⊗ (2j+1) register, weighted
// by its multiplicity and its share of the bath partition function.
inline dynamics::OpenDynamics ising_lmg_collective(const IsingLMGParams& p, BathState kind = BathState::thermal) {
    p.validate();
    const auto blocks = collective_blocks(p.n_bath, p);
    const auto sys = TensorLayout::spins(p.n_system);
    const Index ds = sys.total_dim();
    const Matrix hs_sys = build_ising_chain(p, sys);

    std::vector<qops::Spectrum> spectra;
    double e_min = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
        spectra.push_back(qops::eig_hermitian(b.block_hamiltonian));
        e_min = std::min(e_min, spectra.back().eigenvalues.minCoeff());
    }
    std::vector<Matrix> weights;
    double z = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Index d = blocks[k].dim();
        Matrix w = kind == BathState::thermal ? qops::gibbs_operator(spectra[k], p.temperature, e_min) : qops::identity(d);
        w *= static_cast<double>(blocks[k].multiplicity);
        z += w.trace().real();
        weights.push_back(std::move(w));
    }

    dynamics::OpenDynamics dyn(ds);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Index d = blocks[k].dim();
        const Matrix hs = qops::kron(hs_sys, qops::identity(d));
        const Matrix he = qops::kron(qops::identity(ds), blocks[k].block_hamiltonian);
        const Matrix hse = block_lmg_coupling(p, blocks[k]);
        dyn.add_part(hs + he + hse, -hs + he + hse, weights[k] / z);
    }
    return dyn;
}

inline dynamics::OpenDynamics tfim_dense(const TFIMParams& p, BathState kind = BathState::thermal) {
    p.validate();
    const auto layout = TensorLayout::spins(p.n_system, p.n_bath);
    const Matrix hs = build_tfim(p, layout);
    const Matrix he = build_aniso_bath(p, layout);
    const Matrix hse = build_edge_coupling(p, layout);
    return dynamics::OpenDynamics::dilation(hs, he, hse, layout, bath_state(aniso_bath_register(p), kind, p.temperature));
}

// Tilted single-spin state (√3/2)|0> + (1/2)|1> on every system site.
inline Matrix tilted_product_state(std::size_t n_system) {
    Vector psi(2);
    psi << std::sqrt(3.0) / 2.0, 0.5;
    return qops::product_state(psi, n_system);
}

}  // namespace scramble::models
