// Interferometric OTOC (F-OTOC) for closed and open systems.
//
//   closed:    F(t) = Re Tr[A†(t) B† A(t) B ρ],        A(t) = U_t† A U_t
//   open:      F(t) = Re Tr[(ξ_b†(t) B†) A (ξ_f(t)(B ρ)) A†]
//   corrected: F_c(t) = F(t, A, B) / F(t, I, B)
//   C(t) = ½ Tr([A_t, B]† [A_t, B] ρ);  for unitary A, B (closed) C = 1 - Re F.
//
// The *_protocol_* functions simulate the control-qubit interferometer
// explicitly and are used to cross-check the trace formulas.

#pragma once

#include "scramble/dynamics.hpp"
#include "scramble/parallel.hpp"
#include "scramble/qops.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble::otoc {

using dynamics::Direction;
using dynamics::OpenDynamics;
using dynamics::Sense;

struct OtocRequest {
    Matrix op_a;                  // A, on the system
    Matrix op_b;                  // B, on the system
    std::size_t site_a = 0;
    std::size_t site_b = 0;
    Matrix initial_system_state;  // ρ_S(0)
    std::vector<double> time_grid;
    bool corrected = false;

    void validate(Index d, const char* who) const {
        auto need = [&](const Matrix& m, const char* what) {
            if (m.rows() != d || m.cols() != d)
                throw std::invalid_argument(std::string(who) + ": " + what + " does not match system dimension " + std::to_string(d));
        };
        need(op_a, "A");
        need(op_b, "B");
        need(initial_system_state, "initial state");
        if (time_grid.empty()) throw std::invalid_argument(std::string(who) + ": empty time grid");
        for (std::size_t k = 1; k < time_grid.size(); ++k)
            if (!(time_grid[k] > time_grid[k - 1])) throw std::invalid_argument(std::string(who) + ": time grid must be ascending");
    }
};

struct SeriesResult {
    std::string label;
    std::vector<double> times;
    std::vector<double> values;
    double max_imag = 0.0;  // largest |Im| of the trace before taking Re
    std::optional<std::size_t> site;
};

inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
    if (!(t_max > 0.0)) throw std::invalid_argument("uniform_grid: t_max must be > 0");
    std::vector<double> t(points);
    for (std::size_t k = 0; k < points; ++k) t[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
    return t;
}

namespace detail {

inline SeriesResult finish(std::string label, const std::vector<double>& times, const std::vector<cplx>& raw, std::size_t site) {
    SeriesResult r{std::move(label), times, {}, 0.0, site};
    r.values.reserve(raw.size());
    for (const auto& z : raw) {
        r.values.push_back(z.real());
        if (std::isfinite(z.imag())) r.max_imag = std::max(r.max_imag, std::abs(z.imag()));
    }
    return r;
}

}  // namespace detail

// --------------------------- Closed systems ---------------------------------

// Heisenberg evolution in the eigenbasis of H, reusable at any t.
class ClosedOtoc {
public:
    ClosedOtoc(const qops::Spectrum& spectrum, const Matrix& a, const Matrix& b, const Matrix& rho) : s_(spectrum) {
        const Matrix& v = s_.eigenvectors;
        a_ = v.adjoint() * a * v;
        b_ = v.adjoint() * b * v;
        rho_ = v.adjoint() * rho * v;
    }

    // A(t) in the eigenbasis: entry (m,n) picks up exp(i(E_m - E_n)t).
    Matrix heisenberg_a(double t) const {
        Vector ph(s_.dim());
        for (Index k = 0; k < s_.dim(); ++k) ph(k) = std::exp(kI * (s_.eigenvalues(k) * t));
        return ph.asDiagonal() * a_ * ph.conjugate().asDiagonal();
    }

    // Tr[A†(t) B† A(t) B ρ], complex
    cplx value(double t) const {
        const Matrix at = heisenberg_a(t);
        return (at.adjoint() * b_.adjoint() * at * b_ * rho_).trace();
    }

    // ½ Tr([A_t, B]† [A_t, B] ρ)
    double commutator_square(double t) const {
        const Matrix at = heisenberg_a(t);
        const Matrix c = at * b_ - b_ * at;
        return 0.5 * (c.adjoint() * c * rho_).trace().real();
    }

private:
    qops::Spectrum s_;
    Matrix a_, b_, rho_;
};

inline SeriesResult fotoc_closed(const qops::Spectrum& spectrum, const OtocRequest& req) {
    req.validate(spectrum.dim(), "fotoc_closed");
    const ClosedOtoc f(spectrum, req.op_a, req.op_b, req.initial_system_state);
    std::vector<cplx> raw(req.time_grid.size());
    parallel_for(raw.size(), [&](std::size_t k) { raw[k] = f.value(req.time_grid[k]); });
    return detail::finish("F", req.time_grid, raw, req.site_a);
}

inline SeriesResult fotoc_closed(const Matrix& h_system, const OtocRequest& req) {
    return fotoc_closed(qops::eig_hermitian(h_system), req);
}

// Final system ⊗ control state after U5 U4 U3 U2 U1 acting on ρ ⊗ |+><+|.
// The control qubit is the last tensor factor.
inline Matrix protocol_closed_final_state(const qops::Spectrum& spectrum, const OtocRequest& req, double t) {
    const Index d = spectrum.dim();
    const Matrix p0 = qops::matrix_unit(2, 0, 0), p1 = qops::matrix_unit(2, 1, 1), i2 = qops::identity(2), id = qops::identity(d);
    const Matrix u1 = qops::kron(id, p0) + qops::kron(req.op_b, p1);
    const Matrix u2 = qops::kron(qops::propagator(spectrum, t), i2);
    const Matrix u3 = qops::kron(req.op_a, i2);
    const Matrix u4 = qops::kron(qops::propagator(spectrum, -t), i2);
    const Matrix u5 = qops::kron(req.op_b, p0) + qops::kron(id, p1);
    const Matrix u = u5 * u4 * u3 * u2 * u1;
    const Matrix plus = Matrix::Constant(2, 2, 0.5);
    return u * qops::kron(req.initial_system_state, plus) * u.adjoint();
}

inline cplx control_x_expectation(const Matrix& rho_final) {
    const Index d = rho_final.rows() / 2;
    return (qops::kron(qops::identity(d), qops::pauli(qops::Axis::x)) * rho_final).trace();
}

inline SeriesResult fotoc_protocol_closed(const Matrix& h_system, const OtocRequest& req) {
    const auto s = qops::eig_hermitian(h_system);
    req.validate(s.dim(), "fotoc_protocol_closed");
    std::vector<cplx> raw(req.time_grid.size());
    parallel_for(raw.size(), [&](std::size_t k) {
        raw[k] = control_x_expectation(protocol_closed_final_state(s, req, req.time_grid[k]));
    });
    return detail::finish("F_protocol", req.time_grid, raw, req.site_a);
}

inline SeriesResult commutator_square_closed(const Matrix& h_system, const OtocRequest& req) {
    const auto s = qops::eig_hermitian(h_system);
    req.validate(s.dim(), "commutator_square");
    const ClosedOtoc f(s, req.op_a, req.op_b, req.initial_system_state);
    std::vector<cplx> raw(req.time_grid.size());
    parallel_for(raw.size(), [&](std::size_t k) { raw[k] = f.commutator_square(req.time_grid[k]); });
    return detail::finish("C", req.time_grid, raw, req.site_a);
}

// max_t |C(t) - (1 - Re F(t))|; only meaningful for unitary A and B.
inline double commutator_identity_error(const Matrix& h_system, const OtocRequest& req) {
    if (!qops::is_unitary(req.op_a) || !qops::is_unitary(req.op_b))
        throw std::invalid_argument("commutator_identity_error: A and B must be unitary");
    const auto s = qops::eig_hermitian(h_system);
    req.validate(s.dim(), "commutator_identity_error");
    const ClosedOtoc f(s, req.op_a, req.op_b, req.initial_system_state);
    double err = 0.0;
    for (double t : req.time_grid) err = std::max(err, std::abs(f.commutator_square(t) - (1.0 - f.value(t).real())));
    return err;
}

// --------------------------- Open systems -----------------------------------

// ξ_f(t)(B ρ) and ξ_b†(t)(B†) on the whole grid. Neither depends on A, so one
// pass serves every probe operator.
struct OpenOrbits {
    std::vector<Matrix> forward_state;    // ξ_f(t)(B ρ)
    std::vector<Matrix> backward_probe;   // ξ_b†(t)(B†)
};

inline OpenOrbits open_orbits(const OpenDynamics& dyn, const Matrix& op_b, const Matrix& rho, const std::vector<double>& times) {
    const auto f = dyn.prepare(Direction::schrodinger, Sense::forward, op_b * rho);
    const auto b = dyn.prepare(Direction::adjoint, Sense::backward, op_b.adjoint());
    OpenOrbits o{std::vector<Matrix>(times.size()), std::vector<Matrix>(times.size())};
    parallel_for(times.size(), [&](std::size_t k) {
        o.forward_state[k] = dyn.evaluate(f, times[k]);
        o.backward_probe[k] = dyn.evaluate(b, times[k]);
    });
    return o;
}

inline cplx open_value(const OpenOrbits& o, std::size_t k, const Matrix& a) {
    return (o.backward_probe[k] * a * o.forward_state[k] * a.adjoint()).trace();
}

inline SeriesResult fotoc_open(const OpenDynamics& dyn, const OtocRequest& req) {
    req.validate(dyn.system_dim(), "fotoc_open");
    const auto o = open_orbits(dyn, req.op_b, req.initial_system_state, req.time_grid);
    std::vector<cplx> raw(req.time_grid.size());
    for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = open_value(o, k, req.op_a);
    return detail::finish("F", req.time_grid, raw, req.site_a);
}

inline SeriesResult fotoc_open(const Matrix& h_system, const Matrix& h_bath, const Matrix& h_coupling,
                               const qops::TensorLayout& layout, const Matrix& rho_bath, const OtocRequest& req) {
    return fotoc_open(OpenDynamics::dilation(h_system, h_bath, h_coupling, layout, rho_bath), req);
}

// Channels act blockwise on the control-qubit blocks of a system ⊗ control operator.
inline Matrix apply_on_control_blocks(const Matrix& x, Index d, const std::function<Matrix(const Matrix&)>& map) {
    Matrix out(2 * d, 2 * d);
    for (Index c = 0; c < 2; ++c)
        for (Index cp = 0; cp < 2; ++cp) {
            Matrix block(d, d);
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) block(i, j) = x(i * 2 + c, j * 2 + cp);
            const Matrix img = map(block);
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) out(i * 2 + c, j * 2 + cp) = img(i, j);
        }
    return out;
}

// Explicit S5 S4 S3 S2 S1 sequence on ρ_S ⊗ |+><+|, control qubit last.
inline Matrix protocol_open_final_state(const OpenDynamics& dyn, const OtocRequest& req, double t) {
    const Index d = dyn.system_dim();
    const Matrix p0 = qops::matrix_unit(2, 0, 0), p1 = qops::matrix_unit(2, 1, 1), i2 = qops::identity(2), id = qops::identity(d);
    const Matrix s1 = qops::kron(id, p0) + qops::kron(req.op_b, p1);
    const Matrix s3 = qops::kron(req.op_a, i2);
    const Matrix s5 = qops::kron(req.op_b, p0) + qops::kron(id, p1);
    const Matrix plus = Matrix::Constant(2, 2, 0.5);
    Matrix rho = qops::kron(req.initial_system_state, plus);
    rho = s1 * rho * s1.adjoint();
    rho = apply_on_control_blocks(rho, d, dyn.applier(Direction::schrodinger, Sense::forward, t));
    rho = s3 * rho * s3.adjoint();
    rho = apply_on_control_blocks(rho, d, dyn.applier(Direction::schrodinger, Sense::backward, t));
    return s5 * rho * s5.adjoint();
}

inline SeriesResult fotoc_protocol_open(const OpenDynamics& dyn, const OtocRequest& req) {
    req.validate(dyn.system_dim(), "fotoc_protocol_open");
    std::vector<cplx> raw(req.time_grid.size());
    parallel_for(raw.size(), [&](std::size_t k) {
        raw[k] = control_x_expectation(protocol_open_final_state(dyn, req, req.time_grid[k]));
    });
    return detail::finish("F_protocol", req.time_grid, raw, req.site_a);
}

inline constexpr double kCorrectionFloor = 1e-8;

inline double corrected_value(double numerator, double denominator) {
    return std::abs(denominator) < kCorrectionFloor ? std::numeric_limits<double>::quiet_NaN() : numerator / denominator;
}

// F(t, A, B) / F(t, I, B). Points with |F(t, I, B)| < 1e-8 come back as NaN.
inline SeriesResult fotoc_corrected(const OpenDynamics& dyn, const OtocRequest& req) {
    req.validate(dyn.system_dim(), "fotoc_corrected");
    const auto o = open_orbits(dyn, req.op_b, req.initial_system_state, req.time_grid);
    const Matrix id = qops::identity(dyn.system_dim());
    std::vector<cplx> raw(req.time_grid.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const cplx num = open_value(o, k, req.op_a);
        const cplx den = open_value(o, k, id);
        raw[k] = cplx(corrected_value(num.real(), den.real()), num.imag());
    }
    return detail::finish("F_c", req.time_grid, raw, req.site_a);
}

// ½ Tr([ξ_f†(A), B]† [ξ_f†(A), B] ρ)
inline SeriesResult commutator_square_open(const OpenDynamics& dyn, const OtocRequest& req) {
    req.validate(dyn.system_dim(), "commutator_square_open");
    const auto prep = dyn.prepare(Direction::adjoint, Sense::forward, req.op_a);
    std::vector<cplx> raw(req.time_grid.size());
    parallel_for(raw.size(), [&](std::size_t k) {
        const Matrix at = dyn.evaluate(prep, req.time_grid[k]);
        const Matrix c = qops::commutator(at, req.op_b);
        raw[k] = 0.5 * (c.adjoint() * c * req.initial_system_state).trace();
    });
    return detail::finish("C", req.time_grid, raw, req.site_a);
}

// --------------------------- Site sweeps ------------------------------------

// First grid time with F < threshold, or nullopt if F stays above it.
inline std::optional<double> onset_time(const std::vector<double>& times, const std::vector<double>& values, double threshold) {
    for (std::size_t k = 0; k < times.size() && k < values.size(); ++k)
        if (values[k] < threshold) return times[k];
    return std::nullopt;
}

struct SweepRequest {
    std::size_t n_system = 1;
    std::size_t base_site = 0;                // B sits here
    std::vector<std::size_t> target_sites;    // A is placed at each of these
    qops::Axis axis_a = qops::Axis::z;
    qops::Axis axis_b = qops::Axis::z;
    Matrix initial_state;
    std::vector<double> times;
    bool corrected = false;
    double threshold = 0.98;

    void validate(const char* who) const {
        if (base_site >= n_system) throw std::out_of_range(std::string(who) + ": base site out of range");
        if (target_sites.empty()) throw std::invalid_argument(std::string(who) + ": no target sites");
        for (auto s : target_sites)
            if (s >= n_system) throw std::out_of_range(std::string(who) + ": target site out of range");
    }
};

struct SweepResult {
    std::vector<double> times;
    std::vector<std::size_t> sites;
    std::vector<SeriesResult> series;               // one per target site
    std::vector<std::optional<double>> onset;       // one per target site
    double threshold = 0.98;
};

namespace detail {

inline SweepResult assemble_sweep(const SweepRequest& req, std::vector<SeriesResult> series) {
    SweepResult out{req.times, req.target_sites, std::move(series), {}, req.threshold};
    for (const auto& s : out.series) out.onset.push_back(onset_time(s.times, s.values, req.threshold));
    return out;
}

inline std::string site_label(const char* what, std::size_t site) { return std::string(what) + "[site=" + std::to_string(site) + "]"; }

}  // namespace detail

inline SweepResult fotoc_site_sweep(const OpenDynamics& dyn, const SweepRequest& req) {
    req.validate("fotoc_site_sweep");
    const auto layout = qops::TensorLayout::spins(req.n_system);
    if (layout.total_dim() != dyn.system_dim()) throw std::invalid_argument("fotoc_site_sweep: dynamics does not match n_system");
    const Matrix b = qops::pauli_at(layout, req.base_site, req.axis_b);
    const auto o = open_orbits(dyn, b, req.initial_state, req.times);
    const Matrix id = qops::identity(dyn.system_dim());
    std::vector<SeriesResult> series;
    for (auto site : req.target_sites) {
        const Matrix a = qops::pauli_at(layout, site, req.axis_a);
        std::vector<cplx> raw(req.times.size());
        for (std::size_t k = 0; k < raw.size(); ++k) {
            const cplx num = open_value(o, k, a);
            raw[k] = req.corrected ? cplx(corrected_value(num.real(), open_value(o, k, id).real()), num.imag()) : num;
        }
        series.push_back(detail::finish(detail::site_label(req.corrected ? "F_c" : "F", site), req.times, raw, site));
    }
    return detail::assemble_sweep(req, std::move(series));
}

inline SweepResult fotoc_site_sweep(const Matrix& h_closed, const SweepRequest& req) {
    req.validate("fotoc_site_sweep");
    const auto layout = qops::TensorLayout::spins(req.n_system);
    const auto spectrum = qops::eig_hermitian(h_closed);
    if (layout.total_dim() != spectrum.dim()) throw std::invalid_argument("fotoc_site_sweep: Hamiltonian does not match n_system");
    const Matrix b = qops::pauli_at(layout, req.base_site, req.axis_b);
    std::vector<SeriesResult> series;
    for (auto site : req.target_sites) {
        OtocRequest r{qops::pauli_at(layout, site, req.axis_a), b, site, req.base_site, req.initial_state, req.times, false};
        auto s = fotoc_closed(spectrum, r);
        s.label = detail::site_label("F", site);
        series.push_back(std::move(s));
    }
    return detail::assemble_sweep(req, std::move(series));
}

}  // namespace scramble::otoc
