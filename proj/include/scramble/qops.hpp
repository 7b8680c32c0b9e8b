// Dense operator algebra: Pauli embedding, Kronecker products,
// partial traces, Hermitian propagators, row-major vectorization, Gibbs
// states and Haar-random unitaries.
//
// Conventions used throughout the library:
//   * hbar = k_B = 1.
//   * Tensor factors follow TensorLayout order: system sites first, then bath.
//   * vec(|i><j|) = e_{i*d + j}  (row-major). vec(A X B) = (A ⊗ B^T) vec(X).

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scramble {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

// Tolerance tiers.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kEigTol = 1e-10;
inline constexpr double kPropagationTol = 1e-8;

namespace qops {

enum class Axis { x, y, z };

inline Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw std::invalid_argument("parse_axis: expected one of x, y, z, got '" + s + "'");
}

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    return "?";
}

// --------------------------- Elementary matrices ----------------------------

inline Matrix identity(Index d) { return Matrix::Identity(d, d); }

inline Matrix pauli(Axis a) {
    Matrix m = Matrix::Zero(2, 2);
    switch (a) {
        case Axis::x: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case Axis::y: m(0, 1) = -kI; m(1, 0) = kI; break;
        case Axis::z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

// |i><j| in dimension d
inline Matrix matrix_unit(Index d, Index i, Index j) {
    if (i < 0 || j < 0 || i >= d || j >= d) throw std::out_of_range("matrix_unit: index out of range");
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    k = Eigen::kroneckerProduct(a, b);
    return k;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(m - m.adjoint());
}

inline double unitarity_error(const Matrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(u.adjoint() * u - identity(u.rows()));
}

inline bool is_hermitian(const Matrix& m, double tol = kExactTol) { return hermiticity_error(m) <= tol; }
inline bool is_unitary(const Matrix& u, double tol = kEigTol) { return unitarity_error(u) <= tol; }

// --------------------------- Tensor layout ----------------------------------

enum class SiteRole { system, bath };

// Ordered tensor factors. System sites always precede bath sites, so site k of
// the system is global factor k and bath site l is global factor n_system + l.
class TensorLayout {
public:
    TensorLayout() = default;

    TensorLayout(std::vector<Index> dims, std::vector<SiteRole> roles)
        : dims_(std::move(dims)), roles_(std::move(roles)) {
        if (dims_.size() != roles_.size()) throw std::invalid_argument("TensorLayout: dims/roles length mismatch");
        bool seen_bath = false;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (dims_[k] < 1) throw std::invalid_argument("TensorLayout: local dimension must be >= 1");
            if (roles_[k] == SiteRole::bath) seen_bath = true;
            else if (seen_bath) throw std::invalid_argument("TensorLayout: system sites must precede bath sites");
        }
    }

    static TensorLayout spins(std::size_t n_system, std::size_t n_bath = 0) {
        std::vector<Index> dims(n_system + n_bath, 2);
        std::vector<SiteRole> roles(n_system, SiteRole::system);
        roles.resize(n_system + n_bath, SiteRole::bath);
        return TensorLayout(std::move(dims), std::move(roles));
    }

    std::size_t size() const noexcept { return dims_.size(); }
    Index dim(std::size_t site) const { return dims_.at(site); }
    SiteRole role(std::size_t site) const { return roles_.at(site); }
    const std::vector<Index>& dims() const noexcept { return dims_; }

    std::size_t n_system() const noexcept {
        return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), SiteRole::system));
    }
    std::size_t n_bath() const noexcept { return size() - n_system(); }

    Index total_dim() const noexcept { return product(0, size()); }
    Index system_dim() const noexcept { return product(0, n_system()); }
    Index bath_dim() const noexcept { return product(n_system(), size()); }

    std::vector<std::size_t> system_sites() const { return range(0, n_system()); }
    std::vector<std::size_t> bath_sites() const { return range(n_system(), size()); }

    // Layout restricted to the system factors.
    TensorLayout system_layout() const {
        std::vector<Index> d(dims_.begin(), dims_.begin() + static_cast<std::ptrdiff_t>(n_system()));
        return TensorLayout(std::move(d), std::vector<SiteRole>(n_system(), SiteRole::system));
    }

    bool operator==(const TensorLayout&) const = default;

private:
    Index product(std::size_t lo, std::size_t hi) const noexcept {
        Index p = 1;
        for (std::size_t k = lo; k < hi; ++k) p *= dims_[k];
        return p;
    }
    static std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> r;
        for (std::size_t k = lo; k < hi; ++k) r.push_back(k);
        return r;
    }

    std::vector<Index> dims_;
    std::vector<SiteRole> roles_;
};

// Embed a local operator at `site`: I ⊗ … ⊗ op ⊗ … ⊗ I.
inline Matrix embed(const TensorLayout& layout, std::size_t site, const Matrix& op) {
    if (site >= layout.size()) throw std::out_of_range("embed: site out of range");
    if (op.rows() != layout.dim(site) || op.cols() != layout.dim(site))
        throw std::invalid_argument("embed: operator dimension does not match local dimension");
    const Index left = [&] { Index p = 1; for (std::size_t k = 0; k < site; ++k) p *= layout.dim(k); return p; }();
    const Index right = layout.total_dim() / (left * layout.dim(site));
    return kron(kron(identity(left), op), identity(right));
}

inline Matrix pauli_at(const TensorLayout& layout, std::size_t site, Axis axis) {
    if (site >= layout.size()) throw std::out_of_range("pauli_at: site out of range");
    return embed(layout, site, pauli(axis));
}

// J^axis = 1/2 Σ_{j∈sites} σ_j^axis
inline Matrix collective_j(const TensorLayout& layout, const std::vector<std::size_t>& sites, Axis axis) {
    if (sites.empty()) throw std::invalid_argument("collective_j: empty site set");
    Matrix j = Matrix::Zero(layout.total_dim(), layout.total_dim());
    for (auto s : sites) j += pauli_at(layout, s, axis);
    return 0.5 * j;
}

// --------------------------- Partial trace ----------------------------------

// Reduced operator on the `keep` factors (listed in any order; output follows
// layout order). Works for non-Hermitian input.
inline Matrix partial_trace(const Matrix& m, const TensorLayout& layout, std::vector<std::size_t> keep) {
    const Index dim = layout.total_dim();
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("partial_trace: matrix does not match layout");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.back() >= layout.size()) throw std::out_of_range("partial_trace: site out of range");

    const std::size_t n = layout.size();
    std::vector<bool> kept(n, false);
    for (auto k : keep) kept[k] = true;

    // stride of each factor in the full index
    std::vector<Index> stride(n);
    Index s = 1;
    for (std::size_t k = n; k-- > 0;) { stride[k] = s; s *= layout.dim(k); }

    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < n; ++k) if (!kept[k]) traced.push_back(k);

    // offsets: full-index contribution of every multi-index over a factor group
    auto offsets = [&](const std::vector<std::size_t>& group) {
        std::vector<Index> off{0};
        for (auto k : group) {
            std::vector<Index> next;
            next.reserve(off.size() * static_cast<std::size_t>(layout.dim(k)));
            for (auto o : off)
                for (Index v = 0; v < layout.dim(k); ++v) next.push_back(o + v * stride[k]);
            off = std::move(next);
        }
        return off;
    };
    const auto keep_off = offsets(keep);
    const auto trace_off = offsets(traced);

    const Index dk = static_cast<Index>(keep_off.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (Index r = 0; r < dk; ++r)
        for (Index c = 0; c < dk; ++c) {
            cplx acc = 0.0;
            for (auto t : trace_off) acc += m(keep_off[static_cast<std::size_t>(r)] + t, keep_off[static_cast<std::size_t>(c)] + t);
            out(r, c) = acc;
        }
    return out;
}

// --------------------------- Vectorization ----------------------------------

inline Vector vectorize(const Matrix& m) {
    Vector v(m.size());
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

inline Matrix devectorize(const Vector& v, Index rows, Index cols) {
    if (rows < 0 || cols < 0 || v.size() != rows * cols) throw std::invalid_argument("devectorize: size mismatch");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
    return m;
}

// --------------------------- Spectral tools ---------------------------------

struct Spectrum {
    RealVector eigenvalues;   // ascending
    Matrix eigenvectors;      // orthonormal columns

    Index dim() const noexcept { return eigenvalues.size(); }

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
    }
};

// Real-symmetric input (every Hamiltonian built here is one) goes through the
// real solver, which is roughly twice as fast at the sizes we use.
inline Spectrum eig_hermitian(const Matrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("eig_hermitian: input must be square and nonempty");
    const double herr = hermiticity_error(h);
    if (!(herr <= kExactTol)) throw std::invalid_argument("eig_hermitian: input is not Hermitian (max |H - H^dag| = " + std::to_string(herr) + ")");

    Spectrum s;
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::MatrixXd hr = h.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hr);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
        s.eigenvalues = solver.eigenvalues();
        s.eigenvectors = solver.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
        s.eigenvalues = solver.eigenvalues();
        s.eigenvectors = solver.eigenvectors();
    }
    return s;
}

// e^{-i H t} from a precomputed spectrum
inline Matrix propagator(const Spectrum& s, double t) {
    Vector phase(s.dim());
    for (Index k = 0; k < s.dim(); ++k) phase(k) = std::exp(-kI * (s.eigenvalues(k) * t));
    return s.eigenvectors * phase.asDiagonal() * s.eigenvectors.adjoint();
}

inline Matrix propagator(const Matrix& h, double t) { return propagator(eig_hermitian(h), t); }

// Unnormalized Gibbs weights exp(-(E - shift)/T) on a spectrum.
inline Matrix gibbs_operator(const Spectrum& s, double temperature, double shift) {
    RealVector w(s.dim());
    for (Index k = 0; k < s.dim(); ++k) w(k) = std::exp(-(s.eigenvalues(k) - shift) / temperature);
    return s.eigenvectors * w.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
}

inline Matrix thermal_state(const Matrix& h, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("thermal_state: temperature must be > 0");
    const Spectrum s = eig_hermitian(h);
    // shift by the ground energy so every exponent is <= 0
    Matrix rho = gibbs_operator(s, temperature, s.eigenvalues.minCoeff());
    rho /= rho.trace().real();
    return rho;
}

inline Matrix maximally_mixed(Index d) { return identity(d) / static_cast<double>(d); }

// (|psi><psi|)^{⊗n}
inline Matrix product_state(const Vector& psi, std::size_t n) {
    Matrix one = psi * psi.adjoint();
    Matrix rho = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) rho = kron(rho, one);
    return rho;
}

// --------------------------- Random numbers ---------------------------------

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent generator for work item `stream` derived from a base seed.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

// QR of a complex Ginibre matrix with the diagonal phases of R divided out,
// which makes the distribution exactly Haar.
inline Matrix haar_unitary(Index dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("haar_unitary: dimension must be >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const cplx d = r(k, k);
        const double a = std::abs(d);
        q.col(k) *= (a > 0.0 ? d / a : cplx(1.0));
    }
    return q;
}

}  // namespace qops
}  // namespace scramble
