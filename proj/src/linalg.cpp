#include "wedge/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace wedge::linalg {

SparseHermitian::SparseHermitian(int dimension) : dim_(dimension) {
    if (dimension <= 0) throw std::invalid_argument("SparseHermitian: dimension must be positive");
}

void SparseHermitian::add(int row, int col, Complex value) {
    if (row < 0 || col < 0 || row >= dim_ || col >= dim_)
        throw std::out_of_range("SparseHermitian::add: index out of range");
    if (row > col) {
        std::swap(row, col);
        value = std::conj(value);
    }
    if (row == col) value = Complex(value.real(), 0.0);
    entries_.push_back({row, col, value});
    format_ = StorageFormat::coo;
}

void SparseHermitian::compress() {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Entry> merged;
    merged.reserve(entries_.size());
    for (const Entry& e : entries_) {
        if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
            merged.back().value += e.value;
        else
            merged.push_back(e);
    }
    entries_ = std::move(merged);
    format_ = StorageFormat::csr;
}

bool SparseHermitian::is_real(double tol) const {
    for (const Entry& e : entries_)
        if (std::abs(e.value.imag()) > tol) return false;
    return true;
}

Eigen::SparseMatrix<Complex> SparseHermitian::full() const {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(2 * entries_.size());
    for (const Entry& e : entries_) {
        trip.emplace_back(e.row, e.col, e.value);
        if (e.row != e.col) trip.emplace_back(e.col, e.row, std::conj(e.value));
    }
    Eigen::SparseMatrix<Complex> m(dim_, dim_);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Eigen::SparseMatrix<double> SparseHermitian::full_real() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * entries_.size());
    for (const Entry& e : entries_) {
        trip.emplace_back(e.row, e.col, e.value.real());
        if (e.row != e.col) trip.emplace_back(e.col, e.row, e.value.real());
    }
    Eigen::SparseMatrix<double> m(dim_, dim_);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

void SparseHermitian::write_matrix_market(std::ostream& os) const {
    SparseHermitian copy = *this;
    copy.compress();
    os << "%%MatrixMarket matrix coordinate complex hermitian\n";
    os << dim_ << " " << dim_ << " " << copy.entries().size() << "\n";
    char buf[128];
    for (const Entry& e : copy.entries()) {
        // MatrixMarket hermitian stores the lower triangle: emit the conjugate.
        const Complex v = std::conj(e.value);
        std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", e.col + 1, e.row + 1, v.real(),
                      v.imag());
        os << buf;
    }
}

namespace {

// One code path for double and complex<double>.
template <typename Scalar>
struct PencilOps {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::SparseMatrix<Scalar>;

    Mat K, M, C;  // C = K - shift M
    Eigen::SimplicialLDLT<Mat, Eigen::Lower> ldlt;

    void factor(double shift) {
        C = K - Scalar(shift) * M;
        ldlt.compute(C);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("smallest_eigenpair: LDLT factorization failed");
        if ((ldlt.vectorD().real().array() <= 0.0).any())
            throw SolverError(
                "smallest_eigenpair: K - shift*M is not positive definite "
                "(shift must lie strictly below the smallest eigenvalue)");
    }

    static double dot_re(const Vec& a, const Vec& b) {
        if constexpr (std::is_same_v<Scalar, double>)
            return a.dot(b);
        else
            return a.dot(b).real();
    }
};

template <typename Scalar>
EigenResult lanczos_smallest(PencilOps<Scalar>& ops, double tol, double shift, int max_iter) {
    using Vec = typename PencilOps<Scalar>::Vec;
    const int n = static_cast<int>(ops.K.rows());

    if ((Eigen::VectorXd(ops.M.diagonal().real()).array() <= 0.0).any())
        throw SolverError("smallest_eigenpair: indefinite M (non-positive diagonal)");

    ops.factor(shift);

    std::vector<Vec> basis;  // M-orthonormal Lanczos vectors
    std::vector<double> alpha, beta;

    Vec v = Vec::Ones(n);
    {
        Vec Mv = ops.M * v;
        const double nrm2 = PencilOps<Scalar>::dot_re(v, Mv);
        if (nrm2 <= 0.0) throw SolverError("smallest_eigenpair: indefinite M");
        v /= std::sqrt(nrm2);
    }
    basis.push_back(v);

    double best_value = 0.0, best_residual = 1e300;
    Eigen::VectorXd ritz;
    Eigen::MatrixXd ritz_vecs;

    for (int k = 0; k < max_iter; ++k) {
        Vec w = ops.ldlt.solve(ops.M * basis[k]);
        // classical Gram-Schmidt against the whole basis, two passes
        double a_k = 0.0;
        std::vector<Scalar> coeff(basis.size());
        for (int pass = 0; pass < 2; ++pass) {
            const Vec Mw = ops.M * w;
            for (std::size_t j = 0; j < basis.size(); ++j) coeff[j] = basis[j].dot(Mw);
            for (std::size_t j = 0; j < basis.size(); ++j) w -= coeff[j] * basis[j];
            a_k += std::real(coeff[k]);
        }
        alpha.push_back(a_k);
        double b = std::sqrt(std::max(PencilOps<Scalar>::dot_re(w, ops.M * w), 0.0));
        // tridiagonal Ritz problem for the current subspace
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        ritz = es.eigenvalues();
        ritz_vecs = es.eigenvectors();
        const int top = m - 1;  // largest Ritz value of the shift-inverted operator
        const double nu = ritz(top);
        if (nu > 0.0) {
            Vec x = Vec::Zero(n);
            for (int j = 0; j < m; ++j) x += Scalar(ritz_vecs(j, top)) * basis[j];
            const double lambda = shift + 1.0 / nu;
            Vec Mx = ops.M * x;
            const double mnorm = Mx.norm();
            const double res = (ops.K * x - Scalar(lambda) * Mx).norm() / mnorm;
            if (res < best_residual) {
                best_residual = res;
                best_value = lambda;
            }
            if (res <= tol) {
                const double xm = std::sqrt(PencilOps<Scalar>::dot_re(x, Mx));
                x /= xm;
                EigenResult out;
                out.value = lambda;
                out.residual = res;
                out.iterations = m;
                double gap = 1e300;
                if (m >= 2) {
                    const double nu2 = ritz(top - 1);
                    if (nu2 > 0.0) gap = std::abs(shift + 1.0 / nu2 - lambda);
                } else {
                    // Krylov space too small to expose multiplicity: probe the
                    // deflated operator from an independent start vector.
                    Vec p(n);
                    for (int i = 0; i < n; ++i) p(i) = (i % 2 == 0) ? 1.0 : -1.0;
                    Scalar c = x.dot(ops.M * p);
                    p -= c * x;
                    const double pn = std::sqrt(std::max(PencilOps<Scalar>::dot_re(p, ops.M * p), 0.0));
                    if (pn > 1e-12) {
                        p /= pn;
                        Vec q = ops.ldlt.solve(ops.M * p);
                        q -= x.dot(ops.M * q) * x;
                        const double nu2 = PencilOps<Scalar>::dot_re(p, ops.M * q);
                        if (nu2 > 0.0) gap = std::abs(shift + 1.0 / nu2 - lambda);
                    }
                }
                out.ritz_gap = gap;
                out.degenerate = gap < 1e-10;
                if constexpr (std::is_same_v<Scalar, double>)
                    out.vector = x.template cast<Complex>();
                else
                    out.vector = x;
                return out;
            }
        }
        if (b < 1e-14) {
            // invariant subspace hit before convergence: deterministic restart direction
            Vec r = Vec::Zero(n);
            r(static_cast<int>(basis.size()) % n) = 1.0;
            for (const Vec& q : basis) {
                Scalar c = q.dot(ops.M * r);
                r -= c * q;
            }
            b = std::sqrt(std::max(PencilOps<Scalar>::dot_re(r, ops.M * r), 0.0));
            if (b < 1e-14)
                throw EigensolverError("smallest_eigenpair: Lanczos breakdown", best_value,
                                       best_residual, static_cast<int>(alpha.size()));
            w = r;
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }
    throw EigensolverError("smallest_eigenpair: no convergence after max iterations", best_value,
                           best_residual, max_iter);
}

}  // namespace

EigenResult smallest_eigenpair(const HermitianPencil& pencil, double tol, double shift) {
    if (pencil.K.dimension() != pencil.M.dimension())
        throw std::invalid_argument("smallest_eigenpair: pencil dimension mismatch");
    if (!(tol > 0.0) || tol > 1e-4)
        throw std::invalid_argument("smallest_eigenpair: tol must lie in (0, 1e-4]");
    const int max_iter = std::min(pencil.K.dimension(), 400);
    if (pencil.K.is_real() && pencil.M.is_real()) {
        PencilOps<double> ops;
        ops.K = pencil.K.full_real();
        ops.M = pencil.M.full_real();
        return lanczos_smallest(ops, tol, shift, max_iter);
    }
    PencilOps<Complex> ops;
    ops.K = pencil.K.full();
    ops.M = pencil.M.full();
    return lanczos_smallest(ops, tol, shift, max_iter);
}

Eigen::VectorXcd solve_shifted(const HermitianPencil& pencil, double shift,
                               const Eigen::VectorXcd& rhs, double tol) {
    if (pencil.K.dimension() != pencil.M.dimension())
        throw std::invalid_argument("solve_shifted: pencil dimension mismatch");
    if (rhs.size() != pencil.K.dimension())
        throw std::invalid_argument("solve_shifted: rhs dimension mismatch");

    const Eigen::SparseMatrix<Complex> K = pencil.K.full();
    const Eigen::SparseMatrix<Complex> M = pencil.M.full();
    const Eigen::SparseMatrix<Complex> C = K - Complex(shift) * M;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Complex>, Eigen::Lower> ldlt(C);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve_shifted: factorization failed (K - shift*M not SPD?)");

    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Eigen::VectorXcd::Zero(rhs.size());

    Eigen::VectorXcd x = ldlt.solve(rhs);
    std::ostringstream trace;
    for (int it = 0; it < 6; ++it) {
        const Eigen::VectorXcd r = rhs - C * x;
        const double rel = r.norm() / rhs_norm;
        trace << (it ? ", " : "") << rel;
        if (rel <= tol) return x;
        x += ldlt.solve(r);
    }
    const double rel = (rhs - C * x).norm() / rhs_norm;
    if (rel <= tol) return x;
    throw SolverError("solve_shifted: no convergence, residual history [" + trace.str() + "]");
}

double rayleigh(const HermitianPencil& pencil, const Eigen::VectorXcd& x) {
    if (x.size() != pencil.K.dimension())
        throw std::invalid_argument("rayleigh: vector dimension mismatch");
    if (x.norm() == 0.0) throw std::invalid_argument("rayleigh: zero vector");
    const Eigen::SparseMatrix<Complex> K = pencil.K.full();
    const Eigen::SparseMatrix<Complex> M = pencil.M.full();
    const Complex num = x.dot(K * x);
    const Complex den = x.dot(M * x);
    return num.real() / den.real();
}

}  // namespace wedge::linalg
