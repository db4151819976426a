#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <iosfwd>
#include <vector>

#include "wedge/common.hpp"

namespace wedge::linalg {

using Complex = std::complex<double>;

enum class StorageFormat { coo, csr };

/// Sparse Hermitian matrix, upper triangle stored (diagonal kept real).
class SparseHermitian {
  public:
    struct Entry {
        int row;
        int col;
        Complex value;
    };

    explicit SparseHermitian(int dimension);

    /// Accumulate value at (row, col). Entries below the diagonal are
    /// folded into the upper triangle by conjugation.
    void add(int row, int col, Complex value);

    /// Sort by (row, col) and combine duplicates; switches format to csr.
    void compress();

    int dimension() const { return dim_; }
    StorageFormat format() const { return format_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool is_real(double tol = 0.0) const;

    /// Full Hermitian expansion as an Eigen sparse matrix.
    Eigen::SparseMatrix<Complex> full() const;
    Eigen::SparseMatrix<double> full_real() const;

    /// MatrixMarket coordinate output (lower triangle, 1-based).
    void write_matrix_market(std::ostream& os) const;

  private:
    int dim_;
    StorageFormat format_ = StorageFormat::coo;
    std::vector<Entry> entries_;
};

struct HermitianPencil {
    SparseHermitian K;
    SparseHermitian M;
};

struct EigenResult {
    double value = 0.0;
    Eigen::VectorXcd vector;  // M-normalized
    double residual = 0.0;    // ||K x - value M x|| / ||M x||
    int iterations = 0;
    bool degenerate = false;  // Ritz gap below 1e-10
    double ritz_gap = 0.0;
};

/// Smallest eigenpair of K x = lambda M x by shift-invert Lanczos with full
/// reorthogonalization. Deterministic: all-ones start vector, fixed reduction
/// order. `shift` must lie strictly below the smallest eigenvalue.
EigenResult smallest_eigenpair(const HermitianPencil& pencil, double tol, double shift = 0.0);

/// Solve (K - shift M) x = rhs to relative residual `tol`.
Eigen::VectorXcd solve_shifted(const HermitianPencil& pencil, double shift,
                               const Eigen::VectorXcd& rhs, double tol);

/// Rayleigh quotient (x*Kx)/(x*Mx).
double rayleigh(const HermitianPencil& pencil, const Eigen::VectorXcd& x);

}  // namespace wedge::linalg
