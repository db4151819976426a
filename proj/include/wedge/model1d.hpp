#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wedge/common.hpp"

namespace wedge::model1d {

enum class Scheme {
    second_order_fd,  // 3-point stencil, mirror ghost at the Neumann end
    fourth_order_fd,  // Numerov stencil with a tau-corrected ghost
};

/// Half-line discretization for h_tau = -d2/dt2 + (t-tau)^2, Neumann at 0,
/// Dirichlet at t_max. t_max is auto-extended to max(tau,0)+10 when needed,
/// keeping the grid spacing implied by (t_max, n).
struct Disc1D {
    double t_max = 12.0;
    int n = 2001;
    Scheme scheme = Scheme::second_order_fd;
};

struct DeGennesValue {
    double tau = 0.0;
    double mu1 = 0.0;
    double residual = 0.0;
    double t_max_used = 0.0;
};

struct BandMinimum {
    double xi0 = 0.0;
    double theta0 = 0.0;
    double tolerance = 0.0;
};

/// Smallest eigenvalue of the de Gennes operator at Fourier parameter tau.
/// Richardson-extrapolated over the grid and its 2x refinement.
DeGennesValue mu1(double tau, const Disc1D& disc = {});

/// Batch evaluation; grid must be finite (values need not be distinct).
std::vector<DeGennesValue> mu1_curve(std::span<const double> tau_grid, const Disc1D& disc = {});

/// Eigenvalue plus the normalized discrete ground state on the disc grid
/// (Dirichlet end included as a zero entry); sign fixed by u(0) > 0.
std::pair<DeGennesValue, std::vector<double>> groundstate1d(double tau, const Disc1D& disc = {});

/// Locate (xi0, Theta0) by golden-section plus parabolic refinement on [0, 2].
BandMinimum find_band_minimum(const Disc1D& disc = {}, double tol = 1e-7);

namespace detail {
/// Single-grid solve without Richardson extrapolation (convergence studies).
DeGennesValue mu1_raw(double tau, const Disc1D& disc);
}  // namespace detail

}  // namespace wedge::model1d
