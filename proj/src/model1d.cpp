#include "wedge/model1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wedge::model1d {

namespace {

void validate(const Disc1D& disc) {
    if (!(disc.t_max > 0.0)) throw std::invalid_argument("Disc1D: t_max must be positive");
    if (disc.n < 16) throw std::invalid_argument("Disc1D: n must be at least 16");
}

struct Grid {
    double t_max;
    int n;      // nodes including both ends
    double h;   // spacing
};

Grid effective_grid(double tau, const Disc1D& disc) {
    const double h0 = disc.t_max / (disc.n - 1);
    const double needed = std::max(tau, 0.0) + 10.0;
    if (disc.t_max >= needed) return {disc.t_max, disc.n, h0};
    const int n = static_cast<int>(std::ceil(needed / h0 - 1e-12)) + 1;
    return {(n - 1) * h0, n, h0};
}

// Tridiagonal pencil K u = lambda M u; M may be the identity (empty arrays).
struct Tridiag {
    std::vector<double> kd, kl, ku;  // K diagonal, sub, super
    std::vector<double> md, ml, mu;  // M (empty => identity)
    bool symmetric() const { return kl == ku && ml == mu; }
};

// Number of eigenvalues of a symmetric tridiagonal below x (Sturm count).
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int count = 0;
    double q = d[0] - x;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (q == 0.0) q = -tiny;
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

double bisect_smallest(const std::vector<double>& d, const std::vector<double>& e) {
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::min(hi, d[i]);  // Rayleigh quotient of a basis vector
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Tridiagonal LU with partial pivoting (one fill-in superdiagonal).
struct TriLU {
    int n;
    std::vector<double> dl, dd, du, du2;
    std::vector<int> piv;  // 1 if rows i, i+1 were swapped

    TriLU(std::vector<double> l, std::vector<double> d, std::vector<double> u)
        : n(static_cast<int>(d.size())), dl(std::move(l)), dd(std::move(d)), du(std::move(u)),
          du2(n >= 2 ? n - 2 : 0, 0.0), piv(std::max(n - 1, 0), 0) {
        for (int i = 0; i < n - 1; ++i) {
            if (std::abs(dd[i]) >= std::abs(dl[i])) {
                if (dd[i] == 0.0) dd[i] = 1e-300;
                const double fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                piv[i] = 1;
                const double fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
        if (dd[n - 1] == 0.0) dd[n - 1] = 1e-300;
    }

    void solve(std::vector<double>& b) const {
        for (int i = 0; i < n - 1; ++i) {
            if (!piv[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= dd[n - 1];
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
        for (int i = n - 3; i >= 0; --i)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    }
};

struct PencilSolve {
    double value;
    double residual;
    std::vector<double> vec;  // normalized, physical scaling
    int iterations;
};

void matvec(const Tridiag& T, bool mass, const std::vector<double>& x, std::vector<double>& y) {
    const auto& d = mass ? T.md : T.kd;
    const auto& l = mass ? T.ml : T.kl;
    const auto& u = mass ? T.mu : T.ku;
    const int n = static_cast<int>(x.size());
    if (mass && d.empty()) {
        y = x;
        return;
    }
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = d[i] * x[i];
        if (i > 0) s += l[i - 1] * x[i - 1];
        if (i + 1 < n) s += u[i] * x[i + 1];
        y[i] = s;
    }
}

// Rayleigh quotient of the pencil evaluated in extended precision; the plain
// double evaluation floors out at eps * ||K|| which is too coarse near tau
// values where mu1 approaches 1 from below.
double rayleigh_ld(const Tridiag& T, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    long double num = 0.0L, den = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double kx = static_cast<long double>(T.kd[i]) * x[i];
        if (i > 0) kx += static_cast<long double>(T.kl[i - 1]) * x[i - 1];
        if (i + 1 < n) kx += static_cast<long double>(T.ku[i]) * x[i + 1];
        long double mx;
        if (T.md.empty()) {
            mx = x[i];
        } else {
            mx = static_cast<long double>(T.md[i]) * x[i];
            if (i > 0) mx += static_cast<long double>(T.ml[i - 1]) * x[i - 1];
            if (i + 1 < n) mx += static_cast<long double>(T.mu[i]) * x[i + 1];
        }
        num += x[i] * kx;
        den += x[i] * mx;
    }
    return static_cast<double>(num / den);
}

// Shift-invert iteration on a tridiagonal pencil from a deterministic start.
PencilSolve inverse_iterate(const Tridiag& T, double shift, double res_target, int max_it) {
    const int n = static_cast<int>(T.kd.size());
    std::vector<double> l(n - 1), d(n), u(n - 1);
    for (int i = 0; i < n; ++i)
        d[i] = T.kd[i] - shift * (T.md.empty() ? 1.0 : T.md[i]);
    for (int i = 0; i < n - 1; ++i) {
        l[i] = T.kl[i] - shift * (T.ml.empty() ? 0.0 : T.ml[i]);
        u[i] = T.ku[i] - shift * (T.mu.empty() ? 0.0 : T.mu[i]);
    }
    TriLU lu(l, d, u);

    std::vector<double> x(n, 1.0), Mx, Kx;
    double lambda = shift, res = 1e300;
    int it = 0;
    for (; it < max_it; ++it) {
        matvec(T, true, x, Mx);
        std::vector<double> y = Mx;
        lu.solve(y);
        double nrm = 0.0;
        for (double v : y) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : y) v /= nrm;
        x = y;
        lambda = rayleigh_ld(T, x);
        matvec(T, false, x, Kx);
        matvec(T, true, x, Mx);
        double rn = 0.0, mn = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = Kx[i] - lambda * Mx[i];
            rn += r * r;
            mn += Mx[i] * Mx[i];
        }
        res = std::sqrt(rn / mn);
        if (res <= res_target) break;
    }
    if (res > res_target) {
        std::ostringstream msg;
        msg << "model1d: inverse iteration stalled at residual " << res;
        throw EigensolverError(msg.str(), lambda, res, it);
    }
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
    return {lambda, res, std::move(x), it + 1};
}

// Assemble the discrete operator on `g` for the given scheme. Unknowns are the
// n-1 nodes t_0..t_{n-2} (Dirichlet drops the last node).
Tridiag assemble(double tau, const Grid& g, Scheme scheme) {
    const int m = g.n - 1;
    const double h = g.h, h2 = h * h;
    auto V = [&](int i) { const double t = i * h - tau; return t * t; };
    Tridiag T;
    if (scheme == Scheme::second_order_fd) {
        // symmetrized mirror-ghost form; physical u0 = sqrt(2) * symmetric u0
        T.kd.resize(m);
        T.kl.resize(m - 1);
        for (int i = 0; i < m; ++i) T.kd[i] = 2.0 / h2 + V(i);
        for (int i = 0; i < m - 1; ++i) T.kl[i] = -1.0 / h2;
        T.kl[0] = -std::sqrt(2.0) / h2;
        T.ku = T.kl;
        return T;
    }
    // Numerov: K u = lambda M u with tridiagonal M = (1,10,1)/12.
    T.kd.resize(m);
    T.kl.resize(m - 1);
    T.ku.resize(m - 1);
    T.md.assign(m, 10.0 / 12.0);
    T.ml.assign(m - 1, 1.0 / 12.0);
    T.mu.assign(m - 1, 1.0 / 12.0);
    for (int i = 0; i < m; ++i) T.kd[i] = 2.0 / h2 + 10.0 * V(i) / 12.0;
    for (int i = 0; i < m - 1; ++i) {
        T.ku[i] = -1.0 / h2 + V(i + 1) / 12.0;  // row i, column i+1
        T.kl[i] = -1.0 / h2 + V(i) / 12.0;      // row i+1, column i
    }
    // ghost elimination at the Neumann end: u(-h) = u(h) + gh*u(0),
    // gh = 2*tau*h^3/3 from u'(0)=0 and u'''(0) = V'(0) u(0).
    const double gh = 2.0 * tau * h2 * h / 3.0;
    const double Vm1 = (-h - tau) * (-h - tau);
    T.kd[0] = (2.0 - gh) / h2 + (Vm1 * gh + 10.0 * V(0)) / 12.0;
    T.ku[0] = -2.0 / h2 + (Vm1 + V(1)) / 12.0;
    T.md[0] = (10.0 + gh) / 12.0;
    T.mu[0] = 2.0 / 12.0;
    return T;
}

PencilSolve solve_grid(double tau, const Grid& g, Scheme scheme) {
    Tridiag T = assemble(tau, g, scheme);
    // The achievable residual floor scales with the operator norm.
    double norm_est = 0.0;
    for (std::size_t i = 0; i < T.kd.size(); ++i) {
        double r = std::abs(T.kd[i]);
        if (i > 0) r += std::abs(T.kl[i - 1]);
        if (i + 1 < T.kd.size()) r += std::abs(T.ku[i]);
        norm_est = std::max(norm_est, r);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double target = std::max(1e-10, 32.0 * eps * norm_est);
    if (scheme == Scheme::second_order_fd) {
        const double approx = bisect_smallest(T.kd, T.kl);
        PencilSolve s =
            inverse_iterate(T, approx - 1e-8 * std::max(1.0, std::abs(approx)), target, 10);
        s.vec[0] *= std::sqrt(2.0);  // undo the symmetrizing scaling
        double nrm = 0.0;
        for (double v : s.vec) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : s.vec) v /= nrm;
        return s;
    }
    // Numerov: bracket from the second-order solve, then shift-invert.
    Tridiag T2 = assemble(tau, g, Scheme::second_order_fd);
    const double approx = bisect_smallest(T2.kd, T2.kl);
    return inverse_iterate(T, approx - 1e-3 * std::max(1.0, std::abs(approx)), target, 30);
}

}  // namespace

namespace detail {

DeGennesValue mu1_raw(double tau, const Disc1D& disc) {
    validate(disc);
    const Grid g = effective_grid(tau, disc);
    const PencilSolve s = solve_grid(tau, g, disc.scheme);
    return {tau, s.value, s.residual, g.t_max};
}

}  // namespace detail

DeGennesValue mu1(double tau, const Disc1D& disc) {
    validate(disc);
    const Grid coarse = effective_grid(tau, disc);
    const Grid fine{coarse.t_max, 2 * coarse.n - 1, coarse.h / 2.0};
    const PencilSolve sc = solve_grid(tau, coarse, disc.scheme);
    const PencilSolve sf = solve_grid(tau, fine, disc.scheme);
    const double order = disc.scheme == Scheme::second_order_fd ? 4.0 : 16.0;
    const double value = (order * sf.value - sc.value) / (order - 1.0);
    // residual reported for the caller's grid; the refinement is internal
    return {tau, value, sc.residual, coarse.t_max};
}

std::vector<DeGennesValue> mu1_curve(std::span<const double> tau_grid, const Disc1D& disc) {
    std::vector<DeGennesValue> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        try {
            out.push_back(mu1(tau, disc));
        } catch (const SolverError& err) {
            std::ostringstream msg;
            msg << "mu1_curve: failure at tau=" << tau << ": " << err.what();
            throw SolverError(msg.str());
        }
    }
    return out;
}

std::pair<DeGennesValue, std::vector<double>> groundstate1d(double tau, const Disc1D& disc) {
    validate(disc);
    const Grid g = effective_grid(tau, disc);
    PencilSolve s = solve_grid(tau, g, disc.scheme);
    if (s.vec[0] < 0.0)
        for (double& v : s.vec) v = -v;
    s.vec.push_back(0.0);  // Dirichlet node
    DeGennesValue value = mu1(tau, disc);
    value.residual = s.residual;
    return {value, std::move(s.vec)};
}

BandMinimum find_band_minimum(const Disc1D& disc, double tol) {
    validate(disc);
    if (!(tol > 0.0) || tol > 1e-3)
        throw std::invalid_argument("find_band_minimum: tol must lie in (0, 1e-3]");
    auto f = [&](double t) { return mu1(t, disc).mu1; };

    double a = 0.0, b = 2.0;
    if (!(f(1.0) < f(a) && f(1.0) < f(b)))
        throw SolverError("find_band_minimum: no interior minimum bracketed on [0, 2]");

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    // parabolic refinement through the bracket midpoints
    double xm = f1 < f2 ? x1 : x2;
    double fm = std::min(f1, f2);
    const double dx = std::max(0.25 * (b - a), 1e-6);
    const double fl = f(xm - dx), fr = f(xm + dx);
    const double denom = fl - 2.0 * fm + fr;
    if (denom > 0.0) {
        const double step = 0.5 * dx * (fl - fr) / denom;
        const double xv = xm + step;
        const double fv = f(xv);
        if (fv < fm) {
            xm = xv;
            fm = fv;
        }
    }
    return {xm, fm, tol};
}

}  // namespace wedge::model1d
