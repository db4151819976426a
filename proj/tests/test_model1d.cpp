#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "wedge/model1d.hpp"

using namespace wedge::model1d;

namespace {

constexpr double kTheta0Ref = 0.590106125;
constexpr double kXi0Ref = 0.76818365314;

// Oracle: dense symmetric tridiagonal eigensolve of the mirror-ghost
// discretization, Richardson-extrapolated over two grids. Kept independent of
// the library solver (Eigen dense path vs Sturm bisection).
double dense_grid_mu1(double tau, double t_max, int n) {
    const double h = t_max / (n - 1);
    const int m = n - 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const double t = i * h - tau;
        T(i, i) = 2.0 / (h * h) + t * t;
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = -1.0 / (h * h);
    }
    T(0, 1) = T(1, 0) = -std::sqrt(2.0) / (h * h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double oracle_mu1(double tau, double t_max, int n_fine) {
    const double a = dense_grid_mu1(tau, t_max, (n_fine + 1) / 2);
    const double b = dense_grid_mu1(tau, t_max, n_fine);
    return (4.0 * b - a) / 3.0;
}

}  // namespace

TEST_CASE("mu1 reproduces the de Gennes constant at xi0") {
    auto v = mu1(kXi0Ref);
    CHECK(std::abs(v.mu1 - kTheta0Ref) <= 1e-6);
    CHECK(v.residual <= 1e-10);
    CHECK(v.t_max_used == doctest::Approx(12.0));
}

TEST_CASE("mu1(0) is the reflected harmonic oscillator ground state") {
    auto v = mu1(0.0);
    CHECK(std::abs(v.mu1 - 1.0) <= 1e-8);
}

TEST_CASE("mu1(-2) respects the potential lower bound") {
    auto v = mu1(-2.0);
    CHECK(v.mu1 >= 4.0);
}

TEST_CASE("mu1(5) sits in (0.5901, 1) and agrees with the dense oracle") {
    auto vd = mu1(5.0);  // default disc, t_max auto-extended to 15
    CHECK(vd.mu1 > 0.5901);
    CHECK(vd.mu1 < 1.0);
    CHECK(vd.t_max_used == doctest::Approx(15.0));

    Disc1D disc;
    disc.t_max = 15.0;
    disc.n = 501;
    auto v = mu1(5.0, disc);
    const double oracle = oracle_mu1(5.0, 15.0, 2001);  // 4x finer than the disc
    CHECK(std::abs(v.mu1 - oracle) <= 1e-6);
}

TEST_CASE("mu1 auto-extends the truncation for large tau") {
    auto v = mu1(10.0);
    CHECK(v.t_max_used >= 20.0);
    CHECK(v.mu1 > kTheta0Ref);
    CHECK(v.mu1 < 1.0);
    CHECK(std::abs(v.mu1 - 1.0) <= 1e-3);
}

TEST_CASE("mu1_curve wraps mu1 pointwise") {
    const double g1[] = {0.0};
    auto c1 = mu1_curve(g1);
    REQUIRE(c1.size() == 1);
    CHECK(std::abs(c1[0].mu1 - 1.0) <= 1e-8);

    const double g2[] = {-1.0, kXi0Ref, 3.0};
    auto c2 = mu1_curve(g2);
    CHECK(c2[0].mu1 > c2[1].mu1);  // decreasing into the minimum
    CHECK(c2[2].mu1 > c2[1].mu1);  // increasing past it

    const double g3[] = {10.0};
    auto c3 = mu1_curve(g3);
    CHECK(c3[0].mu1 < 1.0);
    CHECK(1.0 - c3[0].mu1 <= 1e-3);
}

TEST_CASE("groundstate1d matches the Gaussian at tau=0") {
    auto [value, u] = groundstate1d(0.0);
    REQUIRE(u.size() == 2001);
    double norm = 0.0;
    for (double x : u) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-12);
    CHECK(u[0] > 0.0);

    // proportional to exp(-t^2/2): compare where the state carries mass
    const double h = 12.0 / 2000;
    const double scale = u[0] / 1.0;
    double max_rel = 0.0;
    for (int i = 0; i * h <= 5.0; ++i) {
        const double t = i * h;
        const double expect = scale * std::exp(-t * t / 2.0);
        max_rel = std::max(max_rel, std::abs(u[i] - expect) / expect);
    }
    CHECK(max_rel <= 1e-4);
}

TEST_CASE("groundstate1d at xi0 is single-signed and unimodal") {
    // At tau=xi0 the state satisfies u'(0)=u''(0)=0 with u'''(0)<0, so its
    // maximum sits at the Neumann boundary and the profile decays monotonically.
    auto [value, u] = groundstate1d(kXi0Ref);
    CHECK(std::abs(value.mu1 - kTheta0Ref) <= 1e-6);
    double umax = 0.0;
    for (double x : u) umax = std::max(umax, std::abs(x));
    int sign_changes = 0, ascents = 0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        if (u[i] * u[i - 1] < 0 && std::abs(u[i]) > 1e-12 * umax) ++sign_changes;
        if (u[i + 1] > u[i] + 1e-12 * umax) ++ascents;
    }
    CHECK(sign_changes == 0);
    CHECK(ascents == 0);          // unimodal with the peak at the boundary
    CHECK(u[0] == doctest::Approx(umax));
}

TEST_CASE("find_band_minimum locates (xi0, Theta0)") {
    auto bm = find_band_minimum(Disc1D{}, 1e-7);
    CHECK(std::abs(bm.xi0 - kXi0Ref) <= 1e-4);
    CHECK(std::abs(bm.theta0 - kTheta0Ref) <= 1e-6);
    CHECK(std::abs(bm.xi0 * bm.xi0 - bm.theta0) <= 1e-5);
    CHECK(bm.theta0 > 0.0);
    CHECK(bm.theta0 < 1.0);
    // strict unique minimum
    CHECK(mu1(bm.xi0 + 0.05).mu1 > bm.theta0);
    CHECK(mu1(bm.xi0 - 0.05).mu1 > bm.theta0);
}

TEST_CASE("band curve properties on a tau grid") {
    auto bm = find_band_minimum(Disc1D{}, 1e-6);
    const double grid[] = {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    auto curve = mu1_curve(grid);
    for (const auto& v : curve) CHECK(v.mu1 >= bm.theta0 - 1e-6);
    // strictly decreasing for tau <= 0, strictly increasing for tau >= 1
    CHECK(curve[0].mu1 > curve[1].mu1);
    CHECK(curve[1].mu1 > curve[2].mu1);
    CHECK(curve[2].mu1 > curve[3].mu1);
    CHECK(curve[6].mu1 < curve[7].mu1);
    CHECK(curve[7].mu1 < curve[8].mu1);
    CHECK(curve[8].mu1 < curve[9].mu1);
    // form positivity
    for (const auto& v : curve) {
        const double tau = v.tau;
        const double vmin = tau <= 0.0 ? tau * tau : 0.0;
        CHECK(v.mu1 >= vmin);
    }
}

TEST_CASE("truncation robustness") {
    Disc1D a;  // t_max=12
    Disc1D b;
    b.t_max = 17.0;
    b.n = static_cast<int>(std::lround(17.0 / (12.0 / 2000))) + 1;
    for (double tau : {0.0, 0.5, 1.5}) {
        CHECK(std::abs(mu1(tau, a).mu1 - mu1(tau, b).mu1) <= 1e-9);
    }
}

TEST_CASE("second-order scheme converges at the expected rate") {
    Disc1D coarse{12.0, 251, Scheme::second_order_fd};
    Disc1D fine{12.0, 501, Scheme::second_order_fd};
    const double ref = oracle_mu1(kXi0Ref, 12.0, 2001);
    const double e1 = std::abs(detail::mu1_raw(kXi0Ref, coarse).mu1 - ref);
    const double e2 = std::abs(detail::mu1_raw(kXi0Ref, fine).mu1 - ref);
    CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("Numerov scheme beats the second-order scheme on a coarse grid") {
    Disc1D d2{12.0, 201, Scheme::second_order_fd};
    Disc1D d4{12.0, 201, Scheme::fourth_order_fd};
    const double ref = oracle_mu1(kXi0Ref, 12.0, 2001);
    const double e2 = std::abs(detail::mu1_raw(kXi0Ref, d2).mu1 - ref);
    const double e4 = std::abs(detail::mu1_raw(kXi0Ref, d4).mu1 - ref);
    CHECK(e4 < e2 / 10.0);
    auto v4 = mu1(kXi0Ref, d4);
    CHECK(std::abs(v4.mu1 - kTheta0Ref) <= 1e-6);
}

TEST_CASE("argument validation") {
    Disc1D bad;
    bad.n = 8;
    CHECK_THROWS_AS(mu1(0.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(find_band_minimum(Disc1D{}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(find_band_minimum(Disc1D{}, 1e-2), std::invalid_argument);
}
