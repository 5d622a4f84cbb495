#include "doctest.h"

#include <cmath>
#include <vector>

#include "corrles/mde.hpp"
#include "oracles.hpp"

using namespace corrles;

namespace {

std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = a * std::pow(b / a, double(k) / (n - 1));
    return g;
}

std::vector<double> lin_grid(double a, double b, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
    return g;
}

double envelope(double r, double eta) {
    if (r <= 1.0) return std::cbrt(eta) + std::sqrt(std::abs(1.0 - r * r));
    return eta / (r * r - 1.0 + std::pow(eta, 2.0 / 3.0));
}

} // namespace

TEST_CASE("reference values") {
    CHECK(std::abs(solve_m(0.0, 1e-8) - cplx(0, 1)) < 1e-6);
    CHECK(solve_m(0.0, 1e-8).real() == 0.0);

    const double eta = 1e-6;
    double v = solve_im_m(1.0, eta);
    CHECK(v >= 0.5 * std::cbrt(eta));
    CHECK(v <= 2.0 * std::cbrt(eta));

    double w = solve_im_m(4.0, 1e-4);
    CHECK(w / (1e-4 / 3.0) > 0.5);
    CHECK(w / (1e-4 / 3.0) < 2.0);

    CHECK_THROWS_AS(solve_m(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(solve_m(0.0, -1.0), std::domain_error);
}

TEST_CASE("cubic root satisfies the complex equation and the branch condition") {
    for (double r : lin_grid(0.0, 3.0, 31))
        for (double eta : log_grid(1e-8, 1e3, 23)) {
            cplx z = std::polar(r, 0.7);
            cplx m = solve_m(z, eta);
            CAPTURE(r);
            CAPTURE(eta);
            CHECK(m.imag() > 0.0);
            CHECK(m.real() == 0.0);
            CHECK(mde_residual(z, eta, m) <= 1e-12);
            double v = m.imag();
            const double b = (std::norm(z) - 1.0) + eta * eta;
            double cubic = v * v * v + 2 * eta * v * v + b * v - eta;
            double scale = std::max({v * v * v, 2 * eta * v * v, std::abs(b) * v, eta});
            CHECK(std::abs(cubic) <= 1e-13 * scale);
        }
}

TEST_CASE("newton oracle agrees with the cubic root") {
    double worst = 0.0;
    for (double r : lin_grid(0.0, 3.0, 40))
        for (double eta : log_grid(1e-8, 1e3, 40)) {
            cplx a = solve_m(r, eta), b = solve_m_newton(r, eta);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("point quantities and identities") {
    for (double r : lin_grid(0.0, 3.0, 20))
        for (double eta : log_grid(1e-8, 1e3, 20)) {
            cplx z = std::polar(r, -1.1);
            auto p = mde_point(z, eta);
            CAPTURE(r);
            CAPTURE(eta);
            cplx w(0.0, eta);
            CHECK(std::abs(p.u - p.m / (w + p.m)) <= 1e-15 * std::max(1.0, std::abs(p.u)));
            CHECK(std::abs(p.u.imag()) == 0.0);
            CHECK(p.beta_star == doctest::Approx(eta / (p.im_m + eta)).epsilon(1e-14));
            CHECK(std::abs(p.beta - (p.beta_star + 2.0 * p.im_m * p.im_m)) <= 1e-12);
            CHECK(std::abs(p.beta - (1.0 - p.m * p.m - p.u * p.u * r * r)) <= 1e-12);
            CHECK(std::norm(p.m) + std::norm(p.u) * r * r < 1.0);
            CHECK(std::abs(p.m) + std::abs(p.u) <= 2.0);
            CHECK(p.beta_star > 0.0);
            CHECK(std::abs(p.d_eta_m - cplx(0, 1) * (1.0 - p.beta) / p.beta) <= 1e-12 * std::abs(p.d_eta_m));

            // five-point differences; v varies on the scale eta + |1-|z|^2|^{3/2}
            const double h = std::min(0.2 * eta, 1e-3 * (eta + std::pow(std::abs(1.0 - r * r), 1.5)));
            auto v_of = [&](double e) { return solve_im_m(r * r, e); };
            auto u_of = [&](double e) { return mde_point(z, e).u.real(); };
            double fd_m = oracle::five_point_diff(v_of, eta, h);
            double fd_u = oracle::five_point_diff(u_of, eta, h);
            const double eps = std::numeric_limits<double>::epsilon();
            CHECK(std::abs(p.d_eta_m.imag() - fd_m) <= 1e-5 * std::abs(p.d_eta_m) + 10 * eps * p.im_m / h);
            CHECK(std::abs(p.d_eta_m.real()) == 0.0);
            CHECK(std::abs(p.d_eta_u.real() - fd_u) <= 1e-5 * std::abs(p.d_eta_u) + 10 * eps * p.u.real() / h);
        }
}

TEST_CASE("z = 0 closed forms") {
    for (double eta : {1e-6, 0.1, 2.0}) {
        auto p = mde_point(0.0, eta);
        double v = p.im_m;
        CHECK(p.u.real() == doctest::Approx(v / (eta + v)));
        CHECK(p.u.real() > 0.0);
        CHECK(p.u.real() < 1.0);
        auto e = stability_eigenvalues(p);
        CHECK(e[0] == cplx(1.0));
        CHECK(std::abs(e[1] - (1.0 - v * v)) < 1e-15);
        CHECK(std::abs(e[2] - (1.0 + v * v)) < 1e-15);
        auto t = two_body_stability_eigs(p, p);
        bool match = (std::abs(t[0] - e[1]) < 1e-14 && std::abs(t[1] - e[2]) < 1e-14) ||
                     (std::abs(t[0] - e[2]) < 1e-14 && std::abs(t[1] - e[1]) < 1e-14);
        CHECK(match);
    }
}

TEST_CASE("monotonicity in eta") {
    // d v / d eta = (1 - beta)/beta: decreasing for |z|^2 <= 1/2 everywhere and
    // for eta >= 1 + |z|^2; otherwise v may first grow with eta
    for (double r : lin_grid(0.0, 3.0, 31)) {
        auto etas = log_grid(1e-8, 1e3, 80);
        for (std::size_t k = 1; k < etas.size(); ++k) {
            double a = solve_im_m(r * r, etas[k - 1]), b = solve_im_m(r * r, etas[k]);
            CAPTURE(r);
            CAPTURE(etas[k]);
            if (r * r <= 0.5 || etas[k - 1] >= 1.0 + r * r) CHECK(b < a);
            auto pa = mde_point(r, etas[k - 1]), pb = mde_point(r, etas[k]);
            double sa = 1.0 - pa.beta.real(), sb = 1.0 - pb.beta.real();
            if (sa > 0 && sb > 0) CHECK(b > a);
            if (sa < 0 && sb < 0) CHECK(b < a);
        }
    }
}

TEST_CASE("envelopes and the beta lower bound") {
    double lo = 1e300, hi = 0.0, c0 = 1e300;
    for (double r : lin_grid(0.0, 3.0, 40))
        for (double eta : log_grid(1e-8, 1.0, 40)) {
            auto p = mde_point(r, eta);
            double ratio = p.im_m / envelope(r, eta);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            c0 = std::min(c0, std::abs(p.beta) / (std::pow(eta, 2.0 / 3.0) + std::abs(1.0 - r)));
            CHECK(stability_eigenvalues(p)[2] == p.beta);
        }
    MESSAGE("envelope ratio range [" << lo << ", " << hi << "], fitted c0 = " << c0);
    CHECK(lo >= 0.25);
    CHECK(hi <= 4.0);
    CHECK(c0 > 0.1);
}

TEST_CASE("two-body stability lower bound") {
    auto bound = [](const MdePoint& a, const MdePoint& b) {
        cplx wi(0, a.eta), wj(0, b.eta);
        double mn = std::min(std::abs(wi + std::conj(wj)), std::abs(wi - std::conj(wj)));
        return std::norm(a.z - b.z) + mn * mn + a.eta + b.eta;
    };
    double c1 = 1e300;
    std::vector<cplx> zs;
    for (double x : lin_grid(-1.5, 1.5, 9))
        for (double y : lin_grid(-1.5, 1.5, 9)) zs.push_back({x, y});
    for (double e1 : log_grid(1e-4, 1.0, 5))
        for (double e2 : log_grid(1e-4, 1.0, 5))
            for (cplx zi : zs)
                for (cplx zj : zs) {
                    auto a = mde_point(zi, e1), b = mde_point(zj, e2);
                    auto ev = two_body_stability_eigs(a, b);
                    double re = std::min(ev[0].real(), ev[1].real());
                    c1 = std::min(c1, re / bound(a, b));
                }
    MESSAGE("fitted c1 = " << c1);
    CHECK(c1 > 0.01);

    auto a = mde_point(1.0, 0.1), b = mde_point(-1.0, 0.1);
    auto ev = two_body_stability_eigs(a, b);
    CHECK(std::min(ev[0].real(), ev[1].real()) >= c1 * 4.0);

    auto ci = mde_point(cplx(0.3, 0.5), 0.05), cj = mde_point(cplx(0.3, -0.5), 0.05);
    auto ec = two_body_stability_eigs(ci, cj);
    CHECK(std::min(ec[0].real(), ec[1].real()) >= c1 * bound(ci, cj));

    // 2x2 oracle for K on block scalars
    Eigen::Matrix2cd K;
    cplx q = ci.u * cj.u;
    K << std::conj(ci.z) * cj.z * q, ci.m * cj.m, ci.m * cj.m, ci.z * std::conj(cj.z) * q;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(Eigen::Matrix2cd::Identity() - K);
    std::vector<cplx> ref{es.eigenvalues()(0), es.eigenvalues()(1)};
    CHECK(oracle::multiset_distance(ref, {ec[0], ec[1]}) < 1e-14);
}
