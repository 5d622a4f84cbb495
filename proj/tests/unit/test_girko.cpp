#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrles/ensemble.hpp"
#include "corrles/girko.hpp"
#include "corrles/stats.hpp"
#include "oracles.hpp"

using namespace corrles;

namespace {

Eigen::MatrixXcd ginibre(int n, std::uint64_t seed, Field field = Field::complex) {
    return sample_pair(n, make_sampler(gaussian_pair(field, 0.0)), seed).X1;
}

Hermitization from_values(std::vector<double> s) {
    Hermitization h;
    h.n = int(s.size());
    h.singular_values = std::move(s);
    return h;
}

} // namespace

TEST_CASE("hermitization examples") {
    const int n = 6;
    auto h = hermitize(Eigen::MatrixXcd::Zero(n, n), 2.0);
    for (double s : h.singular_values) CHECK(s == doctest::Approx(2.0).epsilon(1e-14));

    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) P((k + 2) % n, k) = 1.0;
    for (double s : hermitize(P, 0.0).singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::MatrixXcd X = ginibre(16, 3);
    const cplx z(0.3, -0.2);
    auto a = hermitize(X, z);
    CHECK(std::is_sorted(a.singular_values.begin(), a.singular_values.end()));
    auto b = hermitization_singular_values_eig(X, z);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(a.singular_values[k] - b[k]) <= 1e-9 * a.singular_values[k]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitization_matrix(X, z));
    std::vector<double> pm;
    for (double s : a.singular_values) {
        pm.push_back(s);
        pm.push_back(-s);
    }
    std::sort(pm.begin(), pm.end());
    for (int k = 0; k < 32; ++k) CHECK(std::abs(es.eigenvalues()[k] - pm[k]) <= 1e-9);
    CHECK_THROWS(hermitize(Eigen::MatrixXcd::Zero(2, 3), 0.0));
}

TEST_CASE("resolvent trace") {
    const int n = 8;
    const cplx z(0.4, 0.1);
    Eigen::MatrixXcd S = z * Eigen::MatrixXcd::Identity(n, n);
    auto h0 = hermitize(S, z);
    CHECK(im_trace_resolvent(h0, 0.3) == doctest::Approx(2.0 * n / 0.3));

    Eigen::MatrixXcd X = ginibre(n, 5);
    auto h = hermitize(X, z);
    const double big = 1e4 * h.singular_values.back();
    CHECK(im_trace_resolvent(h, big) / (2.0 * n / big) == doctest::Approx(1.0).epsilon(0.01));

    Eigen::MatrixXcd H = hermitization_matrix(X, z);
    for (double eta : {1e-3, 0.1, 1.0, 30.0}) {
        double dense = oracle::im_trace_dense(H, eta);
        CHECK(std::abs(im_trace_resolvent(h, eta) - dense) <= 1e-10 * std::abs(dense));
    }
    auto g = normalized_resolvent_trace(h, 0.2);
    CHECK(g.real() == 0.0);
    CHECK(g.imag() == doctest::Approx(im_trace_resolvent(h, 0.2) / (2.0 * n)));
}

TEST_CASE("closed eta integral") {
    CHECK(eta_integral_closed(from_values({1.0}), 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(eta_integral_closed(from_values({0.5, 2.0}), 1e-12) < 1e-22);
    CHECK_THROWS_AS(eta_integral_closed(from_values({0.0, 1.0}), 1.0), SingularHermitization);
    CHECK_THROWS_AS(eta_integral_closed(from_values({1.0}), 0.0), std::invalid_argument);

    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto h = hermitize(ginibre(8, seed), cplx(0.2, 0.3));
        for (double T : {0.5, 10.0}) {
            double closed = eta_integral_closed(h, T);
            double numeric = oracle::adaptive_simpson([&](double e) { return im_trace_resolvent(h, e); }, 0.0, T,
                                                      1e-12 * closed);
            CHECK(std::abs(closed - numeric) <= 1e-8 * closed);
        }
    }
}

TEST_CASE("girko representation reproduces the direct statistic") {
    // a tiny matrix is deep inside the flat part of f = 1
    Eigen::MatrixXcd small = 1e-3 * ginibre(8, 2);
    ZGrid coarse{100, 1.6};
    auto one = TestFunction::monomial(0, 0);
    auto r1 = girko_les(one, small, coarse, 1e3);
    CHECK(std::abs(r1.value - 8.0) <= 0.01 * 8.0);
    CHECK(r1.laplacian_sum <= 1e-6 * r1.laplacian_abs_sum);

    const int n = 16;
    Eigen::MatrixXcd X = ginibre(n, 7);
    auto f = TestFunction::monomial(2, 0) + TestFunction::monomial(1, 1);
    cplx direct = les(f, eigenvalues(X));
    auto g200 = girko_les(f, X, ZGrid{200, 1.6}, 1e3);
    auto g400 = girko_les(f, X, ZGrid{400, 1.6}, 1e3);
    double e200 = std::abs(g200.value - direct), e400 = std::abs(g400.value - direct);
    MESSAGE("direct " << direct << " girko200 " << g200.value << " girko400 " << g400.value);
    CHECK(e200 <= 0.01 * std::abs(direct));
    CHECK(e400 <= 0.5 * e200);
    CHECK(g200.excised_cells == 0);
    CHECK(g200.laplacian_sum <= 1e-6 * g200.laplacian_abs_sum);

    // a grid node on an eigenvalue is excised and counted
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
    D(0, 0) = cplx(0.008, 0.008);  // centre of a cell of the 200-grid
    D(1, 1) = 0.3;
    auto gd = girko_les(TestFunction::monomial(1, 1), D, ZGrid{200, 1.6}, 1e3);
    CHECK(gd.excised_cells == 1);
}

TEST_CASE("regime split") {
    const int n = 64;
    auto h = hermitize(Eigen::MatrixXcd::Zero(n, n), 2.0);
    auto r = regime_split(h, n, 0.1, 0.2, 2.0);
    CHECK(r.eta0 == doctest::Approx(std::pow(64.0, -1.1)));
    CHECK(r.eta_c == doctest::Approx(std::pow(64.0, -0.8)));
    CHECK(r.T == doctest::Approx(4096.0));
    CHECK(r.pieces[0] <= 2.0 * n * r.eta0 / 4.0);
    CHECK(std::abs(r.eta_total() - eta_integral_closed(h, r.T)) <= 1e-10 * eta_integral_closed(h, r.T));

    Eigen::MatrixXcd X = ginibre(n, 12);
    const cplx z(0.3, 0.1);
    auto hx = hermitize(X, z);
    auto a = regime_split(hx, n, 0.1, 0.2, 1.0), b = regime_split(hx, n, 0.1, 0.2, 3.0);
    CHECK(std::abs(a.eta_total() - eta_integral_closed(hx, a.T)) <= 1e-10 * std::abs(a.eta_total()));
    const double logdet = 2.0 * std::log(std::abs((X - z * Eigen::MatrixXcd::Identity(n, n)).determinant()));
    CHECK(std::abs(a.regularized_total() + logdet) <= 1e-9 * std::max(1.0, std::abs(logdet)));
    CHECK(std::abs(b.regularized_total() + logdet) <= 1e-9 * std::max(1.0, std::abs(logdet)));

    CHECK_THROWS_AS(regime_split(hx, n, 0.0, 0.2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(regime_split(hx, n, 0.1, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(regime_split(hx, n, 0.1, 0.2, 0.5), std::invalid_argument);

    std::vector<double> ratio;
    for (int t = 0; t < 50; ++t) {
        auto s = regime_split(hermitize(ginibre(n, 1000 + t), cplx(0.5, 0.0)), n, 0.1, 0.2, 2.0);
        ratio.push_back(std::abs(s.pieces[0]) / std::abs(s.eta_total()));
    }
    MESSAGE("median small-eta share " << median(ratio));
    CHECK(median(ratio) <= 1e-3);
}

TEST_CASE("local law residual") {
    Eigen::MatrixXcd X = ginibre(128, 4);
    auto p = local_law_residual(X, 0.5, 1e3);
    CHECK(p.residual <= 1e-2);
    auto q = local_law_residual(X, 0.5, 0.1), q2 = local_law_residual(X, 0.5, 0.1);
    CHECK(q.residual == q2.residual);
    CHECK(q.n_eta_residual == doctest::Approx(128 * 0.1 * q.residual));
    CHECK_THROWS_AS(local_law_residual(X, 0.95, 0.1), std::invalid_argument);

    // residual decays roughly like 1/(n eta)
    std::vector<double> x, y;
    for (int t = 0; t < 4; ++t) {
        auto h = hermitize(ginibre(128, 50 + t), 0.5);
        for (int k = 0; k < 9; ++k) {
            double eta = std::pow(10.0, -2.0 + 0.25 * k);
            auto r = local_law_residual(h, eta);
            x.push_back(std::log(128 * eta));
            y.push_back(std::log(r.residual));
        }
    }
    auto fit = least_squares(x, y);
    MESSAGE("slope " << fit.slope);
    CHECK(fit.slope <= -0.5);
    CHECK(fit.slope >= -1.5);
}
