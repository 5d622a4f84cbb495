#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "corrles/harness.hpp"
#include "corrles/stats.hpp"

using namespace corrles;

namespace {

QuadConfig small_quad() {
    QuadConfig q;
    q.z_nodes = 16;
    q.eta_nodes = 24;
    q.laplacian_subsamples = 2;
    q.exclusion_radius = 0.1;
    return q;
}

ExperimentConfig base_config(int n, int trials) {
    ExperimentConfig c;
    c.spec = gaussian_pair(Field::real, 0.0);
    c.n = n;
    c.trials = trials;
    c.f = TestFunction::monomial(2, 0);
    c.quad = small_quad();
    c.predict = false;
    c.threads = 2;
    return c;
}

bool bit_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

// sup |F_n - Phi| by direct evaluation at both sides of every jump
double ks_oracle(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double n = double(z.size());
    double d = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double F = 0.5 * std::erfc(-z[k] / std::sqrt(2.0));
        d = std::max({d, std::abs((k + 1) / n - F), std::abs(k / n - F)});
    }
    return d;
}

} // namespace

TEST_CASE("smoke run") {
    auto cfg = base_config(8, 2);
    auto r = run_experiment(cfg);
    REQUIRE(r.L1_raw.size() == 2);
    REQUIRE(r.combined_centered.size() == 2);
    CHECK(std::isfinite(r.empirical_variance));
    CHECK(std::isfinite(r.empirical_cov[0][0].real()));
    CHECK(r.gauss_re.degenerate);
    CHECK(r.resampled == 0);
    CHECK(r.schema_version == kSchemaVersion);
}

TEST_CASE("invalid configs are rejected") {
    auto cfg = base_config(8, 1);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = base_config(4, 10);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = base_config(8, 10);
    cfg.spec.target_gamma = 1.4;
    CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("identical matrices cancel") {
    auto cfg = base_config(12, 120);
    cfg.spec = gaussian_pair(Field::real, 1.0);
    cfg.d = -1.0;
    auto r = run_experiment(cfg);
    for (auto v : r.combined_raw) CHECK(std::abs(v) <= 1e-12 * (1.0 + std::abs(r.L1_raw[0])));
    CHECK(r.empirical_variance <= 1e-20);
    CHECK(r.gauss_re.degenerate);
    // perfectly correlated pair
    PolarizedPrediction none;
    auto j = joint_covariance(r.L1_raw, r.L2_raw, none);
    CHECK(j.correlation_empirical == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("centering and covariance structure") {
    auto cfg = base_config(16, 150);
    cfg.spec = gaussian_pair(Field::complex, 0.5, 0.2);
    cfg.c = cplx(0.3, -1.1);
    cfg.d = cplx(2.0, 0.5);
    auto r = run_experiment(cfg);
    cplx m1 = 0.0, m2 = 0.0;
    double scale = 0.0;
    for (int k = 0; k < cfg.trials; ++k) {
        m1 += r.L1_centered[k];
        m2 += r.L2_centered[k];
        scale += std::abs(r.L1_raw[k]) + std::abs(r.L2_raw[k]);
        CHECK(r.combined_centered[k] == cfg.c * r.L1_centered[k] + cfg.d * r.L2_centered[k]);
    }
    CHECK(std::abs(m1) <= 1e-13 * scale);
    CHECK(std::abs(m2) <= 1e-13 * scale);
    const auto& C = r.empirical_cov;
    CHECK(C[0][1] == std::conj(C[1][0]));
    CHECK(std::abs(C[0][0].imag()) <= 1e-12 * C[0][0].real());
    // Hermitian PSD: nonnegative diagonal and determinant
    const double det = C[0][0].real() * C[1][1].real() - std::norm(C[0][1]);
    CHECK(C[0][0].real() >= 0.0);
    CHECK(det >= -1e-12 * C[0][0].real() * C[1][1].real());
    // the combined variance is the quadratic form of the covariance
    cplx q = std::norm(cfg.c) * C[0][0] + std::norm(cfg.d) * C[1][1] + cfg.c * std::conj(cfg.d) * C[0][1] +
             cfg.d * std::conj(cfg.c) * C[1][0];
    CHECK(r.empirical_variance == doctest::Approx(q.real()).epsilon(1e-12));
}

TEST_CASE("results do not depend on the thread count") {
    auto cfg = base_config(16, 40);
    cfg.threads = 1;
    auto a = run_experiment(cfg);
    cfg.threads = 5;
    auto b = run_experiment(cfg);
    CHECK(bit_equal(a.L1_raw, b.L1_raw));
    CHECK(bit_equal(a.L2_raw, b.L2_raw));
    CHECK(bit_equal(a.combined_centered, b.combined_centered));
    CHECK(a.empirical_variance == b.empirical_variance);
    cfg.seed = 2;
    auto c = run_experiment(cfg);
    CHECK(!bit_equal(a.L1_raw, c.L1_raw));
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_threads(3) == 3);
    ::setenv("CORRLES_THREADS", "7", 1);
    CHECK(resolve_threads(0) == 7);
    ::setenv("CORRLES_THREADS", "junk", 1);
    CHECK(resolve_threads(0) >= 1);
    ::unsetenv("CORRLES_THREADS");
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("split halves agree") {
    auto cfg = base_config(24, 400);
    cfg.spec = gaussian_pair(Field::complex, 0.0, 0.0);
    auto r = run_experiment(cfg);
    auto half_var = [&](int lo, int hi) {
        std::vector<cplx> x(r.combined_raw.begin() + lo, r.combined_raw.begin() + hi);
        auto c = centered(x);
        double acc = 0.0;
        for (auto v : c) acc += std::norm(v);
        return acc / (x.size() - 1.0);
    };
    const int T = cfg.trials;
    double v1 = half_var(0, T / 2), v2 = half_var(T / 2, T);
    double se = std::hypot(v1, v2) * std::sqrt(2.0 / (T / 2 - 1.0));
    CAPTURE(v1);
    CAPTURE(v2);
    CHECK(std::abs(v1 - v2) <= 3.0 * se);
}

TEST_CASE("gaussianity calibration") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N01(0.0, 1.0);
    std::exponential_distribution<double> E(1.0);
    const int runs = 200, m = 500;
    int pass = 0, exp_kurt_fail = 0;
    for (int k = 0; k < runs; ++k) {
        std::vector<double> x(m), y(m);
        for (auto& v : x) v = 3.0 + 2.0 * N01(rng);
        for (auto& v : y) v = E(rng);
        if (gaussianity_tests(x).pass()) ++pass;
        if (!gaussianity_tests(y).kurt_pass) ++exp_kurt_fail;
    }
    CAPTURE(pass);
    CAPTURE(exp_kurt_fail);
    CHECK(pass >= 0.95 * runs);
    CHECK(exp_kurt_fail >= 0.95 * runs);

    std::vector<double> c(150, 1.25);
    auto g = gaussianity_tests(c);
    CHECK(g.degenerate);
    CHECK(g.pass());

    // standardization by the predicted variance: a wrong scale is caught by KS
    std::vector<double> x(2000);
    for (auto& v : x) v = N01(rng);
    CHECK(gaussianity_tests(x, 1.0).ks_pass);
    CHECK(gaussianity_tests(x, 1.0).used_predicted_sigma);
    CHECK(!gaussianity_tests(x, 4.0).ks_pass);
    CHECK_THROWS(gaussianity_tests(std::vector<double>(50, 0.0)));
}

TEST_CASE("ks distance against direct evaluation") {
    std::mt19937_64 rng(5);
    std::student_t_distribution<double> t(4.0);
    for (int it = 0; it < 5; ++it) {
        std::vector<double> z(300 + 50 * it);
        for (auto& v : z) v = t(rng);
        CHECK(ks_distance_normal(z) == doctest::Approx(ks_oracle(z)).epsilon(1e-12));
    }
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("least squares and median") {
    std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope_se == doctest::Approx(0.0));
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("polarization of the prediction") {
    QuadConfig q = small_quad();
    TestFunction f = TestFunction::monomial(1, 0);
    KernelParams kp;
    kp.summary = theoretical_cumulants(gaussian_pair(Field::real, 0.6));
    kp.c = 1.0;
    kp.d = 1.0;
    auto p = predict_joint(f, kp, q);
    CHECK(p.combined == doctest::Approx(p.v11).epsilon(1e-14));
    CHECK(p.v11 == doctest::Approx(p.v10 + p.v01 + 2.0 * p.cov[0][1].real()).epsilon(1e-12));
    CHECK(p.cov[0][1] == p.cov[1][0]);
    // independence: polarized cross term vanishes
    kp.summary = theoretical_cumulants(gaussian_pair(Field::complex, 0.0, 0.0));
    auto pi = predict_joint(f, kp, q);
    CHECK(std::abs(pi.cov[0][1]) <= 1e-12 * pi.v10);
    CHECK(pi.v10 == doctest::Approx(pi.v01).epsilon(1e-12));
}

TEST_CASE("independent pair has no empirical cross covariance") {
    auto cfg = base_config(32, 300);
    cfg.spec = gaussian_pair(Field::complex, 0.0, 0.0);
    cfg.f = TestFunction::monomial(1, 0);
    cfg.predict = true;
    cfg.threads = 0;
    auto r = run_experiment(cfg);
    REQUIRE(r.has_prediction);
    CAPTURE(r.joint.zscore[0][1]);
    CHECK(std::abs(r.joint.predicted[0][1]) <= 1e-12 * r.joint.predicted[0][0].real());
    CHECK(std::abs(r.joint.zscore[0][1]) <= 4.0);
    CHECK(std::abs(r.variance_z) <= 4.0);
}
