#include "corrles/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace corrles {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_distance_normal(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double n = double(z.size());
    double d = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double F = normal_cdf(z[k]);
        d = std::max({d, (k + 1) / n - F, F - k / n});
    }
    return d;
}

GaussianityStats gaussianity_tests(std::span<const double> x, std::optional<double> predicted_sigma2) {
    if (x.size() < 100) throw std::invalid_argument("gaussianity_tests needs at least 100 samples");
    GaussianityStats g;
    g.n = x.size();
    const double n = double(g.n);
    double s = 0.0;
    for (double v : x) s += v;
    g.mean = s / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double d = v - g.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    g.variance = m2 * n / (n - 1.0);
    double scale = std::max(std::abs(g.mean), 1.0);
    if (!(m2 > 1e-24 * scale * scale)) {
        g.degenerate = true;
        return g;
    }
    g.skewness = m3 / std::pow(m2, 1.5);
    g.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    g.skewness_se = std::sqrt(6.0 * (n - 2.0) / ((n + 1.0) * (n + 3.0)));
    g.kurtosis_se = std::sqrt(24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0)));
    g.skew_pass = std::abs(g.skewness) <= 3.0 * g.skewness_se;
    g.kurt_pass = std::abs(g.excess_kurtosis) <= 3.0 * g.kurtosis_se;

    double sigma = std::sqrt(g.variance);
    if (predicted_sigma2 && *predicted_sigma2 > 0.0) {
        sigma = std::sqrt(*predicted_sigma2);
        g.used_predicted_sigma = true;
    }
    std::vector<double> z(x.begin(), x.end());
    for (double& v : z) v = (v - g.mean) / sigma;
    g.ks_distance = ks_distance_normal(std::move(z));
    g.ks_critical = 1.628 / std::sqrt(n);
    g.ks_pass = g.ks_distance <= g.ks_critical;
    return g;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 paired points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            double e = y[k] - f.intercept - f.slope * x[k];
            rss += e * e;
        }
        f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

} // namespace corrles
