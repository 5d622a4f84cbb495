#include "corrles/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace corrles {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<double> x(n), w(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double t = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        double wk = 2.0 / ((1.0 - t * t) * dp * dp);
        x[k] = -t;
        x[n - 1 - k] = t;
        w[k] = w[n - 1 - k] = wk;
    }
    const double hm = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int k = 0; k < n; ++k) {
        x[k] = c + hm * x[k];
        w[k] *= hm;
    }
    return {x, w};
}

} // namespace corrles
