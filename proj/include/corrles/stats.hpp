#pragma once

#include <optional>
#include <span>
#include <vector>

namespace corrles {

struct GaussianityStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // divisor n - 1
    double skewness = 0.0;
    double skewness_se = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_se = 0.0;
    double ks_distance = 0.0;
    double ks_critical = 0.0;  // 1% level
    bool skew_pass = false;
    bool kurt_pass = false;
    bool ks_pass = false;
    bool degenerate = false;
    bool used_predicted_sigma = false;

    bool pass() const { return degenerate || (skew_pass && kurt_pass && ks_pass); }
};

// samples are standardized by their mean and by sqrt(predicted_sigma2) when given,
// else by the sample standard deviation
GaussianityStats gaussianity_tests(std::span<const double> x, std::optional<double> predicted_sigma2 = {});

// sup |F_n - Phi| of already standardized samples
double ks_distance_normal(std::vector<double> z);

double normal_cdf(double x);

struct LinearFit {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> v);

} // namespace corrles
