#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "corrles/ensemble.hpp"
#include "corrles/kernel.hpp"
#include "corrles/spectral.hpp"
#include "corrles/stats.hpp"

namespace corrles {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
    CorrelationSpec spec;
    int n = 64;
    int trials = 100;
    cplx c{1.0}, d{0.0};
    TestFunction f;
    QuadConfig quad;
    std::uint64_t seed = 1;
    std::string output_dir;
    bool predict = true;
    CrossModel cross = CrossModel::two_body;
    int threads = 0;  // 0: CORRLES_THREADS or hardware concurrency

    void validate() const;
};

using Cov2 = std::array<std::array<cplx, 2>, 2>;

// predicted variances at the polarization weights and the resulting 2x2 matrix
struct PolarizedPrediction {
    double v10 = 0.0, v01 = 0.0, v11 = 0.0;
    double combined = 0.0;  // at the configured (c, d)
    double combined_error = 0.0;
    Cov2 cov{};
    std::array<std::array<double, 2>, 2> cov_error{};
    bool warning = false;
    CovarianceResult detail;  // for the configured (c, d)
};

PolarizedPrediction predict_joint(const TestFunction& f, const KernelParams& params, const QuadConfig& quad);

struct JointCovarianceComparison {
    Cov2 empirical{};
    Cov2 predicted{};
    std::array<std::array<double, 2>, 2> se{};
    std::array<std::array<double, 2>, 2> zscore{};
    double correlation_empirical = 0.0;
    double correlation_predicted = 0.0;
    double correlation_se = 0.0;
    double correlation_z = 0.0;
};

JointCovarianceComparison joint_covariance(const std::vector<cplx>& L1, const std::vector<cplx>& L2,
                                           const PolarizedPrediction& pred);
JointCovarianceComparison joint_covariance(const std::vector<cplx>& L1, const std::vector<cplx>& L2,
                                           const TestFunction& f, const KernelParams& params,
                                           const QuadConfig& quad);

struct ExperimentResult {
    int schema_version = kSchemaVersion;
    ExperimentConfig config;
    std::vector<cplx> L1_raw, L2_raw, combined_raw;
    std::vector<cplx> L1_centered, L2_centered, combined_centered;
    double empirical_variance = 0.0;
    double empirical_variance_se = 0.0;
    Cov2 empirical_cov{};
    bool has_prediction = false;
    PolarizedPrediction prediction;
    double variance_z = 0.0;
    JointCovarianceComparison joint;
    GaussianityStats gauss_re, gauss_im;
    int resampled = 0;
    double runtime_seconds = 0.0;
    int threads = 1;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

int resolve_threads(int requested);

// sample mean-centered copy
std::vector<cplx> centered(const std::vector<cplx>& x);
Cov2 empirical_covariance(const std::vector<cplx>& a, const std::vector<cplx>& b);

} // namespace corrles
