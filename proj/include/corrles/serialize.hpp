#pragma once

#include <string>

#include "json.hpp"

#include "corrles/ensemble.hpp"
#include "corrles/harness.hpp"
#include "corrles/kernel.hpp"
#include "corrles/spectral.hpp"

namespace corrles {

using json = nlohmann::json;

json to_json(cplx z);
cplx complex_from_json(const json& j);

json to_json(const CorrelationSpec& s);
// accepts {"preset": name} or an explicit spec object
CorrelationSpec spec_from_json(const json& j);

json to_json(const CorrelationSummary& s);
CorrelationSummary summary_from_json(const json& j);

json to_json(const TestFunction& f);
TestFunction test_function_from_json(const json& j);

json to_json(const QuadConfig& q);
QuadConfig quad_from_json(const json& j, QuadConfig base = {});

const char* to_string(CrossModel m);
CrossModel cross_model_from_string(const std::string& s);

// {"c", "d", "spec" | "summary", "cross_model"}
KernelParams kernel_params_from_json(const json& j);

json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const json& j);

struct ExperimentSummary {
    int schema_version = kSchemaVersion;
    int n = 0, trials = 0, resampled = 0, threads = 0;
    std::uint64_t seed = 0;
    double empirical_variance = 0.0, empirical_variance_se = 0.0;
    std::array<double, 4> empirical_cov{};  // re of [11, 12, 21, 22]
    bool has_prediction = false;
    double predicted_variance = 0.0, predicted_variance_error = 0.0, variance_z = 0.0;
    std::array<double, 4> predicted_cov{};
    double correlation_empirical = 0.0, correlation_predicted = 0.0, correlation_z = 0.0;
    double cov12_z = 0.0;
    double skewness = 0.0, excess_kurtosis = 0.0, ks_distance = 0.0;
    bool gaussianity_pass = false;
    double runtime_seconds = 0.0;

    bool operator==(const ExperimentSummary&) const = default;
};

ExperimentSummary summarize(const ExperimentResult& r);
json to_json(const ExperimentSummary& s);
ExperimentSummary experiment_summary_from_json(const json& j);

// writes <dir>/summary.json and <dir>/samples.csv
void report(const ExperimentResult& r, const std::string& dir);
ExperimentSummary read_summary(const std::string& path);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace corrles
