#include "corrles/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace corrles {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw std::invalid_argument("complex value must be a number, [re, im] or {re, im}");
}

namespace {

Field field_from(const std::string& s) {
    if (s == "real") return Field::real;
    if (s == "complex") return Field::complex;
    throw std::invalid_argument("unknown field '" + s + "'");
}

Construction construction_from(const std::string& s) {
    if (s == "gaussian-pair") return Construction::gaussian_pair;
    if (s == "shifted-pair") return Construction::shifted_pair;
    if (s == "mixture") return Construction::mixture;
    throw std::invalid_argument("unknown construction '" + s + "'");
}

json atoms_json(const std::vector<Atom>& a) {
    json out = json::array();
    for (const auto& x : a) out.push_back({{"value", to_json(x.value)}, {"prob", x.prob}});
    return out;
}

std::vector<Atom> atoms_from(const json& j) {
    std::vector<Atom> out;
    for (const auto& x : j) out.push_back({complex_from_json(x.at("value")), x.at("prob").get<double>()});
    return out;
}

} // namespace

json to_json(const CorrelationSpec& s) {
    json j{{"field", to_string(s.field)}, {"construction", to_string(s.construction)}};
    if (!s.name.empty()) j["name"] = s.name;
    switch (s.construction) {
    case Construction::gaussian_pair:
        j["target_gamma"] = s.target_gamma;
        j["target_rho"] = s.target_rho;
        break;
    case Construction::shifted_pair:
        j["zeta"] = atoms_json(s.zeta);
        j["theta"] = atoms_json(s.theta);
        break;
    case Construction::mixture: {
        json a = json::array();
        for (const auto& x : s.atoms) a.push_back({{"x1", to_json(x.x1)}, {"x2", to_json(x.x2)}, {"prob", x.prob}});
        j["atoms"] = a;
        break;
    }
    }
    return j;
}

CorrelationSpec spec_from_json(const json& j) {
    if (j.contains("preset")) {
        const std::string name = j.at("preset").get<std::string>();
        if (name == "gaussian") {
            Field f = field_from(j.value("field", "real"));
            double g = j.value("target_gamma", 0.0);
            return gaussian_pair(f, g, j.value("target_rho", f == Field::real ? g : 0.0));
        }
        for (const auto& s : shipped_specs())
            if (s.name == name) return s;
        if (name == "shifted-rademacher") return rademacher_shifted_pair(field_from(j.value("field", "real")));
        if (name == "heavy-atom") return heavy_atom_pair(field_from(j.value("field", "real")));
        throw std::invalid_argument("unknown spec preset '" + name + "'");
    }
    CorrelationSpec s;
    s.field = field_from(j.at("field").get<std::string>());
    s.construction = construction_from(j.value("construction", "gaussian-pair"));
    s.name = j.value("name", "");
    s.target_gamma = j.value("target_gamma", 0.0);
    s.target_rho = j.value("target_rho", s.field == Field::real ? s.target_gamma : 0.0);
    if (s.construction == Construction::shifted_pair) {
        s.zeta = atoms_from(j.at("zeta"));
        s.theta = atoms_from(j.at("theta"));
    } else if (s.construction == Construction::mixture) {
        for (const auto& x : j.at("atoms"))
            s.atoms.push_back({complex_from_json(x.at("x1")), complex_from_json(x.at("x2")), x.at("prob").get<double>()});
    }
    return s;
}

json to_json(const CorrelationSummary& s) {
    return {{"rho", to_json(s.rho)},
            {"gamma", to_json(s.gamma)},
            {"gamma1", s.gamma1},
            {"kappa4", {{s.kappa4[0][0], s.kappa4[0][1]}, {s.kappa4[1][0], s.kappa4[1][1]}}},
            {"moment8", s.moment8}};
}

CorrelationSummary summary_from_json(const json& j) {
    CorrelationSummary s;
    s.rho = complex_from_json(j.value("rho", json(0.0)));
    s.gamma = complex_from_json(j.value("gamma", json(0.0)));
    s.gamma1 = j.value("gamma1", 1);
    if (s.gamma1 != 0 && s.gamma1 != 1) throw std::invalid_argument("gamma1 must be 0 or 1");
    if (j.contains("kappa4"))
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s.kappa4[a][b] = j["kappa4"][a][b].get<double>();
    if (s.kappa4[0][1] != s.kappa4[1][0]) throw std::invalid_argument("kappa4 must be symmetric");
    s.moment8 = j.value("moment8", 0.0);
    return s;
}

json to_json(const TestFunction& f) {
    json m = json::array();
    for (const auto& t : f.terms()) m.push_back({{"coef", to_json(t.coef)}, {"p", t.p}, {"q", t.q}});
    return {{"kind", "poly-bump"}, {"monomials", m}, {"r0", f.r0()}, {"r1", f.r1()}};
}

TestFunction test_function_from_json(const json& j) {
    if (j.value("kind", "poly-bump") != "poly-bump")
        throw std::invalid_argument("only the poly-bump test function kind is supported");
    const double r0 = j.value("r0", 1.2), r1 = j.value("r1", 1.5);
    std::vector<Monomial> t;
    if (j.contains("monomials"))
        for (const auto& m : j["monomials"])
            t.push_back({complex_from_json(m.value("coef", json(1.0))), m.value("p", 0), m.value("q", 0)});
    if (j.contains("analytic")) {
        int k = 0;
        for (const auto& a : j["analytic"]) t.push_back({complex_from_json(a), k++, 0});
    }
    if (j.contains("anti_analytic")) {
        int k = 0;
        for (const auto& b : j["anti_analytic"]) t.push_back({complex_from_json(b), 0, k++});
    }
    return TestFunction(t, r0, r1);
}

json to_json(const QuadConfig& q) {
    return {{"eta_nodes", q.eta_nodes},       {"eta_min", q.eta_min},
            {"eta_max", q.eta_max},           {"z_nodes", q.z_nodes},
            {"z_half_width", q.z_half_width}, {"laplacian_subsamples", q.laplacian_subsamples},
            {"exclusion_radius", q.exclusion_radius}, {"log_spacing", q.log_spacing},
            {"estimate_error", q.estimate_error}};
}

QuadConfig quad_from_json(const json& j, QuadConfig q) {
    q.eta_nodes = j.value("eta_nodes", q.eta_nodes);
    q.eta_min = j.value("eta_min", q.eta_min);
    q.eta_max = j.value("eta_max", q.eta_max);
    q.z_nodes = j.value("z_nodes", q.z_nodes);
    q.z_half_width = j.value("z_half_width", q.z_half_width);
    q.laplacian_subsamples = j.value("laplacian_subsamples", q.laplacian_subsamples);
    q.exclusion_radius = j.value("exclusion_radius", q.exclusion_radius);
    q.log_spacing = j.value("log_spacing", q.log_spacing);
    q.estimate_error = j.value("estimate_error", q.estimate_error);
    q.validate();
    return q;
}

const char* to_string(CrossModel m) { return m == CrossModel::two_body ? "two_body" : "first_order"; }

CrossModel cross_model_from_string(const std::string& s) {
    if (s == "two_body") return CrossModel::two_body;
    if (s == "first_order") return CrossModel::first_order;
    throw std::invalid_argument("unknown cross_model '" + s + "'");
}

KernelParams kernel_params_from_json(const json& j) {
    KernelParams p;
    p.c = complex_from_json(j.value("c", json(1.0)));
    p.d = complex_from_json(j.value("d", json(0.0)));
    if (j.contains("summary")) p.summary = summary_from_json(j["summary"]);
    else if (j.contains("spec")) p.summary = theoretical_cumulants(spec_from_json(j["spec"]));
    p.cross = cross_model_from_string(j.value("cross_model", "two_body"));
    return p;
}

json to_json(const ExperimentConfig& c) {
    return {{"spec", to_json(c.spec)},   {"n", c.n},
            {"trials", c.trials},        {"c", to_json(c.c)},
            {"d", to_json(c.d)},         {"f", to_json(c.f)},
            {"quad", to_json(c.quad)},   {"seed", c.seed},
            {"predict", c.predict},      {"cross_model", to_string(c.cross)},
            {"threads", c.threads},      {"outputs", {{"dir", c.output_dir}}}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    c.spec = spec_from_json(j.at("spec"));
    c.n = j.value("n", c.n);
    c.trials = j.value("trials", c.trials);
    c.c = complex_from_json(j.value("c", json(1.0)));
    c.d = complex_from_json(j.value("d", json(0.0)));
    c.f = test_function_from_json(j.at("f"));
    if (j.contains("quad")) c.quad = quad_from_json(j["quad"]);
    c.seed = j.value("seed", std::uint64_t(1));
    c.predict = j.value("predict", true);
    c.cross = cross_model_from_string(j.value("cross_model", "two_body"));
    c.threads = j.value("threads", 0);
    if (j.contains("outputs")) c.output_dir = j["outputs"].value("dir", "");
    c.validate();
    return c;
}

ExperimentSummary summarize(const ExperimentResult& r) {
    ExperimentSummary s;
    s.schema_version = r.schema_version;
    s.n = r.config.n;
    s.trials = r.config.trials;
    s.seed = r.config.seed;
    s.resampled = r.resampled;
    s.threads = r.threads;
    s.empirical_variance = r.empirical_variance;
    s.empirical_variance_se = r.empirical_variance_se;
    s.empirical_cov = {r.empirical_cov[0][0].real(), r.empirical_cov[0][1].real(), r.empirical_cov[1][0].real(),
                       r.empirical_cov[1][1].real()};
    s.has_prediction = r.has_prediction;
    if (r.has_prediction) {
        const auto& p = r.prediction;
        s.predicted_variance = p.combined;
        s.predicted_variance_error = p.combined_error;
        s.variance_z = r.variance_z;
        s.predicted_cov = {p.cov[0][0].real(), p.cov[0][1].real(), p.cov[1][0].real(), p.cov[1][1].real()};
        s.correlation_empirical = r.joint.correlation_empirical;
        s.correlation_predicted = r.joint.correlation_predicted;
        s.correlation_z = r.joint.correlation_z;
        s.cov12_z = r.joint.zscore[0][1];
    }
    s.skewness = r.gauss_re.skewness;
    s.excess_kurtosis = r.gauss_re.excess_kurtosis;
    s.ks_distance = r.gauss_re.ks_distance;
    s.gaussianity_pass = r.gauss_re.pass() && r.gauss_im.pass();
    s.runtime_seconds = r.runtime_seconds;
    return s;
}

json to_json(const ExperimentSummary& s) {
    return {{"schema_version", s.schema_version},
            {"n", s.n},
            {"trials", s.trials},
            {"seed", s.seed},
            {"resampled", s.resampled},
            {"threads", s.threads},
            {"empirical_variance", s.empirical_variance},
            {"empirical_variance_se", s.empirical_variance_se},
            {"empirical_cov", s.empirical_cov},
            {"has_prediction", s.has_prediction},
            {"predicted_variance", s.predicted_variance},
            {"predicted_variance_error", s.predicted_variance_error},
            {"variance_z", s.variance_z},
            {"predicted_cov", s.predicted_cov},
            {"correlation_empirical", s.correlation_empirical},
            {"correlation_predicted", s.correlation_predicted},
            {"correlation_z", s.correlation_z},
            {"cov12_z", s.cov12_z},
            {"skewness", s.skewness},
            {"excess_kurtosis", s.excess_kurtosis},
            {"ks_distance", s.ks_distance},
            {"gaussianity_pass", s.gaussianity_pass},
            {"runtime_seconds", s.runtime_seconds}};
}

ExperimentSummary experiment_summary_from_json(const json& j) {
    ExperimentSummary s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != kSchemaVersion)
        throw std::invalid_argument("unsupported summary schema_version " + std::to_string(s.schema_version));
    s.n = j.at("n").get<int>();
    s.trials = j.at("trials").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.resampled = j.at("resampled").get<int>();
    s.threads = j.at("threads").get<int>();
    s.empirical_variance = j.at("empirical_variance").get<double>();
    s.empirical_variance_se = j.at("empirical_variance_se").get<double>();
    s.empirical_cov = j.at("empirical_cov").get<std::array<double, 4>>();
    s.has_prediction = j.at("has_prediction").get<bool>();
    s.predicted_variance = j.at("predicted_variance").get<double>();
    s.predicted_variance_error = j.at("predicted_variance_error").get<double>();
    s.variance_z = j.at("variance_z").get<double>();
    s.predicted_cov = j.at("predicted_cov").get<std::array<double, 4>>();
    s.correlation_empirical = j.at("correlation_empirical").get<double>();
    s.correlation_predicted = j.at("correlation_predicted").get<double>();
    s.correlation_z = j.at("correlation_z").get<double>();
    s.cov12_z = j.at("cov12_z").get<double>();
    s.skewness = j.at("skewness").get<double>();
    s.excess_kurtosis = j.at("excess_kurtosis").get<double>();
    s.ks_distance = j.at("ks_distance").get<double>();
    s.gaussianity_pass = j.at("gaussianity_pass").get<bool>();
    s.runtime_seconds = j.at("runtime_seconds").get<double>();
    return s;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return json::parse(is);
}

void report(const ExperimentResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    json j = to_json(summarize(r));
    j["config"] = to_json(r.config);
    write_text_file((std::filesystem::path(dir) / "summary.json").string(), j.dump(2) + "\n");

    std::ostringstream os;
    os << "trial,L1_re,L1_im,L2_re,L2_im,combined_re,combined_im\n";
    char buf[512];
    for (std::size_t k = 0; k < r.L1_raw.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, r.L1_raw[k].real(),
                      r.L1_raw[k].imag(), r.L2_raw[k].real(), r.L2_raw[k].imag(), r.combined_raw[k].real(),
                      r.combined_raw[k].imag());
        os << buf;
    }
    write_text_file((std::filesystem::path(dir) / "samples.csv").string(), os.str());
}

ExperimentSummary read_summary(const std::string& path) { return experiment_summary_from_json(read_json_file(path)); }

} // namespace corrles
