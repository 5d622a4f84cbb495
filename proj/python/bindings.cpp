#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "corrles/ensemble.hpp"
#include "corrles/girko.hpp"
#include "corrles/harness.hpp"
#include "corrles/kernel.hpp"
#include "corrles/mde.hpp"
#include "corrles/serialize.hpp"
#include "corrles/spectral.hpp"

namespace py = pybind11;
using namespace corrles;

namespace {

// configs and results cross the boundary as JSON text; the Python layer maps them to dicts
std::string summary_json(const std::string& spec) {
    return to_json(theoretical_cumulants(spec_from_json(json::parse(spec)))).dump();
}

py::dict run(const std::string& config) {
    ExperimentConfig cfg = experiment_config_from_json(json::parse(config));
    ExperimentResult r;
    {
        py::gil_scoped_release release;
        r = run_experiment(cfg);
    }
    if (!cfg.output_dir.empty()) report(r, cfg.output_dir);
    py::dict out;
    out["summary"] = to_json(summarize(r)).dump();
    out["L1"] = r.L1_raw;
    out["L2"] = r.L2_raw;
    out["combined"] = r.combined_raw;
    return out;
}

std::string covariance_json(const std::string& params) {
    json j = json::parse(params);
    KernelParams prm = kernel_params_from_json(j);
    TestFunction f = test_function_from_json(j.at("f"));
    TestFunction g = j.contains("g") ? test_function_from_json(j["g"]) : f;
    QuadConfig q = j.contains("quad") ? quad_from_json(j["quad"]) : QuadConfig{};
    CovarianceResult c;
    {
        py::gil_scoped_release release;
        c = covariance(f, g, prm, q);
    }
    json o{{"value", to_json(c.value)},
           {"error_estimate", c.error_estimate},
           {"warning", c.warning},
           {"parts",
            {{"v_hat", to_json(c.parts.v_hat)}, {"cross", to_json(c.parts.cross)}, {"kappa", to_json(c.parts.kappa)}}}};
    return o.dump();
}

py::dict point(cplx z, double eta) {
    MdePoint p = mde_point(z, eta);
    py::dict d;
    d["m"] = p.m;
    d["u"] = p.u;
    d["beta"] = p.beta;
    d["beta_star"] = p.beta_star;
    d["d_eta_m"] = p.d_eta_m;
    d["d_eta_u"] = p.d_eta_u;
    return d;
}

std::vector<cplx> spectrum(const Eigen::MatrixXcd& X) { return eigenvalues(X).eigenvalues; }

cplx les_of(const std::string& f, const Eigen::MatrixXcd& X) {
    return les(test_function_from_json(json::parse(f)), eigenvalues(X));
}

py::tuple sample(int n, const std::string& spec, std::uint64_t seed, std::uint64_t stream) {
    MatrixPair p = sample_pair(n, make_sampler(spec_from_json(json::parse(spec))), seed, stream);
    return py::make_tuple(p.X1, p.X2);
}

cplx girko(const std::string& f, const Eigen::MatrixXcd& X, int nodes, double half_width, double T) {
    return girko_les(test_function_from_json(json::parse(f)), X, ZGrid{nodes, half_width}, T).value;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "correlated non-Hermitian pairs: MDE, covariance kernel, Monte Carlo harness";
    m.attr("schema_version") = kSchemaVersion;
    m.def("solve_m", &solve_m, py::arg("z"), py::arg("eta"));
    m.def("solve_m_newton", &solve_m_newton, py::arg("z"), py::arg("eta"));
    m.def("mde_point", &point, py::arg("z"), py::arg("eta"));
    m.def("summary_json", &summary_json, py::arg("spec"));
    m.def("sample_pair", &sample, py::arg("n"), py::arg("spec"), py::arg("seed"), py::arg("stream") = 0);
    m.def("eigenvalues", &spectrum, py::arg("X"));
    m.def("les", &les_of, py::arg("f"), py::arg("X"));
    m.def("girko_les", &girko, py::arg("f"), py::arg("X"), py::arg("nodes") = 200, py::arg("half_width") = 1.6,
          py::arg("T") = 1e3);
    m.def("covariance_json", &covariance_json, py::arg("params"));
    m.def("run_experiment", &run, py::arg("config"));
    m.def("analytic_disk_variance", py::overload_cast<const std::vector<cplx>&>(&analytic_disk_variance),
          py::arg("coefficients"));
}
