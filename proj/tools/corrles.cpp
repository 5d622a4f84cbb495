// corrles command line: simulate, kernel, mde-grid, girko-check, local-law, report

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "corrles/ensemble.hpp"
#include "corrles/girko.hpp"
#include "corrles/harness.hpp"
#include "corrles/kernel.hpp"
#include "corrles/mde.hpp"
#include "corrles/serialize.hpp"
#include "corrles/spectral.hpp"
#include "corrles/stats.hpp"

using namespace corrles;
namespace fs = std::filesystem;

namespace {

std::string csv_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// writes to the file when given, else to stdout
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

int cmd_simulate(const std::string& config, const std::string& out_override, int threads) {
    ExperimentConfig cfg = experiment_config_from_json(read_json_file(config));
    if (threads > 0) cfg.threads = threads;
    if (!out_override.empty()) cfg.output_dir = out_override;
    ExperimentResult r = run_experiment(cfg);
    if (!cfg.output_dir.empty()) report(r, cfg.output_dir);
    json j = to_json(summarize(r));
    if (r.has_prediction && r.prediction.warning) j["warning"] = "quadrature error estimate exceeds 10% of the prediction";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_kernel(const std::string& params_path, const std::string& out, const std::string& marginal) {
    json j = read_json_file(params_path);
    KernelParams prm = kernel_params_from_json(j);
    TestFunction f = test_function_from_json(j.at("f"));
    TestFunction g = j.contains("g") ? test_function_from_json(j["g"]) : f;
    QuadConfig q = j.contains("quad") ? quad_from_json(j["quad"]) : QuadConfig{};
    CovarianceResult c = covariance(f, g, prm, q);
    json o{{"schema_version", kSchemaVersion},
           {"value", to_json(c.value)},
           {"error_estimate", c.error_estimate},
           {"warning", c.warning},
           {"nodes", c.nodes},
           {"excluded_fraction", c.excluded_fraction},
           {"parts",
            {{"v_hat", to_json(c.parts.v_hat)}, {"cross", to_json(c.parts.cross)}, {"kappa", to_json(c.parts.kappa)}}},
           {"cross_model", to_string(prm.cross)}};
    if (f.is_analytic() && prm.c == cplx(1.0) && prm.d == cplx(1.0)) o["analytic_disk_value"] = analytic_disk_variance(f);
    emit(out, o.dump(2) + "\n");
    if (!marginal.empty()) {
        std::ostringstream os;
        os << "re_z,im_z,re_contribution,im_contribution\n";
        for (const auto& row : kernel_marginal(f, g, prm, q))
            os << csv_num(row.z.real()) << ',' << csv_num(row.z.imag()) << ',' << csv_num(row.contribution.real())
               << ',' << csv_num(row.contribution.imag()) << '\n';
        write_text_file(marginal, os.str());
    }
    return 0;
}

int cmd_mde_grid(double rmax, int nr, double eta_min, double eta_max, int neta, const std::string& out) {
    if (nr < 2 || neta < 2 || !(eta_min > 0.0) || !(eta_max > eta_min) || !(rmax > 0.0))
        throw std::invalid_argument("mde-grid: need nr, neta >= 2, 0 < eta-min < eta-max, r-max > 0");
    std::ostringstream os;
    os << "abs_z,eta,im_m,u,re_beta,beta_star,im_d_eta_m,d_eta_u,residual\n";
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < neta; ++b) {
            const double r = rmax * a / (nr - 1);
            const double eta = eta_min * std::pow(eta_max / eta_min, double(b) / (neta - 1));
            MdePoint p = mde_point(r, eta);
            os << csv_num(r) << ',' << csv_num(eta) << ',' << csv_num(p.im_m) << ',' << csv_num(p.u.real()) << ','
               << csv_num(p.beta.real()) << ',' << csv_num(p.beta_star) << ',' << csv_num(p.d_eta_m.imag()) << ','
               << csv_num(p.d_eta_u.real()) << ',' << csv_num(mde_residual(r, eta, p.m)) << '\n';
        }
    emit(out, os.str());
    return 0;
}

TestFunction function_arg(const std::string& spec) {
    if (spec.empty()) return TestFunction::monomial(2, 0);
    if (fs::exists(spec)) return test_function_from_json(read_json_file(spec));
    return test_function_from_json(json::parse(spec));
}

int cmd_girko(int n, std::uint64_t seed, int grid, double T, double half_width, const std::string& fspec,
              const std::string& out) {
    TestFunction f = function_arg(fspec);
    Eigen::MatrixXcd X = sample_pair(n, make_sampler(gaussian_pair(Field::complex, 0.0, 0.0)), seed).X1;
    cplx direct = les(f, eigenvalues(X));
    GirkoResult a = girko_les(f, X, ZGrid{grid, half_width}, T);
    GirkoResult b = girko_les(f, X, ZGrid{2 * grid, half_width}, T);
    const double ea = std::abs(a.value - direct), eb = std::abs(b.value - direct);
    auto split = regime_split(hermitize(X, cplx(0.5, 0.0)), n, 0.1, 0.2, 2.0);
    json o{{"schema_version", kSchemaVersion},
           {"n", n},
           {"seed", seed},
           {"T", T},
           {"direct", to_json(direct)},
           {"girko", to_json(a.value)},
           {"girko_doubled", to_json(b.value)},
           {"relative_error", ea / std::abs(direct)},
           {"relative_error_doubled", eb / std::abs(direct)},
           {"excised_cells", a.excised_cells},
           {"laplacian_sum", a.laplacian_sum},
           {"regime_split_z05",
            {{"eta0", split.eta0},
             {"eta_c", split.eta_c},
             {"T", split.T},
             {"pieces", split.pieces},
             {"closed_total", eta_integral_closed(hermitize(X, cplx(0.5, 0.0)), split.T)}}}};
    emit(out, o.dump(2) + "\n");
    return 0;
}

int cmd_local_law(int n, double zr, double zi, int trials, std::uint64_t seed, double eta_min, double eta_max,
                  int points, const std::string& curve) {
    if (points < 2 || trials < 1) throw std::invalid_argument("local-law: need points >= 2 and trials >= 1");
    auto sampler = make_sampler(gaussian_pair(Field::complex, 0.0, 0.0));
    std::vector<double> etas(points), mean(points, 0.0), x, y;
    for (int k = 0; k < points; ++k) etas[k] = eta_min * std::pow(eta_max / eta_min, double(k) / (points - 1));
    for (int t = 0; t < trials; ++t) {
        auto h = hermitize(sample_pair(n, sampler, seed, t).X1, cplx(zr, zi));
        for (int k = 0; k < points; ++k) {
            auto r = local_law_residual(h, etas[k]);
            mean[k] += r.residual / trials;
            x.push_back(std::log(n * etas[k]));
            y.push_back(std::log(r.residual));
        }
    }
    auto fit = least_squares(x, y);
    if (!curve.empty()) {
        std::ostringstream os;
        os << "eta,n_eta,mean_residual\n";
        for (int k = 0; k < points; ++k)
            os << csv_num(etas[k]) << ',' << csv_num(n * etas[k]) << ',' << csv_num(mean[k]) << '\n';
        write_text_file(curve, os.str());
    }
    json o{{"schema_version", kSchemaVersion}, {"n", n},         {"z", to_json(cplx(zr, zi))},
           {"trials", trials},                 {"slope", fit.slope}, {"slope_se", fit.slope_se},
           {"intercept", fit.intercept}};
    std::cout << o.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& input) {
    fs::path p(input);
    if (fs::is_directory(p)) p /= "summary.json";
    ExperimentSummary s = read_summary(p.string());
    std::printf("schema_version      %d\n", s.schema_version);
    std::printf("n, trials, seed     %d, %d, %llu\n", s.n, s.trials, (unsigned long long)s.seed);
    std::printf("empirical variance  %.17g +- %.17g\n", s.empirical_variance, s.empirical_variance_se);
    if (s.has_prediction) {
        std::printf("predicted variance  %.17g +- %.17g (z = %.4g)\n", s.predicted_variance, s.predicted_variance_error,
                    s.variance_z);
        std::printf("correlation         %.17g vs %.17g (z = %.4g)\n", s.correlation_empirical, s.correlation_predicted,
                    s.correlation_z);
        std::printf("cross covariance z  %.4g\n", s.cov12_z);
    }
    std::printf("skewness            %.17g\n", s.skewness);
    std::printf("excess kurtosis     %.17g\n", s.excess_kurtosis);
    std::printf("ks distance         %.17g\n", s.ks_distance);
    std::printf("gaussianity         %s\n", s.gaussianity_pass ? "pass" : "fail");
    std::printf("runtime seconds     %.6g\n", s.runtime_seconds);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlated non-Hermitian pairs: linear eigenvalue statistics"};
    app.require_subcommand(1);

    std::string config, out_dir;
    int threads = 0;
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment from a JSON config");
    sim->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory (overrides outputs.dir)");
    sim->add_option("--threads", threads, "worker threads (default: CORRLES_THREADS or all cores)");

    std::string params, kernel_out, marginal;
    auto* ker = app.add_subcommand("kernel", "evaluate the limiting covariance C(f, g)");
    ker->add_option("--params", params, "kernel params (JSON)")->required()->check(CLI::ExistingFile);
    ker->add_option("--out", kernel_out, "output JSON (default stdout)");
    ker->add_option("--marginal", marginal, "CSV of per-cell contributions");

    double rmax = 3.0, eta_min = 1e-8, eta_max = 1e3;
    int nr = 40, neta = 40;
    std::string grid_out;
    auto* mde = app.add_subcommand("mde-grid", "tabulate the MDE solution on a (|z|, eta) grid as CSV");
    mde->add_option("--r-max", rmax);
    mde->add_option("--nr", nr);
    mde->add_option("--eta-min", eta_min);
    mde->add_option("--eta-max", eta_max);
    mde->add_option("--neta", neta);
    mde->add_option("--out", grid_out, "output CSV (default stdout)");

    int gn = 16, grid = 200;
    std::uint64_t gseed = 1;
    double T = 1e3, half_width = 1.6;
    std::string fspec, girko_out;
    auto* gir = app.add_subcommand("girko-check", "compare the Girko representation with the direct statistic");
    gir->add_option("--n", gn);
    gir->add_option("--seed", gseed);
    gir->add_option("--grid", grid, "z-grid nodes per axis (also run at twice this)");
    gir->add_option("--T", T);
    gir->add_option("--half-width", half_width);
    gir->add_option("--f", fspec, "test function JSON or file (default z^2 bump)");
    gir->add_option("--out", girko_out, "output JSON (default stdout)");

    int ln = 256, ltrials = 20, points = 9;
    double zr = 0.5, zi = 0.0, lmin = 1e-2, lmax = 1.0;
    std::uint64_t lseed = 1;
    std::string curve;
    auto* loc = app.add_subcommand("local-law", "fit the decay of the averaged local law residual");
    loc->add_option("--n", ln);
    loc->add_option("--z-re", zr);
    loc->add_option("--z-im", zi);
    loc->add_option("--trials", ltrials);
    loc->add_option("--seed", lseed);
    loc->add_option("--eta-min", lmin);
    loc->add_option("--eta-max", lmax);
    loc->add_option("--points", points);
    loc->add_option("--curve", curve, "CSV of the mean residual curve");

    std::string input;
    auto* rep = app.add_subcommand("report", "print a stored experiment summary");
    rep->add_option("input", input, "summary.json or its directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sim) return cmd_simulate(config, out_dir, threads);
        if (*ker) return cmd_kernel(params, kernel_out, marginal);
        if (*mde) return cmd_mde_grid(rmax, nr, eta_min, eta_max, neta, grid_out);
        if (*gir) return cmd_girko(gn, gseed, grid, T, half_width, fspec, girko_out);
        if (*loc) return cmd_local_law(ln, zr, zi, ltrials, lseed, lmin, lmax, points, curve);
        if (*rep) return cmd_report(input);
    } catch (const std::exception& e) {
        std::cerr << "corrles: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
