#include "corrles/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace corrles {

void ExperimentConfig::validate() const {
    if (trials < 2) throw std::invalid_argument("ExperimentConfig: trials must be >= 2");
    if (n < 8) throw std::invalid_argument("ExperimentConfig: n must be >= 8");
    quad.validate();
    EntrySampler check(spec);
    (void)check;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* e = std::getenv("CORRLES_THREADS")) {
        int v = std::atoi(e);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<cplx> centered(const std::vector<cplx>& x) {
    cplx m = 0.0;
    for (auto v : x) m += v;
    m /= double(x.size());
    std::vector<cplx> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - m;
    return out;
}

// entries E[a_s conj(a_t)] of already centered samples, divisor N - 1
Cov2 empirical_covariance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::vector<cplx>* X[2] = {&a, &b};
    Cov2 C{};
    const double den = double(a.size()) - 1.0;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) acc += (*X[s])[k] * std::conj((*X[t])[k]);
            C[s][t] = acc / den;
        }
    C[1][0] = std::conj(C[0][1]);
    return C;
}

PolarizedPrediction predict_joint(const TestFunction& f, const KernelParams& params, const QuadConfig& quad) {
    PolarizedPrediction p;
    KernelIntegrals fine = kernel_integrals(f, f, params.summary, quad);
    KernelIntegrals coarse;
    if (quad.estimate_error) coarse = kernel_integrals(f, f, params.summary, quad.coarsened());
    auto at = [&](const KernelIntegrals& I, cplx c, cplx d) {
        KernelParams q = params;
        q.c = c;
        q.d = d;
        return assemble(I, q).total.real();
    };
    p.v10 = at(fine, 1.0, 0.0);
    p.v01 = at(fine, 0.0, 1.0);
    p.v11 = at(fine, 1.0, 1.0);
    p.combined = at(fine, params.c, params.d);
    const double cov = 0.5 * (p.v11 - p.v10 - p.v01);
    p.cov = {{{p.v10, cov}, {cov, p.v01}}};
    if (quad.estimate_error) {
        double e10 = std::abs(at(coarse, 1.0, 0.0) - p.v10);
        double e01 = std::abs(at(coarse, 0.0, 1.0) - p.v01);
        double ec = std::abs(0.5 * (at(coarse, 1.0, 1.0) - at(coarse, 1.0, 0.0) - at(coarse, 0.0, 1.0)) - cov);
        p.cov_error = {{{e10, ec}, {ec, e01}}};
        p.combined_error = std::abs(at(coarse, params.c, params.d) - p.combined);
        p.warning = p.combined_error > 0.1 * std::abs(p.combined);
    }
    p.detail.integrals = fine;
    p.detail.parts = assemble(fine, params);
    p.detail.value = p.detail.parts.total;
    p.detail.error_estimate = p.combined_error;
    p.detail.warning = p.warning;
    p.detail.nodes = fine.nodes;
    p.detail.excluded_fraction = fine.excluded_fraction;
    return p;
}

JointCovarianceComparison joint_covariance(const std::vector<cplx>& L1, const std::vector<cplx>& L2,
                                           const PolarizedPrediction& pred) {
    if (L1.size() != L2.size() || L1.size() < 100)
        throw std::invalid_argument("joint_covariance needs >= 100 paired trials");
    JointCovarianceComparison j;
    auto a = centered(L1), b = centered(L2);
    j.empirical = empirical_covariance(a, b);
    j.predicted = pred.cov;
    const double den = double(L1.size()) - 1.0;
    const double s11 = j.empirical[0][0].real(), s22 = j.empirical[1][1].real();
    const double s12 = j.empirical[0][1].real();
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            double se = s == t ? j.empirical[s][s].real() * std::sqrt(2.0 / den)
                               : std::sqrt((s11 * s22 + s12 * s12) / den);
            j.se[s][t] = se;
            double diff = (j.empirical[s][t] - j.predicted[s][t]).real();
            j.zscore[s][t] = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
        }
    if (s11 > 0.0 && s22 > 0.0) j.correlation_empirical = s12 / std::sqrt(s11 * s22);
    const double p11 = pred.cov[0][0].real(), p22 = pred.cov[1][1].real();
    if (p11 > 0.0 && p22 > 0.0) j.correlation_predicted = pred.cov[0][1].real() / std::sqrt(p11 * p22);
    const double r = j.correlation_empirical;
    j.correlation_se = (1.0 - r * r) / std::sqrt(std::max(1.0, den));
    double dr = r - j.correlation_predicted;
    j.correlation_z = j.correlation_se > 0.0 ? dr / j.correlation_se : (dr == 0.0 ? 0.0 : INFINITY);
    return j;
}

JointCovarianceComparison joint_covariance(const std::vector<cplx>& L1, const std::vector<cplx>& L2,
                                           const TestFunction& f, const KernelParams& params,
                                           const QuadConfig& quad) {
    return joint_covariance(L1, L2, predict_joint(f, params, quad));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult r;
    r.config = cfg;
    const EntrySampler sampler(cfg.spec);
    const int T = cfg.trials;
    r.L1_raw.resize(T);
    r.L2_raw.resize(T);
    r.combined_raw.resize(T);
    std::vector<int> attempts(T, 0);
    constexpr int kMaxAttempts = 8;

    auto run_trial = [&](int k) {
        for (int a = 0; a < kMaxAttempts; ++a) {
            try {
                MatrixPair p = sample_pair(cfg.n, sampler, cfg.seed, trial_stream(std::uint64_t(k), std::uint64_t(a)));
                LesTriple l = combined_les(cfg.f, p, cfg.c, cfg.d);
                r.L1_raw[k] = l.L1;
                r.L2_raw[k] = l.L2;
                r.combined_raw[k] = l.combined;
                attempts[k] = a;
                return;
            } catch (const EigenFailure&) {
            }
        }
        attempts[k] = kMaxAttempts;
    };

    r.threads = std::min(resolve_threads(cfg.threads), T);
    if (r.threads <= 1) {
        for (int k = 0; k < T; ++k) run_trial(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < r.threads; ++w)
            pool.emplace_back([&] {
                for (int k; (k = next.fetch_add(1)) < T;) run_trial(k);
            });
        for (auto& th : pool) th.join();
    }
    for (int k = 0; k < T; ++k) {
        if (attempts[k] >= kMaxAttempts) throw EigenFailure("trial failed after repeated resampling");
        r.resampled += attempts[k];
    }
    if (r.resampled > 0.01 * T) throw EigenFailure("eigensolver failures exceed 1% of trials");

    r.L1_centered = centered(r.L1_raw);
    r.L2_centered = centered(r.L2_raw);
    r.combined_centered.resize(T);
    // combined centered from the parts, so the identity holds exactly per trial
    for (int k = 0; k < T; ++k) r.combined_centered[k] = cfg.c * r.L1_centered[k] + cfg.d * r.L2_centered[k];
    r.empirical_cov = empirical_covariance(r.L1_centered, r.L2_centered);
    double acc = 0.0;
    for (auto v : r.combined_centered) acc += std::norm(v);
    r.empirical_variance = acc / (T - 1.0);
    r.empirical_variance_se = r.empirical_variance * std::sqrt(2.0 / (T - 1.0));

    if (T >= 100) {
        std::vector<double> re(T), im(T);
        for (int k = 0; k < T; ++k) {
            re[k] = r.combined_centered[k].real();
            im[k] = r.combined_centered[k].imag();
        }
        r.gauss_re = gaussianity_tests(re);
        r.gauss_im = gaussianity_tests(im);
    } else {
        r.gauss_re.degenerate = r.gauss_im.degenerate = true;
    }

    if (cfg.predict && !cfg.f.is_zero()) {
        KernelParams kp;
        kp.c = cfg.c;
        kp.d = cfg.d;
        kp.summary = theoretical_cumulants(cfg.spec);
        kp.cross = cfg.cross;
        r.prediction = predict_joint(cfg.f, kp, cfg.quad);
        r.has_prediction = true;
        double den = r.empirical_variance_se;
        double diff = r.empirical_variance - r.prediction.combined;
        r.variance_z = den > 0.0 ? diff / den : (diff == 0.0 ? 0.0 : INFINITY);
        if (T >= 100) r.joint = joint_covariance(r.L1_raw, r.L2_raw, r.prediction);
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace corrles
