#include "corrles/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace corrles {

namespace {

constexpr double kAtomTol = 1e-12;

std::vector<JointAtom> flatten(const CorrelationSpec& s) {
    if (s.construction == Construction::mixture) return s.atoms;
    std::vector<JointAtom> out;
    out.reserve(s.zeta.size() * s.theta.size());
    for (const auto& z : s.zeta)
        for (const auto& t : s.theta) out.push_back({z.value + t.value, z.value - t.value, z.prob * t.prob});
    return out;
}

void check_probs(const std::vector<Atom>& a, const char* what) {
    if (a.empty()) throw InfeasibleSpec(std::string(what) + ": no atoms");
    double s = 0.0;
    for (const auto& x : a) {
        if (!(x.prob >= 0.0)) throw InfeasibleSpec(std::string(what) + ": negative probability");
        s += x.prob;
    }
    if (std::abs(s - 1.0) > kAtomTol) {
        std::ostringstream os;
        os << what << ": probabilities sum to " << s;
        throw InfeasibleSpec(os.str());
    }
}

struct AtomMoments {
    cplx mean[2]{};
    double second[2]{};
    cplx pseudo[2]{};  // E chi^2
    cplx gamma{}, rho{};
    double abs4[2][2]{};  // E|chi_t|^2 |chi_s|^2
    double m8 = 0.0;
};

AtomMoments atom_moments(const std::vector<JointAtom>& atoms) {
    AtomMoments m;
    for (const auto& a : atoms) {
        const cplx x[2] = {a.x1, a.x2};
        for (int t = 0; t < 2; ++t) {
            m.mean[t] += a.prob * x[t];
            m.second[t] += a.prob * std::norm(x[t]);
            m.pseudo[t] += a.prob * x[t] * x[t];
            for (int s = 0; s < 2; ++s) m.abs4[t][s] += a.prob * std::norm(x[t]) * std::norm(x[s]);
        }
        m.gamma += a.prob * a.x1 * std::conj(a.x2);
        m.rho += a.prob * a.x1 * a.x2;
    }
    for (int t = 0; t < 2; ++t) {
        double e8 = 0.0;
        for (const auto& a : atoms) e8 += a.prob * std::pow(std::norm(t == 0 ? a.x1 : a.x2), 4);
        m.m8 = std::max(m.m8, e8);
    }
    return m;
}

void validate_atoms(const CorrelationSpec& s, const std::vector<JointAtom>& atoms) {
    double tot = 0.0;
    for (const auto& a : atoms) {
        if (!(a.prob >= 0.0)) throw InfeasibleSpec("mixture: negative probability");
        tot += a.prob;
        if (s.field == Field::real && (a.x1.imag() != 0.0 || a.x2.imag() != 0.0))
            throw InfeasibleSpec("real field with complex atom values");
    }
    if (atoms.empty() || std::abs(tot - 1.0) > kAtomTol) {
        std::ostringstream os;
        os << "joint atom probabilities sum to " << tot;
        throw InfeasibleSpec(os.str());
    }
    AtomMoments m = atom_moments(atoms);
    const double g1 = s.field == Field::real ? 1.0 : 0.0;
    for (int t = 0; t < 2; ++t) {
        std::ostringstream os;
        if (std::abs(m.mean[t]) > 1e-10) os << "E chi" << t + 1 << " = " << m.mean[t] << " != 0";
        else if (std::abs(m.second[t] - 1.0) > 1e-10) os << "E|chi" << t + 1 << "|^2 = " << m.second[t] << " != 1";
        else if (std::abs(m.pseudo[t] - g1) > 1e-10) os << "E chi" << t + 1 << "^2 = " << m.pseudo[t] << " != " << g1;
        if (!os.str().empty()) throw InfeasibleSpec(os.str());
    }
}

} // namespace

const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

const char* to_string(Construction c) {
    switch (c) {
    case Construction::gaussian_pair: return "gaussian-pair";
    case Construction::shifted_pair: return "shifted-pair";
    case Construction::mixture: return "mixture";
    }
    return "?";
}

EntrySampler::EntrySampler(const CorrelationSpec& spec)
    : spec_(spec), field_(spec.field), gaussian_(spec.construction == Construction::gaussian_pair) {
    if (gaussian_) {
        const double g = spec.target_gamma, r = spec.target_rho;
        if (!std::isfinite(g) || !std::isfinite(r)) throw InfeasibleSpec("non-finite correlation target");
        if (std::abs(g) > 1.0) throw InfeasibleSpec("|gamma| > 1");
        if (std::abs(r) > 1.0) throw InfeasibleSpec("|rho| > 1");
        if (field_ == Field::real) {
            if (std::abs(r - g) > 1e-15) throw InfeasibleSpec("real field forces rho = gamma");
            ca_ = g;
        } else {
            ca_ = g + r;
            cb_ = g - r;
            if (std::abs(ca_) > 1.0 || std::abs(cb_) > 1.0) {
                std::ostringstream os;
                os << "component correlations gamma+rho = " << ca_ << ", gamma-rho = " << cb_
                   << " are not a valid correlation (need |.| <= 1)";
                throw InfeasibleSpec(os.str());
            }
        }
        return;
    }
    if (spec.construction == Construction::shifted_pair) {
        check_probs(spec.zeta, "zeta");
        check_probs(spec.theta, "theta");
    }
    joint_ = flatten(spec);
    validate_atoms(spec, joint_);
    cdf_.resize(joint_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < joint_.size(); ++k) cdf_[k] = (acc += joint_[k].prob);
    cdf_.back() = 1.0;
}

std::pair<cplx, cplx> EntrySampler::draw(Philox& rng) const {
    if (gaussian_) {
        if (field_ == Field::real) {
            double a1 = rng.normal(), e = rng.normal();
            double a2 = ca_ * a1 + std::sqrt(std::max(0.0, 1.0 - ca_ * ca_)) * e;
            return {cplx(a1), cplx(a2)};
        }
        double a1 = rng.normal(), ea = rng.normal(), b1 = rng.normal(), eb = rng.normal();
        double a2 = ca_ * a1 + std::sqrt(std::max(0.0, 1.0 - ca_ * ca_)) * ea;
        double b2 = cb_ * b1 + std::sqrt(std::max(0.0, 1.0 - cb_ * cb_)) * eb;
        const double s = std::numbers::sqrt2 / 2.0;
        return {cplx(a1, b1) * s, cplx(a2, b2) * s};
    }
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t k = std::min<std::size_t>(it - cdf_.begin(), joint_.size() - 1);
    return {joint_[k].x1, joint_[k].x2};
}

EntrySampler make_sampler(const CorrelationSpec& spec) { return EntrySampler(spec); }

CorrelationSummary theoretical_cumulants(const CorrelationSpec& spec) {
    EntrySampler s(spec);  // validates
    CorrelationSummary out;
    out.gamma1 = spec.field == Field::real ? 1 : 0;
    if (spec.construction == Construction::gaussian_pair) {
        out.gamma = spec.target_gamma;
        out.rho = spec.field == Field::real ? spec.target_gamma : spec.target_rho;
        out.moment8 = spec.field == Field::real ? 105.0 : 24.0;
        return out;
    }
    AtomMoments m = atom_moments(s.joint_atoms());
    out.gamma = m.gamma;
    out.rho = m.rho;
    out.moment8 = m.m8;
    const cplx r = m.rho, g = m.gamma;
    for (int t = 0; t < 2; ++t)
        for (int u = 0; u < 2; ++u) {
            cplx pr = t == u ? m.pseudo[t] : r;
            double sec = t == u ? m.second[t] * m.second[t] : std::norm(g);
            out.kappa4[t][u] = m.abs4[t][u] - m.second[t] * m.second[u] - std::norm(pr) - sec;
        }
    return out;
}

CumulantEstimate estimate_cumulants(const EntrySampler& sampler, std::size_t n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 10000) throw std::invalid_argument("estimate_cumulants needs n_samples >= 1e4");
    std::vector<cplx> x1(n_samples), x2(n_samples);
    Philox rng(seed, 0);
    for (std::size_t k = 0; k < n_samples; ++k) std::tie(x1[k], x2[k]) = sampler.draw(rng);
    const double N = double(n_samples);

    auto mean_se = [&](auto g) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < n_samples; ++k) {
            double v = g(k);
            s += v;
            s2 += v * v;
        }
        double mu = s / N;
        double var = std::max(0.0, (s2 - N * mu * mu) / (N - 1.0));
        return std::pair{mu, std::sqrt(var / N)};
    };

    CumulantEstimate est;
    est.n_samples = n_samples;
    est.value.gamma1 = sampler.field() == Field::real ? 1 : 0;
    const std::vector<cplx>* X[2] = {&x1, &x2};

    auto [rr, rr_se] = mean_se([&](std::size_t k) { return (x1[k] * x2[k]).real(); });
    auto [ri, ri_se] = mean_se([&](std::size_t k) { return (x1[k] * x2[k]).imag(); });
    auto [gr, gr_se] = mean_se([&](std::size_t k) { return (x1[k] * std::conj(x2[k])).real(); });
    auto [gi, gi_se] = mean_se([&](std::size_t k) { return (x1[k] * std::conj(x2[k])).imag(); });
    est.value.rho = {rr, ri};
    est.rho_se = {rr_se, ri_se};
    est.value.gamma = {gr, gi};
    est.gamma_se = {gr_se, gi_se};

    double m8 = 0.0;
    double sec[2], pre[2], pim[2];
    for (int t = 0; t < 2; ++t) {
        const auto& v = *X[t];
        double s = 0.0, s8 = 0.0, s2r = 0.0, s2i = 0.0;
        cplx mu = 0.0;
        for (std::size_t k = 0; k < n_samples; ++k) {
            double a = std::norm(v[k]);
            s += a;
            s8 += a * a * a * a;
            mu += v[k];
            s2r += (v[k] * v[k]).real();
            s2i += (v[k] * v[k]).imag();
        }
        sec[t] = s / N;
        pre[t] = s2r / N;
        pim[t] = s2i / N;
        est.second[t] = sec[t];
        est.mean_abs[t] = std::abs(mu / N);
        m8 = std::max(m8, s8 / N);
    }
    est.value.moment8 = m8;

    // kappa4 via the delta method: kappa = E[ab] - E a E b - |E[x y]|^2 - |E[x conj y]|^2
    for (int t = 0; t < 2; ++t)
        for (int s = t; s < 2; ++s) {
            const auto& a = *X[t];
            const auto& b = *X[s];
            double sab = 0.0;
            cplx e = 0.0, f = 0.0;
            for (std::size_t k = 0; k < n_samples; ++k) {
                sab += std::norm(a[k]) * std::norm(b[k]);
                e += a[k] * b[k];
                f += a[k] * std::conj(b[k]);
            }
            sab /= N;
            e /= N;
            f /= N;
            if (t == s) e = {pre[t], pim[t]};
            double kap = sab - sec[t] * sec[s] - std::norm(e) - std::norm(f);
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t k = 0; k < n_samples; ++k) {
                double na = std::norm(a[k]), nb = std::norm(b[k]);
                cplx ek = a[k] * b[k], fk = a[k] * std::conj(b[k]);
                double inf = (na * nb - sab) - sec[s] * (na - sec[t]) - sec[t] * (nb - sec[s]) -
                             2.0 * (e.real() * (ek.real() - e.real()) + e.imag() * (ek.imag() - e.imag())) -
                             2.0 * (f.real() * (fk.real() - f.real()) + f.imag() * (fk.imag() - f.imag()));
                s1 += inf;
                s2 += inf * inf;
            }
            double var = std::max(0.0, (s2 - s1 * s1 / N) / (N - 1.0));
            est.value.kappa4[t][s] = est.value.kappa4[s][t] = kap;
            est.kappa4_se[t][s] = est.kappa4_se[s][t] = std::sqrt(var / N);
        }
    return est;
}

MatrixPair sample_pair(int n, const EntrySampler& sampler, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw std::invalid_argument("sample_pair: n must be >= 1");
    MatrixPair p;
    p.n = n;
    p.seed = seed;
    p.stream = stream;
    p.X1.resize(n, n);
    p.X2.resize(n, n);
    Philox rng(seed, stream);
    const double scale = 1.0 / std::sqrt(double(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto [a, b] = sampler.draw(rng);
            p.X1(i, j) = a * scale;
            p.X2(i, j) = b * scale;
        }
    return p;
}

Eigen::MatrixXcd exchange_matrix(int n) {
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) J(i, n - 1 - i) = 1.0;
    return J;
}

Eigen::MatrixXcd centrosymmetric_embed(const Eigen::MatrixXcd& X1, const Eigen::MatrixXcd& X2) {
    const int n = int(X1.rows());
    if (X1.cols() != n || X2.rows() != n || X2.cols() != n)
        throw std::invalid_argument("centrosymmetric_embed: blocks must be square and equal size");
    Eigen::MatrixXcd J = exchange_matrix(n);
    Eigen::MatrixXcd A = (X1 + X2) / 2.0;
    Eigen::MatrixXcd B = (X1 - X2) * J / 2.0;
    Eigen::MatrixXcd C(2 * n, 2 * n);
    C << A, B, J * B * J, J * A * J;
    return C;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> centrosymmetric_split(const Eigen::MatrixXcd& C, double tol) {
    if (C.rows() != C.cols() || C.rows() % 2 != 0)
        throw std::invalid_argument("centrosymmetric_split: need a square matrix of even size");
    const int n = int(C.rows()) / 2;
    Eigen::MatrixXcd J2 = exchange_matrix(2 * n);
    double dev = (C - J2 * C * J2).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
    if (dev > tol * scale) {
        std::ostringstream os;
        os << "matrix is not centrosymmetric: max |C - JCJ| = " << dev;
        throw NotCentrosymmetric(os.str(), dev);
    }
    Eigen::MatrixXcd J = exchange_matrix(n);
    Eigen::MatrixXcd A = C.topLeftCorner(n, n), B = C.topRightCorner(n, n);
    return {A + B * J, A - B * J};
}

CorrelationSpec gaussian_pair(Field field, double gamma, double rho) {
    CorrelationSpec s;
    s.field = field;
    s.construction = Construction::gaussian_pair;
    s.target_gamma = gamma;
    s.target_rho = rho;
    std::ostringstream os;
    os << "gaussian-" << to_string(field) << "-g" << gamma;
    if (field == Field::complex) os << "-r" << rho;
    s.name = os.str();
    return s;
}

CorrelationSpec gaussian_pair(Field field, double gamma) {
    return gaussian_pair(field, gamma, field == Field::real ? gamma : 0.0);
}

CorrelationSpec rademacher_shifted_pair(Field field) {
    CorrelationSpec s;
    s.field = field;
    s.construction = Construction::shifted_pair;
    s.name = std::string("shifted-rademacher-") + to_string(field);
    if (field == Field::real) {
        const double h = std::numbers::sqrt2 / 2.0;
        s.zeta = {{h, 0.5}, {-h, 0.5}};
    } else {
        for (double a : {0.5, -0.5})
            for (double b : {0.5, -0.5}) s.zeta.push_back({cplx(a, b), 0.25});
    }
    s.theta = s.zeta;
    s.target_gamma = s.target_rho = 0.0;
    return s;
}

// independent coordinates with kappa4 = +1 on the diagonal:
// real  {0 w.p. 3/4, +-2 w.p. 1/8}; complex {0 w.p. 2/3, sqrt3 * i^k w.p. 1/12}
CorrelationSpec heavy_atom_pair(Field field) {
    std::vector<Atom> marg;
    if (field == Field::real) {
        marg = {{0.0, 0.75}, {2.0, 0.125}, {-2.0, 0.125}};
    } else {
        marg.push_back({0.0, 2.0 / 3.0});
        const double r = std::sqrt(3.0);
        for (cplx ph : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) marg.push_back({r * ph, 1.0 / 12.0});
    }
    CorrelationSpec s;
    s.field = field;
    s.construction = Construction::mixture;
    s.name = std::string("heavy-atom-") + to_string(field);
    for (const auto& a : marg)
        for (const auto& b : marg) s.atoms.push_back({a.value, b.value, a.prob * b.prob});
    return s;
}

std::vector<CorrelationSpec> shipped_specs() {
    return {gaussian_pair(Field::real, 0.0),       gaussian_pair(Field::real, 0.5),
            gaussian_pair(Field::real, 0.9),       gaussian_pair(Field::real, 1.0),
            gaussian_pair(Field::complex, 0.0, 0.0), gaussian_pair(Field::complex, 0.8, 0.0),
            gaussian_pair(Field::complex, 0.3, 0.2), rademacher_shifted_pair(Field::real),
            rademacher_shifted_pair(Field::complex), heavy_atom_pair(Field::real),
            heavy_atom_pair(Field::complex)};
}

} // namespace corrles
