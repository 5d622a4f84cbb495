#include "corrles/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace corrles {

namespace {

constexpr double kSingularD = 1e-10;

MdePoint conj_point(MdePoint p) {
    p.z = std::conj(p.z);
    return p;
}

struct Cell {
    cplx z;
    cplx wf, wg;  // h^2 * cell-averaged Laplacians, wg already conjugated
    bool inside;  // |z| < 1 + eps
};

// eta-node data for one cell, real reduction m = i v
struct CellEta {
    std::vector<double> v, b, bp, A, Ap, C, Cp, beta, r, s;
    double gl = 0.0, gn = 0.0, guu = 0.0;
};

struct PairSums {
    double v = 0.0, x = 0.0, l = 0.0, n = 0.0, uu = 0.0;
};

struct Prepared {
    std::vector<Cell> cells;
    std::vector<CellEta> eta;
    std::vector<double> w;  // eta weights including the Jacobian
    double area = 0.0;
    int excluded_cells = 0;
    double excluded_weight = 0.0;
    double total_weight = 0.0;
};

Prepared prepare(const TestFunction& f, const TestFunction& g, const QuadConfig& cfg) {
    Prepared P;
    const int N = cfg.z_nodes;
    const double h = 2.0 * cfg.z_half_width / N;
    P.area = h * h;
    const double eps = cfg.exclusion_radius;

    std::vector<double> t, wt;
    if (cfg.log_spacing) {
        std::tie(t, wt) = gauss_legendre(cfg.eta_nodes, std::log(cfg.eta_min), std::log(cfg.eta_max));
        for (std::size_t k = 0; k < t.size(); ++k) {
            t[k] = std::exp(t[k]);
            wt[k] *= t[k];
        }
    } else {
        std::tie(t, wt) = gauss_legendre(cfg.eta_nodes, cfg.eta_min, cfg.eta_max);
    }
    P.w = wt;

    std::vector<Cell> all;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            cplx z(-cfg.z_half_width + (a + 0.5) * h, -cfg.z_half_width + (b + 0.5) * h);
            cplx wf = f.is_zero() ? 0.0 : f.laplacian_cell_average(z, h, cfg.laplacian_subsamples) * P.area;
            cplx wg = g.is_zero() ? 0.0 : std::conj(g.laplacian_cell_average(z, h, cfg.laplacian_subsamples)) * P.area;
            if (wf == cplx(0.0) && wg == cplx(0.0)) continue;
            all.push_back({z, wf, wg, std::abs(z) < 1.0 + eps});
        }
    double sf = 0.0, sg = 0.0, xf = 0.0, xg = 0.0;
    for (const auto& c : all) {
        sf += std::abs(c.wf);
        sg += std::abs(c.wg);
        if (std::abs(1.0 - std::abs(c.z)) <= eps) {
            ++P.excluded_cells;
            xf += std::abs(c.wf);
            xg += std::abs(c.wg);
        } else {
            P.cells.push_back(c);
        }
    }
    P.total_weight = sf * sg;
    P.excluded_weight = sf * sg - (sf - xf) * (sg - xg);

    const int M = int(t.size());
    P.eta.resize(P.cells.size());
    for (std::size_t k = 0; k < P.cells.size(); ++k) {
        CellEta& e = P.eta[k];
        for (auto* vec : {&e.v, &e.b, &e.bp, &e.A, &e.Ap, &e.C, &e.Cp, &e.beta, &e.r, &e.s}) vec->resize(M);
        const double a2 = std::norm(P.cells[k].z);
        for (int m = 0; m < M; ++m) {
            MdePoint p = mde_point(P.cells[k].z, t[m]);
            const double v = p.im_m, u = p.u.real(), up = p.d_eta_u.real(), vp = p.d_eta_m.imag();
            e.v[m] = v;
            e.b[m] = v * v;
            e.bp[m] = 2.0 * v * vp;
            e.A[m] = u * u * a2;
            e.Ap[m] = 2.0 * u * up * a2;
            e.C[m] = u;
            e.Cp[m] = up;
            e.beta[m] = p.beta.real();
            e.r[m] = -v * v - u * u * a2;
            e.s[m] = u * u * a2 - v * v;
            e.gl += wt[m] * v * u / e.beta[m];
            e.gn += wt[m] * vp;
            e.guu += wt[m] * v * vp;
        }
    }
    return P;
}

// closed-form V summed over the eta tensor grid, real reduction
double v_closed_sum(const CellEta& I, const CellEta& J, const std::vector<double>& w, double R) {
    const int M = int(w.size());
    double acc = 0.0;
    for (int a = 0; a < M; ++a) {
        double row = 0.0;
        for (int b = 0; b < M; ++b) {
            const double q = I.C[a] * J.C[b];
            const double P2 = I.A[a] * J.A[b];
            const double D = 1.0 + P2 - I.b[a] * J.b[b] - 2.0 * q * R;
            const double num = 2.0 * q * R + P2 * (I.r[a] * J.r[b] - 4.0) + I.s[a] * J.s[b];
            row += w[b] * num / (J.beta[b] * D * D) * J.v[b];
        }
        acc += w[a] * row * I.v[a] / I.beta[a];
    }
    return -2.0 * acc;
}

// 1/2 d_i d_j log D_c with D_c = 1 + c^2 (A_i A_j - b_i b_j) - 2 c R C_i C_j
double v_corr_sum(const CellEta& I, const CellEta& J, const std::vector<double>& w, double R, double c) {
    const int M = int(w.size());
    const double c2 = c * c, cr = 2.0 * c * R;
    double acc = 0.0;
    for (int a = 0; a < M; ++a) {
        double row = 0.0;
        for (int b = 0; b < M; ++b) {
            const double D = 1.0 + c2 * (I.A[a] * J.A[b] - I.b[a] * J.b[b]) - cr * I.C[a] * J.C[b];
            const double Di = c2 * (I.Ap[a] * J.A[b] - I.bp[a] * J.b[b]) - cr * I.Cp[a] * J.C[b];
            const double Dj = c2 * (I.A[a] * J.Ap[b] - I.b[a] * J.bp[b]) - cr * I.C[a] * J.Cp[b];
            const double Dij = c2 * (I.Ap[a] * J.Ap[b] - I.bp[a] * J.bp[b]) - cr * I.Cp[a] * J.Cp[b];
            row += w[b] * (Dij * D - Di * Dj) / (D * D);
        }
        acc += w[a] * row;
    }
    return 0.5 * acc;
}

struct LoopOptions {
    bool real_field;
    double gamma, rho;
    bool want_cross;
};

PairSums pair_sums(const Prepared& P, std::size_t i, std::size_t j, const LoopOptions& o) {
    const CellEta& I = P.eta[i];
    const CellEta& J = P.eta[j];
    const cplx zi = P.cells[i].z, zj = P.cells[j].z;
    const double R = (zi * std::conj(zj)).real();
    const double Rc = (zi * zj).real();
    PairSums s;
    s.v = v_closed_sum(I, J, P.w, R);
    if (o.real_field) s.v += v_closed_sum(I, J, P.w, Rc);
    if (o.want_cross) {
        if (o.gamma != 0.0) s.x += v_corr_sum(I, J, P.w, R, o.gamma);
        if (o.rho != 0.0) s.x += v_corr_sum(I, J, P.w, Rc, o.rho);
    }
    s.l = -2.0 * R * I.gl * J.gl;
    s.n = -2.0 * I.gn * J.gn;
    s.uu = -2.0 * I.guu * J.guu;
    return s;
}

bool pair_excluded(const Cell& a, const Cell& b, bool real_field, double eps) {
    if (!(a.inside || b.inside)) return false;
    if (std::abs(a.z - b.z) <= eps) return true;
    return real_field && std::abs(a.z - std::conj(b.z)) <= eps;
}

template <class Visit>
void pair_loop(const Prepared& P, bool same, const LoopOptions& o, double eps, Visit&& visit) {
    const std::size_t n = P.cells.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!same && P.cells[i].wf == cplx(0.0)) continue;
        for (std::size_t j = same ? i : 0; j < n; ++j) {
            cplx W = P.cells[i].wf * P.cells[j].wg;
            if (same && j != i) W += P.cells[j].wf * P.cells[i].wg;
            if (W == cplx(0.0)) continue;
            if (pair_excluded(P.cells[i], P.cells[j], o.real_field, eps)) {
                visit(i, j, W, nullptr);
                continue;
            }
            PairSums s = pair_sums(P, i, j, o);
            visit(i, j, W, &s);
        }
    }
}

bool same_function(const TestFunction& f, const TestFunction& g) {
    if (&f == &g) return true;
    if (f.r0() != g.r0() || f.r1() != g.r1() || f.terms().size() != g.terms().size()) return false;
    for (std::size_t k = 0; k < f.terms().size(); ++k) {
        const auto &a = f.terms()[k], &b = g.terms()[k];
        if (a.p != b.p || a.q != b.q || a.coef != b.coef) return false;
    }
    return true;
}

} // namespace

void QuadConfig::validate() const {
    if (!(eta_min > 0.0 && eta_min < eta_max)) throw std::invalid_argument("QuadConfig: need 0 < eta_min < eta_max");
    if (!(exclusion_radius > 0.0)) throw std::invalid_argument("QuadConfig: exclusion_radius must be > 0");
    if (eta_nodes < 2 || z_nodes < 2) throw std::invalid_argument("QuadConfig: too few nodes");
    if (!(z_half_width > 0.0)) throw std::invalid_argument("QuadConfig: z_half_width must be > 0");
    if (laplacian_subsamples < 1) throw std::invalid_argument("QuadConfig: laplacian_subsamples must be >= 1");
}

QuadConfig QuadConfig::coarsened() const {
    QuadConfig c = *this;
    c.z_nodes = std::max(2, z_nodes / 2);
    c.laplacian_subsamples = laplacian_subsamples * 2;
    c.eta_nodes = std::max(2, eta_nodes / 2);
    c.estimate_error = false;
    return c;
}

cplx v_term(const MdePoint& pi, const MdePoint& pj, bool* near_singular) {
    const cplx q = pi.u * pj.u;
    const cplx P2 = q * q * std::norm(pi.z) * std::norm(pj.z);
    const cplx mm = pi.m * pj.m;
    const double R = (pi.z * std::conj(pj.z)).real();
    const cplx D = 1.0 + P2 - mm * mm - 2.0 * q * R;
    const cplx ri = pi.m * pi.m - pi.u * pi.u * std::norm(pi.z);
    const cplx rj = pj.m * pj.m - pj.u * pj.u * std::norm(pj.z);
    const cplx si = pi.m * pi.m + pi.u * pi.u * std::norm(pi.z);
    const cplx sj = pj.m * pj.m + pj.u * pj.u * std::norm(pj.z);
    if (near_singular) *near_singular = std::abs(D) < kSingularD;
    const cplx den = pi.beta * pj.beta * D * D;
    return 2.0 * mm * (2.0 * q * R + P2 * (ri * rj - 4.0)) / den + 2.0 * mm * si * sj / den;
}

cplx v_correlated(const MdePoint& pi, const MdePoint& pj, double c) {
    const double R = (pi.z * std::conj(pj.z)).real();
    const cplx Ai = pi.u * pi.u * std::norm(pi.z), Aj = pj.u * pj.u * std::norm(pj.z);
    const cplx Api = 2.0 * pi.u * pi.d_eta_u * std::norm(pi.z), Apj = 2.0 * pj.u * pj.d_eta_u * std::norm(pj.z);
    const cplx Bi = pi.m * pi.m, Bj = pj.m * pj.m;
    const cplx Bpi = 2.0 * pi.m * pi.d_eta_m, Bpj = 2.0 * pj.m * pj.d_eta_m;
    const cplx Ci = pi.u, Cj = pj.u, Cpi = pi.d_eta_u, Cpj = pj.d_eta_u;
    const double c2 = c * c, cr = 2.0 * c * R;
    const cplx D = 1.0 + c2 * (Ai * Aj - Bi * Bj) - cr * Ci * Cj;
    const cplx Di = c2 * (Api * Aj - Bpi * Bj) - cr * Cpi * Cj;
    const cplx Dj = c2 * (Ai * Apj - Bi * Bpj) - cr * Ci * Cpj;
    const cplx Dij = c2 * (Api * Apj - Bpi * Bpj) - cr * Cpi * Cpj;
    return 0.5 * (Dij * D - Di * Dj) / (D * D);
}

cplx hat_v(const MdePoint& pi, const MdePoint& pj, Field field, bool* near_singular) {
    bool f1 = false, f2 = false;
    cplx v = v_term(pi, pj, &f1);
    if (field == Field::real) v += v_term(pi, conj_point(pj), &f2);
    if (near_singular) *near_singular = f1 || f2;
    return v;
}

cplx u_term(const MdePoint& p) {
    return cplx(0.0, 1.0) / std::numbers::sqrt2 * 2.0 * p.m * p.d_eta_m;
}

std::pair<cplx, cplx> l_terms(const MdePoint& p1_i, const MdePoint& p2_i, const MdePoint& p1_j,
                              const MdePoint& p2_j) {
    const double R = (std::conj(p1_i.z) * p1_j.z).real();
    cplx l12 = p1_j.m * p2_i.m * p1_j.u * p2_i.u * R / (p1_j.beta * p2_i.beta);
    cplx l21 = p2_j.m * p1_i.m * p2_j.u * p1_i.u * R / (p2_j.beta * p1_i.beta);
    return {l12, l21};
}

cplx n_term(const MdePoint& p1_i, const MdePoint& p2_i, const MdePoint& p1_j, const MdePoint& p2_j) {
    return p1_i.d_eta_m * p2_j.d_eta_m + p2_i.d_eta_m * p1_j.d_eta_m;
}

cplx cross_two_body(const MdePoint& pi, const MdePoint& pj, const CorrelationSummary& s) {
    cplx x = 0.0;
    if (s.gamma.real() != 0.0) x += v_correlated(pi, pj, s.gamma.real());
    if (s.rho.real() != 0.0) x += v_correlated(pi, conj_point(pj), s.rho.real());
    return x;
}

KernelTerms integrand_L(const KernelParams& prm, const MdePoint& p1_i, const MdePoint& p2_i,
                        const MdePoint& p1_j, const MdePoint& p2_j) {
    const auto& s = prm.summary;
    const Field field = s.gamma1 == 1 ? Field::real : Field::complex;
    KernelTerms t;
    bool f1 = false, f2 = false;
    t.v11 = hat_v(p1_i, p1_j, field, &f1);
    t.v22 = hat_v(p2_i, p2_j, field, &f2);
    t.near_singular = f1 || f2;
    t.v12 = 0.5 * (cross_two_body(p1_i, p2_j, s) + cross_two_body(p2_i, p1_j, s));
    std::tie(t.l12, t.l21) = l_terms(p1_i, p2_i, p1_j, p2_j);
    t.nij = n_term(p1_i, p2_i, p1_j, p2_j);
    t.u1_i = u_term(p1_i);
    t.u1_j = u_term(p1_j);
    t.u2_i = u_term(p2_i);
    t.u2_j = u_term(p2_j);
    const cplx c = prm.c, d = prm.d;
    const auto& k = s.kappa4;
    cplx cross = prm.cross == CrossModel::two_body
                     ? 2.0 * c * d * t.v12
                     : 8.0 * c * d * s.gamma * (t.l12 + t.l21) + 2.0 * c * d * s.rho * t.nij;
    t.L = c * c * t.v11 + d * d * t.v22 + cross + c * c * k[0][0] * t.u1_i * t.u1_j +
          d * d * k[1][1] * t.u2_i * t.u2_j + c * d * k[0][1] * (t.u1_i * t.u2_j + t.u1_j * t.u2_i);
    return t;
}

KernelIntegrals kernel_integrals(const TestFunction& f, const TestFunction& g, const CorrelationSummary& s,
                                 const QuadConfig& cfg) {
    cfg.validate();
    KernelIntegrals out;
    out.eta_nodes = cfg.eta_nodes;
    if (f.is_zero() || g.is_zero()) return out;
    const bool same = same_function(f, g);
    Prepared P = prepare(f, g, cfg);
    out.nodes = int(P.cells.size());
    out.excluded_cells = P.excluded_cells;
    LoopOptions o{s.gamma1 == 1, s.gamma.real(), s.rho.real(), true};
    double excl = P.excluded_weight;
    cplx V = 0.0, X = 0.0, L = 0.0, Nn = 0.0, UU = 0.0;
    pair_loop(P, same, o, cfg.exclusion_radius, [&](std::size_t, std::size_t, cplx W, const PairSums* ps) {
        if (!ps) {
            excl += std::abs(W);
            ++out.excluded_pairs;
            return;
        }
        V += W * ps->v;
        X += W * ps->x;
        L += W * ps->l;
        Nn += W * ps->n;
        UU += W * ps->uu;
    });
    const double pref = -1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
    out.v_hat = pref * V;
    out.cross_two_body = pref * X;
    out.l_sum = pref * L;
    out.n = pref * Nn;
    out.uu = pref * UU;
    out.excluded_fraction = P.total_weight > 0.0 ? std::min(1.0, excl / P.total_weight) : 0.0;
    return out;
}

Contribution assemble(const KernelIntegrals& I, const KernelParams& prm) {
    const cplx c = prm.c, d = prm.d;
    const auto& s = prm.summary;
    const auto& k = s.kappa4;
    Contribution r;
    r.v_hat = (c * c + d * d) * I.v_hat;
    r.cross = prm.cross == CrossModel::two_body ? 2.0 * c * d * I.cross_two_body
                                                : 8.0 * c * d * s.gamma * I.l_sum + 2.0 * c * d * s.rho * I.n;
    r.kappa = (c * c * k[0][0] + d * d * k[1][1] + 2.0 * c * d * k[0][1]) * I.uu;
    r.total = r.v_hat + r.cross + r.kappa;
    return r;
}

CovarianceResult covariance(const TestFunction& f, const TestFunction& g, const KernelParams& prm,
                            const QuadConfig& cfg) {
    CovarianceResult res;
    res.integrals = kernel_integrals(f, g, prm.summary, cfg);
    res.parts = assemble(res.integrals, prm);
    res.value = res.parts.total;
    res.nodes = res.integrals.nodes;
    res.excluded_fraction = res.integrals.excluded_fraction;
    if (cfg.estimate_error && !f.is_zero() && !g.is_zero()) {
        KernelIntegrals coarse = kernel_integrals(f, g, prm.summary, cfg.coarsened());
        res.error_estimate = std::abs(assemble(coarse, prm).total - res.value);
        res.warning = res.error_estimate > 0.1 * std::abs(res.value);
    }
    return res;
}

VarianceResult variance(const TestFunction& f, const KernelParams& prm, const QuadConfig& cfg) {
    VarianceResult v;
    v.detail = covariance(f, f, prm, cfg);
    v.value = v.detail.value.real();
    v.imag_residual = v.detail.value.imag();
    v.error_estimate = v.detail.error_estimate;
    v.warning = v.detail.warning;
    return v;
}

double analytic_disk_variance(const std::vector<cplx>& a) {
    double s = 0.0;
    for (std::size_t k = 1; k < a.size(); ++k) s += double(k) * std::norm(a[k]);
    return 2.0 * s;
}

double analytic_disk_variance(const TestFunction& f) { return analytic_disk_variance(f.analytic_coefficients()); }

std::vector<MarginalRow> kernel_marginal(const TestFunction& f, const TestFunction& g, const KernelParams& prm,
                                         const QuadConfig& cfg) {
    cfg.validate();
    std::vector<MarginalRow> rows;
    if (f.is_zero() || g.is_zero()) return rows;
    Prepared P = prepare(f, g, cfg);
    const auto& s = prm.summary;
    LoopOptions o{s.gamma1 == 1, s.gamma.real(), s.rho.real(), prm.cross == CrossModel::two_body};
    const double pref = -1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
    rows.resize(P.cells.size());
    for (std::size_t i = 0; i < P.cells.size(); ++i) rows[i] = {P.cells[i].z, 0.0};
    pair_loop(P, false, o, cfg.exclusion_radius, [&](std::size_t i, std::size_t, cplx W, const PairSums* ps) {
        if (!ps) return;
        KernelIntegrals one;
        one.v_hat = ps->v;
        one.cross_two_body = ps->x;
        one.l_sum = ps->l;
        one.n = ps->n;
        one.uu = ps->uu;
        rows[i].contribution += pref * W * assemble(one, prm).total;
    });
    return rows;
}

} // namespace corrles
