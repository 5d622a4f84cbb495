#include "corrles/mde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace corrles {

namespace {

void check_eta(double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::domain_error("MDE requires finite eta > 0");
}

// largest real root of v^3 + a v^2 + b v + c
double cardano_largest(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double t;
    if (disc > 0.0) {
        double s = std::sqrt(disc);
        double A = -std::copysign(std::cbrt(std::abs(q) / 2.0 + s), q);
        t = A != 0.0 ? A - p / (3.0 * A) : 0.0;
    } else {
        double r = std::sqrt(std::max(0.0, -p / 3.0));
        double arg = r > 0.0 ? std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0) : 0.0;
        t = 2.0 * r * std::cos(std::acos(arg) / 3.0);
    }
    return t - a / 3.0;
}

} // namespace

double solve_im_m(double abs_z2, double eta) {
    check_eta(eta);
    const double a = 2.0 * eta, b = (abs_z2 - 1.0) + eta * eta, c = -eta;
    auto f = [&](double v) { return ((v + a) * v + b) * v + c; };
    auto fp = [&](double v) { return (3.0 * v + 2.0 * a) * v + b; };
    // f(0) = -eta < 0 and f(1) = eta + eta^2 + |z|^2 > 0
    double lo = 0.0, hi = 1.0;
    double v = cardano_largest(a, b, c);
    if (!(v > 0.0 && v < 1.0)) v = abs_z2 > 1.0 ? eta / (abs_z2 - 1.0 + eta) : 0.5;
    v = std::clamp(v, 1e-300, 1.0);
    for (int it = 0; it < 200; ++it) {
        double fv = f(v);
        if (fv == 0.0) return v;
        (fv < 0.0 ? lo : hi) = v;
        double d = fp(v);
        double nv = v - fv / d;
        if (!(nv > lo && nv < hi) || !std::isfinite(nv)) nv = 0.5 * (lo + hi);
        if (std::abs(nv - v) <= 4e-16 * nv) return nv;
        if (hi - lo <= 1e-300) return nv;
        v = nv;
    }
    return v;
}

cplx solve_m(cplx z, double eta) { return {0.0, solve_im_m(std::norm(z), eta)}; }

double mde_residual(cplx z, double eta, cplx m) {
    const cplx w(0.0, eta);
    cplx r = -1.0 / m - (w + m - std::norm(z) / (w + m));
    return std::abs(r) / std::abs(1.0 / m);
}

cplx solve_m_newton(cplx z, double eta) {
    check_eta(eta);
    const double z2 = std::norm(z);
    auto P = [&](cplx m, cplx w) { return m * (w + m) * (w + m) + m * (1.0 - z2) + w; };
    auto dP = [&](cplx m, cplx w) { return (w + m) * (w + m) + 2.0 * m * (w + m) + (1.0 - z2); };

    // fixed-point iteration at a large eta lands on the Im m > 0 branch
    double e = std::max(eta, 4.0);
    cplx w(0.0, e);
    cplx m(0.0, 1.0 / e);
    for (int it = 0; it < 500; ++it) {
        cplx nm = -1.0 / (w + m - z2 / (w + m));
        if (std::abs(nm - m) < 1e-15 * std::abs(nm)) {
            m = nm;
            break;
        }
        m = nm;
    }
    auto newton = [&](cplx m0, double et) {
        cplx ww(0.0, et), x = m0;
        for (int it = 0; it < 100; ++it) {
            cplx step = P(x, ww) / dP(x, ww);
            double lam = 1.0;
            cplx nx = x - step;
            while (nx.imag() <= 0.0 && lam > 1e-12) {
                lam *= 0.5;
                nx = x - lam * step;
            }
            if (nx.imag() <= 0.0) break;
            bool done = std::abs(nx - x) <= 1e-15 * std::abs(nx);
            x = nx;
            if (done) return std::pair{x, true};
        }
        return std::pair{x, mde_residual(z, et, x) < 1e-13};
    };
    while (true) {
        auto [x, ok] = newton(m, e);
        if (!ok) {
            std::ostringstream os;
            os << "Newton MDE solve did not converge at eta=" << e << ", z=" << z;
            throw MdeError(os.str(), x);
        }
        m = x;
        if (e == eta) return m;
        // ratio 0.7 keeps the previous root inside the basin of the continued branch
        e = std::max(eta, e * 0.7);
    }
}

MdePoint mde_point(cplx z, double eta) {
    MdePoint p;
    p.z = z;
    p.eta = eta;
    const double v = solve_im_m(std::norm(z), eta);
    const double z2 = std::norm(z);
    p.im_m = v;
    p.m = {0.0, v};
    const double u = v / (eta + v);
    p.u = u;
    const double beta = 1.0 + v * v - u * u * z2;
    p.beta = beta;
    p.beta_star = eta / (v + eta);
    // d_eta m = i (1 - beta) / beta
    const double dv = (1.0 - beta) / beta;
    p.d_eta_m = {0.0, dv};
    // (eta v' - v)/(eta+v)^2 cancels for |z| > 1; the cubic turns the numerator
    // into -2 v^2 (eta+v) / beta
    p.d_eta_u = -2.0 * v * v / (beta * (eta + v));
    return p;
}

std::array<cplx, 3> stability_eigenvalues(const MdePoint& p) {
    const double z2 = std::norm(p.z);
    return {cplx(1.0), 1.0 + p.m * p.m - z2 * p.u * p.u, p.beta};
}

std::array<cplx, 2> two_body_stability_eigs(const MdePoint& pi, const MdePoint& pj) {
    // I - K on block scalars, K = [[conj(zi) zj q, mi mj], [mi mj, zi conj(zj) q]]
    const cplx q = pi.u * pj.u;
    const cplx w = pi.z * std::conj(pj.z);
    const cplx mm = pi.m * pj.m;
    const cplx half_tr = q * w.real();
    const cplx disc = std::sqrt(mm * mm - q * q * w.imag() * w.imag());
    return {1.0 - (half_tr + disc), 1.0 - (half_tr - disc)};
}

} // namespace corrles
