#include "corrles/spectral.hpp"
#include "corrles/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace corrles {

namespace {

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

std::vector<Monomial> canonical(std::vector<Monomial> t) {
    std::map<std::pair<int, int>, cplx> acc;
    for (const auto& m : t) {
        if (m.p < 0 || m.q < 0) throw std::invalid_argument("TestFunction: negative exponent");
        acc[{m.p, m.q}] += m.coef;
    }
    std::vector<Monomial> out;
    for (const auto& [k, c] : acc)
        if (c != cplx(0.0)) out.push_back({c, k.first, k.second});
    return out;
}

} // namespace

TestFunction::TestFunction(std::vector<Monomial> terms, double r0, double r1)
    : terms_(canonical(std::move(terms))), r0_(r0), r1_(r1) {
    if (!(r0 > 0.0 && r1 > r0)) throw std::invalid_argument("TestFunction: need 0 < r0 < r1");
}

TestFunction TestFunction::analytic(const std::vector<cplx>& a, double r0, double r1) {
    std::vector<Monomial> t;
    for (std::size_t k = 0; k < a.size(); ++k) t.push_back({a[k], int(k), 0});
    return TestFunction(t, r0, r1);
}

TestFunction TestFunction::anti_analytic(const std::vector<cplx>& b, double r0, double r1) {
    std::vector<Monomial> t;
    for (std::size_t k = 0; k < b.size(); ++k) t.push_back({b[k], 0, int(k)});
    return TestFunction(t, r0, r1);
}

TestFunction TestFunction::monomial(int p, int q, cplx coef, double r0, double r1) {
    return TestFunction({{coef, p, q}}, r0, r1);
}

std::array<double, 3> TestFunction::bump(double r) const {
    if (r <= r0_) return {1.0, 0.0, 0.0};
    if (r >= r1_) return {0.0, 0.0, 0.0};
    const double w = r1_ - r0_, t = (r - r0_) / w;
    const double s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    const double s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    const double s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    return {1.0 - s, -s1 / w, -s2 / (w * w)};
}

cplx TestFunction::poly(cplx z) const {
    cplx s = 0.0, zb = std::conj(z);
    for (const auto& m : terms_) s += m.coef * ipow(z, m.p) * ipow(zb, m.q);
    return s;
}

cplx TestFunction::eval(cplx z) const {
    double b = bump(std::abs(z))[0];
    return b == 0.0 ? cplx(0.0) : poly(z) * b;
}

cplx TestFunction::dz(cplx z) const {
    const double r = std::abs(z);
    auto [b, b1, b2] = bump(r);
    if (b == 0.0 && b1 == 0.0) return 0.0;
    cplx zb = std::conj(z), dP = 0.0;
    for (const auto& m : terms_)
        if (m.p > 0) dP += m.coef * double(m.p) * ipow(z, m.p - 1) * ipow(zb, m.q);
    cplx out = dP * b;
    if (b1 != 0.0) out += poly(z) * b1 * zb / (2.0 * r);
    return out;
}

cplx TestFunction::laplacian(cplx z) const {
    const double r = std::abs(z);
    auto [b, b1, b2] = bump(r);
    if (b == 0.0 && b1 == 0.0 && b2 == 0.0) return 0.0;
    cplx zb = std::conj(z), P = 0.0, dP = 0.0, dbP = 0.0, ddbP = 0.0;
    for (const auto& m : terms_) {
        P += m.coef * ipow(z, m.p) * ipow(zb, m.q);
        if (m.p > 0) dP += m.coef * double(m.p) * ipow(z, m.p - 1) * ipow(zb, m.q);
        if (m.q > 0) dbP += m.coef * double(m.q) * ipow(z, m.p) * ipow(zb, m.q - 1);
        if (m.p > 0 && m.q > 0) ddbP += m.coef * double(m.p * m.q) * ipow(z, m.p - 1) * ipow(zb, m.q - 1);
    }
    cplx out = 4.0 * ddbP * b;
    if (b1 != 0.0 || b2 != 0.0) {
        // d b = b' conj(z) / 2r, dbar b = b' z / 2r, Laplacian of b = b'' + b'/r
        out += 4.0 * (dbP * b1 * zb / (2.0 * r) + dP * b1 * z / (2.0 * r)) + P * (b2 + b1 / r);
    }
    return out;
}

cplx TestFunction::laplacian_cell_average(cplx c, double h, int s) const {
    if (s <= 1) return laplacian(c);
    cplx acc = 0.0;
    const double d = h / s;
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b)
            acc += laplacian(c + cplx(-0.5 * h + (a + 0.5) * d, -0.5 * h + (b + 0.5) * d));
    return acc / double(s * s);
}

cplx TestFunction::dzbar(cplx z) const { return std::conj(conj().dz(z)); }

cplx TestFunction::laplacian_cell_integral(cplx c, double h, int nodes) const {
    auto [gx, gw] = gauss_legendre(nodes, -0.5 * h, 0.5 * h);
    // grad f = (f_x, f_y) with f_x = df + dbar f, f_y = i (df - dbar f)
    auto fx = [&](cplx z) { return dz(z) + dzbar(z); };
    auto fy = [&](cplx z) { return cplx(0.0, 1.0) * (dz(z) - dzbar(z)); };
    const double a = 0.5 * h;
    cplx acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double t = gx[k];
        acc += gw[k] * (fx(c + cplx(a, t)) - fx(c + cplx(-a, t)) + fy(c + cplx(t, a)) - fy(c + cplx(t, -a)));
    }
    return acc;
}

TestFunction TestFunction::conj() const {
    std::vector<Monomial> t;
    for (const auto& m : terms_) t.push_back({std::conj(m.coef), m.q, m.p});
    return TestFunction(t, r0_, r1_);
}

TestFunction TestFunction::operator+(const TestFunction& o) const {
    if (terms_.empty()) return o;
    if (o.terms_.empty()) return *this;
    if (o.r0_ != r0_ || o.r1_ != r1_) throw std::invalid_argument("TestFunction: cutoff radii differ");
    auto t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return TestFunction(t, r0_, r1_);
}

TestFunction TestFunction::operator*(cplx a) const {
    auto t = terms_;
    for (auto& m : t) m.coef *= a;
    return TestFunction(t, r0_, r1_);
}

bool TestFunction::is_analytic() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Monomial& m) { return m.q == 0; });
}

std::vector<cplx> TestFunction::analytic_coefficients() const {
    if (!is_analytic()) throw std::invalid_argument("TestFunction is not analytic");
    int kmax = 0;
    for (const auto& m : terms_) kmax = std::max(kmax, m.p);
    std::vector<cplx> a(terms_.empty() ? 0 : kmax + 1, 0.0);
    for (const auto& m : terms_) a[m.p] += m.coef;
    return a;
}

cplx eval_f(const TestFunction& f, cplx z) { return f.eval(z); }
cplx eval_laplacian(const TestFunction& f, cplx z) { return f.laplacian(z); }

Spectrum eigenvalues(const Eigen::MatrixXcd& X, bool with_vectors) {
    const Eigen::Index n = X.rows();
    if (n < 1 || X.cols() != n) throw std::invalid_argument("eigenvalues: need a non-empty square matrix");
    if (!X.allFinite()) throw std::invalid_argument("eigenvalues: non-finite entries");
    Spectrum s;
    s.eigenvalues.resize(n);
    const double xf = std::max(X.norm(), 1e-300);
    const lapack_int N = lapack_int(n);
    const char jobv = with_vectors ? 'V' : 'N';
    Eigen::MatrixXcd V;
    lapack_int info = 0;
    if ((X.imag().array() == 0.0).all()) {
        Eigen::MatrixXd A = X.real();
        std::vector<double> wr(n), wi(n);
        Eigen::MatrixXd VR(with_vectors ? n : 1, with_vectors ? n : 1);
        info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', jobv, N, A.data(), N, wr.data(), wi.data(), nullptr, 1,
                             VR.data(), with_vectors ? N : 1);
        if (info > 0) throw EigenFailure("dgeev: QR iteration failed, eigenvalues " + std::to_string(info + 1) +
                                         ".." + std::to_string(n) + " converged only");
        if (info < 0) throw std::invalid_argument("dgeev: bad argument " + std::to_string(-info));
        for (Eigen::Index k = 0; k < n; ++k) s.eigenvalues[k] = {wr[k], wi[k]};
        if (with_vectors) {
            V.resize(n, n);
            for (Eigen::Index k = 0; k < n; ++k) {
                if (wi[k] == 0.0) {
                    V.col(k) = VR.col(k).cast<cplx>();
                } else if (k + 1 < n) {
                    // conjugate pair stored as (re, im) columns
                    V.col(k) = VR.col(k).cast<cplx>() + cplx(0, 1) * VR.col(k + 1).cast<cplx>();
                    V.col(k + 1) = V.col(k).conjugate();
                    ++k;
                }
            }
        }
    } else {
        Eigen::MatrixXcd A = X;
        std::vector<lapack_complex_double> w(n);
        Eigen::MatrixXcd VR(with_vectors ? n : 1, with_vectors ? n : 1);
        info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', jobv, N, reinterpret_cast<lapack_complex_double*>(A.data()), N,
                             w.data(), nullptr, 1, reinterpret_cast<lapack_complex_double*>(VR.data()),
                             with_vectors ? N : 1);
        if (info > 0) throw EigenFailure("zgeev: QR iteration failed, eigenvalues " + std::to_string(info + 1) +
                                         ".." + std::to_string(n) + " converged only");
        if (info < 0) throw std::invalid_argument("zgeev: bad argument " + std::to_string(-info));
        for (Eigen::Index k = 0; k < n; ++k) s.eigenvalues[k] = w[k];
        if (with_vectors) V = VR;
    }
    if (with_vectors) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::VectorXcd v = V.col(k);
            double nv = v.norm();
            if (nv == 0.0) continue;
            worst = std::max(worst, (X * v - s.eigenvalues[k] * v).norm() / nv);
        }
        s.residual_bound = worst / xf;
        s.from_vectors = true;
    } else {
        cplx tr = 0.0;
        for (auto l : s.eigenvalues) tr += l;
        s.residual_bound = std::abs(tr - X.trace()) / (double(n) * xf);
    }
    return s;
}

cplx les(const TestFunction& f, const Spectrum& s) {
    cplx acc = 0.0;
    for (auto l : s.eigenvalues) acc += f.eval(l);
    return acc;
}

LesTriple combined_les(const TestFunction& f, const Spectrum& s1, const Spectrum& s2, cplx c, cplx d) {
    LesTriple t;
    t.L1 = les(f, s1);
    t.L2 = les(f, s2);
    t.combined = c * t.L1 + d * t.L2;
    return t;
}

LesTriple combined_les(const TestFunction& f, const MatrixPair& pair, cplx c, cplx d) {
    return combined_les(f, eigenvalues(pair.X1), eigenvalues(pair.X2), c, d);
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    char buf[96];
    os << "re,im\n";
    for (auto l : s.eigenvalues) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", l.real(), l.imag());
        os << buf;
    }
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& X) {
    char buf[128];
    os << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g\n", (long long)i, (long long)j,
                          X(i, j).real(), X(i, j).imag());
            os << buf;
        }
}

} // namespace corrles
