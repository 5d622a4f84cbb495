#include "corrles/girko.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "corrles/mde.hpp"

namespace corrles {

Hermitization hermitize(const Eigen::MatrixXcd& X, cplx z) {
    if (X.rows() != X.cols()) throw std::invalid_argument("hermitize: square matrix required");
    const int n = int(X.rows());
    Eigen::MatrixXcd Y = X;
    Y.diagonal().array() -= z;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Y);
    Hermitization h;
    h.z = z;
    h.n = n;
    h.singular_values.assign(svd.singularValues().data(), svd.singularValues().data() + n);
    std::sort(h.singular_values.begin(), h.singular_values.end());
    return h;
}

Eigen::MatrixXcd hermitization_matrix(const Eigen::MatrixXcd& X, cplx z) {
    const int n = int(X.rows());
    Eigen::MatrixXcd Y = X;
    Y.diagonal().array() -= z;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    H.topRightCorner(n, n) = Y;
    H.bottomLeftCorner(n, n) = Y.adjoint();
    return H;
}

std::vector<double> hermitization_singular_values_eig(const Eigen::MatrixXcd& X, cplx z) {
    const int n = int(X.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitization_matrix(X, z), Eigen::EigenvaluesOnly);
    // eigenvalues ascending: -s_n..-s_1, s_1..s_n
    std::vector<double> s(n);
    for (int k = 0; k < n; ++k) s[k] = 0.5 * (es.eigenvalues()[n + k] - es.eigenvalues()[n - 1 - k]);
    return s;
}

double im_trace_resolvent(const Hermitization& h, double eta) {
    double acc = 0.0;
    for (double s : h.singular_values) acc += 2.0 * eta / (s * s + eta * eta);
    return acc;
}

double eta_integral_closed(const Hermitization& h, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("eta_integral_closed: T must be > 0");
    double acc = 0.0;
    for (double s : h.singular_values) {
        if (s == 0.0) throw SingularHermitization("zero singular value: z is an eigenvalue of X");
        acc += std::log1p((T / s) * (T / s));
    }
    return acc;
}

GirkoResult girko_les(const TestFunction& f, const Eigen::MatrixXcd& X, const ZGrid& grid, double T) {
    GirkoResult r;
    const int N = grid.nodes;
    const double h = 2.0 * grid.half_width / N;
    cplx acc = 0.0;
    double lap = 0.0;
    cplx lapc = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            cplx z(-grid.half_width + (a + 0.5) * h, -grid.half_width + (b + 0.5) * h);
            cplx L = f.laplacian_cell_integral(z, h);
            if (L == cplx(0.0)) continue;
            lap += std::abs(L);
            lapc += L;
            Hermitization H = hermitize(X, z);
            if (H.singular_values.front() < 1e-12) {
                ++r.excised_cells;
                continue;
            }
            acc += L * eta_integral_closed(H, T);
        }
    r.value = -acc / (4.0 * std::numbers::pi);
    r.laplacian_sum = std::abs(lapc);
    r.laplacian_abs_sum = lap;
    return r;
}

RegimeSplit regime_split(const Hermitization& h, int n, double delta0, double delta1, double C_exp) {
    if (!(delta0 > 0.0 && delta0 < 0.5 && delta1 > 0.0 && delta1 < 0.5))
        throw std::invalid_argument("regime_split: delta0, delta1 must lie in (0, 0.5)");
    if (!(C_exp >= 1.0)) throw std::invalid_argument("regime_split: C_exp must be >= 1");
    RegimeSplit r;
    const double dn = double(n);
    r.eta0 = std::pow(dn, -1.0 - delta0);
    r.eta_c = std::pow(dn, -1.0 + delta1);
    r.T = std::pow(dn, C_exp);
    std::array<double, 4> p{};
    for (double s : h.singular_values) {
        if (s == 0.0) throw SingularHermitization("zero singular value: z is an eigenvalue of X");
        const double s2 = s * s;
        p[0] += std::log1p(r.eta0 * r.eta0 / s2);
        p[1] += std::log((s2 + r.eta_c * r.eta_c) / (s2 + r.eta0 * r.eta0));
        p[2] += std::log((s2 + r.T * r.T) / (s2 + r.eta_c * r.eta_c));
        p[3] -= std::log(s2 + r.T * r.T);
    }
    r.pieces = p;
    return r;
}

cplx normalized_resolvent_trace(const Hermitization& h, double eta) {
    // (1/2n) Tr (H^z - i eta)^{-1} = (i/n) sum_k eta / (s_k^2 + eta^2)
    double acc = 0.0;
    for (double s : h.singular_values) acc += eta / (s * s + eta * eta);
    return {0.0, acc / h.n};
}

LocalLawPoint local_law_residual(const Hermitization& h, double eta) {
    LocalLawPoint p;
    p.eta = eta;
    p.residual = std::abs(normalized_resolvent_trace(h, eta) - solve_m(h.z, eta));
    p.n_eta_residual = h.n * eta * p.residual;
    return p;
}

LocalLawPoint local_law_residual(const Eigen::MatrixXcd& X, cplx z, double eta) {
    if (std::abs(1.0 - std::abs(z)) < 0.1) throw std::invalid_argument("local_law_residual: need |1 - |z|| >= 0.1");
    return local_law_residual(hermitize(X, z), eta);
}

} // namespace corrles
