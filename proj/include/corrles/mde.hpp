#pragma once

#include <array>
#include <complex>
#include <stdexcept>

namespace corrles {

using cplx = std::complex<double>;

struct MdeError : std::runtime_error {
    MdeError(const std::string& what, cplx last) : std::runtime_error(what), last_iterate(last) {}
    cplx last_iterate;
};

struct MdePoint {
    cplx z;
    double eta = 0.0;
    cplx m;            // i * im_m
    double im_m = 0.0;
    cplx u;            // m / (i eta + m), real on the imaginary axis
    cplx beta;         // 1 - m^2 - u^2 |z|^2
    double beta_star = 0.0;
    cplx d_eta_m;
    cplx d_eta_u;
};

// positive root v of v^3 + 2 eta v^2 + (eta^2 + |z|^2 - 1) v - eta = 0
double solve_im_m(double abs_z2, double eta);
cplx solve_m(cplx z, double eta);
// damped Newton on m (w + m)^2 - |z|^2 m + (w + m) = 0 with eta-continuation
cplx solve_m_newton(cplx z, double eta);

MdePoint mde_point(cplx z, double eta);

// |-1/m - (w + m - |z|^2/(w + m))| scaled by |1/m|
double mde_residual(cplx z, double eta, cplx m);

std::array<cplx, 3> stability_eigenvalues(const MdePoint& p);
std::array<cplx, 2> two_body_stability_eigs(const MdePoint& pi, const MdePoint& pj);

} // namespace corrles
