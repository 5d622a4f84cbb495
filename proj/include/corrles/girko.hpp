#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "corrles/spectral.hpp"

namespace corrles {

struct Hermitization {
    cplx z;
    std::vector<double> singular_values;  // ascending
    int n = 0;
};

struct SingularHermitization : std::domain_error {
    using std::domain_error::domain_error;
};

Hermitization hermitize(const Eigen::MatrixXcd& X, cplx z);
// [[0, X - z], [(X - z)^*, 0]]
Eigen::MatrixXcd hermitization_matrix(const Eigen::MatrixXcd& X, cplx z);
// singular values through the symmetric eigensolve of H^z (second route)
std::vector<double> hermitization_singular_values_eig(const Eigen::MatrixXcd& X, cplx z);

double im_trace_resolvent(const Hermitization& h, double eta);
// sum_k log(1 + T^2 / s_k^2)
double eta_integral_closed(const Hermitization& h, double T);

struct ZGrid {
    int nodes = 200;
    double half_width = 1.6;
};

struct GirkoResult {
    cplx value;
    int excised_cells = 0;
    double laplacian_sum = 0.0;      // |sum Delta f h^2|
    double laplacian_abs_sum = 0.0;  // sum |Delta f| h^2
};

GirkoResult girko_les(const TestFunction& f, const Eigen::MatrixXcd& X, const ZGrid& grid, double T);

struct RegimeSplit {
    double eta0 = 0.0, eta_c = 0.0, T = 0.0;
    // integrals of Im Tr G over (0, eta0], (eta0, eta_c], (eta_c, T], then J_T = -log|det(H^z - iT)|
    std::array<double, 4> pieces{};
    double eta_total() const { return pieces[0] + pieces[1] + pieces[2]; }
    // equals -2 log|det(X - z)|, independent of T
    double regularized_total() const { return eta_total() + pieces[3]; }
};

RegimeSplit regime_split(const Hermitization& h, int n, double delta0, double delta1, double C_exp);

struct LocalLawPoint {
    double eta = 0.0;
    double residual = 0.0;
    double n_eta_residual = 0.0;
};

cplx normalized_resolvent_trace(const Hermitization& h, double eta);
LocalLawPoint local_law_residual(const Hermitization& h, double eta);
LocalLawPoint local_law_residual(const Eigen::MatrixXcd& X, cplx z, double eta);

} // namespace corrles
