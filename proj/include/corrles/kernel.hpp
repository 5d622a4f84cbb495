#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "corrles/ensemble.hpp"
#include "corrles/mde.hpp"
#include "corrles/quadrature.hpp"
#include "corrles/spectral.hpp"

namespace corrles {

// How the (c d) cross term of the integrand is built.
//   two_body: 2cd [V_gamma(z_i, z_j) + V_rho(z_i, conj z_j)], the mixed log-derivative of the
//             two-body determinant with the cross correlations inserted; reduces to V-hat at
//             gamma = rho = 1.
//   first_order: 8cd gamma (L12 + L21) + 2cd rho N, first order in the correlations.
enum class CrossModel { two_body, first_order };

struct KernelParams {
    cplx c{1.0};
    cplx d{0.0};
    CorrelationSummary summary;
    CrossModel cross = CrossModel::two_body;
};

struct KernelTerms {
    cplx v11, v22;  // V-hat for each ensemble
    cplx v12;       // two-body cross term V_gamma(z_i,z_j) + V_rho(z_i, conj z_j)
    cplx l12, l21;
    cplx nij;
    cplx u1_i, u1_j, u2_i, u2_j;
    cplx L;
    bool near_singular = false;
};

struct QuadConfig {
    int eta_nodes = 64;
    double eta_min = 1e-6;
    double eta_max = 1e3;
    int z_nodes = 48;             // per axis, over [-z_half_width, z_half_width]^2
    double z_half_width = 1.6;
    int laplacian_subsamples = 4;  // s x s points per cell for the cell-averaged Laplacian
    double exclusion_radius = 0.05;
    bool log_spacing = true;
    bool estimate_error = true;

    void validate() const;
    QuadConfig coarsened() const;
};

// pointwise terms
cplx v_term(const MdePoint& pi, const MdePoint& pj, bool* near_singular = nullptr);
// 1/2 d_eta_i d_eta_j log det(I - c K) with K the two-body block-scalar matrix
cplx v_correlated(const MdePoint& pi, const MdePoint& pj, double corr);
cplx hat_v(const MdePoint& pi, const MdePoint& pj, Field field, bool* near_singular = nullptr);
cplx u_term(const MdePoint& p);
std::pair<cplx, cplx> l_terms(const MdePoint& p1_i, const MdePoint& p2_i, const MdePoint& p1_j,
                              const MdePoint& p2_j);
cplx n_term(const MdePoint& p1_i, const MdePoint& p2_i, const MdePoint& p1_j, const MdePoint& p2_j);
cplx cross_two_body(const MdePoint& pi, const MdePoint& pj, const CorrelationSummary& s);

KernelTerms integrand_L(const KernelParams& params, const MdePoint& p1_i, const MdePoint& p2_i,
                        const MdePoint& p1_j, const MdePoint& p2_j);

// Quadrature of each basis term against Delta f(z1) conj(Delta g(z2)), already multiplied by
// -1/(8 pi^2). The full covariance is a (c, d) combination of these.
struct KernelIntegrals {
    cplx v_hat{0.0};
    cplx cross_two_body{0.0};
    cplx l_sum{0.0};  // L12 + L21
    cplx n{0.0};
    cplx uu{0.0};
    int nodes = 0;  // active z cells
    int eta_nodes = 0;
    double excluded_fraction = 0.0;
    int excluded_cells = 0;
    long long excluded_pairs = 0;
};

KernelIntegrals kernel_integrals(const TestFunction& f, const TestFunction& g, const CorrelationSummary& s,
                                 const QuadConfig& cfg);

struct Contribution {
    cplx total, v_hat, cross, kappa;
};
Contribution assemble(const KernelIntegrals& I, const KernelParams& params);

struct CovarianceResult {
    cplx value{0.0};
    double error_estimate = 0.0;
    bool warning = false;
    int nodes = 0;
    double excluded_fraction = 0.0;
    Contribution parts{};
    KernelIntegrals integrals{};
};

CovarianceResult covariance(const TestFunction& f, const TestFunction& g, const KernelParams& params,
                            const QuadConfig& cfg = {});

struct VarianceResult {
    double value = 0.0;
    double imag_residual = 0.0;
    double error_estimate = 0.0;
    bool warning = false;
    CovarianceResult detail;
};

VarianceResult variance(const TestFunction& f, const KernelParams& params, const QuadConfig& cfg = {});

double analytic_disk_variance(const std::vector<cplx>& a);
double analytic_disk_variance(const TestFunction& f);

// z1-marginal of the integrand, one row per active cell: (z, Delta f weight, contribution)
struct MarginalRow {
    cplx z;
    cplx contribution;
};
std::vector<MarginalRow> kernel_marginal(const TestFunction& f, const TestFunction& g,
                                         const KernelParams& params, const QuadConfig& cfg);

} // namespace corrles
