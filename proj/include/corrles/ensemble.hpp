#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "corrles/rng.hpp"

namespace corrles {

using cplx = std::complex<double>;

enum class Field { real, complex };
enum class Construction { gaussian_pair, shifted_pair, mixture };

struct InfeasibleSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Atom {
    cplx value;
    double prob = 0.0;
};

struct JointAtom {
    cplx x1, x2;
    double prob = 0.0;
};

// Joint law of one (chi1, chi2) cell.
//   gaussian_pair: real field uses target_gamma as the correlation of the two
//     normals; complex field builds (a + ib)/sqrt2 with corr(a1,a2) = gamma+rho,
//     corr(b1,b2) = gamma-rho.
//   shifted_pair: chi1 = zeta + theta, chi2 = zeta - theta, zeta and theta
//     independent with the given atoms.
//   mixture: explicit joint atoms.
struct CorrelationSpec {
    Field field = Field::real;
    Construction construction = Construction::gaussian_pair;
    double target_rho = 0.0;
    double target_gamma = 0.0;
    std::vector<Atom> zeta, theta;
    std::vector<JointAtom> atoms;
    std::string name;
};

struct CorrelationSummary {
    cplx rho{0.0};
    cplx gamma{0.0};
    int gamma1 = 1;
    std::array<std::array<double, 2>, 2> kappa4{};
    double moment8 = 0.0;
};

struct CumulantEstimate {
    CorrelationSummary value;
    // standard errors; complex entries carry (se of real part, se of imag part)
    cplx rho_se{0.0};
    cplx gamma_se{0.0};
    std::array<std::array<double, 2>, 2> kappa4_se{};
    std::array<double, 2> mean_abs{};  // |E chi_t|
    std::array<double, 2> second{};    // E|chi_t|^2
    std::size_t n_samples = 0;
};

class EntrySampler {
public:
    explicit EntrySampler(const CorrelationSpec& spec);

    std::pair<cplx, cplx> draw(Philox& rng) const;
    Field field() const { return field_; }
    const CorrelationSpec& spec() const { return spec_; }
    // flattened joint atoms for atomic constructions, empty for Gaussian
    const std::vector<JointAtom>& joint_atoms() const { return joint_; }

private:
    CorrelationSpec spec_;
    Field field_;
    bool gaussian_;
    double ca_ = 0.0, cb_ = 0.0;
    std::vector<JointAtom> joint_;
    std::vector<double> cdf_;
};

EntrySampler make_sampler(const CorrelationSpec& spec);
CorrelationSummary theoretical_cumulants(const CorrelationSpec& spec);
CumulantEstimate estimate_cumulants(const EntrySampler& sampler, std::size_t n_samples,
                                    std::uint64_t seed);

struct MatrixPair {
    int n = 0;
    Eigen::MatrixXcd X1, X2;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

MatrixPair sample_pair(int n, const EntrySampler& sampler, std::uint64_t seed,
                       std::uint64_t stream = 0);

struct NotCentrosymmetric : std::invalid_argument {
    NotCentrosymmetric(const std::string& what, double dev)
        : std::invalid_argument(what), max_deviation(dev) {}
    double max_deviation;
};

Eigen::MatrixXcd exchange_matrix(int n);
// C = [[A, B], [J B J, J A J]] with A = X1+X2 halves reassembled; inverse of the split
Eigen::MatrixXcd centrosymmetric_embed(const Eigen::MatrixXcd& X1, const Eigen::MatrixXcd& X2);
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> centrosymmetric_split(const Eigen::MatrixXcd& C,
                                                                    double tol = 1e-12);

// presets
CorrelationSpec gaussian_pair(Field field, double gamma, double rho);
CorrelationSpec gaussian_pair(Field field, double gamma);
CorrelationSpec rademacher_shifted_pair(Field field);
CorrelationSpec heavy_atom_pair(Field field);
std::vector<CorrelationSpec> shipped_specs();

const char* to_string(Field f);
const char* to_string(Construction c);

} // namespace corrles
