#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "corrles/ensemble.hpp"

namespace corrles {

// coef * z^p * conj(z)^q
struct Monomial {
    cplx coef;
    int p = 0;
    int q = 0;
};

// Polynomial in (z, conj z) times a radial quintic cutoff that is 1 on |z| <= r0
// and 0 on |z| >= r1.
class TestFunction {
public:
    TestFunction() = default;
    explicit TestFunction(std::vector<Monomial> terms, double r0 = 1.2, double r1 = 1.5);

    static TestFunction analytic(const std::vector<cplx>& a, double r0 = 1.2, double r1 = 1.5);
    static TestFunction anti_analytic(const std::vector<cplx>& b, double r0 = 1.2, double r1 = 1.5);
    static TestFunction monomial(int p, int q, cplx coef = 1.0, double r0 = 1.2, double r1 = 1.5);

    cplx eval(cplx z) const;
    cplx dz(cplx z) const;  // d/dz
    cplx laplacian(cplx z) const;
    // cell average of the Laplacian over the square centred at c with side h (s x s midpoints)
    cplx laplacian_cell_average(cplx c, double h, int s) const;

    // d/d conj(z)
    cplx dzbar(cplx z) const;
    // integral of the Laplacian over the square centred at c with side h, as the flux of
    // grad f through its edges (Gauss-Legendre with `nodes` points per edge); shared edges
    // cancel, so the sum over a grid covering the support vanishes to rounding
    cplx laplacian_cell_integral(cplx c, double h, int nodes = 4) const;

    // polynomial part only
    cplx poly(cplx z) const;

    TestFunction conj() const;
    TestFunction operator+(const TestFunction& o) const;
    TestFunction operator*(cplx a) const;

    bool is_zero() const { return terms_.empty(); }
    bool is_analytic() const;
    // a_k with f = sum a_k z^k on the disk; throws if not analytic
    std::vector<cplx> analytic_coefficients() const;

    const std::vector<Monomial>& terms() const { return terms_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }

    // b, b', b'' of the radial cutoff
    std::array<double, 3> bump(double r) const;

private:
    std::vector<Monomial> terms_;
    double r0_ = 1.2, r1_ = 1.5;
};

inline TestFunction operator*(cplx a, const TestFunction& f) { return f * a; }

cplx eval_f(const TestFunction& f, cplx z);
cplx eval_laplacian(const TestFunction& f, cplx z);

struct EigenFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Spectrum {
    std::vector<cplx> eigenvalues;
    // with vectors: max_k |X v_k - l_k v_k| / |X|_2 bound (Frobenius); else |sum l - tr X| / (n |X|_F)
    double residual_bound = 0.0;
    bool from_vectors = false;
};

Spectrum eigenvalues(const Eigen::MatrixXcd& X, bool with_vectors = false);

cplx les(const TestFunction& f, const Spectrum& s);

struct LesTriple {
    cplx L1, L2, combined;
};

LesTriple combined_les(const TestFunction& f, const MatrixPair& pair, cplx c, cplx d);
LesTriple combined_les(const TestFunction& f, const Spectrum& s1, const Spectrum& s2, cplx c, cplx d);

void write_spectrum_csv(std::ostream& os, const Spectrum& s);
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& X);

} // namespace corrles
