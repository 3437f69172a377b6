#pragma once
#include <complex>

#include "bdspec/tolerances.hpp"

namespace bdspec::specfun {

using cplx = std::complex<double>;

// Integer order. `underflow` is set when the value is below the double range
// and 0 is returned instead.
double bessel_j(int n, double x, bool* underflow = nullptr);
double bessel_y(int n, double x);
double bessel_i(int n, double x);
double bessel_j_deriv(int n, double x);
double bessel_i_deriv(int n, double x);

// k-th positive zero of J_n, sign-change scan plus bisection.
double bessel_j_zero(int n, int k);

// log Gamma for Re z >= 1/2 (Lanczos, g = 7).
cplx log_gamma(cplx z);

enum class ImagKind { J, Y, I };

struct ImagValue {
    cplx value;
    cplx deriv;            // d/dx
    bool precision_loss = false;
};

// Z_{i/b}(x) for real x > 0. Power series up to x_switch, ODE continuation beyond.
ImagValue bessel_imag_order(ImagKind kind, double b, double x,
                            const Tolerances& tol = default_tolerances());

// Raw routes, exposed for cross-checks.
ImagValue imag_order_series(ImagKind kind, double b, double x,
                            const Tolerances& tol = default_tolerances());
ImagValue imag_order_ode(ImagKind kind, double b, double x, double x_start,
                         const Tolerances& tol = default_tolerances());

// K_{i/b}(x) (real for real x) via the cosh integral representation.
double bessel_k_imag_order(double b, double x);

// H^{+}_{i/b}(ix) evaluated through K_{i/b}(x), and the leading-order
// large-x model for H^{sign}_{i/b}(ix), sign = +1 or -1.
cplx hankel_plus_imag_arg(double b, double x);
cplx hankel_imag_order_asymptotic(int sign, double b, double x);

}  // namespace bdspec::specfun
