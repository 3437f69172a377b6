#include "bdspec/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bdspec/ode.hpp"

namespace bdspec::specfun {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = 0.57721566490153286061;

// log((x/2)^n / n!)
double log_leading(int n, double x) { return n * std::log(0.5 * x) - std::lgamma(n + 1.0); }

double j_series(int n, double x, bool* underflow)
{
    const double lead = log_leading(n, x);
    if (lead < -700.0) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    const double z = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= z / (k * double(n + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp(lead) * sum;
}

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1.
double j_miller(int n, double x)
{
    const double top = std::max<double>(n, x);
    int m = 2 * static_cast<int>((top + 30.0 + 12.0 * std::sqrt(top)) / 2.0);
    double jp = 0.0, jc = 1e-300, norm = 0.0, val = 0.0;
    for (int k = m; k >= 1; --k) {
        const double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;  // now holds J_{k-1}
        if (k - 1 == n) val = jc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            val *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += jc;
    if (n == m) val = 1e-300;
    return val / norm;
}

// Hankel asymptotic form of Y_n, n in {0, 1}.
double y_hankel(int n, double x)
{
    const double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0, term = 1.0, last = 1e300;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) > last) break;
        last = std::abs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
    }
    const double chi = x - (0.5 * n + 0.25) * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

double y0_series(double x)
{
    const double z = -0.25 * x * x;
    double term = 1.0, harmonic = 0.0, sum = 0.0;
    for (int k = 1; k < 300; ++k) {
        term *= z / (double(k) * k);
        harmonic += 1.0 / k;
        sum += term * harmonic;
        if (std::abs(term * harmonic) < 1e-18) break;
    }
    return (2.0 / pi) * ((std::log(0.5 * x) + euler_gamma) * j_series(0, x, nullptr) - sum);
}

double y1_series(double x)
{
    // Y1 = -2/(pi x) + (2/pi) log(x/2) J1 - (1/pi) sum (-1)^k (psi(k+1)+psi(k+2)) (x/2)^{2k+1}/(k!(k+1)!)
    const double h = 0.5 * x;
    double term = h, psi1 = -euler_gamma, psi2 = 1.0 - euler_gamma;
    double sum = term * (psi1 + psi2);
    for (int k = 1; k < 300; ++k) {
        term *= -h * h / (double(k) * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
        const double add = term * (psi1 + psi2);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -2.0 / (pi * x) + (2.0 / pi) * std::log(h) * j_series(1, x, nullptr) - sum / pi;
}

// --- imaginary order ---

struct SeriesTerms {
    cplx value, deriv;
    double abs_sum;
};

// sum_k s^k (x/2)^{2k+i nu}/(k! Gamma(k+1+i nu)), s = -1 for J, +1 for I.
SeriesTerms imag_series(double sgn, double nu, double x)
{
    const cplx inu(0.0, nu);
    const cplx lead = std::exp(inu * std::log(0.5 * x) - log_gamma(1.0 + inu));
    const double z = 0.25 * x * x * sgn;
    cplx term = lead, sum = lead, dsum = lead * inu / x;
    double abs_sum = std::abs(lead);
    for (int k = 1; k < 400; ++k) {
        term *= z / (double(k) * (double(k) + inu));
        sum += term;
        dsum += term * (2.0 * k + inu) / x;
        abs_sum += std::abs(term);
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return {sum, dsum, abs_sum};
}

ImagValue series_value(ImagKind kind, double nu, double x, const Tolerances& tol)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double sgn = kind == ImagKind::I ? 1.0 : -1.0;
    const SeriesTerms s = imag_series(sgn, nu, x);
    ImagValue out{s.value, s.deriv, s.abs_sum * eps > tol.precision_loss * std::abs(s.value)};
    if (kind == ImagKind::Y) {
        // Y_{i nu} = (J_{i nu} cosh(nu pi) - J_{-i nu}) / (i sinh(nu pi)), J_{-i nu}(x) = conj(J_{i nu}(x))
        const double ch = std::cosh(nu * pi), sh = std::sinh(nu * pi);
        const cplx i(0.0, 1.0);
        out.value = (s.value * ch - std::conj(s.value)) / (i * sh);
        out.deriv = (s.deriv * ch - std::conj(s.deriv)) / (i * sh);
    }
    return out;
}

// Bessel (s = +1) or modified Bessel (s = -1) equation of order i nu, complex
// state (re Z, im Z, re Z', im Z').
ImagValue continue_by_ode(ImagKind kind, double nu, ImagValue start, double x0, double x1,
                          const Tolerances& tol)
{
    const double coef = kind == ImagKind::I ? 1.0 : -1.0;
    std::array<double, 4> y{start.value.real(), start.value.imag(), start.deriv.real(), start.deriv.imag()};
    auto rhs = [coef, nu](const std::array<double, 4>& s, std::array<double, 4>& d, double x) {
        // J, Y: Z'' = -Z'/x - (1 + nu^2/x^2) Z;  I: Z'' = -Z'/x + (1 - nu^2/x^2) Z
        const double k = coef - nu * nu / (x * x);
        d[0] = s[2];
        d[1] = s[3];
        d[2] = -s[2] / x + k * s[0];
        d[3] = -s[3] / x + k * s[1];
    };
    ode::integrate(rhs, y, x0, x1, tol);
    start.value = {y[0], y[1]};
    start.deriv = {y[2], y[3]};
    return start;
}

}  // namespace

double bessel_j(int n, double x, bool* underflow)
{
    if (underflow) *underflow = false;
    if (n < 0) return (n % 2 ? -1.0 : 1.0) * bessel_j(-n, x, underflow);
    if (x <= 12.0) return j_series(n, x, underflow);
    return j_miller(n, x);
}

double bessel_y(int n, double x)
{
    double y0 = x <= 12.0 ? y0_series(x) : y_hankel(0, x);
    if (n == 0) return y0;
    double y1 = x <= 12.0 ? y1_series(x) : y_hankel(1, x);
    for (int k = 1; k < n; ++k) {
        const double y2 = (2.0 * k / x) * y1 - y0;
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

double bessel_i(int n, double x)
{
    n = std::abs(n);
    const double lead = log_leading(n, x);
    if (lead < -700.0) return 0.0;
    const double z = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 2000; ++k) {
        term *= z / (k * double(n + k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::exp(lead) * sum;
}

double bessel_j_deriv(int n, double x) { return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x)); }
double bessel_i_deriv(int n, double x) { return 0.5 * (bessel_i(n - 1, x) + bessel_i(n + 1, x)); }

double bessel_j_zero(int n, int k)
{
    double a = std::max(0.5, 0.5 * n), fa = bessel_j(n, a);
    int found = 0;
    const double h = 0.05;
    while (true) {
        const double c = a + h, fc = bessel_j(n, c);
        if (fa * fc < 0.0 && ++found == k) {
            double lo = a, hi = c, flo = fa;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi), fm = bessel_j(n, mid);
                if (fm * flo <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = c;
        fa = fc;
    }
}

cplx log_gamma(cplx z)
{
    static constexpr std::array<double, 9> p{0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= 1.0;
    cplx acc = p[0];
    for (int i = 1; i < 9; ++i) acc += p[i] / (z + double(i));
    const cplx t = z + 7.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

ImagValue imag_order_series(ImagKind kind, double b, double x, const Tolerances& tol)
{
    return series_value(kind, 1.0 / b, x, tol);
}

ImagValue imag_order_ode(ImagKind kind, double b, double x, double x_start, const Tolerances& tol)
{
    const double nu = 1.0 / b;
    ImagValue start = series_value(kind, nu, x_start, tol);
    return continue_by_ode(kind, nu, start, x_start, x, tol);
}

ImagValue bessel_imag_order(ImagKind kind, double b, double x, const Tolerances& tol)
{
    if (x <= tol.x_switch) return imag_order_series(kind, b, x, tol);
    return imag_order_ode(kind, b, x, tol.x_switch, tol);
}

double bessel_k_imag_order(double b, double x)
{
    const double nu = 1.0 / b;
    // integrand below e^{-40} relative beyond cosh t = 1 + 40/x
    const double tmax = std::acosh(1.0 + 40.0 / x);
    auto f = [x, nu](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cos(nu * t); };
    const int pieces = 1 + static_cast<int>(nu * tmax / pi);
    double sum = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double a = tmax * i / pieces, c = tmax * (i + 1) / pieces;
        sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, c, 15, 1e-14);
    }
    return std::exp(-x) * sum;
}

cplx hankel_plus_imag_arg(double b, double x)
{
    // H^{(1)}_{mu}(ix) = (2/(pi i)) e^{-i mu pi/2} K_mu(x), mu = i/b
    return cplx(0.0, -2.0 / pi) * std::exp(pi / (2.0 * b)) * bessel_k_imag_order(b, x);
}

cplx hankel_imag_order_asymptotic(int sign, double b, double x)
{
    const double s = sign >= 0 ? 1.0 : -1.0;
    const cplx phase(s * pi / (2.0 * b), -(1.0 + s) * pi / 4.0);
    return std::sqrt(2.0 / pi) * std::exp(phase) * std::exp(-s * x) / std::sqrt(x);
}

}  // namespace bdspec::specfun
