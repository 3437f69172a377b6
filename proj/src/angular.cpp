#include "bdspec/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bdspec {

namespace {
constexpr double half_pi = std::numbers::pi / 2;
}

double normalization_constant(int n, double b)
{
    if (n == 0) return 1.0 / std::sqrt(b * std::sinh(std::numbers::pi / b));
    const double nb = n * b;
    // cross term integrates to zero on the symmetric interval
    const double norm2 = n % 2 == 0 ? half_pi * (1.0 + 1.0 / (nb * nb)) : half_pi * (1.0 + nb * nb);
    return 1.0 / std::sqrt(norm2);
}

AngularMode angular_eigenpair(int n, double b)
{
    AngularMode m;
    m.n = n;
    m.b = b;
    m.mu = n == 0 ? -1.0 / (b * b) : double(n) * n;
    m.parity = n == 0 ? Parity::Zeroth : (n % 2 == 0 ? Parity::Even : Parity::Odd);
    m.k_n = normalization_constant(n, b);
    return m;
}

double AngularMode::operator()(double th) const
{
    switch (parity) {
        case Parity::Zeroth: return k_n * std::exp(-th / b);
        case Parity::Even: return k_n * (std::cos(n * th) - std::sin(n * th) / (n * b));
        case Parity::Odd: return k_n * (std::cos(n * th) + n * b * std::sin(n * th));
    }
    return 0.0;
}

double AngularMode::deriv(double th) const
{
    switch (parity) {
        case Parity::Zeroth: return -k_n * std::exp(-th / b) / b;
        case Parity::Even: return k_n * (-n * std::sin(n * th) - std::cos(n * th) / b);
        case Parity::Odd: return k_n * (-n * std::sin(n * th) + n * n * b * std::cos(n * th));
    }
    return 0.0;
}

bool Projection::all_converged() const
{
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

double angular_integral(const std::function<double(double)>& f, int pieces, double abs_tol, double* err)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    pieces = std::max(1, pieces);
    const double rel = 1e-13;
    double sum = 0.0, e_tot = 0.0;
    const double h = std::numbers::pi / pieces;
    for (int i = 0; i < pieces; ++i) {
        double e = 0.0;
        const double a = -half_pi + i * h;
        // one panel first; recurse only if it misses this piece's share of abs_tol
        double v = GK::integrate(f, a, a + h, 0, 0.0, &e);
        if (e > abs_tol / pieces) v = GK::integrate(f, a, a + h, 8, rel, &e);
        sum += v;
        e_tot += e;
    }
    if (err) *err = e_tot;
    return sum;
}

Projection gram_project(const std::function<double(double)>& g, int N, double b, double oscillation,
                        const Tolerances& tol)
{
    Projection p;
    p.coeffs.resize(N + 1);
    p.errors.resize(N + 1);
    p.converged.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        const AngularMode th = angular_eigenpair(n, b);
        const int pieces = 1 + static_cast<int>((n + oscillation) / 8.0);
        double err = 0.0;
        p.coeffs[n] = angular_integral([&](double x) { return g(x) * th(x); }, pieces, tol.quad_abs, &err);
        p.errors[n] = err;
        p.converged[n] = err <= 1e-9;
    }
    return p;
}

}  // namespace bdspec
