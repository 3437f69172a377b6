#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "bdspec/angular.hpp"

using namespace bdspec;
constexpr double hp = std::numbers::pi / 2;

TEST_CASE("eigenvalues and boundary condition")
{
    CHECK(angular_eigenpair(0, 2.0).mu == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(angular_eigenpair(3, 0.7).mu == 9.0);
    for (double b : {0.3, 1.0, 2.0})
        for (int n : {0, 1, 2, 5}) {
            const AngularMode m = angular_eigenpair(n, b);
            for (double th : {-hp, hp}) CHECK(std::abs(b * m.deriv(th) + m(th)) < 1e-10);
            CHECK(m(0.0) > 0.0);
        }
}

TEST_CASE("normalization constants")
{
    for (double b : {0.25, 1.0, 3.0}) {
        const double k0 = normalization_constant(0, b);
        const double q = angular_integral([b](double t) { return std::exp(-2 * t / b); }, 4, 1e-13);
        CHECK(std::abs(k0 - 1.0 / std::sqrt(q)) < 1e-12 * k0);
        for (int n = 0; n <= 12; ++n) {
            const AngularMode m = angular_eigenpair(n, b);
            const double nrm = angular_integral([&](double t) { return m(t) * m(t); }, 1 + n / 4, 1e-13);
            CHECK(std::abs(nrm - 1.0) < 1e-10);
            // rescale then renormalise: same constant
            AngularMode d = m;
            d.k_n *= 2.0;
            const double nd = angular_integral([&](double t) { return d(t) * d(t); }, 1 + n / 4, 1e-13);
            CHECK(std::abs(d.k_n / std::sqrt(nd) - m.k_n) < 1e-12 * m.k_n);
        }
    }
}

TEST_CASE("orthonormality m, n <= 30")
{
    const double b = 0.8;
    double worst = 0.0;
    for (int m = 0; m <= 30; ++m) {
        const AngularMode a = angular_eigenpair(m, b);
        for (int n = m; n <= 30; ++n) {
            const AngularMode c = angular_eigenpair(n, b);
            const double v = angular_integral([&](double t) { return a(t) * c(t); }, 1 + (m + n) / 8, 1e-13);
            worst = std::max(worst, std::abs(v - (m == n ? 1.0 : 0.0)));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("gram projection")
{
    const double b = 1.3;
    const AngularMode t0 = angular_eigenpair(0, b), t1 = angular_eigenpair(1, b), t3 = angular_eigenpair(3, b);
    const Projection p3 = gram_project(t3, 8, b);
    CHECK(p3.all_converged());
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(p3.coeffs[n] - (n == 3 ? 1.0 : 0.0)) < 1e-9);
    const Projection p01 = gram_project([&](double t) { return t0(t) + 2 * t1(t); }, 6, b);
    for (int n = 0; n <= 6; ++n) CHECK(std::abs(p01.coeffs[n] - (n == 0 ? 1.0 : n == 1 ? 2.0 : 0.0)) < 1e-9);
}

namespace {
double tail(const std::function<double(double)>& g, int N, double b)
{
    const Projection p = gram_project(g, N, b);
    std::vector<AngularMode> modes;
    for (int n = 0; n <= N; ++n) modes.push_back(angular_eigenpair(n, b));
    auto rem = [&](double t) {
        double s = g(t);
        for (int n = 0; n <= N; ++n) s -= p.coeffs[n] * modes[n](t);
        return s * s;
    };
    // fixed composite Gauss-Legendre: the remainder is smooth, adaptivity buys nothing here
    double acc = 0.0;
    const int pieces = 400;
    for (int i = 0; i < pieces; ++i) {
        const double a = -hp + i * std::numbers::pi / pieces;
        acc += boost::math::quadrature::gauss<double, 20>::integrate(rem, a, a + std::numbers::pi / pieces);
    }
    return std::sqrt(acc);
}
}  // namespace

TEST_CASE("tail of sin(theta + pi/2) shrinks with N")
{
    const double b = 1.0;
    auto g = [](double t) { return std::sin(t + hp); };
    double prev = 1e300;
    for (int N : {5, 10, 20, 40}) {
        const double t = tail(g, N, b);
        CHECK(t < prev);
        prev = t;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("completeness proxy: 10 random smooth test functions, N = 100")
{
    // smooth, compactly supported in the open interval, random trigonometric content
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double b = 1.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::array<double, 5> a{};
        for (double& v : a) v = U(rng);
        const double shift = 0.3 * U(rng);
        auto g = [a, shift](double t) {
            const double x = t / hp;
            if (std::abs(x) >= 1.0) return 0.0;
            double s = 0.0;
            for (int j = 0; j < 5; ++j) s += a[j] * std::cos(j * (t + shift));
            return std::exp(1.0 - 1.0 / (1.0 - x * x)) * s;
        };
        CHECK(tail(g, 100, b) < 1e-4);
    }
}
