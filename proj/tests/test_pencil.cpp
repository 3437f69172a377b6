#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bdspec/angular.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/pencil.hpp"
#include "bdspec/quadrature.hpp"
#include "bdspec/specfun.hpp"

using namespace bdspec;
constexpr double pi = std::numbers::pi;

namespace {

Eigen::MatrixXcd full_lambda0(cplx lambda, double b, const PencilConfig& cfg)
{
    const Lambda0Block l = lambda0_block(lambda, b, cfg);
    const int N = cfg.N;
    Eigen::MatrixXcd F(N + 1, N + 1);
    F(0, 0) = l.a;
    F.block(0, 1, 1, N) = l.b_vec.transpose();
    F.block(1, 0, N, 1) = l.b_vec;
    F.block(1, 1, N, N) = l.C;
    return F;
}

Eigen::MatrixXd real_MC(double lambda, const BoundaryParams& p, const PencilConfig& cfg)
{
    return assemble_slice(lambda, p, RadialPotential{}, cfg, false).M_plus_C.real();
}

}  // namespace

TEST_CASE("Omega_0 DN eigenvalues: ODE against the harmonic closed form")
{
    for (double R : {1.5, 2.0, 3.0})
        for (int k = 1; k <= 24; ++k) {
            const double ref = annulus_dn_eigenvalue_at_zero(k, R);
            CHECK(ref < 0.0);
            CHECK(std::abs(annulus_dn_eigenvalue(k, 0.0, R).real() - ref) <= 1e-9 * std::abs(ref));
        }
    // more negative lambda makes the outward flux larger
    for (int k : {1, 5, 20})
        CHECK(annulus_dn_eigenvalue(k, -100.0, 2.0).real() < annulus_dn_eigenvalue(k, -1.0, 2.0).real());
}

TEST_CASE("Lambda_0: nonpositive quadratic form and symmetry")
{
    PencilConfig cfg;
    cfg.N = 30;
    std::mt19937 rng(20241);
    std::normal_distribution<double> gauss;
    for (double b : {0.07, 1.0})
        for (double lam : {0.0, -10.0, -600.0}) {
            const Eigen::MatrixXd F = full_lambda0(lam, b, cfg).real();
            for (int i = 0; i < 10; ++i) {
                Eigen::VectorXd h(cfg.N + 1);
                for (auto& v : h) v = gauss(rng);
                CHECK(h.dot(F * h) <= 1e-12 * h.squaredNorm());
            }
        }
    for (cplx lam : {cplx(-40.0, 0.0), cplx(3.0, 2.0), cplx(-100.0, -7.0)}) {
        const Eigen::MatrixXcd C = lambda0_block(lam, 0.5, cfg).C;
        CHECK((C - C.transpose()).norm() <= 1e-8 * C.norm());
    }
}

TEST_CASE("Lambda_0 at lambda = 0 against an independent projection")
{
    // closed-form d_k and fixed composite Gauss quadrature of <Theta_n, S_k>
    PencilConfig cfg;
    cfg.N = 12;
    const double b = 0.5;
    const Eigen::MatrixXd F = full_lambda0(0.0, b, cfg).real();
    std::vector<double> x, w;
    const int panels = 256;
    for (int p = 0; p < panels; ++p) {
        const double a = -pi / 2 + pi * p / panels;
        quad::gauss_rule<20>(a, a + pi / panels, x, w);
    }
    auto proj = [&](int n, int k) {
        const AngularMode th = angular_eigenpair(n, b);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += w[i] * th(x[i]) * std::sqrt(2.0 / pi) * std::sin(k * (x[i] + pi / 2));
        return s;
    };
    auto entry = [&](int n, int m) {
        double s = 0.0;
        for (int k = 1; k <= cfg.sine_modes; ++k)
            s += proj(n, k) * annulus_dn_eigenvalue_at_zero(k, cfg.outer_radius) * proj(m, k);
        return s;
    };
    for (auto [n, m] : {std::pair{0, 0}, std::pair{0, 3}, std::pair{5, 7}})
        CHECK(std::abs(F(n, m) - entry(n, m)) <= 1e-6 * std::max(1.0, std::abs(F(n, m))));
}

TEST_CASE("Lambda_1: diagonal entries")
{
    const BoundaryParams p{0.5, 0.0};
    const RadialPotential q;
    const double kappa = std::sqrt(50.0);
    const auto m = lambda1_block(-50.0, p, q, 60);
    for (int n = 1; n <= 5; ++n) {
        const double ref = -kappa * specfun::bessel_i_deriv(n, kappa) / specfun::bessel_i(n, kappa);
        CHECK(std::abs(m[n].real() - ref) <= 1e-8 * std::abs(ref));
    }
    double prev = 1e300;
    for (int n = 5; n <= 60; n += 5) {
        const double dev = std::abs(m[n].real() / -n - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("scalar reduction: Herglotz sign, negative block, monotone between poles")
{
    const BoundaryParams p{0.5, 0.3};
    const RadialPotential q;
    PencilConfig cfg;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-200.0, 100.0), lg(std::log(0.1), std::log(10.0));
    std::bernoulli_distribution sign;
    for (int i = 0; i < 20; ++i) {
        const cplx lam(re(rng), (sign(rng) ? 1 : -1) * std::exp(lg(rng)));
        const cplx E = scalar_reduction_E(lam, p, q, cfg);
        CHECK(E.imag() * lam.imag() >= -1e-10);
    }
    for (double lam : {-5.0, -50.0, -600.0, -2000.0}) CHECK(max_eig_MplusC(assemble_slice(lam, p, q, cfg, false)) < 0.0);

    const BoundaryParams p7{0.07, 0.0};
    cfg.N = 40;
    const auto poles = pencil_negative_eigenvalues(p7, q, {-470.0, -250.0}, cfg).poles;
    REQUIRE(poles.size() == 2);
    double prev = -1e300;
    for (int i = 1; i < 40; ++i) {
        const double lam = poles[0] + (poles[1] - poles[0]) * i / 40.0;
        const double E = scalar_reduction_E(lam, p7, q, cfg).real();
        CHECK(E > prev);
        prev = E;
    }
}

TEST_CASE("factorized inverse of M + C along a real segment")
{
    // (M+C)(l+z) [(1 + (M+C)(l)^{-1} I)^{-1} (M+C)(l)^{-1}] = 1, I the integral of (M+C)' over [l, l+z]
    const BoundaryParams p{0.5, 0.0};
    PencilConfig cfg;
    cfg.N = 20;
    const double l = -50.0;
    for (double z : {-5.0, -20.0}) {
        std::vector<double> x, w;
        quad::gauss_rule<20>(l, l + z, x, w);
        const double h = 0.05;
        Eigen::MatrixXd I = Eigen::MatrixXd::Zero(cfg.N, cfg.N);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Eigen::MatrixXd d = (-real_MC(x[i] + 2 * h, p, cfg) + 8 * real_MC(x[i] + h, p, cfg) -
                                       8 * real_MC(x[i] - h, p, cfg) + real_MC(x[i] - 2 * h, p, cfg)) /
                                      (12 * h);
            I += w[i] * d;
        }
        const Eigen::MatrixXd A0 = real_MC(l, p, cfg), Az = real_MC(l + z, p, cfg);
        const Eigen::MatrixXd inv0 = A0.inverse();
        const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(cfg.N, cfg.N);
        const Eigen::MatrixXd rhs = (one + inv0 * I).inverse() * inv0;
        CHECK((Az * rhs - one).norm() <= 1e-8 * std::sqrt(double(cfg.N)));
    }
}

TEST_CASE("pencil roots: interlacing, log gaps, certificates, truncation")
{
    const BoundaryParams p{0.07, 0.0};
    const RadialPotential q;
    const PencilWindow win{-3000.0, -600.0};
    PencilConfig cfg;
    cfg.N = 40;
    const PencilResult r = pencil_negative_eigenvalues(p, q, win, cfg);
    CHECK(r.threshold == doctest::Approx(-1.0));
    REQUIRE(r.poles.size() == 4);
    for (std::size_t i = 0; i + 1 < r.poles.size(); ++i) {
        int inside = 0;
        for (const auto& root : r.roots) inside += strictly_between(root, r.poles[i], r.poles[i + 1]);
        CHECK(inside == 1);
    }
    REQUIRE(r.roots.size() == 4);
    for (std::size_t i = 0; i + 1 < r.roots.size(); ++i) {
        const double gap = std::log(-r.roots[i].lambda) - std::log(-r.roots[i + 1].lambda);
        CHECK(std::abs(gap - 2 * pi * p.b) <= 0.05);
    }
    for (const auto& root : r.roots) {
        CHECK(root.certificate.h(0) == 1.0);
        CHECK(root.certificate.residual <= 1e-6);
        CHECK(root.offset < 0.0);
    }
    const TruncationCheck tc = check_truncation(p, q, win, cfg);
    REQUIRE(tc.roots_N.size() == tc.roots_2N.size());
    CHECK(tc.max_rel_drift < 1e-6);
}

TEST_CASE("pencil roots: local pole expansion agrees with direct bracketing")
{
    const BoundaryParams p{0.07, 0.0};
    const RadialPotential q;
    PencilConfig cfg;
    cfg.N = 40;
    const PencilResult local = pencil_negative_eigenvalues(p, q, {-470.0, -250.0}, cfg);
    cfg.local_expansion_below = 1e-6;
    const PencilResult direct = pencil_negative_eigenvalues(p, q, {-470.0, -250.0}, cfg);
    REQUIRE(local.roots.size() == 2);
    REQUIRE(direct.roots.size() == 2);
    CHECK(local.roots[0].local);
    CHECK_FALSE(direct.roots[0].local);
    CHECK(std::abs(local.roots[0].lambda - direct.roots[0].lambda) <= 1e-9 * std::abs(direct.roots[0].lambda));
    for (const auto& root : direct.roots) CHECK(root.certificate.residual <= 1e-6);
}

TEST_CASE("pencil windows: threshold and edges")
{
    const BoundaryParams p{0.07, 0.0};
    const RadialPotential q;
    CHECK_THROWS_AS(pencil_negative_eigenvalues(p, q, {-100.0, 5.0}, PencilConfig{}), ConfigError);
    const double pole = pencil_negative_eigenvalues(p, q, {-800.0, -600.0}, PencilConfig{}).poles.at(0);
    CHECK_THROWS_AS(pencil_negative_eigenvalues(p, q, {pole, -600.0}, PencilConfig{}), WindowTruncated);
    // a constant potential moves the L_1 ground state (first J_1 zero squared) with it
    CHECK(sufficiently_negative_threshold(RadialPotential::constant(-20.0)) ==
          doctest::Approx(14.681970642123893 - 20.0 - 1.0).epsilon(1e-8));
}
