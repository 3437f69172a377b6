#include "bdspec/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bdspec/angular.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/ode.hpp"
#include "bdspec/quadrature.hpp"
#include "bdspec/specfun.hpp"

namespace bdspec {

namespace {

constexpr double pi = std::numbers::pi;

double principal_half(double x)
{
    // reduce mod pi into (-pi/2, pi/2]
    double y = std::remainder(x, pi);
    if (y <= -pi / 2) y += pi;
    return y;
}

// e^{-t} sqrt(2 pi t) I_{i nu}(t) ~ this series (real, all terms positive)
double growth_series(double nu, double t)
{
    double sum = 1.0, term = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (4 * nu * nu + odd * odd) / (8.0 * k * t);
        if (term > prev || term < 1e-17 * sum) break;
        sum += term;
        prev = term;
    }
    return sum;
}

struct GrowthCoefficients {
    double A, B;
};

// Integrates w'' = (1 - (1/4 + nu^2)/t^2) w in s = log t for the complex
// solution starting like t^{1/2 + i nu}; w_c = Re, w_s = Im. State (w, t w').
std::array<double, 4> half_line_start(double nu, double t0)
{
    const cplx e(0.5, nu);
    const cplx c = 1.0 / (4.0 * cplx(1.0, nu));
    const cplx lead = std::exp(e * std::log(t0));
    const cplx w0 = lead * (1.0 + c * t0 * t0);
    const cplx p0 = e * w0 + lead * 2.0 * c * t0 * t0;
    return {w0.real(), w0.imag(), p0.real(), p0.imag()};
}

void half_line_advance(double nu, std::array<double, 4>& x, double s0, double s1, const Tolerances& tol)
{
    const double shift = 0.25 + nu * nu;
    auto rhs = [shift](const std::array<double, 4>& y, std::array<double, 4>& dy, double s) {
        const double k = std::exp(2 * s) - shift;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = y[2] + k * y[0];
        dy[3] = y[3] + k * y[1];
    };
    ode::integrate<4>(rhs, x, s0, s1, tol);
}

std::vector<GrowthCoefficients> half_line_growth(double nu, const std::vector<double>& t_out, const Tolerances& tol)
{
    auto x = half_line_start(nu, tol.theta0_t0);
    std::vector<GrowthCoefficients> out;
    double s = std::log(tol.theta0_t0);
    for (double t : t_out) {
        half_line_advance(nu, x, s, std::log(t), tol);
        s = std::log(t);
        const double scale = std::exp(-t) * std::sqrt(2 * pi) / growth_series(nu, t);
        out.push_back({x[1] * scale, x[0] * scale});
    }
    return out;
}

}  // namespace

HalfLineValues half_line_solutions(double b, double t, const Tolerances& tol)
{
    const double nu = 1.0 / b;
    const double t0 = std::min(tol.theta0_t0, t);
    auto x = half_line_start(nu, t0);
    if (t > t0) half_line_advance(nu, x, std::log(t0), std::log(t), tol);
    return {x[1], x[3] / t, x[0], x[2] / t};
}

Theta0Result compute_theta0(double b, const Tolerances& tol)
{
    if (!(b > 0)) throw ConfigError("compute_theta0: b must be positive");
    const double nu = 1.0 / b;
    double t_max = std::max(30.0, 10.0 + 5.0 * std::log(1.0 / b));
    Theta0Result res;
    // small b needs t >> nu^2 before the growth series is usable; extend if the check fails
    for (; t_max <= 400.0; t_max += 20.0) {
        const auto g = half_line_growth(nu, {t_max, t_max + 5.0}, tol);
        const double size = std::hypot(g[1].A, g[1].B);
        const double diff = std::max(std::abs(g[0].A - g[1].A), std::abs(g[0].B - g[1].B)) / size;
        res.A = g[1].A;
        res.B = g[1].B;
        res.t_max = t_max + 5.0;
        res.richardson_diff = diff;
        if (diff <= tol.theta0_richardson) {
            res.theta0 = principal_half(std::atan2(res.A, res.B));
            return res;
        }
    }
    throw NumericalError("compute_theta0: growth coefficients did not settle (b = " + std::to_string(b) + ")");
}

double theta0_bessel_phase(double b, double t_small, const Tolerances& tol)
{
    const double nu = 1.0 / b;
    const cplx v = specfun::bessel_imag_order(specfun::ImagKind::I, b, t_small, tol).value;
    // sqrt(t) I ~ sqrt(t) |c| e^{i(nu log t + chi)}; A/B = -tan chi
    const double chi = std::arg(v * std::exp(cplx(0.0, -nu * std::log(t_small))));
    return principal_half(-chi);
}

double theta0_closed_form(double b)
{
    const double nu = 1.0 / b;
    return principal_half(specfun::log_gamma(cplx(1.0, nu)).imag() + nu * std::log(2.0));
}

AsymptoticModel make_model(const BoundaryParams& params, const Tolerances& tol)
{
    return {params.b, params.beta, compute_theta0(params.b, tol).theta0, 0};
}

double asymptotic_log_lambda(const AsymptoticModel& m, int n)
{
    return 2 * m.b * (m.theta0 + std::atan(m.beta)) - 2.0 * (n + m.index_offset) * pi * m.b;
}

double asymptotic_lambda(const AsymptoticModel& m, int n) { return -std::exp(asymptotic_log_lambda(m, n)); }

ModelComparison compare_spectrum_to_model(const std::vector<EigenvalueRecord>& records, AsymptoticModel model)
{
    std::vector<EigenvalueRecord> neg;
    for (const auto& r : records)
        if (r.mode == 0 && r.lambda < 0) neg.push_back(r);
    if (neg.size() < 3) throw InsufficientTail("compare_spectrum_to_model: need at least 3 negative eigenvalues");
    std::sort(neg.begin(), neg.end(), [](const auto& x, const auto& y) { return x.paper_index < y.paper_index; });

    const auto& deep = neg.front();
    model.index_offset = 0;
    const double off = (asymptotic_log_lambda(model, deep.paper_index) - std::log(-deep.lambda)) / (2 * pi * model.b);
    model.index_offset = static_cast<int>(std::lround(off));

    ModelComparison out{model, {}};
    for (const auto& r : neg) {
        ComparisonRow row;
        row.n = r.paper_index;
        row.lambda = r.lambda;
        const double la = asymptotic_log_lambda(model, r.paper_index);
        row.lambda_asym = -std::exp(la);
        row.log_residual = std::log(-r.lambda) - la;
        row.ratio = std::exp(row.log_residual);
        out.rows.push_back(row);
    }
    return out;
}

double RadialCutoff::value(double r) const
{
    if (r <= plateau) return 1.0;
    if (r >= support_end) return 0.0;
    const double x = (r - plateau) / (support_end - plateau);
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double RadialCutoff::d1(double r) const
{
    if (r <= plateau || r >= support_end) return 0.0;
    const double h = support_end - plateau;
    const double x = (r - plateau) / h;
    return -30.0 * x * x * (1 - x) * (1 - x) / h;
}

double RadialCutoff::d2(double r) const
{
    if (r <= plateau || r >= support_end) return 0.0;
    const double h = support_end - plateau;
    const double x = (r - plateau) / h;
    return -60.0 * x * (1 - x) * (1 - 2 * x) / (h * h);
}

EigenvalueRecord negative_eigenvalue(int n, const BoundaryParams& params, const RadialPotential& q,
                                     const Tolerances& tol)
{
    if (n > -1) throw ConfigError("negative_eigenvalue: index must be <= -1");
    const double lo = -std::exp(2 * pi * params.b * (-n + 3)) - 2 * q.sup_abs() - 1.0;
    for (const auto& r : eigenvalues_L0prime(params, q, {lo, -1e-7, {}}, tol))
        if (r.paper_index == n) return r;
    throw WindowTruncated("negative_eigenvalue: index " + std::to_string(n) + " not found");
}

PseudoModeResult pseudo_mode_residual(int n, const BoundaryParams& params, const RadialCutoff& cutoff,
                                      const RadialPotential& q, const Tolerances& tol)
{
    if (!(cutoff.plateau > 0 && cutoff.plateau < cutoff.support_end && cutoff.support_end < 1.0))
        throw ConfigError("pseudo_mode_residual: need 0 < plateau < support_end < 1");
    const EigenvalueRecord rec = negative_eigenvalue(n, params, q, tol);
    const ModeIndex mode = ModeIndex::make(0, params.b);
    const RadialSolution sol =
        integrate_radial(mode, rec.lambda, q, Direction::Inward, {0.0, 1.0}, delta_for(rec.lambda, q, tol), tol);

    // angular factor, tensor grid on (-pi/2, pi/2)
    const AngularMode ang = angular_eigenpair(0, params.b);
    std::vector<double> th, wth;
    quad::gauss_rule<64>(-pi / 2, pi / 2, th, wth);
    quad::LogSum ang_sum;
    for (std::size_t j = 0; j < th.size(); ++j) ang_sum.add(std::log(wth[j]) + 2 * std::log(std::abs(ang(th[j]))));

    // residual -(Lap mu) phi - 2 grad mu . grad phi on the annulus plateau < r < support_end
    std::vector<double> rr, wr;
    quad::gauss_rule<200>(cutoff.plateau, cutoff.support_end, rr, wr);
    quad::LogSum num;
    for (std::size_t i = 0; i < rr.size(); ++i) {
        const double r = rr[i];
        const double y = sol.log_derivative(r);
        const double factor = cutoff.d2(r) + cutoff.d1(r) * (1.0 + 2.0 * y) / r;
        if (factor == 0.0) continue;
        num.add(std::log(wr[i] * r) + 2 * (sol.log_abs_value(r) + std::log(std::abs(factor))));
    }

    const double den = log_norm_squared(sol, cutoff.support_end, [&](double r) { return cutoff.value(r); });

    PseudoModeResult out;
    out.n = n;
    out.lambda = rec.lambda;
    out.kappa = std::sqrt(-rec.lambda);
    out.log_residual = 0.5 * ((num.log() + ang_sum.log()) - (den + ang_sum.log()));
    out.residual = std::exp(out.log_residual);
    return out;
}

}  // namespace bdspec
