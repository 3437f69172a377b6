#include "bdspec/pencil.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "bdspec/angular.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/ode.hpp"
#include "bdspec/spectrum.hpp"

namespace bdspec {

namespace {
constexpr double pi = std::numbers::pi;
using state4 = std::array<double, 4>;

double arccot(double x) { return pi / 2 - std::atan(x); }
}  // namespace

cplx annulus_dn_eigenvalue(int k, cplx lambda, double outer_radius, const Tolerances& tol)
{
    // t = log r, g_tt = (k^2 - lambda r^2) g, integrated inward from the outer arc
    state4 x{0.0, 0.0, 1.0, 0.0};
    const double kk = double(k) * k;
    auto rhs = [&](const state4& y, state4& d, double t) {
        const cplx Q = kk - lambda * std::exp(2 * t);
        const cplx g = Q * cplx(y[0], y[1]);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = g.real();
        d[3] = g.imag();
    };
    auto renorm = [](state4& y, double) {
        const double m = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2]), std::abs(y[3])});
        if (m > 1e100)
            for (double& v : y) v /= m;
    };
    ode::integrate<4>(rhs, x, std::log(outer_radius), 0.0, tol, renorm);
    const cplx g(x[0], x[1]), gt(x[2], x[3]);
    if (std::abs(g) < 1e-10 * std::abs(gt))
        throw NearDirichletEigenvalue("Omega_0 Dirichlet problem is singular near lambda = " +
                                      std::to_string(lambda.real()) + " (sine mode " + std::to_string(k) + ")");
    return gt / g;
}

double annulus_dn_eigenvalue_at_zero(int k, double outer_radius)
{
    const double p = std::pow(outer_radius, 2.0 * k);
    return k * (1 + p) / (1 - p);
}

const Eigen::MatrixXd& sine_projection(double b, int N, int K)
{
    static std::mutex mu;
    static std::map<std::pair<double, int>, Eigen::MatrixXd> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& P = cache[{b, K}];
    if (P.rows() >= N + 1) return P;
    // build for at least 2N so that the truncation check reuses it
    const int rows = std::max(N + 1, 2 * N + 1);
    P.resize(rows, K);
    const double c = std::sqrt(2.0 / pi);
    for (int k = 1; k <= K; ++k) {
        const Projection pr = gram_project([&](double th) { return c * std::sin(k * (th + pi / 2)); }, rows - 1, b, k);
        if (!pr.all_converged())
            throw QuadratureFailure("sine_projection: Gram projection did not converge for sine mode " +
                                    std::to_string(k));
        for (int n = 0; n < rows; ++n) P(n, k - 1) = pr.coeffs[n];
    }
    return P;
}

Lambda0Block lambda0_block(cplx lambda, double b, const PencilConfig& cfg, const Tolerances& tol)
{
    const int N = cfg.N, K = cfg.sine_modes;
    const Eigen::MatrixXd P = sine_projection(b, N, K).topRows(N + 1);
    Eigen::VectorXcd d(K);
    for (int k = 1; k <= K; ++k) d(k - 1) = annulus_dn_eigenvalue(k, lambda, cfg.outer_radius, tol);
    const Eigen::MatrixXcd full = P.cast<cplx>() * d.asDiagonal() * P.transpose().cast<cplx>();
    Lambda0Block out;
    out.a = full(0, 0);
    out.b_vec = full.block(1, 0, N, 1);
    out.C = full.block(1, 1, N, N);
    return out;
}

std::vector<cplx> lambda1_block(cplx lambda, const BoundaryParams& params, const RadialPotential& q, int N,
                                const Tolerances& tol)
{
    std::vector<cplx> m(N + 1);
    for (int n = 0; n <= N; ++n) m[n] = m_function(ModeIndex::make(n, params.b), lambda, q, params, tol);
    return m;
}

PencilSlice assemble_slice(cplx lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                           bool with_m0, const Tolerances& tol)
{
    const int N = cfg.N;
    PencilSlice s;
    s.lambda = lambda;
    s.N = N;
    const Lambda0Block l0 = lambda0_block(lambda, params.b, cfg, tol);
    s.a = l0.a;
    s.b_vec = l0.b_vec;
    s.M_plus_C = l0.C;
    for (int n = 1; n <= N; ++n) s.M_plus_C(n - 1, n - 1) += m_function(ModeIndex::make(n, params.b), lambda, q, params, tol);
    s.m0 = with_m0 ? m_function(ModeIndex::make(0, params.b), lambda, q, params, tol)
                   : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    return s;
}

cplx schur_part(const PencilSlice& s)
{
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s.M_plus_C);
    const double rc = lu.rcond();
    if (!(rc > 1e-13))
        throw SingularBlock("M + C is numerically singular at lambda = " + std::to_string(s.lambda.real()) +
                            "; try another truncation");
    const Eigen::VectorXcd y = lu.solve(s.b_vec);
    return s.a - (s.b_vec.transpose() * y).value();
}

cplx scalar_reduction_E(cplx lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                        const Tolerances& tol)
{
    const PencilSlice s = assemble_slice(lambda, params, q, cfg, true, tol);
    return s.m0 + schur_part(s);
}

double max_eig_MplusC(const PencilSlice& s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.M_plus_C.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eig_MplusC(const PencilSlice& s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.M_plus_C.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double sufficiently_negative_threshold(const RadialPotential& q, const Tolerances& tol)
{
    // the Omega_0 Dirichlet spectrum is positive, so only L_1 and 0 matter
    double hi = q.inf() + 50.0;
    for (int i = 0; i < 40; ++i, hi = 2 * hi + 50.0) {
        const auto e = eigenvalues_Ln(1, q, {q.inf() - 1.0, hi, {}}, tol);
        if (!e.empty()) return std::min(e.front().lambda, 0.0) - 1.0;
    }
    throw NumericalError("sufficiently_negative_threshold: no L_1 eigenvalue found");
}

PhaseValue pencil_phase(double lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                        const Tolerances& tol)
{
    const PencilSlice s = assemble_slice(lambda, params, q, cfg, false, tol);
    PhaseValue v;
    v.schur = schur_part(s).real();
    v.theta = outward_phase(ModeIndex::make(0, params.b), lambda, q, params, tol);
    v.H = v.theta - arccot(params.b * v.schur);
    return v;
}

KernelCertificate kernel_certificate(double lambda, const BoundaryParams& params, const RadialPotential& q,
                                     const PencilConfig& cfg, const Tolerances& tol, std::optional<double> m0_value)
{
    const PencilSlice s = assemble_slice(lambda, params, q, cfg, false, tol);
    double m0;
    if (m0_value) {
        m0 = *m0_value;
    } else {
        const double theta = outward_phase(ModeIndex::make(0, params.b), lambda, q, params, tol);
        m0 = -std::cos(theta) / (params.b * std::sin(theta));
    }
    const Eigen::MatrixXd MC = s.M_plus_C.real();
    const Eigen::VectorXd bv = s.b_vec.real();
    KernelCertificate c;
    c.lambda = lambda;
    c.h.resize(s.N + 1);
    c.h(0) = 1.0;
    c.h.tail(s.N) = -MC.partialPivLu().solve(bv);
    Eigen::MatrixXd full(s.N + 1, s.N + 1);
    full(0, 0) = m0 + s.a.real();
    full.block(0, 1, 1, s.N) = bv.transpose();
    full.block(1, 0, s.N, 1) = bv;
    full.block(1, 1, s.N, s.N) = MC;
    c.residual = (full * c.h).norm() / c.h.norm();
    return c;
}

bool strictly_between(const PencilRoot& r, double lo, double hi)
{
    const double base = r.local ? r.pole : r.lambda;
    const double off = r.local ? r.offset : 0.0;
    const bool above_lo = base > lo || (base == lo && off > 0);
    const bool below_hi = base < hi || (base == hi && off < 0);
    return above_lo && below_hi;
}

namespace {

// m0 ~ -rho/(lambda - p) + m_reg near a pole p, rho = R'(1)^2 / ||R||^2 for the
// Dirichlet eigenfunction (Green: dR(1)/dlambda = ||R||^2 / R'(1)).
struct PoleData {
    double p;
    double phase_index;  // theta(p) / pi
    double log_rho;
    double m_reg;
    double m_slope;  // m0 ~ -rho/(lambda - p) + m_reg + m_slope (lambda - p)
    double schur;
};

PoleData pole_data(double p, double phase_index, double gap, const BoundaryParams& params, const RadialPotential& q,
                   const PencilConfig& cfg, const Tolerances& tol)
{
    const ModeIndex mode = ModeIndex::make(0, params.b);
    PoleData d{p, phase_index, 0.0, 0.0, 0.0, 0.0};
    const RadialSolution sol =
        integrate_radial(mode, p, q, Direction::Inward, {0.0, 1.0}, delta_for(p, q, tol), tol);
    d.log_rho = -log_norm_squared(sol, 1.0);  // r R'(1) = 1
    d.schur = schur_part(assemble_slice(p, params, q, cfg, false, tol)).real();
    auto m0 = [&](double l) {
        const double th = outward_phase(mode, l, q, params, tol);
        return -std::cos(th) / (params.b * std::sin(th));
    };
    // the phase is ill-conditioned inside the transition (width ~ rho/|m_reg|), so
    // sample m0 well outside it; the symmetric mean cancels the pole term
    const double rho = std::exp(d.log_rho);
    double width = rho / std::sqrt(-p);
    for (int pass = 0; pass < 3; ++pass) {
        const double eta = std::min(std::max(1e-6 * std::abs(p), 100.0 * width), 0.05 * gap);
        const double lo = m0(p - eta), hi = m0(p + eta);
        d.m_reg = 0.5 * (lo + hi);
        d.m_slope = (hi - lo + 2 * rho / eta) / (2 * eta);
        const double w = rho / std::abs(d.m_reg + d.schur);
        if (100.0 * w <= eta || eta == 0.05 * gap) break;
        width = w;
    }
    return d;
}

}  // namespace

PencilResult pencil_negative_eigenvalues(const BoundaryParams& params, const RadialPotential& q,
                                         const PencilWindow& window, const PencilConfig& cfg, const Tolerances& tol)
{
    PencilResult res;
    res.N = cfg.N;
    res.threshold = sufficiently_negative_threshold(q, tol);
    if (!(window.lambda_min < window.lambda_max) || window.lambda_max > res.threshold)
        throw ConfigError("pencil window must lie below the sufficiently-negative threshold " +
                          std::to_string(res.threshold));
    for (const auto& r : eigenvalues_L0prime(params, q, {window.lambda_min, window.lambda_max, {}}, tol))
        res.poles.push_back(r.lambda);

    const PhaseValue lo = pencil_phase(window.lambda_min, params, q, cfg, tol);
    const PhaseValue hi = pencil_phase(window.lambda_max, params, q, cfg, tol);
    for (double e : {lo.H / pi, hi.H / pi, lo.theta / pi, hi.theta / pi})
        if (std::abs(e - std::round(e)) < 1e-9)
            throw WindowTruncated("a pencil root or m0 pole sits on the window edge; widen or move the window");

    // bracket points: window edges and poles. At a pole theta is exactly a multiple of pi.
    std::vector<double> x{window.lambda_min};
    std::vector<double> h{lo.H / pi};
    std::vector<PoleData> poles;
    double index = std::floor(lo.theta / pi) + 1.0;
    for (std::size_t i = 0; i < res.poles.size(); ++i) {
        const double p = res.poles[i];
        double gap = std::abs(p);
        if (i > 0) gap = std::min(gap, p - res.poles[i - 1]);
        if (i + 1 < res.poles.size()) gap = std::min(gap, res.poles[i + 1] - p);
        poles.push_back(pole_data(p, index, gap, params, q, cfg, tol));
        x.push_back(p);
        h.push_back(index - arccot(params.b * poles.back().schur) / pi);
        index += 1.0;
    }
    x.push_back(window.lambda_max);
    h.push_back(hi.H / pi);

    auto H = [&](double l) { return pencil_phase(l, params, q, cfg, tol).H / pi; };
    boost::math::tools::eps_tolerance<double> stop(std::numeric_limits<double>::digits - 3);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        for (double k = std::floor(h[i]) + 1; k < h[i + 1]; k += 1.0) {
            if (k == h[i]) continue;
            const bool upper_is_pole = i + 1 < x.size() - 1;
            if (upper_is_pole) {
                const PoleData& pd = poles[i];
                // rho/delta + m_reg - m_slope delta + S(p - delta) = 0
                const double rho = std::exp(pd.log_rho);
                double S = pd.schur;
                double delta = rho / -(pd.m_reg + S);
                if (delta > 0 && delta < cfg.local_expansion_below * std::abs(pd.p)) {
                    for (int it = 0; it < 4; ++it) {
                        if (pd.p - delta != pd.p)
                            S = schur_part(assemble_slice(pd.p - delta, params, q, cfg, false, tol)).real();
                        const double next = rho / (pd.m_slope * delta - pd.m_reg - S);
                        const bool done = std::abs(next - delta) <= 1e-12 * delta;
                        delta = next;
                        if (done) break;
                    }
                    PencilRoot r;
                    r.pole = pd.p;
                    r.offset = -delta;
                    r.lambda = pd.p - delta;
                    r.local = true;
                    r.certificate = kernel_certificate(r.lambda, params, q, cfg, tol,
                                                       rho / delta + pd.m_reg - pd.m_slope * delta);
                    res.roots.push_back(r);
                    continue;
                }
            }
            std::uintmax_t iters = 300;
            auto f = [&](double l) { return H(l) - k; };
            const auto br = boost::math::tools::toms748_solve(f, x[i], x[i + 1], h[i] - k, h[i + 1] - k, stop, iters);
            // keep the endpoint with the smaller pencil residual
            const KernelCertificate ca = kernel_certificate(br.first, params, q, cfg, tol);
            const KernelCertificate cb = kernel_certificate(br.second, params, q, cfg, tol);
            PencilRoot r;
            r.certificate = ca.residual <= cb.residual ? ca : cb;
            r.lambda = r.certificate.lambda;
            if (upper_is_pole) {
                r.pole = x[i + 1];
                r.offset = r.lambda - r.pole;
            }
            res.roots.push_back(r);
        }
    }
    return res;
}

TruncationCheck check_truncation(const BoundaryParams& params, const RadialPotential& q, const PencilWindow& window,
                                 const PencilConfig& cfg, const Tolerances& tol)
{
    PencilConfig twice = cfg;
    twice.N = 2 * cfg.N;
    TruncationCheck out;
    for (const auto& r : pencil_negative_eigenvalues(params, q, window, cfg, tol).roots) out.roots_N.push_back(r.lambda);
    for (const auto& r : pencil_negative_eigenvalues(params, q, window, twice, tol).roots)
        out.roots_2N.push_back(r.lambda);
    if (out.roots_N.size() != out.roots_2N.size()) {
        out.max_rel_drift = std::numeric_limits<double>::infinity();
        return out;
    }
    for (std::size_t i = 0; i < out.roots_N.size(); ++i)
        out.max_rel_drift =
            std::max(out.max_rel_drift, std::abs(out.roots_N[i] - out.roots_2N[i]) / std::abs(out.roots_2N[i]));
    return out;
}

}  // namespace bdspec
