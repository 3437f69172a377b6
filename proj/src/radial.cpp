#include "bdspec/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bdspec/errors.hpp"
#include "bdspec/ode.hpp"
#include "bdspec/quadrature.hpp"

namespace bdspec {

// ---------------------------------------------------------------- potential

RadialPotential RadialPotential::constant(double c)
{
    RadialPotential p;
    p.q_[0] = c;
    return p;
}

RadialPotential RadialPotential::from_samples(std::vector<double> r, std::vector<double> q)
{
    if (r.empty() || r.size() != q.size()) throw ConfigError("potential: need matching non-empty r and q columns");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || !std::isfinite(q[i]))
            throw ConfigError("potential: non-finite entry at row " + std::to_string(i + 1));
        if (r[i] <= 0.0 || r[i] > 1.0)
            throw ConfigError("potential: r outside (0,1] at row " + std::to_string(i + 1));
        if (i > 0 && r[i] <= r[i - 1])
            throw ConfigError("potential: r not strictly increasing at row " + std::to_string(i + 1));
    }
    RadialPotential p;
    p.r_ = std::move(r);
    p.q_ = std::move(q);
    return p;
}

RadialPotential RadialPotential::from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("potential: cannot open " + path);
    std::vector<double> r, q;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, c;
        if (!(ss >> a >> c)) {
            if (row == 1) continue;  // header
            throw ConfigError("potential: unparsable row " + std::to_string(row) + " in " + path);
        }
        if (!r.empty() && a <= r.back())
            throw ConfigError("potential: r not strictly increasing at row " + std::to_string(row) + " in " + path);
        r.push_back(a);
        q.push_back(c);
    }
    return from_samples(std::move(r), std::move(q));
}

double RadialPotential::operator()(double r) const
{
    if (r_.size() == 1 || r <= r_.front()) return q_.front();
    if (r >= r_.back()) return q_.back();
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t i = std::size_t(it - r_.begin());
    const double w = (r - r_[i - 1]) / (r_[i] - r_[i - 1]);
    return (1.0 - w) * q_[i - 1] + w * q_[i];
}

double RadialPotential::slope(double r) const
{
    if (r_.size() == 1 || r <= r_.front() || r >= r_.back()) return 0.0;
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t i = std::size_t(it - r_.begin());
    return (q_[i] - q_[i - 1]) / (r_[i] - r_[i - 1]);
}

double RadialPotential::sup_abs() const
{
    double s = 0.0;
    for (double v : q_) s = std::max(s, std::abs(v));
    return s;
}

double RadialPotential::inf() const { return *std::min_element(q_.begin(), q_.end()); }

RadialPotential RadialPotential::shifted(double c) const
{
    RadialPotential p = *this;
    for (double& v : p.q_) v += c;
    return p;
}

// ---------------------------------------------------------------- helpers

namespace {

using state2 = std::array<double, 2>;
using state4 = std::array<double, 4>;

// State (phi - drift t, log rho). For n = 0 the drift 1/b removes the free
// log-oscillation, so the integrated phase stays O(1) near r = 0.
struct PruferRhs {
    const ModeIndex& mode;
    double lambda;
    const RadialPotential& q;
    double s;
    double drift = 0.0;
    void operator()(const state2& x, state2& d, double t) const
    {
        const double r = std::exp(t);
        const double pert = r * r * (q(r) - lambda);
        const double phi = x[0] + drift * t;
        const double sn = std::sin(phi), cs = std::cos(phi);
        if (drift != 0.0) {
            // cos^2/s - s mu sin^2 = 1/s when s^2 mu = -1
            d[0] = cs * cs / s - s * mode.mu * sn * sn - drift - s * pert * sn * sn;
        } else {
            d[0] = cs * cs / s - s * (mode.mu + pert) * sn * sn;
        }
        d[1] = sn * cs * (1.0 + s * s * (mode.mu + pert)) / s;
    }
};

// knot positions of q in log variable strictly inside (t0, t1), in travel order
std::vector<double> breakpoints(const RadialPotential& q, double t0, double t1)
{
    std::vector<double> out;
    const double lo = std::min(t0, t1), hi = std::max(t0, t1);
    for (double r : q.radii()) {
        const double t = std::log(r);
        if (t > lo && t < hi) out.push_back(t);
    }
    if (t1 < t0) std::reverse(out.begin(), out.end());
    return out;
}

template <std::size_t N, class Rhs, class Obs>
void integrate_split(Rhs&& rhs, std::array<double, N>& x, double t0, double t1, const RadialPotential& q,
                     const Tolerances& tol, Obs&& obs)
{
    double a = t0, dt = 0.0;
    bool first = true;
    auto pass = [&](std::array<double, N>& y, double t) {
        if (!first && t == a) return;
        first = false;
        obs(y, t);
    };
    for (double k : breakpoints(q, t0, t1)) {
        dt = ode::integrate(rhs, x, a, k, tol, pass, dt);
        a = k;
    }
    ode::integrate(rhs, x, a, t1, tol, pass, dt);
}

double drift_for(const ModeIndex& mode, double s)
{
    return mode.n == 0 && std::abs(s * s * mode.mu + 1.0) < 1e-14 ? 1.0 / s : 0.0;
}

state2 to_prufer(InitialData d, double s)
{
    return {std::atan2(d.value, s * d.r_deriv), 0.5 * std::log(d.value * d.value + s * s * d.r_deriv * d.r_deriv)};
}

double log_sinh(double S) { return S > 20.0 ? S - std::log(2.0) + std::log1p(-std::exp(-2.0 * S)) : std::log(std::sinh(S)); }

double Q_slope(const ModeIndex& mode, double lambda, const RadialPotential& q, double t)
{
    (void)mode;
    const double r = std::exp(t);
    return 2.0 * r * r * (q(r) - lambda) + r * r * r * q.slope(r);
}

double action(const ModeIndex& mode, double lambda, const RadialPotential& q, double t)
{
    if (t >= 0.0) return 0.0;
    auto f = [&](double u) { return std::sqrt(std::max(0.0, radial_Q(mode, lambda, q, u))); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, t, 0.0, 12, 1e-13);
}

// t where Q crosses w^2, searching (t_lo, 0); Q(0) > w^2 assumed.
double wkb_switch_point(const ModeIndex& mode, double lambda, const RadialPotential& q, double t_lo, double w)
{
    double lo = t_lo, hi = 0.0;
    if (radial_Q(mode, lambda, q, lo) >= w * w) return lo;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        (radial_Q(mode, lambda, q, mid) >= w * w ? hi : lo) = mid;
    }
    return hi;
}

bool use_wkb(const ModeIndex& mode, double lambda, const RadialPotential& q, InitialData init, const Tolerances& tol)
{
    const double Q0 = radial_Q(mode, lambda, q, 0.0);
    return init.value == 0.0 && init.r_deriv == 1.0 && Q0 > tol.wkb_switch * tol.wkb_switch;
}

// WKB Dirichlet solution at t: log|psi| and psi_t/psi (psi < 0 for t < 0).
void wkb_values(const ModeIndex& mode, double lambda, const RadialPotential& q, double t, double& log_abs, double& y)
{
    const double Q0 = radial_Q(mode, lambda, q, 0.0);
    const double Q = radial_Q(mode, lambda, q, t);
    const double S = action(mode, lambda, q, t);
    log_abs = -0.25 * std::log(Q0) - 0.25 * std::log(Q) + log_sinh(S);
    y = -Q_slope(mode, lambda, q, t) / (4.0 * Q) - std::sqrt(Q) / std::tanh(S);
}

state2 wkb_start(const ModeIndex& mode, double lambda, const RadialPotential& q, double t, double s)
{
    double la, y;
    wkb_values(mode, lambda, q, t, la, y);
    return {std::atan2(-1.0, -s * y), la + 0.5 * std::log1p(s * s * y * y)};
}

// Integrates the Prufer system, optionally recording nodes.
state2 shoot(const ModeIndex& mode, double lambda, const RadialPotential& q, double t0, double t1, state2 x, double s,
             const Tolerances& tol, std::vector<RadialSolution::Node>* nodes)
{
    PruferRhs rhs{mode, lambda, q, s, drift_for(mode, s)};
    const double w = rhs.drift;
    x[0] -= w * t0;
    try {
        if (!nodes) {
            integrate_split(rhs, x, t0, t1, q, tol, [](const state2&, double) {});
            x[0] += w * t1;
            return x;
        }
        auto record = [&](const state2& y, double t) {
            state2 d;
            rhs(y, d, t);
            nodes->push_back({t, y[0] + w * t, y[1], d[0] + w, d[1]});
        };
        const int segs = std::max(1, tol.min_checkpoints);
        for (int k = 0; k < segs; ++k) {
            const double a = t0 + (t1 - t0) * k / segs, c = t0 + (t1 - t0) * (k + 1) / segs;
            bool first = k > 0;
            integrate_split(rhs, x, a, c, q, tol, [&](const state2& y, double t) {
                if (!first) record(y, t);
                first = false;
            });
        }
    } catch (const StepUnderflow& e) {
        throw StepUnderflow("radial integration: step size underflow at r = " + std::to_string(std::exp(e.r)),
                            std::exp(e.r));
    }
    x[0] += w * t1;
    return x;
}

}  // namespace

// ---------------------------------------------------------------- setup

double delta_for(double lambda, const RadialPotential& q, const Tolerances& tol)
{
    const double scale = std::abs(lambda) + q.sup_abs();
    if (scale <= 0.0) return tol.delta_max;
    return std::min(tol.delta_max, std::sqrt(tol.delta_perturbation / scale));
}

double prufer_scale(const ModeIndex& mode, const BoundaryParams&) { return 1.0 / std::sqrt(std::abs(mode.mu)); }

InitialData u0_data(double b, double r)
{
    const double t = std::log(r);
    return {std::sin(t / b), std::cos(t / b) / b};
}

InitialData v0_data(double b, double r)
{
    const double t = std::log(r);
    return {std::cos(t / b), -std::sin(t / b) / b};
}

InitialData limit_circle_data(const BoundaryParams& p, double r)
{
    const InitialData u = u0_data(p.b, r), v = v0_data(p.b, r);
    return {u.value + p.beta * v.value, u.r_deriv + p.beta * v.r_deriv};
}

InitialData frobenius_data(const ModeIndex& mode, double lambda, const RadialPotential& q, double r)
{
    const int n = mode.n;
    const double c = (q(r) - lambda) / (4.0 * (n + 1));
    const double cr2 = c * r * r;
    if (std::abs(cr2) < 0.1) return {1.0, (n + (n + 2) * cr2) / (1.0 + cr2)};
    // far from the Frobenius regime: recessive WKB slope
    return {1.0, std::sqrt(std::max(radial_Q(mode, lambda, q, std::log(r)), 1e-300))};
}

double recessive_start(const ModeIndex& mode, double lambda, const RadialPotential& q, double delta)
{
    const double n = mode.n;
    double t_turn = 0.0;
    const double top = lambda - q.inf();
    if (top > 0.0) t_turn = std::min(0.0, std::log(n / std::sqrt(top)));
    return std::max(std::log(delta), t_turn - 30.0 / n);
}

// ---------------------------------------------------------------- integration

RadialSolution integrate_radial(const ModeIndex& mode, double lambda, const RadialPotential& q, Direction dir,
                                InitialData init, double delta, const Tolerances& tol, double scale)
{
    if (!(delta > 0.0 && delta <= 0.1)) throw ConfigError("integrate_radial: delta must lie in (0, 0.1]");
    RadialSolution sol;
    sol.mode = mode;
    sol.lambda = lambda;
    sol.potential = q;
    sol.scale = scale > 0.0 ? scale : 1.0 / std::sqrt(std::abs(mode.mu));
    const double s = sol.scale, t_min = std::log(delta);

    if (dir == Direction::Outward) {
        shoot(mode, lambda, q, t_min, 0.0, to_prufer(init, s), s, tol, &sol.nodes);
        return sol;
    }
    double t_start = 0.0;
    state2 x = to_prufer(init, s);
    if (use_wkb(mode, lambda, q, init, tol)) {
        t_start = wkb_switch_point(mode, lambda, q, t_min, tol.wkb_switch);
        sol.wkb = RadialSolution::Wkb{t_start, radial_Q(mode, lambda, q, 0.0)};
        x = wkb_start(mode, lambda, q, t_start, s);
        // the WKB profile carries psi_t(1) = 1 normalisation already
    }
    shoot(mode, lambda, q, t_start, t_min, x, s, tol, &sol.nodes);
    std::reverse(sol.nodes.begin(), sol.nodes.end());
    return sol;
}

double inward_dirichlet_phase(const ModeIndex& mode, double lambda, const RadialPotential& q, double delta,
                              const Tolerances& tol)
{
    const double s = 1.0 / std::sqrt(std::abs(mode.mu));
    const InitialData init{0.0, 1.0};
    double t_start = 0.0;
    state2 x = to_prufer(init, s);
    const double t_min = std::log(delta);
    if (use_wkb(mode, lambda, q, init, tol)) {
        t_start = wkb_switch_point(mode, lambda, q, t_min, tol.wkb_switch);
        x = wkb_start(mode, lambda, q, t_start, s);
    }
    return shoot(mode, lambda, q, t_start, t_min, x, s, tol, nullptr)[0];
}

double outward_phase(const ModeIndex& mode, double lambda, const RadialPotential& q, const BoundaryParams& params,
                     const Tolerances& tol)
{
    const double s = 1.0 / std::sqrt(std::abs(mode.mu));
    const double delta = delta_for(lambda, q, tol);
    if (mode.n == 0) {
        const double t_min = std::log(delta);
        const state2 x{t_min / params.b + std::atan(params.beta), 0.0};
        return shoot(mode, lambda, q, t_min, 0.0, x, s, tol, nullptr)[0];
    }
    const double t_s = recessive_start(mode, lambda, q, delta);
    const state2 x = to_prufer(frobenius_data(mode, lambda, q, std::exp(t_s)), s);
    return shoot(mode, lambda, q, t_s, 0.0, x, s, tol, nullptr)[0];
}

// ---------------------------------------------------------------- evaluation

double RadialSolution::t_lo() const { return nodes.front().t; }
double RadialSolution::t_hi() const { return wkb ? 0.0 : nodes.back().t; }

RadialSolution::Node RadialSolution::at(double t) const
{
    // continue from the nearest stored node; exact to integrator tolerance
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t, [](const Node& n, double v) { return n.t < v; });
    if (it == nodes.end()) {
        --it;
    } else if (it != nodes.begin() && t - (it - 1)->t < it->t - t) {
        --it;
    }
    if (it->t == t) return *it;
    PruferRhs rhs{mode, lambda, potential, scale, drift_for(mode, scale)};
    const double w = rhs.drift;
    state2 x{it->phi - w * it->t, it->log_rho};
    integrate_split(rhs, x, it->t, t, potential, default_tolerances(), [](const state2&, double) {});
    state2 d;
    rhs(x, d, t);
    return {t, x[0] + w * t, x[1], d[0] + w, d[1]};
}

void RadialSolution::wkb_eval(double t, double& log_abs, double& y) const
{
    wkb_values(mode, lambda, potential, t, log_abs, y);
}

double RadialSolution::log_abs_value(double r) const
{
    const double t = std::log(r);
    if (wkb && t > wkb->t_switch) {
        double la, y;
        wkb_eval(t, la, y);
        return la;
    }
    const Node n = at(t);
    return n.log_rho + std::log(std::abs(std::sin(n.phi)));
}

double RadialSolution::log_derivative(double r) const
{
    const double t = std::log(r);
    if (wkb && t > wkb->t_switch) {
        double la, y;
        wkb_eval(t, la, y);
        return y;
    }
    const Node n = at(t);
    return std::cos(n.phi) / (scale * std::sin(n.phi));
}

double RadialSolution::value(double r) const
{
    const double t = std::log(r);
    if (wkb && t > wkb->t_switch) {
        if (t >= 0.0) return 0.0;
        double la, y;
        wkb_eval(t, la, y);
        return -std::exp(la);
    }
    const Node n = at(t);
    return std::exp(n.log_rho) * std::sin(n.phi);
}

double RadialSolution::r_deriv(double r) const
{
    const double t = std::log(r);
    if (wkb && t > wkb->t_switch) {
        if (t >= 0.0) return 1.0;
        double la, y;
        wkb_eval(t, la, y);
        return -std::exp(la) * y;
    }
    const Node n = at(t);
    return std::exp(n.log_rho) * std::cos(n.phi) / scale;
}

double RadialSolution::phase(double r) const { return at(std::log(r)).phi; }

double log_norm_squared(const RadialSolution& sol, double r_max, const std::function<double(double)>& weight)
{
    // r dr = r^2 dt
    quad::LogSum acc;
    const double t_a = sol.t_lo(), t_b = std::log(r_max);
    const int panels = std::max(1, static_cast<int>(std::ceil((t_b - t_a) / 0.25)));
    std::vector<double> tt, wt;
    for (int p = 0; p < panels; ++p) {
        tt.clear();
        wt.clear();
        quad::gauss_rule<20>(t_a + (t_b - t_a) * p / panels, t_a + (t_b - t_a) * (p + 1) / panels, tt, wt);
        for (std::size_t i = 0; i < tt.size(); ++i) {
            const double r = std::exp(tt[i]);
            const double w = weight ? weight(r) : 1.0;
            if (w == 0.0) continue;
            acc.add(std::log(wt[i]) + 2 * tt[i] + 2 * (std::log(std::abs(w)) + sol.log_abs_value(r)));
        }
    }
    return acc.log();
}

// ---------------------------------------------------------------- brackets

double lagrange_bracket_1d(InitialData phi, InitialData psi) { return phi.value * psi.r_deriv - phi.r_deriv * psi.value; }

double lagrange_bracket_1d(const RadialSolution& phi, const RadialSolution& psi, double r)
{
    return lagrange_bracket_1d(InitialData{phi.value(r), phi.r_deriv(r)}, InitialData{psi.value(r), psi.r_deriv(r)});
}

double beta_bracket(InitialData phi, const BoundaryParams& params, double r)
{
    return lagrange_bracket_1d(phi, limit_circle_data(params, r));
}

double beta_bracket(const RadialSolution& phi, const BoundaryParams& params, double r)
{
    return beta_bracket(InitialData{phi.value(r), phi.r_deriv(r)}, params, r);
}

// ---------------------------------------------------------------- m-functions

double m_function(const ModeIndex& mode, double lambda, const RadialPotential& q, const BoundaryParams& params,
                  const Tolerances& tol)
{
    const double s = 1.0 / std::sqrt(std::abs(mode.mu));
    const double phi = outward_phase(mode, lambda, q, params, tol);
    const double sn = std::sin(phi);
    if (std::abs(sn) < tol.pole_tol)
        throw PoleAtLambda("m-function pole: lambda = " + std::to_string(lambda) + " is a Dirichlet eigenvalue of mode " +
                               std::to_string(mode.n),
                           mode.n);
    return -std::cos(phi) / (s * sn);
}

cplx m_function(const ModeIndex& mode, cplx lambda, const RadialPotential& q, const BoundaryParams& params,
                const Tolerances& tol)
{
    if (lambda.imag() == 0.0) return m_function(mode, lambda.real(), q, params, tol);
    const double delta = delta_for(std::abs(lambda), q, tol);
    double t0;
    cplx psi, dpsi;
    if (mode.n == 0) {
        t0 = std::log(delta);
        const InitialData d = limit_circle_data(params, delta);
        psi = d.value;
        dpsi = d.r_deriv;
    } else {
        t0 = recessive_start(mode, lambda.real(), q, delta);
        const double r = std::exp(t0);
        const cplx c = (q(r) - lambda) / (4.0 * (mode.n + 1));
        const cplx cr2 = c * r * r;
        psi = 1.0;
        if (std::abs(cr2) < 0.1)
            dpsi = (double(mode.n) + double(mode.n + 2) * cr2) / (1.0 + cr2);
        else
            dpsi = std::sqrt(mode.mu + r * r * (q(r) - lambda));
    }
    state4 x{psi.real(), psi.imag(), dpsi.real(), dpsi.imag()};
    auto rhs = [&](const state4& y, state4& d, double t) {
        const double r = std::exp(t);
        const cplx Q = mode.mu + r * r * (q(r) - lambda);
        const cplx p(y[0], y[1]);
        const cplx qp = Q * p;
        d[0] = y[2];
        d[1] = y[3];
        d[2] = qp.real();
        d[3] = qp.imag();
    };
    auto renorm = [](state4& y, double) {
        const double m = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2]), std::abs(y[3])});
        if (m > 1e100)
            for (double& v : y) v /= m;
    };
    try {
        integrate_split(rhs, x, t0, 0.0, q, tol, renorm);
    } catch (const StepUnderflow& e) {
        throw StepUnderflow("m-function: step size underflow at r = " + std::to_string(std::exp(e.r)), std::exp(e.r));
    }
    const cplx p(x[0], x[1]), dp(x[2], x[3]);
    return -dp / p;
}

}  // namespace bdspec
