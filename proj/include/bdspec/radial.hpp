#pragma once
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bdspec/tolerances.hpp"

namespace bdspec {

using cplx = std::complex<double>;

struct BoundaryParams {
    double b = 1.0;
    double beta = 0.0;
};

// q(r) on (0, 1], piecewise linear between samples, clamped outside.
class RadialPotential {
public:
    RadialPotential() : r_{1.0}, q_{0.0} {}
    static RadialPotential zero() { return {}; }
    static RadialPotential constant(double c);
    static RadialPotential from_samples(std::vector<double> r, std::vector<double> q);
    static RadialPotential from_csv(const std::string& path);

    double operator()(double r) const;
    double slope(double r) const;  // dq/dr of the interpolant
    double sup_abs() const;
    double inf() const;
    bool is_constant() const { return r_.size() == 1; }
    RadialPotential shifted(double c) const;

    const std::vector<double>& radii() const { return r_; }
    const std::vector<double>& values() const { return q_; }

private:
    std::vector<double> r_, q_;
};

struct ModeIndex {
    int n = 0;
    double mu = 0.0;
    static ModeIndex make(int n, double b) { return {n, n == 0 ? -1.0 / (b * b) : double(n) * n}; }
};

// Q(t) in psi_tt = Q psi, t = log r, psi_t = r R'.
inline double radial_Q(const ModeIndex& m, double lambda, const RadialPotential& q, double t);

struct InitialData {
    double value;    // R
    double r_deriv;  // r R'
};

enum class Direction { Inward, Outward };

// Dense record of one real solution. Internally (phase, log amplitude) in the
// log variable with scale s: psi = rho sin(phi), s psi_t = rho cos(phi).
class RadialSolution {
public:
    struct Node {
        double t, phi, log_rho, dphi, dlog_rho;
    };
    struct Wkb {  // psi = -Q(0)^{-1/4} Q(t)^{-1/4} sinh(int_t^0 sqrt Q) on [t_switch, 0]
        double t_switch = 0.0;
        double q0 = 0.0;
    };

    ModeIndex mode;
    double lambda = 0.0;
    double scale = 1.0;
    std::vector<Node> nodes;  // sorted by t ascending
    std::optional<Wkb> wkb;
    RadialPotential potential;

    double t_lo() const;
    double t_hi() const;

    double value(double r) const;
    double r_deriv(double r) const;
    // log|R| and r R'/R, usable where value() would overflow
    double log_abs_value(double r) const;
    double log_derivative(double r) const;
    // continuous Prufer phase at r (not defined inside the WKB segment)
    double phase(double r) const;

private:
    Node at(double t) const;
    void wkb_eval(double t, double& log_abs, double& y) const;
};

// log of int (w R)^2 r dr from the solution's inner end to r_max (log-space, composite Gauss in log r)
double log_norm_squared(const RadialSolution& sol, double r_max, const std::function<double(double)>& weight = {});

double delta_for(double lambda, const RadialPotential& q, const Tolerances& tol = default_tolerances());

InitialData limit_circle_data(const BoundaryParams& params, double r);
InitialData frobenius_data(const ModeIndex& mode, double lambda, const RadialPotential& q, double r);
// start of outward integration for the recessive (n >= 1) solution
double recessive_start(const ModeIndex& mode, double lambda, const RadialPotential& q, double delta);

RadialSolution integrate_radial(const ModeIndex& mode, double lambda, const RadialPotential& q,
                                Direction dir, InitialData init, double delta,
                                const Tolerances& tol = default_tolerances(), double scale = 0.0);

// Phase-only shots (no dense record).
// Inward Dirichlet shot from r = 1 to delta; returns phi(t_min) with psi(1) = 0, psi_t(1) = 1.
double inward_dirichlet_phase(const ModeIndex& mode, double lambda, const RadialPotential& q, double delta,
                              const Tolerances& tol = default_tolerances());
// Outward phase at r = 1 of the limit-circle (n = 0) or recessive (n >= 1) solution, continuous in lambda.
double outward_phase(const ModeIndex& mode, double lambda, const RadialPotential& q, const BoundaryParams& params,
                     const Tolerances& tol = default_tolerances());
double prufer_scale(const ModeIndex& mode, const BoundaryParams& params);

double lagrange_bracket_1d(const RadialSolution& phi, const RadialSolution& psi, double r);
double lagrange_bracket_1d(InitialData phi, InitialData psi);
double beta_bracket(const RadialSolution& phi, const BoundaryParams& params, double r);
double beta_bracket(InitialData phi, const BoundaryParams& params, double r);
InitialData u0_data(double b, double r);
InitialData v0_data(double b, double r);

struct MFunctionSample {
    int n;
    cplx lambda;
    cplx m;
};

// m_n(lambda) = -R'(1)/R(1). Throws PoleAtLambda for real lambda at a pole.
double m_function(const ModeIndex& mode, double lambda, const RadialPotential& q, const BoundaryParams& params,
                  const Tolerances& tol = default_tolerances());
cplx m_function(const ModeIndex& mode, cplx lambda, const RadialPotential& q, const BoundaryParams& params,
                const Tolerances& tol = default_tolerances());

inline double radial_Q(const ModeIndex& m, double lambda, const RadialPotential& q, double t)
{
    const double r = std::exp(t);
    return m.mu + r * r * (q(r) - lambda);
}

}  // namespace bdspec
