#pragma once
#include <vector>

#include "bdspec/radial.hpp"
#include "bdspec/spectrum.hpp"
#include "bdspec/tolerances.hpp"

namespace bdspec {

// Half-line comparison problem -w'' - (1/4 + 1/b^2) t^-2 w = -w. w_s, w_c start
// like sqrt(t) sin(log(t)/b), sqrt(t) cos(log(t)/b); A, B are their e^t growth
// coefficients.
struct Theta0Result {
    double theta0 = 0.0;  // in (-pi/2, pi/2]
    double A = 0.0;
    double B = 0.0;
    double t_max = 0.0;
    double richardson_diff = 0.0;  // max change of (A, B) between t_max and t_max + 5, relative
};

struct HalfLineValues {
    double ws, ws_deriv, wc, wc_deriv;  // d/dt
};
HalfLineValues half_line_solutions(double b, double t, const Tolerances& tol = default_tolerances());

Theta0Result compute_theta0(double b, const Tolerances& tol = default_tolerances());

// Same constant read off the small-t phase of sqrt(t) I_{i/b}(t).
double theta0_bessel_phase(double b, double t_small = 1e-3, const Tolerances& tol = default_tolerances());

// principal value of arg Gamma(1 + i/b) + log(2)/b
double theta0_closed_form(double b);

// log(-lambda_n) = 2b(theta0 + atan beta) - 2 (n + index_offset) pi b.
// The offset sign is opposite to the printed statement of the theorem; see README.
// index_offset registers paper labels against the model and is fitted from data.
struct AsymptoticModel {
    double b = 1.0;
    double beta = 0.0;
    double theta0 = 0.0;
    int index_offset = 0;
};

AsymptoticModel make_model(const BoundaryParams& params, const Tolerances& tol = default_tolerances());
double asymptotic_log_lambda(const AsymptoticModel& model, int n);  // log(-lambda_n^asym)
double asymptotic_lambda(const AsymptoticModel& model, int n);      // may overflow to -inf

struct ComparisonRow {
    int n = 0;
    double lambda = 0.0;
    double lambda_asym = 0.0;
    double ratio = 0.0;         // lambda / lambda_asym
    double log_residual = 0.0;  // log(-lambda) - log(-lambda_asym)
};

struct ModelComparison {
    AsymptoticModel model;  // with the fitted index_offset
    std::vector<ComparisonRow> rows;  // ascending n
};

// Needs >= 3 negative records. The offset is registered on the deepest record.
ModelComparison compare_spectrum_to_model(const std::vector<EigenvalueRecord>& records, AsymptoticModel model);

// C^2 quintic step: 1 on r <= plateau, 0 on r >= support_end.
struct RadialCutoff {
    double plateau = 0.5;
    double support_end = 0.9;
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
};

struct PseudoModeResult {
    int n = 0;
    double lambda = 0.0;
    double kappa = 0.0;
    double log_residual = 0.0;  // log of ||(T - lambda)(mu phi)|| / ||mu phi||
    double residual = 0.0;      // exp(log_residual); 0 once that underflows
};

PseudoModeResult pseudo_mode_residual(int n, const BoundaryParams& params, const RadialCutoff& cutoff = {},
                                      const RadialPotential& q = RadialPotential::zero(),
                                      const Tolerances& tol = default_tolerances());

// paper index n of L0' (n <= -1) by a window sized from the model
EigenvalueRecord negative_eigenvalue(int n, const BoundaryParams& params, const RadialPotential& q,
                                     const Tolerances& tol = default_tolerances());

}  // namespace bdspec
