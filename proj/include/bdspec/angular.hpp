#pragma once
#include <functional>
#include <vector>

#include "bdspec/tolerances.hpp"

namespace bdspec {

enum class Parity { Zeroth, Even, Odd };

// Theta_n on (-pi/2, pi/2) with b Theta' + Theta = 0 at both ends, unit L2 norm,
// Theta_n(0) > 0.
struct AngularMode {
    int n = 0;
    double b = 1.0;
    double mu = 0.0;
    Parity parity = Parity::Zeroth;
    double k_n = 1.0;

    double operator()(double theta) const;
    double deriv(double theta) const;
};

double normalization_constant(int n, double b);
AngularMode angular_eigenpair(int n, double b);

struct Projection {
    std::vector<double> coeffs;     // <g, Theta_n>, n = 0..N
    std::vector<double> errors;     // quadrature error estimates
    std::vector<bool> converged;
    bool all_converged() const;
};

// `oscillation` is an optional bound on the angular frequency of g, used to
// pre-split the interval.
Projection gram_project(const std::function<double(double)>& g, int N, double b, double oscillation = 0.0,
                        const Tolerances& tol = default_tolerances());

// Adaptive Gauss-Kronrod on (-pi/2, pi/2) split into `pieces`.
double angular_integral(const std::function<double(double)>& f, int pieces, double abs_tol, double* err = nullptr);

}  // namespace bdspec
