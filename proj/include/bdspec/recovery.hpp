#pragma once
#include <optional>
#include <vector>

#include "bdspec/radial.hpp"
#include "bdspec/tolerances.hpp"

namespace bdspec {

// One negative eigenvalue with its index (-1 is the largest negative one).
struct TailEntry {
    int n = -1;
    double lambda = 0.0;
};

// Consecutive indices -1, -2, ... by decreasing lambda.
std::vector<TailEntry> index_tail(std::vector<double> lambdas);

struct RecoveryOptions {
    int tail_count = 3;             // deepest gaps / estimates averaged
    double branch_tolerance = 0.05; // slack on (-pi/2, pi/2) for every per-n estimate
};

struct BRecovery {
    std::vector<int> n;                  // shallow first
    std::vector<double> raw_quotient;    // -log(-lambda_n) / (2 n pi)
    std::vector<double> gap_estimate;    // (log(-lambda_{n-1}) - log(-lambda_n)) / (2 pi), size - 1 entries
    double b_hat = 0.0;
    double b_raw = 0.0;                  // deepest raw quotient
};

BRecovery recover_b(const std::vector<TailEntry>& tail, const RecoveryOptions& opt = {});

struct BetaRecovery {
    std::vector<double> atan_estimate;  // per n, shifted by branch_shift * pi
    int branch_shift = 0;
    double atan_beta = 0.0;
    double beta_hat = 0.0;
};

BetaRecovery recover_beta(const std::vector<TailEntry>& tail, double b_hat, double theta0,
                          const RecoveryOptions& opt = {});

struct RecoveryResult {
    std::vector<TailEntry> tail;
    BRecovery b;
    BetaRecovery beta;
    double theta0 = 0.0;
    std::vector<double> model_residual;  // log(-lambda_n) minus the fitted model, per n
    std::vector<double> contraction;     // |d_k| / |d_{k+1}| for successive gap-estimate differences d
    double shift = 0.0;                  // subtracted from the input before fitting
    // set by the round trip
    double b_error = 0.0;
    double beta_error = 0.0;
};

RecoveryResult recover(std::vector<TailEntry> tail, double shift = 0.0, const RecoveryOptions& opt = {});

// Forward solve of the n_tail eigenvalues lambda_{-1..-n_tail}, then recover. A
// constant q is subtracted before fitting.
RecoveryResult recover_roundtrip(const BoundaryParams& truth, const RadialPotential& q, int n_tail,
                                 const RecoveryOptions& opt = {}, const Tolerances& tol = default_tolerances());

}  // namespace bdspec
