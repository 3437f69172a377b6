#pragma once
#include <vector>

#include "bdspec/radial.hpp"
#include "bdspec/tolerances.hpp"

namespace bdspec {

struct EigenvalueRecord {
    int mode = 0;
    int paper_index = 0;   // ..., -2, -1 below zero; 0, 1, ... at or above zero
    double lambda = 0.0;
    double shoot_residual = 0.0;    // |counting function - integer| at the root
    double bracket_residual = 0.0;  // normalised boundary functional at the root
};

struct SpectrumWindow {
    double lambda_min = -1e6;
    double lambda_max = 50.0;
    std::vector<int> modes;  // empty: all modes needed below lambda_max
};

// Phase counting functions. F0 decreases in lambda and the L0' eigenvalues sit
// at its integer values; Gn increases and Ln eigenvalues sit at integers >= 1.
double counting_L0prime(const BoundaryParams& params, const RadialPotential& q, double lambda,
                        const Tolerances& tol = default_tolerances());
double counting_Ln(int n, const RadialPotential& q, double lambda, const Tolerances& tol = default_tolerances());

std::vector<EigenvalueRecord> eigenvalues_L0prime(const BoundaryParams& params, const RadialPotential& q,
                                                  const SpectrumWindow& window,
                                                  const Tolerances& tol = default_tolerances());
std::vector<EigenvalueRecord> eigenvalues_Ln(int n, const RadialPotential& q, const SpectrumWindow& window,
                                             const Tolerances& tol = default_tolerances());

// smallest N with N^2 + inf q > lambda_max
// lambda_{-1}, ..., lambda_{-count} of L0' (shallow first); the window is sized
// from the exponential law and its upper edge kept off an eigenvalue at 0.
std::vector<EigenvalueRecord> negative_tail(const BoundaryParams& params, const RadialPotential& q, int count,
                                            const Tolerances& tol = default_tolerances());

int mode_cutoff(const RadialPotential& q, double lambda_max);

std::vector<EigenvalueRecord> assemble_spectrum_Lprime(const BoundaryParams& params, const RadialPotential& q,
                                                       const SpectrumWindow& window,
                                                       const Tolerances& tol = default_tolerances());

// number of records with lambda <= x
int counting_function(const std::vector<EigenvalueRecord>& records, double x);

struct ShiftResult {
    RadialPotential q;
    double shift = 0.0;
};

// q + c with the smallest |c| from a fixed candidate list such that sigma(L')
// stays shift_margin away from 0. Spectra of the shifted problem are sigma + c.
ShiftResult resolvent_shift_if_needed(const BoundaryParams& params, const RadialPotential& q,
                                      const Tolerances& tol = default_tolerances());

// Undo a shift in user-facing records.
// Roots within zero_tol of 0 after the shift keep their non-negative label.
void unshift(std::vector<EigenvalueRecord>& records, double shift, double zero_tol = default_tolerances().zero_eigen_tol);

}  // namespace bdspec
