#pragma once
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bdspec/radial.hpp"
#include "bdspec/tolerances.hpp"

namespace bdspec {

// Glued geometry. Omega_1 is the unit half-disc |theta| < pi/2 carrying the
// singular Robin condition; Omega_0 is the half-annulus 1 < r < outer_radius,
// |theta| < pi/2, Dirichlet on its rays and outer arc. The interface is r = 1.
// Lambda_0 is taken in the first `sine_modes` Dirichlet sine modes of Omega_0.
struct PencilConfig {
    int N = 60;               // Theta_1..Theta_N beside Theta_0
    int sine_modes = 24;      // K
    double outer_radius = 2.0;
    // pole-root offsets below this (relative) are solved from the local pole expansion of m0
    double local_expansion_below = 1e-4;
};

// d_k = g'(1)/g(1), g'' + g'/r + (lambda - k^2/r^2) g = 0, g(outer) = 0.
cplx annulus_dn_eigenvalue(int k, cplx lambda, double outer_radius, const Tolerances& tol = default_tolerances());
double annulus_dn_eigenvalue_at_zero(int k, double outer_radius);  // closed form k(1 + R^2k)/(1 - R^2k)

// <Theta_n, S_k>, n = 0..N, k = 1..K, S_k = sqrt(2/pi) sin(k(theta + pi/2)). Cached per (b, K).
const Eigen::MatrixXd& sine_projection(double b, int N, int K);

struct Lambda0Block {
    cplx a;
    Eigen::VectorXcd b_vec;  // length N
    Eigen::MatrixXcd C;      // N x N, complex symmetric
};

Lambda0Block lambda0_block(cplx lambda, double b, const PencilConfig& cfg, const Tolerances& tol = default_tolerances());

// m_0..m_N. Real lambda at a pole throws PoleAtLambda.
std::vector<cplx> lambda1_block(cplx lambda, const BoundaryParams& params, const RadialPotential& q, int N,
                                const Tolerances& tol = default_tolerances());

struct PencilSlice {
    cplx lambda;
    int N = 0;
    cplx m0;
    cplx a;
    Eigen::VectorXcd b_vec;
    Eigen::MatrixXcd M_plus_C;
};

// m0 is left unset (NaN) when with_m0 is false.
PencilSlice assemble_slice(cplx lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                           bool with_m0 = true, const Tolerances& tol = default_tolerances());

// a - b^T (M + C)^{-1} b; throws SingularBlock if the solve fails.
cplx schur_part(const PencilSlice& s);
// E = m0 + a - b^T (M + C)^{-1} b
cplx scalar_reduction_E(cplx lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                        const Tolerances& tol = default_tolerances());
// largest eigenvalue of the real symmetric M + C (negative below both subproblem spectra)
double max_eig_MplusC(const PencilSlice& s);
double min_eig_MplusC(const PencilSlice& s);

// min(inf sigma(L_1), Dirichlet ground state of Omega_0, 0) - 1
double sufficiently_negative_threshold(const RadialPotential& q, const Tolerances& tol = default_tolerances());

// Monotone phase form of E = 0: H = theta(lambda) - arccot(b S(lambda)), theta the
// outward Prufer phase of mode 0 at r = 1. Poles of m0 at theta in pi Z, roots of E at H in pi Z.
struct PhaseValue {
    double theta;
    double H;
    double schur;
};
PhaseValue pencil_phase(double lambda, const BoundaryParams& params, const RadialPotential& q, const PencilConfig& cfg,
                        const Tolerances& tol = default_tolerances());

struct KernelCertificate {
    double lambda = 0.0;
    Eigen::VectorXd h;       // h(0) == 1
    double residual = 0.0;   // ||(Lambda_1 + Lambda_0) h|| / ||h||
};

// Roots close to an m0 pole p are kept as p + offset, since offsets of
// e^{-2 kappa} relative are not representable in lambda itself.
struct PencilRoot {
    double lambda = 0.0;  // nearest double
    double pole = std::numeric_limits<double>::quiet_NaN();
    double offset = 0.0;  // lambda - pole, exact to its own precision
    bool local = false;   // solved from the pole expansion
    KernelCertificate certificate;
};

// lo < root < hi with the offset taken into account
bool strictly_between(const PencilRoot& r, double lo, double hi);

struct PencilWindow {
    double lambda_min = -3000.0;
    double lambda_max = -600.0;
};

struct PencilResult {
    std::vector<double> poles;       // m0 poles in the window, ascending
    std::vector<PencilRoot> roots;   // ascending
    double threshold = 0.0;
    int N = 0;
};

PencilResult pencil_negative_eigenvalues(const BoundaryParams& params, const RadialPotential& q,
                                         const PencilWindow& window, const PencilConfig& cfg,
                                         const Tolerances& tol = default_tolerances());

// m0 from the Prufer phase at lambda unless m0_value is given
KernelCertificate kernel_certificate(double lambda, const BoundaryParams& params, const RadialPotential& q,
                                     const PencilConfig& cfg, const Tolerances& tol = default_tolerances(),
                                     std::optional<double> m0_value = std::nullopt);

struct TruncationCheck {
    std::vector<double> roots_N, roots_2N;
    double max_rel_drift = 0.0;
};
TruncationCheck check_truncation(const BoundaryParams& params, const RadialPotential& q, const PencilWindow& window,
                                 const PencilConfig& cfg, const Tolerances& tol = default_tolerances());

}  // namespace bdspec
