#pragma once

namespace bdspec {

// Every numerical knob lives here. Defaults follow the build contract; the
// CLI may override individual fields and echoes the effective record into
// the run manifest.
struct Tolerances {
    // ODE integrator (embedded RK 7(8))
    double ode_rel = 1e-11;
    double ode_abs = 1e-13;
    int min_checkpoints = 200;
    double min_step = 1e-14;
    double max_step = 0.05;

    // radial / shooting
    double pole_tol = 1e-8;
    double shoot_tol = 1e-8;
    double delta_max = 1e-3;
    double delta_perturbation = 1e-10;  // e^{2 t_min}(|lambda| + sup|q|) below this
    double root_rel = 1e-10;
    double wkb_switch = 50.0;           // start inward shots by WKB when sqrt(Q(0)) exceeds this

    // special functions
    double x_switch = 8.0;
    double precision_loss = 1e-6;

    // quadrature
    double quad_abs = 1e-12;

    // theta0 half-line problem
    double theta0_t0 = 1e-4;
    double theta0_richardson = 1e-6;

    // spectrum bookkeeping
    double shift_margin = 0.05;
    double zero_eigen_tol = 1e-9;       // |F(0) - k| below this: eigenvalue sits at 0
};

inline const Tolerances& default_tolerances()
{
    static const Tolerances t{};
    return t;
}

}  // namespace bdspec
