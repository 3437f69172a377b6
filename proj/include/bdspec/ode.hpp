#pragma once
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "bdspec/errors.hpp"
#include "bdspec/tolerances.hpp"

namespace bdspec::ode {

// Adaptive RK-Fehlberg 7(8) over [t0, t1] (either direction). `obs(x, t)` is
// called at t0 and after every accepted step. Throws StepUnderflow with the
// offending abscissa when the controller cannot make progress.
template <std::size_t N, class Rhs, class Obs>
double integrate(Rhs&& rhs, std::array<double, N>& x, double t0, double t1,
                 const Tolerances& tol, Obs&& obs, double dt0 = 0.0)
{
    namespace oi = boost::numeric::odeint;
    using state = std::array<double, N>;
    auto stepper = oi::make_controlled(tol.ode_abs, tol.ode_rel, oi::runge_kutta_fehlberg78<state>());

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    double dt = dt0 != 0.0 ? dir * std::abs(dt0) : dir * std::min(0.05, std::abs(t1 - t0));
    obs(x, t);
    long steps = 0;
    auto sys = [&rhs](const state& y, state& dy, double s) { rhs(y, dy, s); };
    while (dir * (t1 - t) > 0.0) {
        if (std::abs(dt) > tol.max_step) dt = dir * tol.max_step;
        if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
        const double span = std::max(1.0, std::abs(t));
        if (std::abs(dt) < tol.min_step * span && std::abs(t1 - t) > tol.min_step * span)
            throw StepUnderflow("step size underflow", t);
        if (oi::controlled_step_result::success == stepper.try_step(sys, x, t, dt)) {
            obs(x, t);
            if (++steps > 20'000'000) throw NumericalError("step budget exhausted");
        }
    }
    return dt;
}

template <std::size_t N, class Rhs>
double integrate(Rhs&& rhs, std::array<double, N>& x, double t0, double t1, const Tolerances& tol)
{
    return integrate(std::forward<Rhs>(rhs), x, t0, t1, tol, [](const auto&, double) {});
}

}  // namespace bdspec::ode
