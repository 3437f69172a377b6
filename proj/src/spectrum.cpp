#include "bdspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "bdspec/errors.hpp"

namespace bdspec {

namespace {

constexpr double pi = std::numbers::pi;

// monotone coordinate: linear on [-1, 1], logarithmic beyond
double to_x(double lambda)
{
    if (std::abs(lambda) <= 1.0) return lambda;
    return std::copysign(1.0 + std::log(std::abs(lambda)), lambda);
}

double from_x(double x)
{
    if (std::abs(x) <= 1.0) return x;
    return std::copysign(std::exp(std::abs(x) - 1.0), x);
}

bool near_integer(double v, double eps) { return std::abs(v - std::round(v)) < eps; }

struct Root {
    double lambda;
    double residual;
    long k;
};

// Finds every lambda in [lo, hi] where the monotone counting function hits an
// integer, by recursive isolation in the x coordinate then TOMS 748.
void isolate(const std::function<double(double)>& count, double xa, double fa, double xb, double fb,
             const Tolerances& tol, std::vector<Root>& out, int depth = 0)
{
    const double top = std::max(fa, fb), bot = std::min(fa, fb);
    const long k_lo = static_cast<long>(std::floor(bot)) + 1;
    const long k_hi = static_cast<long>(std::ceil(top)) - 1;
    if (k_hi < k_lo) return;
    if (k_hi == k_lo || depth > 200) {
        const long k = k_lo;
        auto f = [&](double x) { return count(from_x(x)) - double(k); };
        auto stop = [&](double a, double c) {
            const double la = from_x(a), lc = from_x(c);
            return std::abs(la - lc) <= tol.root_rel * std::max(std::abs(la), std::abs(lc)) ||
                   std::abs(la - lc) < 1e-300 + 1e-15 * std::max(1.0, std::abs(a));
        };
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(f, xa, xb, fa - k, fb - k, stop, iters);
        const double x = 0.5 * (br.first + br.second);
        out.push_back({from_x(x), std::abs(count(from_x(x)) - double(k)), k});
        if (k_hi != k_lo) throw NumericalError("root isolation did not converge");
        return;
    }
    // a split point sitting on a root would be claimed by neither half
    double xm = 0.5 * (xa + xb), fm = count(from_x(xm));
    for (double frac : {0.45, 0.55, 0.4, 0.6}) {
        if (!near_integer(fm, 1e-9)) break;
        xm = xa + frac * (xb - xa);
        fm = count(from_x(xm));
    }
    isolate(count, xa, fa, xm, fm, tol, out, depth + 1);
    isolate(count, xm, fm, xb, fb, tol, out, depth + 1);
}

std::vector<Root> integer_crossings(const std::function<double(double)>& count, const SpectrumWindow& w,
                                    const Tolerances& tol, double* f_lo = nullptr, double* f_hi = nullptr)
{
    if (!(w.lambda_min < w.lambda_max)) throw ConfigError("window: lambda_min must be below lambda_max");
    const double xa = to_x(w.lambda_min), xb = to_x(w.lambda_max);
    const double fa = count(w.lambda_min), fb = count(w.lambda_max);
    if (near_integer(fa, 1e-9) || near_integer(fb, 1e-9))
        throw WindowTruncated("an eigenvalue sits on the window edge; widen or move the window");
    if (f_lo) *f_lo = fa;
    if (f_hi) *f_hi = fb;
    std::vector<Root> roots;
    isolate(count, xa, fa, xb, fb, tol, roots);
    return roots;
}

}  // namespace

double counting_L0prime(const BoundaryParams& params, const RadialPotential& q, double lambda, const Tolerances& tol)
{
    const auto mode = ModeIndex::make(0, params.b);
    const double delta = delta_for(lambda, q, tol);
    const double phi = inward_dirichlet_phase(mode, lambda, q, delta, tol);
    return (phi - std::log(delta) / params.b - std::atan(params.beta)) / pi;
}

double counting_Ln(int n, const RadialPotential& q, double lambda, const Tolerances& tol)
{
    const auto mode = ModeIndex::make(n, 1.0);
    return outward_phase(mode, lambda, q, BoundaryParams{}, tol) / pi;
}

std::vector<EigenvalueRecord> eigenvalues_L0prime(const BoundaryParams& params, const RadialPotential& q,
                                                  const SpectrumWindow& window, const Tolerances& tol)
{
    auto count = [&](double l) { return counting_L0prime(params, q, l, tol); };
    const auto roots = integer_crossings(count, window, tol);
    const double f0 = count(0.0);
    const long base = near_integer(f0, tol.zero_eigen_tol) ? std::lround(f0) : static_cast<long>(std::floor(f0));
    std::vector<EigenvalueRecord> out;
    for (const Root& r : roots) {
        EigenvalueRecord e;
        e.mode = 0;
        e.lambda = r.lambda;
        e.paper_index = static_cast<int>(base - r.k);
        e.shoot_residual = r.residual;
        e.bracket_residual = std::abs(std::sin(pi * r.residual));
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return out;
}

std::vector<EigenvalueRecord> negative_tail(const BoundaryParams& params, const RadialPotential& q, int count,
                                            const Tolerances& tol)
{
    if (count < 1) throw ConfigError("negative_tail: count must be >= 1");
    if (!(params.b > 0.0)) throw ConfigError("negative_tail: b must be positive");
    const double lo = -std::exp(2 * pi * params.b * (count + 3)) - 2 * q.sup_abs() - 1.0;
    for (double hi : {-1e-7, -1e-3, -1e-1}) {
        std::vector<EigenvalueRecord> recs;
        try {
            recs = eigenvalues_L0prime(params, q, {lo, hi, {}}, tol);
        } catch (const WindowTruncated&) {
            continue;
        }
        std::vector<EigenvalueRecord> out;
        for (auto it = recs.rbegin(); it != recs.rend(); ++it)
            if (it->paper_index <= -1 && it->paper_index >= -count) out.push_back(*it);
        if (int(out.size()) != count) throw WindowTruncated("negative_tail: window missed part of the tail");
        return out;
    }
    throw WindowTruncated("negative_tail: no clean upper window edge below 0");
}

std::vector<EigenvalueRecord> eigenvalues_Ln(int n, const RadialPotential& q, const SpectrumWindow& window,
                                             const Tolerances& tol)
{
    if (n < 1) throw ConfigError("eigenvalues_Ln: n must be >= 1");
    SpectrumWindow w = window;
    // nothing below n^2 + inf q; keeps the count away from the deep region
    w.lambda_min = std::max(w.lambda_min, q.inf() - 1.0);
    std::vector<EigenvalueRecord> out;
    if (!(w.lambda_min < w.lambda_max)) return out;
    auto count = [&](double l) { return counting_Ln(n, q, l, tol); };
    for (const Root& r : integer_crossings(count, w, tol)) {
        EigenvalueRecord e;
        e.mode = n;
        e.lambda = r.lambda;
        e.paper_index = static_cast<int>(r.k - 1);
        e.shoot_residual = r.residual;
        e.bracket_residual = std::abs(std::sin(pi * r.residual));
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return out;
}

int mode_cutoff(const RadialPotential& q, double lambda_max)
{
    int n = 1;
    while (double(n) * n + q.inf() <= lambda_max) ++n;
    return n;
}

std::vector<EigenvalueRecord> assemble_spectrum_Lprime(const BoundaryParams& params, const RadialPotential& q,
                                                       const SpectrumWindow& window, const Tolerances& tol)
{
    std::vector<int> modes = window.modes;
    if (modes.empty())
        for (int n = 0; n < mode_cutoff(q, window.lambda_max); ++n) modes.push_back(n);

    std::vector<std::future<std::vector<EigenvalueRecord>>> jobs;
    for (int n : modes)
        jobs.push_back(std::async(std::launch::async, [&, n] {
            return n == 0 ? eigenvalues_L0prime(params, q, window, tol) : eigenvalues_Ln(n, q, window, tol);
        }));
    std::vector<EigenvalueRecord> all;
    for (auto& j : jobs) {
        auto part = j.get();
        all.insert(all.end(), part.begin(), part.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.lambda != b.lambda ? a.lambda < b.lambda : a.mode < b.mode;
    });
    // global labels: lambda_{-1} < 0 <= lambda_0; a root within rounding of 0 counts as 0
    auto is_neg = [&](double l) { return l < -tol.zero_eigen_tol; };
    const auto first_nonneg = std::find_if(all.begin(), all.end(), [&](const auto& e) { return !is_neg(e.lambda); });
    const int n_neg = static_cast<int>(first_nonneg - all.begin());
    for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i].paper_index = i - n_neg;
    return all;
}

int counting_function(const std::vector<EigenvalueRecord>& records, double x)
{
    return static_cast<int>(std::count_if(records.begin(), records.end(), [x](const auto& e) { return e.lambda <= x; }));
}

namespace {

bool clear_of_zero(const BoundaryParams& params, const RadialPotential& q, const Tolerances& tol)
{
    const double m = tol.shift_margin;
    const double f_lo = counting_L0prime(params, q, -m, tol), f_hi = counting_L0prime(params, q, m, tol);
    if (std::floor(f_lo) != std::floor(f_hi) || near_integer(f_lo, 1e-12) || near_integer(f_hi, 1e-12)) return false;
    for (int n = 1; n < mode_cutoff(q, m); ++n) {
        const double g_lo = counting_Ln(n, q, -m, tol), g_hi = counting_Ln(n, q, m, tol);
        if (std::floor(g_lo) != std::floor(g_hi) || near_integer(g_lo, 1e-12) || near_integer(g_hi, 1e-12))
            return false;
    }
    return true;
}

}  // namespace

ShiftResult resolvent_shift_if_needed(const BoundaryParams& params, const RadialPotential& q, const Tolerances& tol)
{
    if (clear_of_zero(params, q, tol)) return {q, 0.0};
    static constexpr double candidates[] = {0.125, -0.125, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0};
    for (double c : candidates) {
        RadialPotential qs = q.shifted(c);
        if (clear_of_zero(params, qs, tol)) return {qs, c};
    }
    throw NumericalError("resolvent shift: no candidate clears 0 from the spectrum");
}

void unshift(std::vector<EigenvalueRecord>& records, double shift, double zero_tol)
{
    // records that cross zero move the -1 | 0 boundary of the labels
    int moved = 0;
    for (const auto& e : records) {
        const bool was_neg = e.paper_index < 0, now_neg = e.lambda - shift < -zero_tol;
        moved += int(!was_neg && now_neg) - int(was_neg && !now_neg);
    }
    for (auto& e : records) {
        e.lambda -= shift;
        e.paper_index -= moved;
    }
}

}  // namespace bdspec
