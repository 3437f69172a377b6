#include "bdspec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bdspec/asymptotics.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/spectrum.hpp"

namespace bdspec {

namespace {
constexpr double pi = std::numbers::pi;

// shallow first, consecutive indices, strictly decreasing lambda < 0
std::vector<TailEntry> checked(std::vector<TailEntry> tail)
{
    if (tail.size() < 4)
        throw InsufficientTail("recovery needs at least 4 negative eigenvalues, got " + std::to_string(tail.size()));
    std::sort(tail.begin(), tail.end(), [](const TailEntry& a, const TailEntry& b) { return a.n > b.n; });
    for (std::size_t i = 0; i < tail.size(); ++i) {
        if (tail[i].n > -1) throw ConfigError("recovery: indices must be <= -1");
        if (!(tail[i].lambda < 0.0) || !std::isfinite(tail[i].lambda))
            throw NonMonotoneTail("recovery: eigenvalue " + std::to_string(tail[i].n) + " is not negative");
        if (i == 0) continue;
        if (tail[i].n != tail[i - 1].n - 1)
            throw ConfigError("recovery: indices are not consecutive at n = " + std::to_string(tail[i].n));
        if (!(tail[i].lambda < tail[i - 1].lambda))
            throw NonMonotoneTail("recovery: eigenvalues do not decrease with the index at n = " +
                                  std::to_string(tail[i].n));
    }
    return tail;
}

double mean_of_last(const std::vector<double>& v, int count)
{
    const std::size_t k = std::min<std::size_t>(std::max(count, 1), v.size());
    double s = 0.0;
    for (std::size_t i = v.size() - k; i < v.size(); ++i) s += v[i];
    return s / double(k);
}

}  // namespace

std::vector<TailEntry> index_tail(std::vector<double> lambdas)
{
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    std::vector<TailEntry> out;
    for (std::size_t i = 0; i < lambdas.size(); ++i) out.push_back({-1 - int(i), lambdas[i]});
    return out;
}

BRecovery recover_b(const std::vector<TailEntry>& input, const RecoveryOptions& opt)
{
    const auto tail = checked(input);
    BRecovery r;
    for (const auto& e : tail) {
        r.n.push_back(e.n);
        r.raw_quotient.push_back(-std::log(-e.lambda) / (2 * e.n * pi));
    }
    for (std::size_t i = 1; i < tail.size(); ++i)
        r.gap_estimate.push_back((std::log(-tail[i].lambda) - std::log(-tail[i - 1].lambda)) / (2 * pi));
    r.b_hat = mean_of_last(r.gap_estimate, opt.tail_count);
    r.b_raw = r.raw_quotient.back();
    if (!(r.b_hat > 0.0)) throw NonMonotoneTail("recover_b: non-positive gap estimate");
    return r;
}

BetaRecovery recover_beta(const std::vector<TailEntry>& input, double b_hat, double theta0, const RecoveryOptions& opt)
{
    if (!(b_hat > 0.0)) throw ConfigError("recover_beta: b_hat must be positive");
    const auto tail = checked(input);
    BetaRecovery r;
    // log(-lambda_n) = 2b(theta0 + atan beta) - 2 n pi b, up to an index offset that moves atan beta by pi
    for (const auto& e : tail) r.atan_estimate.push_back((std::log(-e.lambda) + 2 * b_hat * e.n * pi) / (2 * b_hat) - theta0);
    const double raw = mean_of_last(r.atan_estimate, opt.tail_count);
    r.branch_shift = -static_cast<int>(std::lround(raw / pi));
    for (double& a : r.atan_estimate) a += r.branch_shift * pi;
    r.atan_beta = raw + r.branch_shift * pi;
    // a wrong b_hat makes the estimates drift linearly in n
    for (double a : r.atan_estimate)
        if (std::abs(a) >= pi / 2 + opt.branch_tolerance)
            throw EstimateOutOfBranch("recover_beta: tail estimate " + std::to_string(a) +
                                      " leaves the principal branch; b_hat and theta0 look inconsistent");
    r.beta_hat = std::tan(r.atan_beta);
    return r;
}

RecoveryResult recover(std::vector<TailEntry> tail, double shift, const RecoveryOptions& opt)
{
    RecoveryResult res;
    res.shift = shift;
    for (auto& e : tail) e.lambda -= shift;
    res.tail = checked(std::move(tail));
    res.b = recover_b(res.tail, opt);
    res.theta0 = compute_theta0(res.b.b_hat).theta0;
    res.beta = recover_beta(res.tail, res.b.b_hat, res.theta0, opt);
    const double b = res.b.b_hat;
    for (const auto& e : res.tail) {
        const int n = e.n + res.beta.branch_shift;
        res.model_residual.push_back(std::log(-e.lambda) - (2 * b * (res.theta0 + res.beta.atan_beta) - 2 * n * pi * b));
    }
    const auto& g = res.b.gap_estimate;
    for (std::size_t i = 2; i < g.size(); ++i) {
        const double d0 = std::abs(g[i - 1] - g[i - 2]), d1 = std::abs(g[i] - g[i - 1]);
        res.contraction.push_back(d1 > 0.0 ? d0 / d1 : std::numeric_limits<double>::infinity());
    }
    return res;
}

RecoveryResult recover_roundtrip(const BoundaryParams& truth, const RadialPotential& q, int n_tail,
                                 const RecoveryOptions& opt, const Tolerances& tol)
{
    if (n_tail < 4) throw InsufficientTail("recover_roundtrip: n_tail must be at least 4");
    if (!(truth.b > 0.0)) throw ConfigError("recover_roundtrip: b must be positive");
    std::vector<TailEntry> tail;
    for (const auto& e : negative_tail(truth, q, n_tail, tol)) tail.push_back({e.paper_index, e.lambda});
    const double shift = q.is_constant() ? q(1.0) : 0.0;
    RecoveryResult res = recover(std::move(tail), shift, opt);
    res.b_error = std::abs(res.b.b_hat - truth.b);
    res.beta_error = std::abs(res.beta.beta_hat - truth.beta);
    return res;
}

}  // namespace bdspec
