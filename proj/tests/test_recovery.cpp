#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdspec/asymptotics.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/recovery.hpp"

using namespace bdspec;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<TailEntry> model_tail(double b, double beta, int first, int count, bool with_offset = true)
{
    const double c = with_offset ? 2 * b * (theta0_closed_form(b) + std::atan(beta)) : 0.0;
    std::vector<TailEntry> t;
    for (int n = first; n > first - count; --n) t.push_back({n, -std::exp(c - 2 * n * pi * b)});
    return t;
}

}  // namespace

TEST_CASE("recover_b: exact and offset model tails")
{
    for (double b : {0.3, 1.0, 2.0}) {
        const BRecovery pure = recover_b(model_tail(b, 0.0, -1, 8, false));
        CHECK(std::abs(pure.b_hat - b) <= 1e-12 * b);
        for (double q : pure.raw_quotient) CHECK(std::abs(q - b) <= 1e-12 * b);

        const BRecovery off = recover_b(model_tail(b, 0.7, -1, 10));
        CHECK(std::abs(off.b_hat - b) <= 1e-12 * b);
        for (double g : off.gap_estimate) CHECK(std::abs(g - b) <= 1e-12 * b);
        // raw quotient error is exactly C / (2 |n| pi)
        const double C = 2 * b * (theta0_closed_form(b) + std::atan(0.7));
        for (std::size_t i = 0; i < off.n.size(); ++i)
            CHECK(std::abs((off.raw_quotient[i] - b) * off.n[i] * 2 * pi + C) <= 1e-9 * std::max(1.0, std::abs(C)));
    }
}

TEST_CASE("recover_beta: exact model, index shifts, branch")
{
    for (double b : {0.5, 1.0, 2.0})
        for (double beta : {-3.0, -1.0, 0.0, 0.4, 2.0}) {
            const double th = compute_theta0(b).theta0;
            const BetaRecovery r = recover_beta(model_tail(b, beta, -1, 8), b, th);
            CHECK(std::abs(r.beta_hat - beta) <= 1e-10 * std::max(1.0, std::abs(beta)));
            CHECK(std::abs(r.atan_beta) < pi / 2);
            // unknown absolute index: relabelled tails land on the same branch value
            auto shifted = model_tail(b, beta, -1, 8);
            for (auto& e : shifted) e.n -= 5;
            CHECK(std::abs(recover_beta(shifted, b, th).atan_beta - r.atan_beta) <= 1e-10);
        }
    const auto tail = model_tail(1.0, 0.0, -1, 8);
    CHECK_THROWS_AS(recover_beta(tail, 1.5, compute_theta0(1.5).theta0), EstimateOutOfBranch);
    CHECK_THROWS_AS(recover_beta(tail, -1.0, 0.0), ConfigError);
}

TEST_CASE("recover: tail validation")
{
    CHECK_THROWS_AS(recover(model_tail(1.0, 0.0, -1, 3)), InsufficientTail);
    auto bad = model_tail(1.0, 0.0, -1, 6);
    std::swap(bad[2].lambda, bad[3].lambda);
    CHECK_THROWS_AS(recover(bad), NonMonotoneTail);
    auto positive = model_tail(1.0, 0.0, -1, 6);
    positive[0].lambda = 1.0;
    CHECK_THROWS_AS(recover(positive), NonMonotoneTail);
    auto gap = model_tail(1.0, 0.0, -1, 6);
    gap.erase(gap.begin() + 2);
    CHECK_THROWS_AS(recover(gap), ConfigError);
    CHECK_THROWS_AS(recover_roundtrip({1.0, 0.0}, RadialPotential{}, 2), InsufficientTail);

    // order of the input does not matter; index_tail labels shallow first
    const auto t = index_tail({-1e6, -3.0, -5e3, -2e10});
    REQUIRE(t.size() == 4);
    CHECK(t[0].n == -1);
    CHECK(t[0].lambda == -3.0);
    CHECK(t[3].lambda == -2e10);
}

TEST_CASE("recover: forward-computed spectra")
{
    const RadialPotential zero;
    const RecoveryResult a = recover_roundtrip({1.0, 0.5}, zero, 8);
    CHECK(a.b_error <= 1e-3);
    const RecoveryResult c = recover_roundtrip({1.0, 0.0}, zero, 8);
    CHECK(std::abs(c.beta.beta_hat) < 1e-2);
    const RecoveryResult d = recover_roundtrip({0.5, 2.0}, zero, 10);
    CHECK(std::abs(d.beta.beta_hat - 2.0) < 5e-2);
    for (const auto& r : {a, c, d}) {
        CHECK(r.model_residual.size() == r.tail.size());
        CHECK(std::abs(r.model_residual.back()) < 1e-6);
    }
}

TEST_CASE("recover: constant potential and dropping the first eigenvalue")
{
    const RadialPotential three = RadialPotential::constant(3.0);
    for (auto [b, beta] : {std::pair{1.0, 0.0}, std::pair{1.0, 1.0}, std::pair{0.5, 0.0}, std::pair{2.0, -1.0}}) {
        const RecoveryResult r = recover_roundtrip({b, beta}, three, 8);
        CHECK(r.shift == 3.0);
        CHECK(r.b_error <= 1e-3 * b);
        CHECK(r.beta_error <= 1e-2);

        auto tail = r.tail;
        tail.erase(tail.begin());
        const RecoveryResult s = recover(tail);
        CHECK(std::abs(s.b.b_hat - r.b.b_hat) <= 1e-12);
        CHECK(std::abs(s.beta.atan_beta - r.beta.atan_beta) <= 1e-10);
    }
}
