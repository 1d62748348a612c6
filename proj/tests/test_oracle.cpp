#include <doctest.h>

#include "intdist/oracle.hpp"

#include <cmath>
#include <random>

using namespace intdist;

TEST_CASE("central difference self-test") {
    // quadratic: derivative exact up to rounding
    CHECK(oracle::central_diff([](double x) { return x * x; }, 3.0) ==
          doctest::Approx(6.0).epsilon(1e-6));
    // Richardson behavior: halving h shrinks the error on a smooth curve
    auto f = [](double x) { return std::exp(std::sin(x)); };
    const double truth = std::cos(1.1) * std::exp(std::sin(1.1));
    const double e1 = std::fabs(oracle::central_diff(f, 1.1, 1e-3) - truth);
    const double e2 = std::fabs(oracle::central_diff(f, 1.1, 5e-4) - truth);
    CHECK(e2 < e1);
}

TEST_CASE("enumeration windows carry certified bounds") {
    const oracle::Enumeration d =
        oracle::enumerate_pmf(FamilyParams(DalapParams(0.0, 0.5)), Support::unbounded());
    CHECK(d.window.truncated_mass_bound <= 1e-10);
    CHECK(d.window.high - d.window.low < 300);
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));

    const oracle::Enumeration bw = oracle::enumerate_pmf(
        FamilyParams(BitwiseParams(false, 0.5, std::vector<double>(8, 0.5))), Support::bounded(0, 255));
    CHECK(bw.window.low == 0);
    CHECK(bw.window.high == 255);
    CHECK(bw.window.truncated_mass_bound == 0.0);

    const oracle::Enumeration box =
        oracle::enumerate_pmf(FamilyParams(DLaplaceParams(3.0, 2.0)), Support::bounded(-5, 9));
    CHECK(box.window.low == -5);
    CHECK(box.window.high == 9);
    CHECK(box.window.truncated_mass_bound == 0.0);

    // gamma close enough to 1 blows the 1e7 budget
    CHECK_THROWS_AS(
        oracle::enumerate_pmf(FamilyParams(DalapParams(0.0, 0.9999999)), Support::unbounded()),
        budget_error);
}

TEST_CASE("oracle pmf equals exp(log_prob) pointwise") {
    std::mt19937_64 gen(83);
    std::uniform_real_distribution<double> mus(-3.0, 3.0);

    std::vector<std::pair<FamilyParams, Support>> cases;
    cases.emplace_back(DalapParams(mus(gen), 0.55), Support::unbounded());
    cases.emplace_back(DalapParams(mus(gen), 0.3), Support::lower_bounded(-2));
    cases.emplace_back(DalapParams(mus(gen), 0.7), Support::bounded(-6, 6));
    cases.emplace_back(DanormParams(mus(gen), 0.8), Support::unbounded());
    cases.emplace_back(DNormalParams(mus(gen), 1.4), Support::unbounded());
    cases.emplace_back(DLaplaceParams(mus(gen), 1.1), Support::bounded(-8, 8));
    cases.emplace_back(DLogisticParams(mus(gen), 0.9), Support::unbounded());
    cases.emplace_back(DWeibullParams(2.2, 1.4), Support::lower_bounded(0));
    cases.emplace_back(BitwiseParams(true, 0.62, {0.3, 0.7, 0.5}), bitwise_support(3, true));

    for (const auto& [params, support] : cases) {
        const oracle::Enumeration e = oracle::enumerate_pmf(params, support);
        for (std::int64_t n = e.window.low; n <= e.window.high; ++n) {
            if (!support.contains(n)) continue;
            CHECK(std::fabs(e.mass_at(n) - std::exp(log_prob(params, n, support))) < 1e-12);
        }
    }

    const MixtureParams mix({0.3, -0.4}, {FamilyParams(DalapParams(-2.3, 0.5)),
                                          FamilyParams(DalapParams(3.1, 0.6))});
    const oracle::Enumeration e = oracle::enumerate_pmf(mix, Support::unbounded());
    for (std::int64_t n = e.window.low; n <= e.window.high; ++n)
        CHECK(std::fabs(e.mass_at(n) - std::exp(log_prob(mix, n, Support::unbounded()))) < 1e-12);
}

TEST_CASE("moments and entropy") {
    // symmetric dalap at integer mu
    CHECK(oracle::moment(FamilyParams(DalapParams(4.0, 0.6)), Support::unbounded(), 1) ==
          doctest::Approx(4.0).epsilon(1e-10));

    // entropy of a uniform bitwise over 8 outcomes: exactly 3 bits
    CHECK(oracle::entropy_bits(FamilyParams(BitwiseParams(false, 0.5, {0.5, 0.5, 0.5})),
                               Support::bounded(0, 7)) == doctest::Approx(3.0).epsilon(1e-12));

    // near-deterministic bitwise: entropy collapses toward zero
    CHECK(oracle::entropy_bits(FamilyParams(BitwiseParams(false, 0.5, {1.0, 0.0, 1.0})),
                               Support::bounded(0, 7)) < 1e-4);
}

TEST_CASE("fd_grad boundary guard") {
    CHECK_THROWS_AS(
        oracle::fd_grad(FamilyParams(DalapParams(0.3, 1e-6)), 1, Support::unbounded()),
        std::domain_error);
    CHECK_THROWS_AS(
        oracle::fd_grad(FamilyParams(DanormParams(0.3, 0.95)), 1, Support::unbounded()),
        std::domain_error);
    CHECK_THROWS_AS(
        oracle::fd_grad(FamilyParams(DNormalParams(0.3, 1e-6)), 1, Support::unbounded()),
        std::domain_error);
}
