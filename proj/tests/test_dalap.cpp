#include <doctest.h>

#include "intdist/dalap.hpp"
#include "intdist/oracle.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace intdist;

namespace {

// Brute-force unnormalized sum of gamma^|n - mu| over [lo, hi].
double brute_z(double mu, double gamma, std::int64_t lo, std::int64_t hi) {
    double z = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) z += std::pow(gamma, std::fabs(n - mu));
    return z;
}

double sum_probs(const DalapParams& p, const Support& s, std::int64_t lo, std::int64_t hi) {
    double acc = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) acc += std::exp(log_prob(p, n, s));
    return acc;
}

bool grad_close(const GradRecord& a, const GradRecord& b, double rel) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i].second, y = b[i].second;
        if (std::fabs(x - y) > rel * std::max(std::fabs(x), std::fabs(y)) + 1e-6) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("partition function closed forms against brute-force sums") {
    // unbounded, integer mu: z = (1 + gamma) / (1 - gamma) = 3 at gamma = 1/2
    CHECK(log_z(DalapParams(2.0, 0.5), Support::unbounded()) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-14));
    // lower-bounded at 0, mu = 0: brute force gives 2, which pins the
    // exponent of the excluded tail term (mu + 1, not mu + 2)
    CHECK(brute_z(0.0, 0.5, 0, 400) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(log_z(DalapParams(0.0, 0.5), Support::lower_bounded(0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-13));
    // two-way bounded [0, 10], mu = 0: finite geometric sum
    CHECK(log_z(DalapParams(0.0, 0.5), Support::bounded(0, 10)) ==
          doctest::Approx(std::log(brute_z(0.0, 0.5, 0, 10))).epsilon(1e-13));

    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> mus(-6.0, 6.0);
    std::uniform_real_distribution<double> gammas(0.05, 0.9);
    for (int i = 0; i < 100; ++i) {
        const DalapParams p(mus(gen), gammas(gen));
        CHECK(log_z(p, Support::unbounded()) ==
              doctest::Approx(std::log(brute_z(p.mu, p.gamma, -700, 700))).epsilon(1e-12));
        CHECK(log_z(p, Support::lower_bounded(-2)) ==
              doctest::Approx(std::log(brute_z(p.mu, p.gamma, -2, 700))).epsilon(1e-12));
        CHECK(log_z(p, Support::bounded(-3, 7)) ==
              doctest::Approx(std::log(brute_z(p.mu, p.gamma, -3, 7))).epsilon(1e-12));
    }
}

TEST_CASE("log_prob frozen values") {
    const Support all = Support::unbounded();
    CHECK(log_prob(DalapParams(0.0, 0.5), 0, all) ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-14));
    // mu = 1/2: its two neighbors share mass (1 - gamma)/2 = 1/4
    CHECK(log_prob(DalapParams(0.5, 0.5), 0, all) ==
          doctest::Approx(std::log(0.25)).epsilon(1e-13));
    CHECK(log_prob(DalapParams(0.5, 0.5), 1, all) ==
          doctest::Approx(std::log(0.25)).epsilon(1e-13));
    // mu = 1/4: gamma^0.25 / z with z from the brute-force sum
    const double z = brute_z(0.25, 0.5, -400, 400);
    CHECK(log_prob(DalapParams(0.25, 0.5), 0, all) ==
          doctest::Approx(std::log(std::pow(0.5, 0.25) / z)).epsilon(1e-12));
    CHECK_THROWS_AS(log_prob(DalapParams(0.0, 0.5), -1, Support::lower_bounded(0)),
                    out_of_support_error);
}

TEST_CASE("normalization over all support kinds") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> mus(-5.0, 15.0);
    std::uniform_real_distribution<double> gammas(0.02, 0.95);
    for (int i = 0; i < 60; ++i) {
        const DalapParams p(mus(gen), gammas(gen));
        const auto w = static_cast<std::int64_t>(200.0 / (1.0 - p.gamma));
        const std::int64_t c = round_half_up(p.mu);
        CHECK(sum_probs(p, Support::unbounded(), c - w, c + w) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(sum_probs(p, Support::lower_bounded(0), 0, std::max(c, std::int64_t{0}) + w) ==
              doctest::Approx(1.0).epsilon(1e-8));
        CHECK(sum_probs(p, Support::bounded(0, 12), 0, 12) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // mu outside a bounded support still normalizes
    CHECK(sum_probs(DalapParams(25.5, 0.4), Support::bounded(0, 10), 0, 10) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sum_probs(DalapParams(-3.2, 0.4), Support::bounded(0, 10), 0, 10) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("integer mu reduces to the two-sided geometric form") {
    std::mt19937_64 gen(23);
    std::uniform_int_distribution<std::int64_t> mus(-40, 40);
    std::uniform_real_distribution<double> gammas(0.02, 0.97);
    std::uniform_int_distribution<std::int64_t> offs(-30, 30);
    for (int i = 0; i < 50; ++i) {
        const auto mu = mus(gen);
        const double gamma = gammas(gen);
        const std::int64_t n = mu + offs(gen);
        const DalapParams p(static_cast<double>(mu), gamma);
        const double expected =
            std::log((1.0 - gamma) / (1.0 + gamma)) + std::fabs(n - mu) * std::log(gamma);
        CHECK(std::fabs(log_prob(p, n, Support::unbounded()) - expected) < 1e-12);
    }
}

TEST_CASE("log_prob is continuous across integer mu") {
    for (double mu0 : {-3.0, 0.0, 5.0}) {
        for (double gamma : {0.1, 0.5, 0.9}) {
            for (std::int64_t n : {-4, 0, 2}) {
                const Support s = Support::unbounded();
                const double at = log_prob(DalapParams(mu0, gamma), n, s);
                const double right = log_prob(DalapParams(mu0 + 1e-9, gamma), n, s);
                const double left = log_prob(DalapParams(mu0 - 1e-9, gamma), n, s);
                CHECK(std::fabs(at - right) < 1e-6);
                CHECK(std::fabs(at - left) < 1e-6);
            }
        }
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    const Support all = Support::unbounded();
    CHECK(grad_close(grad_log_prob(DalapParams(2.3, 0.4), 5, all),
                     oracle::fd_grad(FamilyParams(DalapParams(2.3, 0.4)), 5, all), 1e-4));
    const Support box = Support::bounded(0, 10);
    CHECK(grad_close(grad_log_prob(DalapParams(3.7, 0.2), 1, box),
                     oracle::fd_grad(FamilyParams(DalapParams(3.7, 0.2)), 1, box), 1e-4));

    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> mus(-4.0, 4.0);
    std::uniform_real_distribution<double> gammas(0.05, 0.9);
    std::uniform_int_distribution<std::int64_t> ns(-6, 6);
    int done = 0;
    while (done < 80) {
        const double mu = mus(gen);
        if (std::fabs(mu - std::round(mu)) < 1e-3) continue;
        const std::int64_t n = ns(gen);
        if (std::fabs(mu - static_cast<double>(n)) < 1e-3) continue;
        const DalapParams p(mu, gammas(gen));
        for (const Support& s : {Support::unbounded(), Support::lower_bounded(-8)}) {
            CHECK(grad_close(grad_log_prob(p, n, s), oracle::fd_grad(FamilyParams(p), n, s), 1e-4));
        }
        ++done;
    }
    // symmetric stationary point
    CHECK(grad_log_prob(DalapParams(3.0, 0.5), 3, all).at("mu") == 0.0);

    // mu below / above a bounded support: the normalized pmf no longer
    // depends on mu, so its partial vanishes while gamma's stays live
    for (const double mu : {-7.3, 18.6}) {
        const Support box2 = Support::bounded(0, 10);
        const DalapParams p(mu, 0.45);
        const GradRecord g = grad_log_prob(p, 4, box2);
        CHECK(g.at("mu") == doctest::Approx(0.0));
        CHECK(grad_close(g, oracle::fd_grad(FamilyParams(p), 4, box2), 1e-4));
    }
    const DalapParams below(-5.5, 0.45);
    CHECK(grad_close(grad_log_prob(below, 2, Support::lower_bounded(0)),
                     oracle::fd_grad(FamilyParams(below), 2, Support::lower_bounded(0)), 1e-4));
}

TEST_CASE("mean: closed form and gamma -> 0 limits") {
    CHECK(mean(DalapParams(2.0, 0.3), Support::unbounded()) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mean(DalapParams(1.5, 0.77), Support::unbounded()) == doctest::Approx(1.5).epsilon(1e-12));
    const FamilyParams p(DalapParams(0.25, 0.5));
    CHECK(std::fabs(mean(DalapParams(0.25, 0.5), Support::unbounded()) -
                    oracle::moment(p, Support::unbounded(), 1)) < 1e-9);

    // gamma at the clamp floor: mean collapses to the nearest integer and the
    // variance vanishes, except exactly between two integers
    const DalapParams tight(4.1, 1e-6);
    CHECK(std::fabs(mean(tight, Support::unbounded()) - 4.0) < 1e-3);
    CHECK(oracle::variance(FamilyParams(tight), Support::unbounded()) < 1e-3);
    const DalapParams half(4.5, 1e-6);
    CHECK(std::fabs(mean(half, Support::unbounded()) - 4.5) < 1e-3);
    CHECK(oracle::variance(FamilyParams(half), Support::unbounded()) ==
          doctest::Approx(0.25).epsilon(1e-3));

    // bounded mean agrees with the enumeration oracle
    const DalapParams b(3.3, 0.6);
    CHECK(mean(b, Support::bounded(0, 9)) ==
          doctest::Approx(oracle::moment(FamilyParams(b), Support::bounded(0, 9), 1))
              .epsilon(1e-10));
}

TEST_CASE("regularization term log(gamma^f + gamma^c) peaks at integers") {
    for (double gamma : {0.05, 0.3, 0.7, 0.95}) {
        auto reg = [&](double f) { return std::log(std::pow(gamma, f) + std::pow(gamma, 1.0 - f)); };
        const double at_int = reg(0.0);
        const double at_half = reg(0.5);
        double prev = at_int;
        for (double f = 0.05; f <= 0.5 + 1e-12; f += 0.05) {
            CHECK(reg(f) <= prev + 1e-12);  // decreasing toward 1/2
            prev = reg(f);
        }
        CHECK(reg(1.0) == doctest::Approx(at_int).epsilon(1e-12));
        CHECK(at_half < at_int);
    }
}

TEST_CASE("sampler matches the pmf") {
    Rng rng(42);
    // near-deterministic regime
    int hits = 0;
    for (int i = 0; i < 10'000; ++i)
        hits += sample(DalapParams(4.0, 1e-6), Support::unbounded(), rng) == 4;
    CHECK(hits >= 9990);

    // mu = 1/2: both neighbors carry mass 1/4
    const int draws = 100'000;
    int c0 = 0, c1 = 0;
    for (int i = 0; i < draws; ++i) {
        const std::int64_t n = sample(DalapParams(0.5, 0.5), Support::unbounded(), rng);
        c0 += n == 0;
        c1 += n == 1;
    }
    const double sigma = std::sqrt(0.25 * 0.75 / draws);
    CHECK(std::fabs(c0 / double(draws) - 0.25) < 3.0 * sigma);
    CHECK(std::fabs(c1 / double(draws) - 0.25) < 3.0 * sigma);

    // bounded draws stay inside
    const Support box = Support::bounded(0, 5);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t n = sample(DalapParams(2.2, 0.8), box, rng);
        CHECK(box.contains(n));
    }
    // mu far outside a bounded support still lands inside
    for (int i = 0; i < 500; ++i) CHECK(box.contains(sample(DalapParams(40.0, 0.6), box, rng)));
}

TEST_CASE("upper-bounded helper mirrors the lower-bounded form") {
    const DalapParams p(3.2, 0.55);
    double acc = 0.0;
    for (std::int64_t n = 6; n >= -400; --n) acc += std::exp(log_prob_upper_bounded(p, n, 6));
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));
}
