#include <doctest.h>

#include "intdist/discretized.hpp"
#include "intdist/oracle.hpp"

#include <cmath>
#include <random>

using namespace intdist;

namespace {

// Composite Simpson quadrature of a density over [a, b]; independent of every
// CDF used by the implementation.
template <typename F>
double simpson(F&& f, double a, double b, int panels = 2000) {
    const double h = (b - a) / (2.0 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double normal_pdf(double z, double mu, double sigma) {
    const double t = (z - mu) / sigma;
    return std::exp(-0.5 * t * t) / (sigma * 2.5066282746310005024);
}

double laplace_pdf(double z, double mu, double b) {
    return std::exp(-std::fabs(z - mu) / b) / (2.0 * b);
}

double logistic_pdf(double z, double mu, double s) {
    const double e = std::exp(-std::fabs(z - mu) / s);
    return e / (s * (1.0 + e) * (1.0 + e));
}

bool grad_close(const GradRecord& a, const GradRecord& b, double rel) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i].second, y = b[i].second;
        if (std::fabs(x - y) > rel * std::max(std::fabs(x), std::fabs(y)) + 1e-6) return false;
    }
    return a.size() == b.size();
}

template <typename P>
double window_sum(const P& p, const Support& s, std::int64_t lo, std::int64_t hi) {
    double acc = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) acc += std::exp(log_prob(p, n, s));
    return acc;
}

}  // namespace

TEST_CASE("bin masses against quadrature of the underlying densities") {
    const Support all = Support::unbounded();
    CHECK(log_prob(DNormalParams(0.0, 1.0), 0, all) ==
          doctest::Approx(std::log(simpson([](double z) { return normal_pdf(z, 0.0, 1.0); }, -0.5,
                                           0.5)))
              .epsilon(1e-10));
    CHECK(std::exp(log_prob(DNormalParams(0.0, 1.0), 0, all)) ==
          doctest::Approx(0.3829249225480262).epsilon(1e-12));

    CHECK(log_prob(DLaplaceParams(0.0, 1.0), 0, all) ==
          doctest::Approx(std::log(1.0 - std::exp(-0.5))).epsilon(1e-13));
    CHECK(log_prob(DLaplaceParams(0.0, 1.0), 0, all) ==
          doctest::Approx(std::log(simpson([](double z) { return laplace_pdf(z, 0.0, 1.0); }, -0.5,
                                           0.5)))
              .epsilon(1e-9));

    CHECK(log_prob(DLogisticParams(0.0, 1.0), 0, all) ==
          doctest::Approx(std::log(simpson([](double z) { return logistic_pdf(z, 0.0, 1.0); }, -0.5,
                                           0.5)))
              .epsilon(1e-10));

    CHECK(log_prob(DWeibullParams(1.0, 1.0), 0, Support::lower_bounded(0)) ==
          doctest::Approx(std::log(1.0 - std::exp(-1.0))).epsilon(1e-13));

    // off-center bins, both sides of mu
    for (std::int64_t n : {-7, -1, 2, 9}) {
        const double mu = 1.3, sigma = 2.1;
        CHECK(log_prob(DNormalParams(mu, sigma), n, all) ==
              doctest::Approx(std::log(simpson(
                                  [&](double z) { return normal_pdf(z, mu, sigma); },
                                  static_cast<double>(n) - 0.5, static_cast<double>(n) + 0.5)))
                  .epsilon(1e-9));
        CHECK(log_prob(DLaplaceParams(mu, sigma), n, all) ==
              doctest::Approx(std::log(simpson(
                                  [&](double z) { return laplace_pdf(z, mu, sigma); },
                                  static_cast<double>(n) - 0.5, static_cast<double>(n) + 0.5)))
                  .epsilon(1e-9));
    }
}

TEST_CASE("normalization telescopes, tails absorbed at the edges") {
    const Support all = Support::unbounded();
    CHECK(window_sum(DNormalParams(0.3, 1.0), all, -1000, 1000) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(window_sum(DLaplaceParams(-2.7, 1.5), all, -1500, 1500) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(window_sum(DLogisticParams(5.1, 0.8), all, -1000, 1000) ==
          doctest::Approx(1.0).epsilon(1e-10));

    // Weibull masses telescope to 1 - exp(-((N+1)/alpha)^beta)
    const DWeibullParams w(2.5, 1.3);
    const Support nn = Support::lower_bounded(0);
    for (std::int64_t N : {0, 3, 17}) {
        const double expect = 1.0 - std::exp(-std::pow((N + 1) / w.alpha, w.beta));
        CHECK(window_sum(w, nn, 0, N) == doctest::Approx(expect).epsilon(1e-12));
    }

    // bounded supports sum to exactly one: edge bins soak up the tails
    for (double mu : {-40.0, 3.6, 255.0, 400.0}) {
        CHECK(window_sum(DNormalParams(mu, 2.0), Support::bounded(0, 255), 0, 255) ==
              doctest::Approx(1.0).epsilon(1e-10));
        CHECK(window_sum(DLaplaceParams(mu, 2.0), Support::bounded(0, 255), 0, 255) ==
              doctest::Approx(1.0).epsilon(1e-10));
        CHECK(window_sum(DLogisticParams(mu, 2.0), Support::bounded(0, 255), 0, 255) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(window_sum(DWeibullParams(3.0, 0.8), Support::bounded(0, 30), 0, 30) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // lower-bounded supports: low edge absorbs the left tail
    CHECK(window_sum(DNormalParams(-3.0, 1.0), Support::lower_bounded(0), 0, 1000) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("deep tails produce finite log masses, underflow reports -inf") {
    const Support all = Support::unbounded();
    // 30 sigma out: representable only through the survival route
    const double lp = log_prob(DNormalParams(0.0, 1.0), 30, all);
    CHECK(std::isfinite(lp));
    CHECK(lp < -400.0);

    // Weibull never returns NaN across extreme parameter/argument grids
    const Support nn = Support::lower_bounded(0);
    for (double alpha : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
        for (double beta : {1e-6, 1e-2, 1.0, 10.0, 1e6}) {
            for (std::int64_t x : {0, 1, 7, 1000, 1000000}) {
                const double v = log_prob(DWeibullParams(alpha, beta), x, nn);
                CHECK(!std::isnan(v));
                CHECK(v <= 0.0);
            }
        }
    }
}

TEST_CASE("gradients match finite differences") {
    const Support all = Support::unbounded();
    CHECK(grad_log_prob(DNormalParams(4.0, 1.3), 4, all).at("mu") == doctest::Approx(0.0));

    CHECK(grad_close(grad_log_prob(DLaplaceParams(1.7, 0.6), 4, all),
                     oracle::fd_grad(FamilyParams(DLaplaceParams(1.7, 0.6)), 4, all), 1e-4));
    CHECK(grad_close(grad_log_prob(DWeibullParams(2.5, 1.3), 3, Support::lower_bounded(0)),
                     oracle::fd_grad(FamilyParams(DWeibullParams(2.5, 1.3)), 3,
                                     Support::lower_bounded(0)),
                     1e-4));

    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> mus(-3.0, 3.0);
    std::uniform_real_distribution<double> scales(0.4, 4.0);
    std::uniform_int_distribution<std::int64_t> ns(-5, 5);
    for (int i = 0; i < 50; ++i) {
        const double mu = mus(gen), sc = scales(gen);
        const std::int64_t n = ns(gen);
        CHECK(grad_close(grad_log_prob(DNormalParams(mu, sc), n, all),
                         oracle::fd_grad(FamilyParams(DNormalParams(mu, sc)), n, all), 1e-4));
        CHECK(grad_close(grad_log_prob(DLogisticParams(mu, sc), n, all),
                         oracle::fd_grad(FamilyParams(DLogisticParams(mu, sc)), n, all), 1e-4));
        CHECK(grad_close(grad_log_prob(DLaplaceParams(mu, sc), n, all),
                         oracle::fd_grad(FamilyParams(DLaplaceParams(mu, sc)), n, all), 1e-4));
    }

    // bounded edge bins
    const Support box = Support::bounded(0, 8);
    for (std::int64_t n : {0, 3, 8}) {
        CHECK(grad_close(grad_log_prob(DNormalParams(2.4, 1.8), n, box),
                         oracle::fd_grad(FamilyParams(DNormalParams(2.4, 1.8)), n, box), 1e-4));
        CHECK(grad_close(grad_log_prob(DLaplaceParams(2.4, 1.8), n, box),
                         oracle::fd_grad(FamilyParams(DLaplaceParams(2.4, 1.8)), n, box), 1e-4));
        CHECK(grad_close(grad_log_prob(DLogisticParams(2.4, 1.8), n, box),
                         oracle::fd_grad(FamilyParams(DLogisticParams(2.4, 1.8)), n, box), 1e-4));
    }
    const Support wbox = Support::bounded(0, 6);
    for (std::int64_t n : {0, 2, 6}) {
        CHECK(grad_close(grad_log_prob(DWeibullParams(3.1, 1.4), n, wbox),
                         oracle::fd_grad(FamilyParams(DWeibullParams(3.1, 1.4)), n, wbox), 1e-4));
    }
}

TEST_CASE("samplers realize the pmf") {
    Rng rng(42);
    int hits = 0;
    for (int i = 0; i < 10'000; ++i)
        hits += sample(DNormalParams(3.7, 1e-6), Support::unbounded(), rng) == 4;
    CHECK(hits >= 9990);

    // clamped normal far below a bounded support: everything lands on 0
    for (int i = 0; i < 1000; ++i)
        CHECK(sample(DNormalParams(-10.0, 1.0), Support::bounded(0, 255), rng) == 0);

    // Weibull alpha=beta=1: geometric masses (1 - 1/e) e^-x
    Rng wrng(9);
    const int draws = 100'000;
    std::vector<int> counts(12, 0);
    for (int i = 0; i < draws; ++i) {
        const std::int64_t n = sample(DWeibullParams(1.0, 1.0), Support::lower_bounded(0), wrng);
        if (n < 12) ++counts[static_cast<std::size_t>(n)];
    }
    for (int x = 0; x < 12; ++x) {
        const double prob = (1.0 - std::exp(-1.0)) * std::exp(-x);
        if (prob < 1e-4) continue;
        const double freq = counts[static_cast<std::size_t>(x)] / double(draws);
        CHECK(std::fabs(freq - prob) < 3.0 * std::sqrt(prob * (1.0 - prob) / draws));
    }
}

TEST_CASE("means: symmetric families return mu, the rest enumerate") {
    const Support all = Support::unbounded();
    CHECK(mean(DNormalParams(3.0, 1.7), all) == 3.0);

    // the mu identity only holds to 1e-8 once the dispersion is large enough
    // for the rounding sawtooth to average out: the error scales with the
    // characteristic function at 2 pi, so each family needs its own floor
    // (normal sigma >~ 1, logistic s >~ 1.3, laplace b >~ 1e3).
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> mus(-4.0, 4.0);
    for (int i = 0; i < 10; ++i) {
        const double mu = mus(gen);
        CHECK(std::fabs(oracle::moment(FamilyParams(DNormalParams(mu, 1.0 + i * 0.5)), all, 1) -
                        mu) < 1e-8);
        CHECK(std::fabs(oracle::moment(FamilyParams(DLogisticParams(mu, 1.4 + i * 0.3)), all, 1) -
                        mu) < 1e-8);
        CHECK(std::fabs(oracle::moment(FamilyParams(DLaplaceParams(mu, 1500.0 + 300.0 * i)), all,
                                       1) -
                        mu) < 1e-8);
    }
    // at integer and half-integer mu the bins are symmetric at any dispersion
    CHECK(std::fabs(oracle::moment(FamilyParams(DLaplaceParams(2.0, 0.8)), all, 1) - 2.0) < 1e-10);
    CHECK(std::fabs(oracle::moment(FamilyParams(DLaplaceParams(2.5, 0.8)), all, 1) - 2.5) < 1e-10);

    // Weibull geometric special case: closed-form mean
    CHECK(mean(DWeibullParams(1.0, 1.0), Support::lower_bounded(0)) ==
          doctest::Approx(std::exp(-1.0) / (1.0 - std::exp(-1.0))).epsilon(1e-12));
    CHECK(mean(DWeibullParams(1.0, 1.0), Support::lower_bounded(0)) ==
          doctest::Approx(0.58198).epsilon(1e-4));

    // all mass of a far-off normal collapses into the top edge bin
    CHECK(mean(DNormalParams(300.0, 1.0), Support::bounded(0, 255)) ==
          doctest::Approx(255.0).epsilon(1e-9));

    // bounded means agree with the enumeration oracle
    const Support box = Support::bounded(0, 20);
    CHECK(mean(DLaplaceParams(4.2, 2.0), box) ==
          doctest::Approx(oracle::moment(FamilyParams(DLaplaceParams(4.2, 2.0)), box, 1))
              .epsilon(1e-9));
    CHECK(mean(DWeibullParams(3.0, 1.1), box) ==
          doctest::Approx(oracle::moment(FamilyParams(DWeibullParams(3.0, 1.1)), box, 1))
              .epsilon(1e-9));
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(log_prob(DWeibullParams(1.0, 1.0), -1, Support::lower_bounded(0)),
                    out_of_support_error);
    CHECK_THROWS_AS(log_prob(DWeibullParams(1.0, 1.0), 3, Support::unbounded()),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_prob(DNormalParams(0.0, 1.0), 9, Support::bounded(0, 8)),
                    out_of_support_error);
    CHECK_THROWS_AS(DNormalParams(std::nan(""), 1.0), std::invalid_argument);
}
