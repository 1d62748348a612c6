#pragma once

#include "intdist/numeric.hpp"
#include "intdist/rng.hpp"

// Distributions built by rounding a continuous variable to the nearest
// integer (normal, Laplace, logistic), plus the discrete Weibull.  The PMF of
// a rounded family is the CDF difference over [n - 1/2, n + 1/2); on bounded
// supports the boundary integers absorb the tails, so that clamped sampling
// and the PMF agree exactly.

namespace intdist {

inline constexpr double kScaleEps = 1e-6;

struct DNormalParams {
    double mu;
    double sigma;
    DNormalParams(double mu_, double sigma_);
};

struct DLaplaceParams {
    double mu;
    double b;
    DLaplaceParams(double mu_, double b_);
};

struct DLogisticParams {
    double mu;
    double s;
    DLogisticParams(double mu_, double s_);
};

// P(X = x) = exp(-(x/alpha)^beta) - exp(-((x+1)/alpha)^beta) on x >= 0.
struct DWeibullParams {
    double alpha;
    double beta;
    DWeibullParams(double alpha_, double beta_);
};

// Rounded families: CDF differences evaluated from the tail that avoids
// cancellation (survival side for bins right of mu, CDF side left of mu).
// A bin whose mass underflows double precision yields -inf, never NaN.
double log_prob(const DNormalParams& params, std::int64_t n, const Support& support);
double log_prob(const DLaplaceParams& params, std::int64_t n, const Support& support);
double log_prob(const DLogisticParams& params, std::int64_t n, const Support& support);
// Weibull supports only lower_bounded(0) or bounded(0, u); the top of a
// bounded support absorbs the upper tail.
double log_prob(const DWeibullParams& params, std::int64_t n, const Support& support);

GradRecord grad_log_prob(const DNormalParams& params, std::int64_t n, const Support& support);
GradRecord grad_log_prob(const DLaplaceParams& params, std::int64_t n, const Support& support);
GradRecord grad_log_prob(const DLogisticParams& params, std::int64_t n, const Support& support);
GradRecord grad_log_prob(const DWeibullParams& params, std::int64_t n, const Support& support);

// Continuous draw, rounded half-up, clamped into bounded supports (the clamp
// realizes the edge-bin masses exactly).  Weibull floors its draw.
std::int64_t sample(const DNormalParams& params, const Support& support, Rng& rng);
std::int64_t sample(const DLaplaceParams& params, const Support& support, Rng& rng);
std::int64_t sample(const DLogisticParams& params, const Support& support, Rng& rng);
std::int64_t sample(const DWeibullParams& params, const Support& support, Rng& rng);

// Unbounded symmetric families: mu.  Everything else: enumeration to a
// certified truncation error.
double mean(const DNormalParams& params, const Support& support);
double mean(const DLaplaceParams& params, const Support& support);
double mean(const DLogisticParams& params, const Support& support);
double mean(const DWeibullParams& params, const Support& support);

}  // namespace intdist
