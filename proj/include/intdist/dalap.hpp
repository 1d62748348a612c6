#pragma once

#include "intdist/numeric.hpp"
#include "intdist/rng.hpp"

// Discrete analogue of the Laplace distribution: p(n) proportional to
// gamma^|n - mu| with continuous location mu and decay gamma in (0, 1),
// normalized in closed form on unbounded, lower-bounded and two-way bounded
// supports.

namespace intdist {

inline constexpr double kDalapGammaEps = 1e-6;

struct DalapParams {
    double mu;
    double gamma;

    DalapParams(double mu_, double gamma_);
};

// Log of the partition function z = sum over the support of gamma^|n - mu|.
//
//   unbounded:          z = (gamma^f + gamma^c) / (1 - gamma)
//   lower-bounded at 0: z = (gamma^f + gamma^c - gamma^(mu+1)) / (1 - gamma)
//   bounded [l, u]:     z = (gamma^f + gamma^c - gamma^(1+mu-l)
//                            - gamma^(1+u-mu)) / (1 - gamma)
//
// A lower bound l != 0 is handled by the shift n' = n - l, mu' = mu - l.
// When mu lies outside a bounded support the sum collapses to one geometric
// arm and is evaluated in log space so large |mu| cannot overflow.
double log_z(const DalapParams& params, const Support& support);

// |n - mu| * ln(gamma) - log z.  Throws out_of_support_error for n outside
// the support.
double log_prob(const DalapParams& params, std::int64_t n, const Support& support);

// Partials of log_prob with respect to mu and gamma.  At the non-smooth
// points (mu = n and integer mu) the symmetric convention is used: sign(0)
// is 0 and the kink of gamma^f + gamma^c contributes nothing.
GradRecord grad_log_prob(const DalapParams& params, std::int64_t n, const Support& support);

// Closed form for the unbounded case; enumeration with a certified geometric
// tail bound otherwise.
double mean(const DalapParams& params, const Support& support);

// Exact draw: pick the tail below floor(mu) with probability
// gamma^f / (gamma^f + gamma^c), then add a geometric offset; bounded
// supports invert the closed-form geometric partial sums.
std::int64_t sample(const DalapParams& params, const Support& support, Rng& rng);

// Support bounded only from above: delegates to lower_bounded after negating
// n, mu and the bound.
double log_prob_upper_bounded(const DalapParams& params, std::int64_t n, std::int64_t high);

}  // namespace intdist
