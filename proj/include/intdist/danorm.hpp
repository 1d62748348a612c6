#pragma once

#include "intdist/numeric.hpp"
#include "intdist/rng.hpp"

// Discrete analogue of the normal distribution: p(n) proportional to
// gamma^((n - mu)^2).  The partition function has no elementary closed form,
// so it is approximated by summing over a fixed window around mu; the cap on
// gamma keeps the truncated tail below 1e-12 at the default window.
//
// Writing gamma = e^(-1/(2s)) recovers the familiar squared-exponential form
// with dispersion s; for given mean and variance this family is the
// maximum-entropy distribution on the integers.

namespace intdist {

inline constexpr double kDanormGammaEps = 1e-6;
inline constexpr double kDanormGammaMax = 0.95;
inline constexpr int kDanormDefaultWindow = 500;

// Thrown when a query lies so far from mu that the windowed normalization
// no longer accounts for its mass.
struct truncation_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct DanormParams {
    double mu;
    double gamma;
    int window;

    DanormParams(double mu_, double gamma_, int window_ = kDanormDefaultWindow);
};

// log of z~ = sum of gamma^((i - mu)^2) over i in
// [floor(mu) - window, ceil(mu) + window] intersected with the support,
// accumulated in a streaming shift-by-max pass (no per-term storage).
// Throws std::domain_error if the window misses the support entirely.
double log_z_tilde(const DanormParams& params, const Support& support);

// (n - mu)^2 ln(gamma) - log z~.  Throws truncation_error when
// |n - mu| > window.
double log_prob(const DanormParams& params, std::int64_t n, const Support& support);

// Partials with respect to mu and gamma, differentiating every term of the
// windowed sum; the window's integer endpoints are treated as constants.
GradRecord grad_log_prob(const DanormParams& params, std::int64_t n, const Support& support);

// First moment and variance by windowed enumeration.
double mean(const DanormParams& params, const Support& support);
double variance(const DanormParams& params, const Support& support);

// Inverse-CDF draw over the window's normalized masses.
std::int64_t sample(const DanormParams& params, const Support& support, Rng& rng);

}  // namespace intdist
