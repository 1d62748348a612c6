#pragma once

#include "intdist/mixture.hpp"

// Brute-force reference implementations, kept deliberately independent of
// the closed-form partition functions: raw per-point masses are summed and
// normalized by that sum, so any error in a closed form shows up as a
// mismatch against these enumerations.

namespace intdist {
namespace oracle {

struct EnumerationWindow {
    std::int64_t low;
    std::int64_t high;
    double truncated_mass_bound;  // certified bound on the mass outside [low, high]
};

struct Enumeration {
    EnumerationWindow window;
    std::vector<double> masses;  // normalized; masses[i] is the pmf at window.low + i

    double mass_at(std::int64_t n) const {
        if (n < window.low || n > window.high) return 0.0;
        return masses[static_cast<std::size_t>(n - window.low)];
    }
    double total() const;
};

// Enumerates the pmf over a window chosen so the certified truncation bound
// is below 1e-13 (exactly zero for finite supports).  Throws budget_error if
// the window would exceed 10^7 integers.
Enumeration enumerate_pmf(const FamilyParams& params, const Support& support);
Enumeration enumerate_pmf(const MixtureParams& mix, const Support& support);

// Sum of n^order * p(n) over the window, order 1 or 2.
double moment(const FamilyParams& params, const Support& support, int order);
double moment(const MixtureParams& mix, const Support& support, int order);

double variance(const FamilyParams& params, const Support& support);
double variance(const MixtureParams& mix, const Support& support);

// -sum p log2 p over the window.
double entropy_bits(const FamilyParams& params, const Support& support);
double entropy_bits(const MixtureParams& mix, const Support& support);

// Three-point central difference, the primitive behind fd_grad.
template <typename F>
double central_diff(F&& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Central finite differences of log_prob in each flattened parameter.
// Throws std::domain_error when a parameter sits within 10h of its domain
// boundary; staying off the non-smooth sets (integer mu, mu = n) is the
// caller's responsibility.
GradRecord fd_grad(const FamilyParams& params, std::int64_t n, const Support& support,
                   double h = 1e-5);
GradRecord fd_grad(const MixtureParams& mix, std::int64_t n, const Support& support,
                   double h = 1e-5);

}  // namespace oracle
}  // namespace intdist
