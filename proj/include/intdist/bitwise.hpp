#pragma once

#include "intdist/numeric.hpp"
#include "intdist/rng.hpp"

#include <vector>

// The Bitwise distribution: an independent Bernoulli distribution per bit of
// the target integer.  The signed variant uses sign-magnitude encoding (sign
// bit first, then magnitude bits least-significant first) and merges the two
// encodings of zero; the nonnegative variant drops the sign bit.

namespace intdist {

inline constexpr double kBitProbEps = 1e-6;

struct BitwiseParams {
    bool is_signed;
    double pi_pos;              // P(sign bit = 1), i.e. nonnegative; ignored unless signed
    std::vector<double> probs;  // magnitude bit probabilities, least significant first

    BitwiseParams(bool is_signed_, double pi_pos_, std::vector<double> probs_);

    int bits() const { return static_cast<int>(probs.size()); }
};

// Actual support of the variant: [-(2^k - 1), 2^k - 1] signed, [0, 2^k - 1]
// nonnegative, for k magnitude bits.
Support bitwise_support(const BitwiseParams& params);
Support bitwise_support(int bits, bool is_signed);

// Smallest variant whose support covers a bounded request; at least
// `min_bits` magnitude bits.  Unbounded and lower-bounded requests pick the
// signed / nonnegative variant at exactly `min_bits`.
struct BitwiseShape {
    int bits;
    bool is_signed;
};
BitwiseShape bitwise_covering_shape(const Support& requested, int min_bits);

// Sign-magnitude encoding; zero always encodes with a positive sign bit.
// Bit order matches BitwiseParams: [sign,] m0, m1, ... with m0 = 2^0.
std::vector<int> encode(std::int64_t n, int bits, bool is_signed);
std::int64_t decode(const std::vector<int>& bits, bool is_signed);

// Sum over bits of x_i ln(pi_i) + (1 - x_i) ln(1 - pi_i); for signed zero the
// +0 and -0 masses are combined via logsumexp.
double log_prob(const BitwiseParams& params, std::int64_t n);
double log_prob(const BitwiseParams& params, std::int64_t n, const Support& support);

GradRecord grad_log_prob(const BitwiseParams& params, std::int64_t n);
GradRecord grad_log_prob(const BitwiseParams& params, std::int64_t n, const Support& support);

// Closed-form mean: sum pi_i 2^(i-1), scaled by (pi_pos - (1 - pi_pos)) for
// the signed variant.
double mean(const BitwiseParams& params);

// Exact enumeration over the support; throws budget_error beyond 20 bits.
double variance(const BitwiseParams& params);

std::int64_t sample(const BitwiseParams& params, Rng& rng);

}  // namespace intdist
