#include "intdist/bitwise.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace intdist {

namespace {

void check_bits(int bits) {
    if (bits < 1 || bits > 62) throw std::invalid_argument("bitwise: need 1..62 magnitude bits");
}

std::int64_t magnitude_cap(int bits) { return (std::int64_t{1} << bits) - 1; }

double bit_term(double pi, int x) { return x ? std::log(pi) : std::log1p(-pi); }

}  // namespace

BitwiseParams::BitwiseParams(bool is_signed_, double pi_pos_, std::vector<double> probs_)
    : is_signed(is_signed_), pi_pos(pi_pos_), probs(std::move(probs_)) {
    check_bits(static_cast<int>(probs.size()));
    for (double& p : probs) {
        if (!std::isfinite(p)) throw std::invalid_argument("BitwiseParams: non-finite probability");
        p = std::clamp(p, kBitProbEps, 1.0 - kBitProbEps);
    }
    if (is_signed) {
        if (!std::isfinite(pi_pos)) throw std::invalid_argument("BitwiseParams: non-finite pi_pos");
        pi_pos = std::clamp(pi_pos, kBitProbEps, 1.0 - kBitProbEps);
    }
}

Support bitwise_support(int bits, bool is_signed) {
    check_bits(bits);
    const std::int64_t cap = magnitude_cap(bits);
    return is_signed ? Support::bounded(-cap, cap) : Support::bounded(0, cap);
}

Support bitwise_support(const BitwiseParams& params) {
    return bitwise_support(params.bits(), params.is_signed);
}

BitwiseShape bitwise_covering_shape(const Support& requested, int min_bits) {
    min_bits = std::max(min_bits, 1);
    switch (requested.kind()) {
        case Support::Kind::unbounded:
            return BitwiseShape{min_bits, true};
        case Support::Kind::lower_bounded:
            if (requested.low() < 0) return BitwiseShape{min_bits, true};
            return BitwiseShape{min_bits, false};
        case Support::Kind::bounded: {
            const bool neg = requested.low() < 0;
            const std::uint64_t need = static_cast<std::uint64_t>(
                std::max<std::int64_t>(std::llabs(requested.low()), std::llabs(requested.high())));
            int bits = 1;
            while (static_cast<std::uint64_t>(magnitude_cap(bits)) < need && bits < 62) ++bits;
            return BitwiseShape{std::max(bits, min_bits), neg};
        }
    }
    throw std::logic_error("bitwise: unreachable support kind");
}

std::vector<int> encode(std::int64_t n, int bits, bool is_signed) {
    check_bits(bits);
    if (!bitwise_support(bits, is_signed).contains(n))
        throw out_of_support_error("bitwise: magnitude needs more than the configured bits");
    std::vector<int> x;
    x.reserve(static_cast<std::size_t>(bits) + (is_signed ? 1 : 0));
    if (is_signed) x.push_back(n >= 0 ? 1 : 0);  // zero always encodes as +0
    std::uint64_t mag = static_cast<std::uint64_t>(n >= 0 ? n : -n);
    for (int i = 0; i < bits; ++i) {
        x.push_back(static_cast<int>(mag & 1u));
        mag >>= 1;
    }
    return x;
}

std::int64_t decode(const std::vector<int>& bits, bool is_signed) {
    const std::size_t offset = is_signed ? 1 : 0;
    if (bits.size() <= offset) throw std::invalid_argument("bitwise: empty magnitude");
    std::int64_t mag = 0;
    for (std::size_t i = bits.size(); i-- > offset;) mag = 2 * mag + (bits[i] ? 1 : 0);
    if (is_signed && bits[0] == 0) return -mag;
    return mag;
}

double log_prob(const BitwiseParams& params, std::int64_t n) {
    const std::vector<int> x = encode(n, params.bits(), params.is_signed);
    double acc = 0.0;
    const std::size_t offset = params.is_signed ? 1 : 0;
    for (std::size_t i = offset; i < x.size(); ++i)
        acc += bit_term(params.probs[i - offset], x[i]);
    if (!params.is_signed) return acc;
    if (n != 0) return acc + bit_term(params.pi_pos, x[0]);
    // +0 and -0 both decode to zero; merge the two sign branches.
    const std::array<double, 2> branches{std::log(params.pi_pos) + acc,
                                         std::log1p(-params.pi_pos) + acc};
    return logsumexp(branches);
}

double log_prob(const BitwiseParams& params, std::int64_t n, const Support& support) {
    if (!support.contains(n)) throw out_of_support_error("bitwise: n outside support");
    return log_prob(params, n);
}

GradRecord grad_log_prob(const BitwiseParams& params, std::int64_t n) {
    const std::vector<int> x = encode(n, params.bits(), params.is_signed);
    GradRecord g;
    if (params.is_signed) {
        if (n != 0) {
            g.add("pi_pos", x[0] ? 1.0 / params.pi_pos : -1.0 / (1.0 - params.pi_pos));
        } else {
            // Responsibilities of the +0 and -0 branches under the merged mass.
            const double r_pos = params.pi_pos;
            const double r_neg = 1.0 - params.pi_pos;
            g.add("pi_pos", r_pos / params.pi_pos - r_neg / (1.0 - params.pi_pos));
        }
    }
    const std::size_t offset = params.is_signed ? 1 : 0;
    for (std::size_t i = offset; i < x.size(); ++i) {
        const double pi = params.probs[i - offset];
        const double d = x[i] ? 1.0 / pi : -1.0 / (1.0 - pi);
        g.add("pi" + std::to_string(i - offset), d);
    }
    return g;
}

GradRecord grad_log_prob(const BitwiseParams& params, std::int64_t n, const Support& support) {
    if (!support.contains(n)) throw out_of_support_error("bitwise: n outside support");
    return grad_log_prob(params, n);
}

double mean(const BitwiseParams& params) {
    double m = 0.0;
    double weight = 1.0;
    for (double p : params.probs) {
        m += p * weight;
        weight *= 2.0;
    }
    if (params.is_signed) m *= params.pi_pos - (1.0 - params.pi_pos);
    return m;
}

double variance(const BitwiseParams& params) {
    if (params.bits() > 20) throw budget_error("bitwise variance: enumeration limited to 20 bits");
    const Support sup = bitwise_support(params);
    const double m = mean(params);
    double acc = 0.0;
    for (std::int64_t n = sup.low(); n <= sup.high(); ++n) {
        const double d = static_cast<double>(n) - m;
        acc += d * d * std::exp(log_prob(params, n));
    }
    return acc;
}

std::int64_t sample(const BitwiseParams& params, Rng& rng) {
    std::vector<int> x;
    x.reserve(static_cast<std::size_t>(params.bits()) + (params.is_signed ? 1 : 0));
    if (params.is_signed) x.push_back(rng.bernoulli(params.pi_pos) ? 1 : 0);
    for (double p : params.probs) x.push_back(rng.bernoulli(p) ? 1 : 0);
    return decode(x, params.is_signed);
}

}  // namespace intdist
