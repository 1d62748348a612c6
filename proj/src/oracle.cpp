#include "intdist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intdist {
namespace oracle {

namespace {

constexpr double kTailTarget = 1e-13;
constexpr std::int64_t kWindowBudget = 10'000'000;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double kahan_total(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void check_budget(std::int64_t low, std::int64_t high) {
    if (high - low + 1 > kWindowBudget)
        throw budget_error("oracle: enumeration window exceeds the 1e7 budget");
}

std::int64_t center_in(double mu, const Support& support) {
    std::int64_t c = round_half_up(mu);
    if (support.kind() != Support::Kind::unbounded) c = std::max(c, support.low());
    if (support.kind() == Support::Kind::bounded) c = std::min(c, support.high());
    return c;
}

// Fills masses from log-domain raw values with a shift by the max, then
// normalizes by the raw window sum.
template <typename LogMass>
Enumeration from_log_masses(std::int64_t low, std::int64_t high, double bound, LogMass&& lm) {
    check_budget(low, high);
    Enumeration e;
    e.window = EnumerationWindow{low, high, bound};
    e.masses.resize(static_cast<std::size_t>(high - low + 1));
    double peak = kNegInf;
    for (std::int64_t n = low; n <= high; ++n)
        peak = std::max(peak, lm(n));
    for (std::int64_t n = low; n <= high; ++n)
        e.masses[static_cast<std::size_t>(n - low)] = std::exp(lm(n) - peak);
    const double total = kahan_total(e.masses);
    for (double& m : e.masses) m /= total;
    return e;
}

// Fills masses from linear-domain raw values (used where the raw quantity is
// itself a probability, e.g. CDF differences) and normalizes by their sum.
template <typename Mass>
Enumeration from_linear_masses(std::int64_t low, std::int64_t high, double bound, Mass&& m) {
    check_budget(low, high);
    Enumeration e;
    e.window = EnumerationWindow{low, high, bound};
    e.masses.resize(static_cast<std::size_t>(high - low + 1));
    for (std::int64_t n = low; n <= high; ++n)
        e.masses[static_cast<std::size_t>(n - low)] = m(n);
    const double total = kahan_total(e.masses);
    for (double& x : e.masses) x /= total;
    return e;
}

Enumeration enumerate_dalap(const DalapParams& p, const Support& support) {
    auto lm = [&](std::int64_t n) {
        return std::fabs(static_cast<double>(n) - p.mu) * std::log(p.gamma);
    };
    if (support.kind() == Support::Kind::bounded)
        return from_log_masses(support.low(), support.high(), 0.0, lm);
    // Geometric tail: mass beyond distance D of the window edge is at most
    // 2 gamma^(D-1) / (1 - gamma) after normalization.
    const double lg = std::log(p.gamma);
    const auto d = static_cast<std::int64_t>(
        std::ceil(std::log(kTailTarget * (1.0 - p.gamma) / 2.0) / lg)) + 2;
    const double bound = 2.0 * std::exp((static_cast<double>(d) - 1.0) * lg) / (1.0 - p.gamma);
    const std::int64_t c = center_in(p.mu, support);
    std::int64_t low = c - d;
    if (support.kind() == Support::Kind::lower_bounded) low = std::max(low, support.low());
    return from_log_masses(low, c + d, bound, lm);
}

Enumeration enumerate_danorm(const DanormParams& p, const Support& support) {
    // The window is definitional for this family, so the truncation bound
    // is zero: the distribution is exactly the normalized windowed sum.
    const FracParts fp = frac_parts(p.mu);
    std::int64_t low = fp.floor_mu - p.window;
    std::int64_t high = fp.floor_mu + 1 + p.window;
    if (support.kind() != Support::Kind::unbounded) low = std::max(low, support.low());
    if (support.kind() == Support::Kind::bounded) high = std::min(high, support.high());
    if (low > high) throw std::domain_error("oracle: danorm window misses the support");
    auto lm = [&](std::int64_t n) {
        const double dd = static_cast<double>(n) - p.mu;
        return dd * dd * std::log(p.gamma);
    };
    return from_log_masses(low, high, 0.0, lm);
}

// Naive CDF/survival pairs for the rounded families, used as the raw masses.
struct CdfPair {
    double (*cdf)(double z);
    double (*sf)(double z);
};

double normal_cdf(double z) { return 0.5 * erfc(-z * 0.7071067811865475244); }
double normal_sf(double z) { return 0.5 * erfc(z * 0.7071067811865475244); }
double laplace_cdf(double z) { return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z); }
double laplace_sf(double z) { return laplace_cdf(-z); }
double logistic_cdf(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logistic_sf(double z) { return logistic_cdf(-z); }

template <typename Params>
Enumeration enumerate_rounded(const Params& p, double scale, const CdfPair& cp,
                              const Support& support) {
    auto z = [&](double x) { return (x - p.mu) / scale; };
    auto mass = [&](std::int64_t n) {
        const double lo = static_cast<double>(n) - 0.5;
        const double hi = static_cast<double>(n) + 0.5;
        const bool low_edge = support.kind() != Support::Kind::unbounded && n == support.low();
        const bool high_edge = support.kind() == Support::Kind::bounded && n == support.high();
        if (low_edge && high_edge) return 1.0;
        if (low_edge) return cp.cdf(z(hi));
        if (high_edge) return cp.sf(z(lo));
        if (static_cast<double>(n) >= p.mu) return cp.sf(z(lo)) - cp.sf(z(hi));
        return cp.cdf(z(hi)) - cp.cdf(z(lo));
    };
    if (support.kind() == Support::Kind::bounded)
        return from_linear_masses(support.low(), support.high(), 0.0, mass);

    const std::int64_t c = center_in(p.mu, support);
    std::int64_t d = std::max<std::int64_t>(8, static_cast<std::int64_t>(std::ceil(8.0 * scale)));
    auto tail = [&](std::int64_t dd) {
        double t = cp.sf(z(static_cast<double>(c + dd) + 0.5));
        // the low side is truncated too unless the absorbing edge bin is
        // inside the window
        const bool edge_in_window =
            support.kind() == Support::Kind::lower_bounded && c - dd <= support.low();
        if (!edge_in_window) t += cp.cdf(z(static_cast<double>(c - dd) - 0.5));
        return t;
    };
    while (tail(d) > kTailTarget) {
        d *= 2;
        check_budget(0, 2 * d);
    }
    std::int64_t low = c - d;
    if (support.kind() == Support::Kind::lower_bounded) low = std::max(low, support.low());
    return from_linear_masses(low, c + d, tail(d), mass);
}

Enumeration enumerate_dweib(const DWeibullParams& p, const Support& support) {
    auto sf = [&](double x) { return std::exp(-std::pow(x / p.alpha, p.beta)); };
    auto mass = [&](std::int64_t n) {
        const double x = static_cast<double>(n);
        if (support.kind() == Support::Kind::bounded && n == support.high())
            return x == 0.0 ? 1.0 : sf(x);
        return (x == 0.0 ? 1.0 : sf(x)) - sf(x + 1.0);
    };
    if (support.kind() == Support::Kind::bounded)
        return from_linear_masses(0, support.high(), 0.0, mass);
    // Smallest hi with survival below target.
    std::int64_t hi = 8;
    while (sf(static_cast<double>(hi + 1)) > kTailTarget) {
        hi *= 2;
        check_budget(0, hi);
    }
    return from_linear_masses(0, hi, sf(static_cast<double>(hi + 1)), mass);
}

Enumeration enumerate_bitwise(const BitwiseParams& p, const Support&) {
    // Walk every bitstring and accumulate onto the decoded integer, so the
    // +-0 merge arises from the enumeration itself.
    const int total_bits = p.bits() + (p.is_signed ? 1 : 0);
    if (total_bits > 22) throw budget_error("oracle: bitwise enumeration limited to 22 bits");
    const Support sup = bitwise_support(p);
    Enumeration e;
    e.window = EnumerationWindow{sup.low(), sup.high(), 0.0};
    e.masses.assign(static_cast<std::size_t>(sup.high() - sup.low() + 1), 0.0);
    std::vector<int> bits(static_cast<std::size_t>(total_bits));
    const std::uint64_t combos = std::uint64_t{1} << total_bits;
    for (std::uint64_t m = 0; m < combos; ++m) {
        double prob = 1.0;
        for (int i = 0; i < total_bits; ++i) {
            bits[static_cast<std::size_t>(i)] = static_cast<int>((m >> i) & 1u);
            double pi;
            if (p.is_signed)
                pi = i == 0 ? p.pi_pos : p.probs[static_cast<std::size_t>(i - 1)];
            else
                pi = p.probs[static_cast<std::size_t>(i)];
            prob *= bits[static_cast<std::size_t>(i)] ? pi : 1.0 - pi;
        }
        const std::int64_t n = decode(bits, p.is_signed);
        e.masses[static_cast<std::size_t>(n - sup.low())] += prob;
    }
    const double total = kahan_total(e.masses);
    for (double& x : e.masses) x /= total;
    return e;
}

template <typename ParamsT>
double moment_impl(const ParamsT& params, const Support& support, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("oracle: moment order must be 1 or 2");
    const Enumeration e = enumerate_pmf(params, support);
    // compensated accumulation: wide supports (e.g. 13-bit bitwise) would
    // otherwise lose digits against the 1e-10 closed-form comparisons
    double acc = 0.0, comp = 0.0;
    for (std::int64_t n = e.window.low; n <= e.window.high; ++n) {
        const double x = static_cast<double>(n);
        const double term = (order == 1 ? x : x * x) * e.mass_at(n);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

template <typename ParamsT>
double entropy_impl(const ParamsT& params, const Support& support) {
    const Enumeration e = enumerate_pmf(params, support);
    double acc = 0.0;
    for (double p : e.masses)
        if (p > 0.0) acc -= p * std::log2(p);
    return acc;
}

// Domain bounds by parameter name, for the boundary-proximity precondition.
std::pair<double, double> param_bounds(std::string_view name, bool danorm_gamma) {
    const double inf = std::numeric_limits<double>::infinity();
    if (name == "gamma")
        return {kDalapGammaEps, danorm_gamma ? kDanormGammaMax : 1.0 - kDalapGammaEps};
    if (name == "sigma" || name == "b" || name == "s" || name == "alpha" || name == "beta")
        return {kScaleEps, inf};
    if (name.substr(0, 2) == "pi") return {kBitProbEps, 1.0 - kBitProbEps};
    return {-inf, inf};  // mu, logits
}

template <typename ParamsT>
GradRecord fd_impl(const ParamsT& params, std::int64_t n, const Support& support, double h,
                   bool danorm_gamma) {
    if (!(h > 0)) throw std::invalid_argument("fd_grad: h must be positive");
    const std::vector<double> base = flatten(params);
    const std::vector<std::string> names = param_names(params);
    GradRecord g;
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::string_view leaf = names[i];
        if (const auto dot = leaf.rfind('.'); dot != std::string_view::npos)
            leaf = leaf.substr(dot + 1);
        const auto [lo, hi] = param_bounds(leaf, danorm_gamma);
        if (base[i] - lo < 10.0 * h || hi - base[i] < 10.0 * h)
            throw std::domain_error("fd_grad: parameter " + names[i] +
                                    " within 10h of its domain boundary");
        std::vector<double> bumped = base;
        g.add(names[i], central_diff(
                            [&](double v) {
                                bumped[i] = v;
                                return log_prob(unflatten(params, bumped), n, support);
                            },
                            base[i], h));
    }
    return g;
}

bool is_danorm(const FamilyParams& p) { return family_of(p) == Family::danorm; }

}  // namespace

double Enumeration::total() const { return kahan_total(masses); }

Enumeration enumerate_pmf(const FamilyParams& params, const Support& support) {
    return std::visit(
        [&](const auto& p) -> Enumeration {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DalapParams>)
                return enumerate_dalap(p, support);
            else if constexpr (std::is_same_v<T, DanormParams>)
                return enumerate_danorm(p, support);
            else if constexpr (std::is_same_v<T, DNormalParams>)
                return enumerate_rounded(p, p.sigma, CdfPair{normal_cdf, normal_sf}, support);
            else if constexpr (std::is_same_v<T, DLaplaceParams>)
                return enumerate_rounded(p, p.b, CdfPair{laplace_cdf, laplace_sf}, support);
            else if constexpr (std::is_same_v<T, DLogisticParams>)
                return enumerate_rounded(p, p.s, CdfPair{logistic_cdf, logistic_sf}, support);
            else if constexpr (std::is_same_v<T, DWeibullParams>)
                return enumerate_dweib(p, support);
            else
                return enumerate_bitwise(p, support);
        },
        params);
}

Enumeration enumerate_pmf(const MixtureParams& mix, const Support& support) {
    const std::vector<double> w = weights(mix);
    std::vector<Enumeration> parts;
    parts.reserve(mix.components.size());
    std::int64_t low = std::numeric_limits<std::int64_t>::max();
    std::int64_t high = std::numeric_limits<std::int64_t>::min();
    double bound = 0.0;
    for (std::size_t k = 0; k < mix.components.size(); ++k) {
        parts.push_back(enumerate_pmf(mix.components[k], support));
        low = std::min(low, parts.back().window.low);
        high = std::max(high, parts.back().window.high);
        bound += w[k] * parts.back().window.truncated_mass_bound;
    }
    check_budget(low, high);
    Enumeration e;
    e.window = EnumerationWindow{low, high, bound};
    e.masses.assign(static_cast<std::size_t>(high - low + 1), 0.0);
    for (std::size_t k = 0; k < parts.size(); ++k)
        for (std::int64_t n = parts[k].window.low; n <= parts[k].window.high; ++n)
            e.masses[static_cast<std::size_t>(n - low)] += w[k] * parts[k].mass_at(n);
    return e;
}

double moment(const FamilyParams& params, const Support& support, int order) {
    return moment_impl(params, support, order);
}
double moment(const MixtureParams& mix, const Support& support, int order) {
    return moment_impl(mix, support, order);
}

double variance(const FamilyParams& params, const Support& support) {
    const double m1 = moment(params, support, 1);
    return moment(params, support, 2) - m1 * m1;
}
double variance(const MixtureParams& mix, const Support& support) {
    const double m1 = moment(mix, support, 1);
    return moment(mix, support, 2) - m1 * m1;
}

double entropy_bits(const FamilyParams& params, const Support& support) {
    return entropy_impl(params, support);
}
double entropy_bits(const MixtureParams& mix, const Support& support) {
    return entropy_impl(mix, support);
}

GradRecord fd_grad(const FamilyParams& params, std::int64_t n, const Support& support, double h) {
    return fd_impl(params, n, support, h, is_danorm(params));
}

GradRecord fd_grad(const MixtureParams& mix, std::int64_t n, const Support& support, double h) {
    return fd_impl(mix, n, support, h, is_danorm(mix.components.front()));
}

}  // namespace oracle
}  // namespace intdist
