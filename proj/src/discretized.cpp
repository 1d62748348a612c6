#include "intdist/discretized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intdist {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogHalf = -0.6931471805599453094;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;

void check_scale_params(double loc, double scale, const char* family) {
    if (!std::isfinite(loc) || !std::isfinite(scale))
        throw std::invalid_argument(std::string(family) + ": non-finite parameter");
}

void check_support_member(std::int64_t n, const Support& support, const char* family) {
    if (!support.contains(n)) throw out_of_support_error(std::string(family) + ": n outside support");
}

bool is_low_edge(std::int64_t n, const Support& support) {
    return support.kind() != Support::Kind::unbounded && n == support.low();
}

bool is_high_edge(std::int64_t n, const Support& support) {
    return support.kind() == Support::Kind::bounded && n == support.high();
}

// log(e^la - e^lb) for la >= lb; -inf when the difference underflows.
double log_diff(double la, double lb) {
    if (la == kNegInf) return kNegInf;
    const double d = lb - la;
    if (!(d < 0.0)) return kNegInf;
    return la + log1mexp(d);
}

double softplus(double x) { return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0); }

std::int64_t clamp_to_support(std::int64_t n, const Support& support) {
    if (support.kind() != Support::Kind::unbounded && n < support.low()) n = support.low();
    if (support.kind() == Support::Kind::bounded && n > support.high()) n = support.high();
    return n;
}

// Shared enumeration for means without a closed form: sum n * p(n) over
// [lo, hi], where the caller guarantees the mass outside is negligible.
template <typename LogProb>
double windowed_mean(std::int64_t lo, std::int64_t hi, LogProb&& lp) {
    double acc = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) {
        const double l = lp(n);
        if (l == kNegInf) continue;
        acc += static_cast<double>(n) * std::exp(l);
    }
    return acc;
}

// --- normal -----------------------------------------------------------

double log_phi_cdf(double z) {
    // log of the standard normal CDF; the erfcx route keeps the left tail
    // accurate long after erfc underflows.
    if (z <= 0.0) {
        const double t = -z * 0.7071067811865475244;
        return kLogHalf - t * t + std::log(erfcx(t));
    }
    return std::log1p(-0.5 * erfc(z * 0.7071067811865475244));
}

double log_phi_sf(double z) { return log_phi_cdf(-z); }

double log_phi_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

struct NormalBin {
    double zl, zh;     // standardized bin edges, +-inf at absorbed tails
    double log_p;
};

NormalBin normal_bin(const DNormalParams& params, std::int64_t n, const Support& support) {
    const double zl = (static_cast<double>(n) - 0.5 - params.mu) / params.sigma;
    const double zh = (static_cast<double>(n) + 0.5 - params.mu) / params.sigma;
    NormalBin bin{zl, zh, kNegInf};
    if (is_low_edge(n, support) && is_high_edge(n, support)) {
        bin.zl = -std::numeric_limits<double>::infinity();
        bin.zh = std::numeric_limits<double>::infinity();
        bin.log_p = 0.0;
    } else if (is_low_edge(n, support)) {
        bin.zl = -std::numeric_limits<double>::infinity();
        bin.log_p = log_phi_cdf(zh);
    } else if (is_high_edge(n, support)) {
        bin.zh = std::numeric_limits<double>::infinity();
        bin.log_p = log_phi_sf(zl);
    } else if (static_cast<double>(n) >= params.mu) {
        bin.log_p = log_diff(log_phi_sf(zl), log_phi_sf(zh));
    } else {
        bin.log_p = log_diff(log_phi_cdf(zh), log_phi_cdf(zl));
    }
    return bin;
}

// --- logistic ---------------------------------------------------------

double log_sigmoid(double w) { return -softplus(-w); }

struct LogisticBin {
    double wl, wh;
    double log_p;
};

LogisticBin logistic_bin(const DLogisticParams& params, std::int64_t n, const Support& support) {
    const double wl = (static_cast<double>(n) - 0.5 - params.mu) / params.s;
    const double wh = (static_cast<double>(n) + 0.5 - params.mu) / params.s;
    LogisticBin bin{wl, wh, kNegInf};
    if (is_low_edge(n, support) && is_high_edge(n, support)) {
        bin.log_p = 0.0;
    } else if (is_low_edge(n, support)) {
        bin.log_p = log_sigmoid(wh);
    } else if (is_high_edge(n, support)) {
        bin.log_p = log_sigmoid(-wl);
    } else if (static_cast<double>(n) >= params.mu) {
        bin.log_p = log_diff(log_sigmoid(-wl), log_sigmoid(-wh));
    } else {
        bin.log_p = log_diff(log_sigmoid(wh), log_sigmoid(wl));
    }
    return bin;
}

double log_logistic_pdf_w(double w) {
    // log of sigma'(w) = sigma(w) sigma(-w)
    return log_sigmoid(w) + log_sigmoid(-w);
}

// --- weibull ----------------------------------------------------------

void check_weibull_support(const Support& support) {
    if (support.kind() == Support::Kind::unbounded ||
        support.low() != 0)
        throw std::invalid_argument("dweib: support must start at 0");
}

}  // namespace

DNormalParams::DNormalParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    check_scale_params(mu, sigma, "DNormalParams");
    sigma = std::max(sigma, kScaleEps);
}

DLaplaceParams::DLaplaceParams(double mu_, double b_) : mu(mu_), b(b_) {
    check_scale_params(mu, b, "DLaplaceParams");
    b = std::max(b, kScaleEps);
}

DLogisticParams::DLogisticParams(double mu_, double s_) : mu(mu_), s(s_) {
    check_scale_params(mu, s, "DLogisticParams");
    s = std::max(s, kScaleEps);
}

DWeibullParams::DWeibullParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    check_scale_params(alpha, beta, "DWeibullParams");
    alpha = std::max(alpha, kScaleEps);
    beta = std::max(beta, kScaleEps);
}

// --- normal -----------------------------------------------------------

double log_prob(const DNormalParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dnormal");
    return normal_bin(params, n, support).log_p;
}

GradRecord grad_log_prob(const DNormalParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dnormal");
    const NormalBin bin = normal_bin(params, n, support);
    const double tl = std::isinf(bin.zl) ? 0.0 : std::exp(log_phi_pdf(bin.zl) - bin.log_p);
    const double th = std::isinf(bin.zh) ? 0.0 : std::exp(log_phi_pdf(bin.zh) - bin.log_p);
    GradRecord g;
    g.add("mu", (tl - th) / params.sigma);
    g.add("sigma", ((std::isinf(bin.zl) ? 0.0 : bin.zl * tl) -
                    (std::isinf(bin.zh) ? 0.0 : bin.zh * th)) /
                       params.sigma);
    return g;
}

std::int64_t sample(const DNormalParams& params, const Support& support, Rng& rng) {
    const double z = params.mu + params.sigma * rng.normal();
    return clamp_to_support(round_half_up(std::clamp(z, -4.5e15, 4.5e15)), support);
}

double mean(const DNormalParams& params, const Support& support) {
    if (support.kind() == Support::Kind::unbounded) return params.mu;
    const auto d = static_cast<std::int64_t>(std::ceil(9.0 * params.sigma)) + 2;
    const std::int64_t c = clamp_to_support(round_half_up(params.mu), support);
    const std::int64_t lo = std::max(support.low(), c - d);
    std::int64_t hi = c + d;
    if (support.kind() == Support::Kind::bounded) hi = std::min(hi, support.high());
    return windowed_mean(lo, hi, [&](std::int64_t n) { return log_prob(params, n, support); });
}

// --- laplace ----------------------------------------------------------

double log_prob(const DLaplaceParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dlaplace");
    const double mu = params.mu;
    const double b = params.b;
    const double lo = static_cast<double>(n) - 0.5;
    const double hi = static_cast<double>(n) + 0.5;

    if (is_low_edge(n, support) && is_high_edge(n, support)) return 0.0;
    if (is_low_edge(n, support)) {
        // full lower tail: F(hi)
        if (hi < mu) return (hi - mu) / b + kLogHalf;
        return std::log1p(-0.5 * std::exp(-(hi - mu) / b));
    }
    if (is_high_edge(n, support)) {
        // full upper tail: S(lo)
        if (lo >= mu) return -(lo - mu) / b + kLogHalf;
        return std::log1p(-0.5 * std::exp((lo - mu) / b));
    }
    if (lo >= mu) return -(lo - mu) / b + log1mexp(-1.0 / b) + kLogHalf;
    if (hi <= mu) return (hi - mu) / b + log1mexp(-1.0 / b) + kLogHalf;
    // bin straddles mu
    const double d1 = mu - lo;
    const double d2 = hi - mu;
    return std::log(-0.5 * (std::expm1(-d1 / b) + std::expm1(-d2 / b)));
}

GradRecord grad_log_prob(const DLaplaceParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dlaplace");
    const double mu = params.mu;
    const double b = params.b;
    const double lo = static_cast<double>(n) - 0.5;
    const double hi = static_cast<double>(n) + 0.5;
    double dmu = 0.0, db = 0.0;

    const bool low_edge = is_low_edge(n, support);
    const bool high_edge = is_high_edge(n, support);
    if (low_edge && high_edge) {
        // whole support in one bin: constant
    } else if (low_edge) {
        if (hi < mu) {
            dmu = -1.0 / b;
            db = (mu - hi) / (b * b);
        } else {
            const double e1 = 0.5 * std::exp(-(hi - mu) / b);
            const double p = 1.0 - e1;
            dmu = -e1 / (b * p);
            db = -e1 * (hi - mu) / (b * b * p);
        }
    } else if (high_edge) {
        if (lo >= mu) {
            dmu = 1.0 / b;
            db = (lo - mu) / (b * b);
        } else {
            const double e1 = 0.5 * std::exp((lo - mu) / b);
            const double p = 1.0 - e1;
            dmu = e1 / (b * p);
            db = -e1 * (mu - lo) / (b * b * p);
        }
    } else if (lo >= mu || hi <= mu) {
        const double em = std::exp(-1.0 / b);
        const double tail_term = em / (1.0 - em);
        if (lo >= mu) {
            dmu = 1.0 / b;
            db = ((lo - mu) - tail_term) / (b * b);
        } else {
            dmu = -1.0 / b;
            db = ((mu - hi) - tail_term) / (b * b);
        }
    } else {
        const double d1 = mu - lo;
        const double d2 = hi - mu;
        const double e1 = std::exp(-d1 / b);
        const double e2 = std::exp(-d2 / b);
        const double p = -0.5 * (std::expm1(-d1 / b) + std::expm1(-d2 / b));
        dmu = (e1 - e2) / (2.0 * b * p);
        db = -(d1 * e1 + d2 * e2) / (2.0 * b * b * p);
    }
    GradRecord g;
    g.add("mu", dmu);
    g.add("b", db);
    return g;
}

std::int64_t sample(const DLaplaceParams& params, const Support& support, Rng& rng) {
    const double u = rng.uniform();
    const double z = u < 0.5 ? params.mu + params.b * std::log(2.0 * u)
                             : params.mu - params.b * std::log(2.0 * (1.0 - u));
    return clamp_to_support(round_half_up(std::clamp(z, -4.5e15, 4.5e15)), support);
}

double mean(const DLaplaceParams& params, const Support& support) {
    if (support.kind() == Support::Kind::unbounded) return params.mu;
    const auto d = static_cast<std::int64_t>(std::ceil(40.0 * params.b)) + 2;
    const std::int64_t c = clamp_to_support(round_half_up(params.mu), support);
    const std::int64_t lo = std::max(support.low(), c - d);
    std::int64_t hi = c + d;
    if (support.kind() == Support::Kind::bounded) hi = std::min(hi, support.high());
    return windowed_mean(lo, hi, [&](std::int64_t n) { return log_prob(params, n, support); });
}

// --- logistic ---------------------------------------------------------

double log_prob(const DLogisticParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dlogistic");
    return logistic_bin(params, n, support).log_p;
}

GradRecord grad_log_prob(const DLogisticParams& params, std::int64_t n, const Support& support) {
    check_support_member(n, support, "dlogistic");
    const LogisticBin bin = logistic_bin(params, n, support);
    const bool low_edge = is_low_edge(n, support);
    const bool high_edge = is_high_edge(n, support);
    const double tl = low_edge ? 0.0 : std::exp(log_logistic_pdf_w(bin.wl) - bin.log_p);
    const double th = high_edge ? 0.0 : std::exp(log_logistic_pdf_w(bin.wh) - bin.log_p);
    GradRecord g;
    g.add("mu", (tl - th) / params.s);
    g.add("s", ((low_edge ? 0.0 : bin.wl * tl) - (high_edge ? 0.0 : bin.wh * th)) / params.s);
    return g;
}

std::int64_t sample(const DLogisticParams& params, const Support& support, Rng& rng) {
    const double u = rng.uniform();
    const double z = params.mu + params.s * std::log(u / (1.0 - u));
    return clamp_to_support(round_half_up(std::clamp(z, -4.5e15, 4.5e15)), support);
}

double mean(const DLogisticParams& params, const Support& support) {
    if (support.kind() == Support::Kind::unbounded) return params.mu;
    const auto d = static_cast<std::int64_t>(std::ceil(45.0 * params.s)) + 2;
    const std::int64_t c = clamp_to_support(round_half_up(params.mu), support);
    const std::int64_t lo = std::max(support.low(), c - d);
    std::int64_t hi = c + d;
    if (support.kind() == Support::Kind::bounded) hi = std::min(hi, support.high());
    return windowed_mean(lo, hi, [&](std::int64_t n) { return log_prob(params, n, support); });
}

// --- weibull ----------------------------------------------------------

double log_prob(const DWeibullParams& params, std::int64_t n, const Support& support) {
    check_weibull_support(support);
    check_support_member(n, support, "dweib");
    const double x = static_cast<double>(n);
    const double a_exp = x == 0.0 ? 0.0 : std::pow(x / params.alpha, params.beta);
    if (std::isinf(a_exp)) return kNegInf;
    if (is_high_edge(n, support)) return -a_exp;  // edge absorbs the upper tail
    const double b_exp = std::pow((x + 1.0) / params.alpha, params.beta);
    const double diff = a_exp - b_exp;
    if (!(diff < 0.0)) return kNegInf;  // consecutive survivals collide: underflow
    return -a_exp + log1mexp(diff);
}

GradRecord grad_log_prob(const DWeibullParams& params, std::int64_t n, const Support& support) {
    check_weibull_support(support);
    check_support_member(n, support, "dweib");
    const double x = static_cast<double>(n);
    const double alpha = params.alpha;
    const double beta = params.beta;

    const double a_exp = x == 0.0 ? 0.0 : std::pow(x / alpha, beta);
    const double da_dalpha = x == 0.0 ? 0.0 : -beta * a_exp / alpha;
    const double da_dbeta = x == 0.0 ? 0.0 : a_exp * std::log(x / alpha);

    GradRecord g;
    if (is_high_edge(n, support)) {
        g.add("alpha", -da_dalpha);
        g.add("beta", -da_dbeta);
        return g;
    }
    const double b_exp = std::pow((x + 1.0) / alpha, beta);
    const double db_dalpha = -beta * b_exp / alpha;
    const double db_dbeta = b_exp * std::log((x + 1.0) / alpha);
    const double w = 1.0 / std::expm1(b_exp - a_exp);
    g.add("alpha", -da_dalpha - (da_dalpha - db_dalpha) * w);
    g.add("beta", -da_dbeta - (da_dbeta - db_dbeta) * w);
    return g;
}

std::int64_t sample(const DWeibullParams& params, const Support& support, Rng& rng) {
    check_weibull_support(support);
    const double x = params.alpha * std::pow(-std::log(rng.uniform()), 1.0 / params.beta);
    std::int64_t n = x >= 4.5e15 ? std::int64_t{4'500'000'000'000'000}
                                 : static_cast<std::int64_t>(std::floor(x));
    return clamp_to_support(n, support);
}

double mean(const DWeibullParams& params, const Support& support) {
    check_weibull_support(support);
    // E[X] = sum_{k >= 1} P(X >= k) and P(X >= k) = exp(-(k/alpha)^beta).
    const std::int64_t hi =
        support.kind() == Support::Kind::bounded ? support.high() : std::numeric_limits<std::int64_t>::max();
    double acc = 0.0;
    for (std::int64_t k = 1; k <= hi; ++k) {
        const double s = std::exp(-std::pow(static_cast<double>(k) / params.alpha, params.beta));
        acc += s;
        if (s * static_cast<double>(k) < 1e-13 && s < 1e-13) break;
        if (k > 20'000'000) throw budget_error("dweib mean: enumeration budget exceeded");
    }
    return acc;
}

}  // namespace intdist
