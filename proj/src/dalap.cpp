#include "intdist/dalap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Partition pieces: log z plus the partials of log z needed by the gradient.
struct ZInfo {
    double log_z;
    double dlogz_dmu;
    double dlogz_dgamma;
};

// Offset exponent of the first excluded term of the lower-bounded partial
// sum.  The correct value is 1; the deliberately mis-derived variant guarded
// by INTDIST_BUG_Z1_EXPONENT exists so the verification suite can prove that
// the normalization oracle catches the off-by-one.
#ifdef INTDIST_BUG_Z1_EXPONENT
constexpr double kLowerTailOffset = 2.0;
#else
constexpr double kLowerTailOffset = 1.0;
#endif

// z for mu inside the support (both integer neighbors present), written as
// geometric partial sums so no catastrophic cancellation occurs:
//   z * (1 - gamma) = gamma^f * (1 - gamma^a) + gamma^c * (1 - gamma^b)
// with a = floor(mu) - low + 1 terms on the left arm and b = high -
// ceil(mu) + 1 on the right (a or b infinite for missing bounds).
ZInfo z_inside(double mu, double gamma, double a, double b) {
    const FracParts fp = frac_parts(mu);
    const double lg = std::log(gamma);
    const double gf = std::pow(gamma, fp.f);
    const double gc = std::pow(gamma, fp.c);
    const double one_m_ga = std::isinf(a) ? 1.0 : -std::expm1(a * lg);
    const double one_m_gb = std::isinf(b) ? 1.0 : -std::expm1(b * lg);
    const double num = gf * one_m_ga + gc * one_m_gb;

    // gamma^(f+a) and gamma^(c+b) are smooth in mu; the gamma^f + gamma^c
    // pair carries the kink at integer mu, where the symmetric convention
    // zeroes its contribution.
    const double gfa = std::isinf(a) ? 0.0 : gf * (1.0 - one_m_ga);
    const double gcb = std::isinf(b) ? 0.0 : gc * (1.0 - one_m_gb);
    const double kink = (fp.f == 0.0) ? 0.0 : (gf - gc);
    const double dnum_dmu = lg * (kink - gfa + gcb);
    double dnum_dgamma = fp.f * std::pow(gamma, fp.f - 1.0) + fp.c * std::pow(gamma, fp.c - 1.0);
    if (!std::isinf(a)) dnum_dgamma -= (fp.f + a) * std::pow(gamma, fp.f + a - 1.0);
    if (!std::isinf(b)) dnum_dgamma -= (fp.c + b) * std::pow(gamma, fp.c + b - 1.0);

    ZInfo zi;
    zi.log_z = std::log(num) - std::log1p(-gamma);
    zi.dlogz_dmu = dnum_dmu / num;
    zi.dlogz_dgamma = dnum_dgamma / num + 1.0 / (1.0 - gamma);
    return zi;
}

// z when mu lies strictly outside the support: a single geometric arm of
// `count` terms (possibly infinite) starting at distance `dist` from mu.
// Evaluated in log space since gamma^dist may underflow for large distances.
ZInfo z_one_arm(double gamma, double dist, double count, double ddist_dmu) {
    const double lg = std::log(gamma);
    const double log_tail = std::isinf(count) ? 0.0 : log1mexp(count * lg);
    ZInfo zi;
    zi.log_z = dist * lg + log_tail - std::log1p(-gamma);
    zi.dlogz_dmu = ddist_dmu * lg;
    zi.dlogz_dgamma = dist / gamma + 1.0 / (1.0 - gamma);
    if (!std::isinf(count)) {
        const double gL = std::exp(count * lg);
        zi.dlogz_dgamma -= count * gL / (gamma * (1.0 - gL));
    }
    return zi;
}

ZInfo z_info(const DalapParams& params, const Support& support) {
    const double mu = params.mu;
    const double gamma = params.gamma;
    switch (support.kind()) {
        case Support::Kind::unbounded:
            return z_inside(mu, gamma, kInf, kInf);
        case Support::Kind::lower_bounded: {
            const double m = mu - static_cast<double>(support.low());
            if (m < 0.0) return z_one_arm(gamma, -m, kInf, -1.0);
            const auto fl = static_cast<double>(frac_parts(m).floor_mu);
            return z_inside(m, gamma, fl + kLowerTailOffset, kInf);
        }
        case Support::Kind::bounded: {
            const double m = mu - static_cast<double>(support.low());
            const double span = static_cast<double>(support.high() - support.low());
            const double count = span + 1.0;
            if (m < 0.0) return z_one_arm(gamma, -m, count, -1.0);
            if (m > span) return z_one_arm(gamma, m - span, count, 1.0);
            const auto fl = static_cast<double>(frac_parts(m).floor_mu);
            // Right-arm term count high - ceil(mu) + 1; zero at m == span,
            // which the partial-sum form absorbs (1 - gamma^0 vanishes).
            return z_inside(m, gamma, fl + 1.0, span - fl);
        }
    }
    throw std::logic_error("dalap: unreachable support kind");
}

void check_params_support(const DalapParams&, const Support& support) {
    if (support.kind() == Support::Kind::bounded && support.low() > support.high())
        throw std::invalid_argument("dalap: empty support");
}

}  // namespace

DalapParams::DalapParams(double mu_, double gamma_) : mu(mu_), gamma(gamma_) {
    if (!std::isfinite(mu) || !std::isfinite(gamma))
        throw std::invalid_argument("DalapParams: non-finite parameter");
    gamma = std::clamp(gamma, kDalapGammaEps, 1.0 - kDalapGammaEps);
}

double log_z(const DalapParams& params, const Support& support) {
    check_params_support(params, support);
    return z_info(params, support).log_z;
}

double log_prob(const DalapParams& params, std::int64_t n, const Support& support) {
    check_params_support(params, support);
    if (!support.contains(n)) throw out_of_support_error("dalap: n outside support");
    const double dist = std::fabs(static_cast<double>(n) - params.mu);
    return dist * std::log(params.gamma) - z_info(params, support).log_z;
}

GradRecord grad_log_prob(const DalapParams& params, std::int64_t n, const Support& support) {
    check_params_support(params, support);
    if (!support.contains(n)) throw out_of_support_error("dalap: n outside support");
    const double diff = params.mu - static_cast<double>(n);
    const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    const ZInfo zi = z_info(params, support);
    GradRecord g;
    g.add("mu", sgn * std::log(params.gamma) - zi.dlogz_dmu);
    g.add("gamma", std::fabs(diff) / params.gamma - zi.dlogz_dgamma);
    return g;
}

double mean(const DalapParams& params, const Support& support) {
    check_params_support(params, support);
    const double gamma = params.gamma;
    if (support.kind() == Support::Kind::unbounded) {
        const FracParts fp = frac_parts(params.mu);
        const double wf = 1.0 / (1.0 + std::pow(gamma, fp.c - fp.f));
        const double pull = gamma / (1.0 - gamma);
        const auto fl = static_cast<double>(fp.floor_mu);
        return wf * (fl - pull) + (1.0 - wf) * (fl + 1.0 + pull);
    }

    // No closed form on bounded supports: walk outward from the mode and sum
    // n * p(n) until the geometric tail bound is negligible.
    const double lz = z_info(params, support).log_z;
    const double lg = std::log(gamma);
    auto pmf = [&](std::int64_t n) {
        return std::exp(std::fabs(static_cast<double>(n) - params.mu) * lg - lz);
    };
    std::int64_t center = round_half_up(params.mu);
    if (center < support.low()) center = support.low();
    if (support.kind() == Support::Kind::bounded && center > support.high())
        center = support.high();

    // Masses decay by at least a factor gamma per step away from mu, so once
    // p * (|n| + 1/(1-gamma)) * gamma/(1-gamma) is negligible the rest of the
    // first-moment tail is too.
    const double pull = gamma / (1.0 - gamma);
    double acc = static_cast<double>(center) * pmf(center);
    std::int64_t steps = 0;
    for (int dir : {-1, +1}) {
        for (std::int64_t n = center + dir;; n += dir) {
            if (!support.contains(n)) break;
            if (++steps > 20'000'000)
                throw budget_error("dalap mean: enumeration budget exceeded (gamma too close to 1)");
            const double p = pmf(n);
            acc += static_cast<double>(n) * p;
            if (p * (std::fabs(static_cast<double>(n)) + 1.0 + pull) * pull < 1e-13) break;
        }
    }
    return acc;
}

namespace {

// One geometric arm of the sampler: `count` positions starting at `start`
// and stepping by `dir`, the j-th carrying unnormalized mass
// gamma^(e0 + j).
struct Arm {
    std::int64_t start;
    int dir;
    double count;  // may be +inf
    double e0;
};

double arm_log_mass(const Arm& arm, double lg) {
    const double log_tail = std::isinf(arm.count) ? 0.0 : log1mexp(arm.count * lg);
    return arm.e0 * lg + log_tail;
}

std::int64_t arm_draw(const Arm& arm, double lg, double v) {
    // Smallest j with (1 - gamma^(j+1)) / (1 - gamma^count) >= v.
    const double one_m_gcount = std::isinf(arm.count) ? 1.0 : -std::expm1(arm.count * lg);
    const double w = 1.0 - v * one_m_gcount;
    double j = std::ceil(std::log(w) / lg - 1.0);
    if (j < 0.0) j = 0.0;
    if (!std::isinf(arm.count) && j > arm.count - 1.0) j = arm.count - 1.0;
    return arm.start + arm.dir * static_cast<std::int64_t>(j);
}

}  // namespace

std::int64_t sample(const DalapParams& params, const Support& support, Rng& rng) {
    check_params_support(params, support);
    const double lg = std::log(params.gamma);
    const FracParts fp = frac_parts(params.mu);
    const std::int64_t fl = fp.floor_mu;

    const bool has_low = support.kind() != Support::Kind::unbounded;
    const bool has_high = support.kind() == Support::Kind::bounded;
    const std::int64_t lo = has_low ? support.low() : 0;
    const std::int64_t hi = has_high ? support.high() : 0;

    Arm arms[2];
    int n_arms = 0;
    if (has_low && fl < lo) {
        // mu below the support: single rising arm from lo.
        const double count = has_high ? static_cast<double>(hi - lo + 1) : kInf;
        arms[n_arms++] = Arm{lo, +1, count, static_cast<double>(lo) - params.mu};
    } else if (has_high && fl > hi) {
        // mu above the support: single falling arm from hi.
        arms[n_arms++] = Arm{hi, -1, static_cast<double>(hi - lo + 1), params.mu - static_cast<double>(hi)};
    } else {
        const double left_count = has_low ? static_cast<double>(fl - lo + 1) : kInf;
        arms[n_arms++] = Arm{fl, -1, left_count, fp.f};
        const double right_count = has_high ? static_cast<double>(hi - fl) : kInf;
        if (right_count > 0.0) arms[n_arms++] = Arm{fl + 1, +1, right_count, fp.c};
    }

    if (n_arms == 1) return arm_draw(arms[0], lg, rng.uniform());

    const double lm0 = arm_log_mass(arms[0], lg);
    const double lm1 = arm_log_mass(arms[1], lg);
    const double p0 = 1.0 / (1.0 + std::exp(lm1 - lm0));
    const double u = rng.uniform();
    if (u < p0) return arm_draw(arms[0], lg, u / p0);
    return arm_draw(arms[1], lg, (u - p0) / (1.0 - p0));
}

double log_prob_upper_bounded(const DalapParams& params, std::int64_t n, std::int64_t high) {
    const DalapParams mirrored(-params.mu, params.gamma);
    return log_prob(mirrored, -n, Support::lower_bounded(-high));
}

}  // namespace intdist
