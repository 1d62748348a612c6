#include "intdist/danorm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace intdist {

namespace {

// Terms more than this far below the peak underflow exp() and cannot move
// any double-precision accumulator.
constexpr double kLogCutoff = 750.0;

struct WindowRange {
    std::int64_t lo;
    std::int64_t hi;
    std::int64_t center;  // in-range integer nearest mu; the peak term
};

WindowRange window_range(const DanormParams& params, const Support& support) {
    const FracParts fp = frac_parts(params.mu);
    std::int64_t lo = fp.floor_mu - params.window;
    std::int64_t hi = fp.floor_mu + 1 + params.window;
    if (support.kind() != Support::Kind::unbounded) lo = std::max(lo, support.low());
    if (support.kind() == Support::Kind::bounded) hi = std::min(hi, support.high());
    if (lo > hi) throw std::domain_error("danorm: support disjoint from the window");
    const std::int64_t center = std::clamp(round_half_up(params.mu), lo, hi);
    return WindowRange{lo, hi, center};
}

// Streaming pass over the window: accumulates sum of e^{t_i - t_peak} along
// with the first moment of i and of (i - mu)^2 under those weights.  Walking
// outward from the peak makes the early cutoff sound because the exponents
// decrease monotonically with distance.
struct WindowSums {
    double peak;     // t at the center
    double s;        // sum of e^{t - peak}
    double s_i;      // sum of i * e^{t - peak}
    double s_q;      // sum of (i - mu)^2 * e^{t - peak}
    double log_z;    // peak + log(s)
};

WindowSums scan_window(const DanormParams& params, const Support& support) {
    const WindowRange w = window_range(params, support);
    const double lg = std::log(params.gamma);
    auto term = [&](std::int64_t i) {
        const double d = static_cast<double>(i) - params.mu;
        return d * d * lg;
    };

    WindowSums ws{};
    ws.peak = term(w.center);
    auto accumulate = [&](std::int64_t i, double t) {
        const double e = std::exp(t - ws.peak);
        const double d = static_cast<double>(i) - params.mu;
        ws.s += e;
        ws.s_i += static_cast<double>(i) * e;
        ws.s_q += d * d * e;
    };
    accumulate(w.center, ws.peak);
    for (std::int64_t i = w.center - 1; i >= w.lo; --i) {
        const double t = term(i);
        if (t - ws.peak < -kLogCutoff) break;
        accumulate(i, t);
    }
    for (std::int64_t i = w.center + 1; i <= w.hi; ++i) {
        const double t = term(i);
        if (t - ws.peak < -kLogCutoff) break;
        accumulate(i, t);
    }
    ws.log_z = ws.peak + std::log(ws.s);
    return ws;
}

void check_n(const DanormParams& params, std::int64_t n, const Support& support) {
    if (!support.contains(n)) throw out_of_support_error("danorm: n outside support");
    // integers inside [floor(mu) - window, ceil(mu) + window] sit at distance
    // up to window + 1 from mu and are part of the normalizing sum
    if (std::fabs(static_cast<double>(n) - params.mu) > static_cast<double>(params.window) + 1.0)
        throw truncation_error("danorm: |n - mu| exceeds the window; mass below truncation error");
}

}  // namespace

DanormParams::DanormParams(double mu_, double gamma_, int window_)
    : mu(mu_), gamma(gamma_), window(window_) {
    if (!std::isfinite(mu) || !std::isfinite(gamma))
        throw std::invalid_argument("DanormParams: non-finite parameter");
    if (window < 1) throw std::invalid_argument("DanormParams: window must be >= 1");
    gamma = std::clamp(gamma, kDanormGammaEps, kDanormGammaMax);
    // the truncated tail gamma^(window^2) / (1 - gamma) must stay below 1e-12
    const double w = static_cast<double>(window);
    if (w * w * std::log(gamma) - std::log1p(-gamma) > std::log(1e-12))
        throw std::invalid_argument(
            "DanormParams: window too small for this gamma (truncation bound above 1e-12)");
}

double log_z_tilde(const DanormParams& params, const Support& support) {
    return scan_window(params, support).log_z;
}

double log_prob(const DanormParams& params, std::int64_t n, const Support& support) {
    check_n(params, n, support);
    const double d = static_cast<double>(n) - params.mu;
    return d * d * std::log(params.gamma) - scan_window(params, support).log_z;
}

GradRecord grad_log_prob(const DanormParams& params, std::int64_t n, const Support& support) {
    check_n(params, n, support);
    const WindowSums ws = scan_window(params, support);
    const double lg = std::log(params.gamma);
    const double d = static_cast<double>(n) - params.mu;
    const double mean_i = ws.s_i / ws.s;
    const double mean_q = ws.s_q / ws.s;
    GradRecord g;
    g.add("mu", 2.0 * lg * (mean_i - static_cast<double>(n)));
    g.add("gamma", (d * d - mean_q) / params.gamma);
    return g;
}

double mean(const DanormParams& params, const Support& support) {
    const WindowSums ws = scan_window(params, support);
    return ws.s_i / ws.s;
}

double variance(const DanormParams& params, const Support& support) {
    const WindowRange w = window_range(params, support);
    const WindowSums ws = scan_window(params, support);
    const double m = ws.s_i / ws.s;
    const double lg = std::log(params.gamma);
    const double peak = ws.peak;
    double acc = 0.0;
    for (std::int64_t i = w.lo; i <= w.hi; ++i) {
        const double d = static_cast<double>(i) - params.mu;
        const double t = d * d * lg - peak;
        if (t < -kLogCutoff) continue;
        const double dm = static_cast<double>(i) - m;
        acc += dm * dm * std::exp(t);
    }
    return acc / ws.s;
}

std::int64_t sample(const DanormParams& params, const Support& support, Rng& rng) {
    const WindowRange w = window_range(params, support);
    const double lg = std::log(params.gamma);
    auto term = [&](std::int64_t i) {
        const double d = static_cast<double>(i) - params.mu;
        return d * d * lg;
    };
    const double peak = term(w.center);

    // Materialize the non-underflowed stretch of the window, then invert the
    // empirical CDF.  The stretch is short: distance sqrt(750 / |ln gamma|)
    // at most, about 120 points at the gamma cap.
    std::vector<std::pair<std::int64_t, double>> mass;
    mass.reserve(64);
    double total = 0.0;
    auto push = [&](std::int64_t i, double t) {
        const double e = std::exp(t - peak);
        mass.emplace_back(i, e);
        total += e;
    };
    push(w.center, peak);
    for (std::int64_t i = w.center - 1; i >= w.lo; --i) {
        const double t = term(i);
        if (t - peak < -kLogCutoff) break;
        push(i, t);
    }
    for (std::int64_t i = w.center + 1; i <= w.hi; ++i) {
        const double t = term(i);
        if (t - peak < -kLogCutoff) break;
        push(i, t);
    }

    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (const auto& [i, e] : mass) {
        acc += e;
        if (u <= acc) return i;
    }
    return mass.back().first;
}

}  // namespace intdist
