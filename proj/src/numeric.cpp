#include "intdist/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intdist {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

}  // namespace

std::int64_t round_half_up(double x) {
    require_finite(x, "round_half_up");
    const double fl = std::floor(x);
    const double frac = x - fl;  // exact for |x| below 2^52
    auto n = static_cast<std::int64_t>(fl);
    return frac >= 0.5 ? n + 1 : n;
}

FracParts frac_parts(double mu) {
    require_finite(mu, "frac_parts");
    const double fl = std::floor(mu);
    const double f = mu - fl;
    return FracParts{static_cast<std::int64_t>(fl), f, 1.0 - f};
}

double log1mexp(double a) {
    if (!(a < 0.0)) throw std::invalid_argument("log1mexp: requires a < 0");
    if (a > -kLn2) return std::log(-std::expm1(a));
    return std::log1p(-std::exp(a));
}

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double logsumexp(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("logsumexp: empty input");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

namespace {

// Rational coefficients for the three erf/erfc intervals.
constexpr double kErfA[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                             3209.37758913846947, 0.185777706184603153};
constexpr double kErfB[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                             2844.23683343917062};
constexpr double kErfC[9] = {0.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                             298.635138197400131,  881.95222124176909,  1712.04761263407058,
                             2051.07837782607147,  1230.33935479799725, 2.15311535474403846e-8};
constexpr double kErfD[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                             1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                             3439.36767414372164, 1230.33935480374942};
constexpr double kErfP[6] = {0.305326634961232344, 0.360344899949804439, 0.125781726111229246,
                             0.0160837851487422766, 6.58749161529837803e-4, 0.0163153871373020978};
constexpr double kErfQ[5] = {2.56852019228982242, 1.87295284992346047, 0.527905102951428412,
                             0.0605183413124413191, 0.00233520497626869185};

constexpr double kErfThresh = 0.46875;

// erf(x) for |x| <= kErfThresh.
double erf_small(double x) {
    const double y = std::fabs(x);
    double ysq = 0.0;
    if (y > 1.11e-16) ysq = y * y;
    double xnum = kErfA[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
        xnum = (xnum + kErfA[i]) * ysq;
        xden = (xden + kErfB[i]) * ysq;
    }
    return x * (xnum + kErfA[3]) / (xden + kErfB[3]);
}

// erfcx(y) for y in (kErfThresh, 4].
double erfcx_mid(double y) {
    double xnum = kErfC[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
        xnum = (xnum + kErfC[i]) * y;
        xden = (xden + kErfD[i]) * y;
    }
    return (xnum + kErfC[7]) / (xden + kErfD[7]);
}

// erfcx(y) for y > 4.
double erfcx_large(double y) {
    const double ysq = 1.0 / (y * y);
    double xnum = kErfP[5] * ysq;
    double xden = ysq;
    for (int i = 0; i < 4; ++i) {
        xnum = (xnum + kErfP[i]) * ysq;
        xden = (xden + kErfQ[i]) * ysq;
    }
    double r = ysq * (xnum + kErfP[4]) / (xden + kErfQ[4]);
    return (kInvSqrtPi - r) / y;
}

// e^{-y^2} evaluated as e^{-hi^2} * e^{-del} with hi a 1/16 grid point, which
// keeps the product accurate when y^2 is large.
double exp_neg_ysq(double y) {
    const double hi = std::trunc(y * 16.0) / 16.0;
    const double del = (y - hi) * (y + hi);
    return std::exp(-hi * hi) * std::exp(-del);
}

double erfcx_pos(double y) {
    return y <= 4.0 ? erfcx_mid(y) : erfcx_large(y);
}

}  // namespace

double erf(double x) {
    require_finite(x, "erf");
    const double y = std::fabs(x);
    if (y <= kErfThresh) return erf_small(x);
    if (y >= 6.0) return x > 0 ? 1.0 : -1.0;  // 1 - erf(6) < 2^-53
    const double ec = exp_neg_ysq(y) * erfcx_pos(y);
    return x > 0 ? 1.0 - ec : ec - 1.0;
}

double erfc(double x) {
    require_finite(x, "erfc");
    const double y = std::fabs(x);
    if (y <= kErfThresh) return 1.0 - erf_small(x);
    if (y > 26.6) return x > 0 ? 0.0 : 2.0;  // e^{-y^2} underflows
    const double ec = exp_neg_ysq(y) * erfcx_pos(y);
    return x > 0 ? ec : 2.0 - ec;
}

double erfcx(double x) {
    require_finite(x, "erfcx");
    if (x >= 0.0) {
        if (x <= kErfThresh) return std::exp(x * x) * (1.0 - erf_small(x));
        return erfcx_pos(x);
    }
    // Left of zero erfcx grows like 2 e^{x^2}; only small |x| stays finite.
    if (x > -kErfThresh) return std::exp(x * x) * (1.0 - erf_small(x));
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx_pos(-x);
}

double erf_deriv(double x) {
    require_finite(x, "erf_deriv");
    return kTwoOverSqrtPi * std::exp(-x * x);
}

}  // namespace intdist
