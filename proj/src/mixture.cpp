#include "intdist/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intdist {

namespace {

std::vector<double> log_weights(const MixtureParams& mix) {
    const double lse = logsumexp(mix.logits);
    std::vector<double> lw(mix.logits.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = mix.logits[i] - lse;
    return lw;
}

}  // namespace

MixtureParams::MixtureParams(std::vector<double> logits_, std::vector<FamilyParams> components_)
    : logits(std::move(logits_)), components(std::move(components_)) {
    if (components.empty() || logits.size() != components.size())
        throw std::invalid_argument("MixtureParams: need one logit per component");
    const int kk = static_cast<int>(components.size());
    if (kk != 1 && kk != 2 && kk != 4 && kk != 8 && kk != 10)
        throw std::invalid_argument("MixtureParams: K must be one of 1, 2, 4, 8, 10");
    for (const auto& c : components)
        if (c.index() != components.front().index())
            throw std::invalid_argument("MixtureParams: components must share one family");
    for (double l : logits)
        if (!std::isfinite(l)) throw std::invalid_argument("MixtureParams: non-finite logit");
}

std::vector<double> weights(const MixtureParams& mix) {
    std::vector<double> w = log_weights(mix);
    for (double& x : w) x = std::exp(x);
    return w;
}

// A component whose windowed normalization cannot reach n (danorm's
// truncation guard) carries less mass there than its truncation error;
// treat it as zero mass within the mixture.
namespace {

double component_log_prob(const FamilyParams& c, std::int64_t n, const Support& support) {
    try {
        return log_prob(c, n, support);
    } catch (const truncation_error&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double log_prob(const MixtureParams& mix, std::int64_t n, const Support& support) {
    const std::vector<double> lw = log_weights(mix);
    std::vector<double> terms(lw.size());
    for (std::size_t k = 0; k < lw.size(); ++k)
        terms[k] = lw[k] + component_log_prob(mix.components[k], n, support);
    return logsumexp(terms);
}

GradRecord grad_log_prob(const MixtureParams& mix, std::int64_t n, const Support& support) {
    const std::vector<double> lw = log_weights(mix);
    const std::size_t kk = lw.size();
    std::vector<double> terms(kk);
    std::vector<GradRecord> comp_grads(kk);
    for (std::size_t k = 0; k < kk; ++k) {
        terms[k] = lw[k] + component_log_prob(mix.components[k], n, support);
        if (terms[k] == -std::numeric_limits<double>::infinity()) {
            // zero responsibility: parameter partials vanish
            for (const std::string& name : param_names(mix.components[k]))
                comp_grads[k].add(name, 0.0);
        } else {
            comp_grads[k] = grad_log_prob(mix.components[k], n, support);
        }
    }
    const double lp = logsumexp(terms);

    GradRecord g;
    for (std::size_t k = 0; k < kk; ++k) {
        const double resp = std::exp(terms[k] - lp);
        g.add("w" + std::to_string(k), resp - std::exp(lw[k]));
    }
    for (std::size_t k = 0; k < kk; ++k) {
        const double resp = std::exp(terms[k] - lp);
        for (const auto& [name, value] : comp_grads[k])
            g.add("c" + std::to_string(k) + "." + name, resp * value);
    }
    return g;
}

double mean(const MixtureParams& mix, const Support& support) {
    const std::vector<double> w = weights(mix);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * mean(mix.components[k], support);
    return acc;
}

std::int64_t sample(const MixtureParams& mix, const Support& support, Rng& rng) {
    const std::vector<double> w = weights(mix);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = w.size() - 1;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k];
        if (u <= acc) {
            pick = k;
            break;
        }
    }
    return sample(mix.components[pick], support, rng);
}

std::vector<double> flatten(const MixtureParams& mix) {
    std::vector<double> v = mix.logits;
    for (const auto& c : mix.components) {
        const std::vector<double> cv = flatten(c);
        v.insert(v.end(), cv.begin(), cv.end());
    }
    return v;
}

MixtureParams unflatten(const MixtureParams& shape, std::span<const double> values) {
    const std::size_t kk = shape.components.size();
    std::vector<double> logits(values.begin(), values.begin() + kk);
    std::vector<FamilyParams> comps;
    comps.reserve(kk);
    std::size_t pos = kk;
    for (const auto& c : shape.components) {
        const std::size_t len = flatten(c).size();
        comps.push_back(unflatten(c, values.subspan(pos, len)));
        pos += len;
    }
    if (pos != values.size()) throw std::invalid_argument("unflatten: parameter count mismatch");
    return MixtureParams(std::move(logits), std::move(comps));
}

std::vector<std::string> param_names(const MixtureParams& mix) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < mix.components.size(); ++k) names.push_back("w" + std::to_string(k));
    for (std::size_t k = 0; k < mix.components.size(); ++k)
        for (const std::string& n : param_names(mix.components[k]))
            names.push_back("c" + std::to_string(k) + "." + n);
    return names;
}

}  // namespace intdist
