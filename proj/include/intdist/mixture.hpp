#pragma once

#include "intdist/family.hpp"

// K-component mixtures over a single family.  Mixing weights are the
// normalized exponentials of unconstrained logits; K = 1 reduces exactly to
// the bare component.

namespace intdist {

struct MixtureParams {
    std::vector<double> logits;
    std::vector<FamilyParams> components;

    MixtureParams(std::vector<double> logits_, std::vector<FamilyParams> components_);

    int k() const { return static_cast<int>(components.size()); }
};

// Normalized mixing weights; logits are shifted by their max before
// exponentiation.
std::vector<double> weights(const MixtureParams& mix);

// logsumexp over components of log w_k + component log_prob.
double log_prob(const MixtureParams& mix, std::int64_t n, const Support& support);

// Component gradients scaled by responsibilities r_k; logit partials are
// r_k - w_k.  Order: w0..w{K-1}, then each component's parameters as
// c<k>.<name>.
GradRecord grad_log_prob(const MixtureParams& mix, std::int64_t n, const Support& support);

double mean(const MixtureParams& mix, const Support& support);

// Ancestral draw: component index by weight, then the component's sampler.
std::int64_t sample(const MixtureParams& mix, const Support& support, Rng& rng);

std::vector<double> flatten(const MixtureParams& mix);
MixtureParams unflatten(const MixtureParams& shape, std::span<const double> values);
std::vector<std::string> param_names(const MixtureParams& mix);

}  // namespace intdist
