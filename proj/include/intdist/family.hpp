#pragma once

#include "intdist/bitwise.hpp"
#include "intdist/dalap.hpp"
#include "intdist/danorm.hpp"
#include "intdist/discretized.hpp"

#include <variant>

// Uniform access to the distribution families: a tagged parameter type plus
// dispatched operations, and a flat parameter-vector view used by the
// finite-difference oracle and the trainer.

namespace intdist {

enum class Family { dalap, danorm, dnormal, dlaplace, dlogistic, dweib, bitwise };

using FamilyParams = std::variant<DalapParams, DanormParams, DNormalParams, DLaplaceParams,
                                  DLogisticParams, DWeibullParams, BitwiseParams>;

Family family_of(const FamilyParams& params);
std::string_view family_name(Family family);
Family parse_family(std::string_view name);

double log_prob(const FamilyParams& params, std::int64_t n, const Support& support);
GradRecord grad_log_prob(const FamilyParams& params, std::int64_t n, const Support& support);
double mean(const FamilyParams& params, const Support& support);
std::int64_t sample(const FamilyParams& params, const Support& support, Rng& rng);

// Trainable parameters in canonical order (danorm's window is configuration,
// not a parameter, and is carried by the shape).
std::vector<double> flatten(const FamilyParams& params);
FamilyParams unflatten(const FamilyParams& shape, std::span<const double> values);
std::vector<std::string> param_names(const FamilyParams& params);

}  // namespace intdist
