#include "intdist/family.hpp"

#include <cmath>

namespace intdist {

Family family_of(const FamilyParams& params) {
    return static_cast<Family>(params.index());
}

std::string_view family_name(Family family) {
    switch (family) {
        case Family::dalap: return "dalap";
        case Family::danorm: return "danorm";
        case Family::dnormal: return "dnormal";
        case Family::dlaplace: return "dlaplace";
        case Family::dlogistic: return "dlogistic";
        case Family::dweib: return "dweib";
        case Family::bitwise: return "bitwise";
    }
    throw std::logic_error("family_name: unreachable");
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::dalap, Family::danorm, Family::dnormal, Family::dlaplace,
                     Family::dlogistic, Family::dweib, Family::bitwise})
        if (family_name(f) == name) return f;
    throw std::invalid_argument("unknown family: " + std::string(name));
}

double log_prob(const FamilyParams& params, std::int64_t n, const Support& support) {
    return std::visit([&](const auto& p) { return log_prob(p, n, support); }, params);
}

GradRecord grad_log_prob(const FamilyParams& params, std::int64_t n, const Support& support) {
    return std::visit([&](const auto& p) { return grad_log_prob(p, n, support); }, params);
}

double mean(const FamilyParams& params, const Support& support) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BitwiseParams>)
                return mean(p);
            else
                return mean(p, support);
        },
        params);
}

std::int64_t sample(const FamilyParams& params, const Support& support, Rng& rng) {
    return std::visit(
        [&](const auto& p) -> std::int64_t {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BitwiseParams>)
                return sample(p, rng);
            else
                return sample(p, support, rng);
        },
        params);
}

std::vector<double> flatten(const FamilyParams& params) {
    return std::visit(
        [](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DalapParams> || std::is_same_v<T, DanormParams>)
                return {p.mu, p.gamma};
            else if constexpr (std::is_same_v<T, DNormalParams>)
                return {p.mu, p.sigma};
            else if constexpr (std::is_same_v<T, DLaplaceParams>)
                return {p.mu, p.b};
            else if constexpr (std::is_same_v<T, DLogisticParams>)
                return {p.mu, p.s};
            else if constexpr (std::is_same_v<T, DWeibullParams>)
                return {p.alpha, p.beta};
            else {
                std::vector<double> v;
                if (p.is_signed) v.push_back(p.pi_pos);
                v.insert(v.end(), p.probs.begin(), p.probs.end());
                return v;
            }
        },
        params);
}

FamilyParams unflatten(const FamilyParams& shape, std::span<const double> values) {
    const std::size_t want = flatten(shape).size();
    if (values.size() != want) throw std::invalid_argument("unflatten: parameter count mismatch");
    return std::visit(
        [&](const auto& p) -> FamilyParams {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DalapParams>)
                return DalapParams(values[0], values[1]);
            else if constexpr (std::is_same_v<T, DanormParams>)
                return DanormParams(values[0], values[1], p.window);
            else if constexpr (std::is_same_v<T, DNormalParams>)
                return DNormalParams(values[0], values[1]);
            else if constexpr (std::is_same_v<T, DLaplaceParams>)
                return DLaplaceParams(values[0], values[1]);
            else if constexpr (std::is_same_v<T, DLogisticParams>)
                return DLogisticParams(values[0], values[1]);
            else if constexpr (std::is_same_v<T, DWeibullParams>)
                return DWeibullParams(values[0], values[1]);
            else {
                const std::size_t offset = p.is_signed ? 1 : 0;
                std::vector<double> probs(values.begin() + offset, values.end());
                return BitwiseParams(p.is_signed, p.is_signed ? values[0] : 0.5, std::move(probs));
            }
        },
        shape);
}

std::vector<std::string> param_names(const FamilyParams& params) {
    return std::visit(
        [](const auto& p) -> std::vector<std::string> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DalapParams> || std::is_same_v<T, DanormParams>)
                return {"mu", "gamma"};
            else if constexpr (std::is_same_v<T, DNormalParams>)
                return {"mu", "sigma"};
            else if constexpr (std::is_same_v<T, DLaplaceParams>)
                return {"mu", "b"};
            else if constexpr (std::is_same_v<T, DLogisticParams>)
                return {"mu", "s"};
            else if constexpr (std::is_same_v<T, DWeibullParams>)
                return {"alpha", "beta"};
            else {
                std::vector<std::string> names;
                if (p.is_signed) names.emplace_back("pi_pos");
                for (int i = 0; i < p.bits(); ++i) names.push_back("pi" + std::to_string(i));
                return names;
            }
        },
        params);
}

}  // namespace intdist
