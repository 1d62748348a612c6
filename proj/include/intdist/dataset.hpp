#pragma once

#include "intdist/numeric.hpp"

#include <span>
#include <string>
#include <vector>

// Tabular datasets: real features, one integer target, train/valid/test
// split.  Loaded from CSV (a `split` column is honored when present,
// otherwise a seeded 70/10/20 split is drawn) or produced by the bundled
// synthetic generators.

namespace intdist {

enum class SplitTag : int { train = 0, valid = 1, test = 2 };

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> features;  // row-major, n() x dim()
    std::vector<std::int64_t> targets;
    std::vector<SplitTag> split;
    std::string target_name = "y";

    std::size_t n() const { return targets.size(); }
    std::size_t dim() const { return feature_names.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * dim(), dim());
    }
    std::vector<std::size_t> indices_of(SplitTag tag) const;
};

// Throws std::runtime_error naming the offending row for malformed fields or
// fractional targets.
Dataset load_csv(const std::string& path, const std::string& target_column, std::uint64_t seed);

void write_csv(const Dataset& data, const std::string& path);

// Synthetic datasets used by the verification suite; `meta_json` records the
// generator, its true parameters, and the oracle entropy (bits) of the
// target noise so fits can be scored against it.
struct Synth {
    Dataset data;
    std::string meta_json;
};

// All targets equal 7; three standard-normal nuisance features.
Synth synth_constant(std::size_t n, std::uint64_t seed);
// y = round(3 x1 - 2 x2) with x ~ U(-3, 3) plus one nuisance feature.
Synth synth_linear(std::size_t n, std::uint64_t seed);
// Unconditional draws, no features.
Synth synth_dalap(std::size_t n, double mu, double gamma, std::uint64_t seed);
Synth synth_dnormal(std::size_t n, double mu, double sigma, std::uint64_t seed);
Synth synth_bitwise(std::size_t n, int bits, std::uint64_t seed);
// y = round(5 x) + two-sided geometric noise (dalap at mu = 0), x ~ U(-3, 3).
Synth synth_geometric(std::size_t n, double noise_gamma, std::uint64_t seed);

Synth make_synth(const std::string& kind, std::size_t n, std::uint64_t seed);

}  // namespace intdist
