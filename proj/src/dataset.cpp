#include "intdist/dataset.hpp"

#include "intdist/oracle.hpp"
#include "intdist/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace intdist {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_real(const std::string& field, std::size_t row, const std::string& column) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || !std::isfinite(v))
        throw std::runtime_error("csv row " + std::to_string(row) + ": column '" + column +
                                 "' is not a finite number: '" + field + "'");
    return v;
}

SplitTag parse_split(const std::string& field, std::size_t row) {
    if (field == "train") return SplitTag::train;
    if (field == "valid") return SplitTag::valid;
    if (field == "test") return SplitTag::test;
    throw std::runtime_error("csv row " + std::to_string(row) +
                             ": split must be train/valid/test, got '" + field + "'");
}

const char* split_name(SplitTag t) {
    switch (t) {
        case SplitTag::train: return "train";
        case SplitTag::valid: return "valid";
        case SplitTag::test: return "test";
    }
    return "?";
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Dataset finish_unconditional(std::vector<std::int64_t> ys, std::uint64_t seed) {
    Dataset d;
    d.targets = std::move(ys);
    d.split.reserve(d.targets.size());
    Rng rng(seed ^ 0x5eed5eedULL);
    for (std::size_t i = 0; i < d.targets.size(); ++i) {
        const double u = rng.uniform();
        d.split.push_back(u < 0.7 ? SplitTag::train : (u < 0.8 ? SplitTag::valid : SplitTag::test));
    }
    return d;
}

std::string meta_json_for(const std::string& kind, const FamilyParams& params,
                          const Support& support, std::vector<std::pair<std::string, double>> extra) {
    nlohmann::json j;
    j["generator"] = kind;
    j["entropy_bits"] = oracle::entropy_bits(params, support);
    j["mean"] = oracle::moment(params, support, 1);
    for (const auto& [k, v] : extra) j["params"][k] = v;
    return j.dump(2);
}

}  // namespace

std::vector<std::size_t> Dataset::indices_of(SplitTag tag) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == tag) out.push_back(i);
    return out;
}

Dataset load_csv(const std::string& path, const std::string& target_column, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv is empty: " + path);
    const std::vector<std::string> header = split_fields(line);

    const std::size_t ncols = header.size();
    std::size_t target_idx = ncols;
    std::size_t split_idx = ncols;
    Dataset d;
    d.target_name = target_column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == target_column)
            target_idx = i;
        else if (header[i] == "split")
            split_idx = i;
        else
            d.feature_names.push_back(header[i]);
    }
    if (target_idx == header.size())
        throw std::runtime_error("csv has no column named '" + target_column + "'");

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            throw std::runtime_error("csv row " + std::to_string(row) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == target_idx) {
                const double v = parse_real(fields[i], row, target_column);
                double ipart;
                if (std::modf(v, &ipart) != 0.0 || std::fabs(v) > 9.0e15)
                    throw std::runtime_error("csv row " + std::to_string(row) + ": target '" +
                                             fields[i] + "' is not an integer");
                d.targets.push_back(static_cast<std::int64_t>(ipart));
            } else if (i == split_idx) {
                d.split.push_back(parse_split(fields[i], row));
            } else {
                d.features.push_back(parse_real(fields[i], row, header[i]));
            }
        }
    }
    if (d.targets.empty()) throw std::runtime_error("csv has no data rows: " + path);

    if (split_idx == ncols) {  // no split column was present
        Rng rng(seed ^ 0x5eed5eedULL);
        d.split.reserve(d.targets.size());
        for (std::size_t i = 0; i < d.targets.size(); ++i) {
            const double u = rng.uniform();
            d.split.push_back(u < 0.7 ? SplitTag::train
                                      : (u < 0.8 ? SplitTag::valid : SplitTag::test));
        }
    }
    return d;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv file: " + path);
    for (const std::string& f : data.feature_names) out << f << ',';
    out << data.target_name << ",split\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (double x : data.row(i)) out << format_real(x) << ',';
        out << data.targets[i] << ',' << split_name(data.split[i]) << '\n';
    }
}

Synth synth_constant(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.feature_names = {"x1", "x2", "x3"};
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) d.features.push_back(rng.normal());
        d.targets.push_back(7);
    }
    Dataset base = finish_unconditional(std::move(d.targets), seed);
    d.targets = std::move(base.targets);
    d.split = std::move(base.split);
    nlohmann::json j;
    j["generator"] = "constant";
    j["entropy_bits"] = 0.0;
    j["mean"] = 7.0;
    return Synth{std::move(d), j.dump(2)};
}

Synth synth_linear(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.feature_names = {"x1", "x2", "x3"};
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = -3.0 + 6.0 * rng.uniform();
        const double x2 = -3.0 + 6.0 * rng.uniform();
        d.features.push_back(x1);
        d.features.push_back(x2);
        d.features.push_back(rng.normal());
        d.targets.push_back(round_half_up(3.0 * x1 - 2.0 * x2));
    }
    Dataset base = finish_unconditional(std::move(d.targets), seed);
    d.targets = std::move(base.targets);
    d.split = std::move(base.split);
    nlohmann::json j;
    j["generator"] = "linear";
    j["entropy_bits"] = 0.0;
    return Synth{std::move(d), j.dump(2)};
}

Synth synth_dalap(std::size_t n, double mu, double gamma, std::uint64_t seed) {
    Rng rng(seed);
    const DalapParams p(mu, gamma);
    std::vector<std::int64_t> ys;
    ys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ys.push_back(sample(p, Support::unbounded(), rng));
    Synth s{finish_unconditional(std::move(ys), seed),
            meta_json_for("dalap", FamilyParams(p), Support::unbounded(),
                          {{"mu", p.mu}, {"gamma", p.gamma}})};
    return s;
}

Synth synth_dnormal(std::size_t n, double mu, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    const DNormalParams p(mu, sigma);
    std::vector<std::int64_t> ys;
    ys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ys.push_back(sample(p, Support::unbounded(), rng));
    return Synth{finish_unconditional(std::move(ys), seed),
                 meta_json_for("dnormal", FamilyParams(p), Support::unbounded(),
                               {{"mu", p.mu}, {"sigma", p.sigma}})};
}

Synth synth_bitwise(std::size_t n, int bits, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> probs(static_cast<std::size_t>(bits));
    for (double& p : probs) p = 0.25 + 0.5 * rng.uniform();
    const BitwiseParams p(false, 0.5, probs);
    std::vector<std::int64_t> ys;
    ys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ys.push_back(sample(p, rng));
    std::vector<std::pair<std::string, double>> extra;
    for (int i = 0; i < bits; ++i)
        extra.emplace_back("pi" + std::to_string(i), p.probs[static_cast<std::size_t>(i)]);
    return Synth{finish_unconditional(std::move(ys), seed),
                 meta_json_for("bitwise", FamilyParams(p), bitwise_support(p), extra)};
}

Synth synth_geometric(std::size_t n, double noise_gamma, std::uint64_t seed) {
    Rng rng(seed);
    const DalapParams noise(0.0, noise_gamma);
    Dataset d;
    d.feature_names = {"x"};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -3.0 + 6.0 * rng.uniform();
        d.features.push_back(x);
        d.targets.push_back(round_half_up(5.0 * x) + sample(noise, Support::unbounded(), rng));
    }
    Dataset base = finish_unconditional(std::move(d.targets), seed);
    d.targets = std::move(base.targets);
    d.split = std::move(base.split);
    std::string meta = meta_json_for("geometric", FamilyParams(noise), Support::unbounded(),
                                     {{"noise_gamma", noise.gamma}, {"slope", 5.0}});
    return Synth{std::move(d), std::move(meta)};
}

Synth make_synth(const std::string& kind, std::size_t n, std::uint64_t seed) {
    if (kind == "constant") return synth_constant(n, seed);
    if (kind == "linear") return synth_linear(n, seed);
    if (kind == "dalap") return synth_dalap(n, 3.7, 0.3, seed);
    if (kind == "dnormal") return synth_dnormal(n, 3.7, 1.3, seed);
    if (kind == "bitwise") return synth_bitwise(n, 8, seed);
    if (kind == "geometric") return synth_geometric(n, 0.65, seed);
    throw std::invalid_argument("unknown synth kind: " + kind +
                                " (constant|linear|dalap|dnormal|bitwise|geometric)");
}

}  // namespace intdist
