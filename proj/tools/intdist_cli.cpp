#include "intdist/checks.hpp"
#include "intdist/oracle.hpp"
#include "intdist/trainer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace intdist;

Support parse_support(const std::string& text) {
    if (text == "unbounded") return Support::unbounded();
    if (text == "nonneg") return Support::lower_bounded(0);
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--support", "expected unbounded, nonneg or l:u");
    return Support::bounded(std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1)));
}

// name=value pairs separated by commas; list values use '/', e.g.
// "pipos=0.9,pi=0.5/0.25/0.5".
std::map<std::string, std::vector<double>> parse_params(const std::string& text) {
    std::map<std::string, std::vector<double>> out;
    std::string chunk;
    std::istringstream in(text);
    while (std::getline(in, chunk, ',')) {
        const auto eq = chunk.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--params", "expected name=value, got '" + chunk + "'");
        const std::string name = chunk.substr(0, eq);
        std::vector<double> vals;
        std::string item;
        std::istringstream list(chunk.substr(eq + 1));
        while (std::getline(list, item, '/')) {
            std::size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (used != item.size())
                throw CLI::ValidationError("--params", "bad number '" + item + "'");
        }
        if (vals.empty()) throw CLI::ValidationError("--params", "empty value for " + name);
        out[name] = vals;
    }
    return out;
}

double single(const std::map<std::string, std::vector<double>>& kv, const std::string& name,
              double fallback, bool required) {
    const auto it = kv.find(name);
    if (it == kv.end()) {
        if (required) throw CLI::ValidationError("--params", "missing parameter " + name);
        return fallback;
    }
    if (it->second.size() != 1)
        throw CLI::ValidationError("--params", name + " takes a single value");
    return it->second.front();
}

void reject_unknown(const std::map<std::string, std::vector<double>>& kv,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [name, values] : kv) {
        bool known = false;
        for (const char* a : allowed) known = known || name == a;
        if (!known) throw CLI::ValidationError("--params", "unknown parameter " + name);
    }
}

bool resolve_signed_hint(const Support& support) {
    return support.kind() == Support::Kind::unbounded || support.low() < 0;
}

FamilyParams build_family_params(Family family, const std::map<std::string, std::vector<double>>& kv,
                                 const Support& support) {
    switch (family) {
        case Family::dalap:
            reject_unknown(kv, {"mu", "gamma"});
            return DalapParams(single(kv, "mu", 0, true), single(kv, "gamma", 0, true));
        case Family::danorm:
            reject_unknown(kv, {"mu", "gamma", "window"});
            return DanormParams(single(kv, "mu", 0, true), single(kv, "gamma", 0, true),
                                static_cast<int>(single(kv, "window", kDanormDefaultWindow, false)));
        case Family::dnormal:
            reject_unknown(kv, {"mu", "sigma"});
            return DNormalParams(single(kv, "mu", 0, true), single(kv, "sigma", 0, true));
        case Family::dlaplace:
            reject_unknown(kv, {"mu", "b"});
            return DLaplaceParams(single(kv, "mu", 0, true), single(kv, "b", 0, true));
        case Family::dlogistic:
            reject_unknown(kv, {"mu", "s"});
            return DLogisticParams(single(kv, "mu", 0, true), single(kv, "s", 0, true));
        case Family::dweib:
            reject_unknown(kv, {"alpha", "beta"});
            return DWeibullParams(single(kv, "alpha", 0, true), single(kv, "beta", 0, true));
        case Family::bitwise: {
            reject_unknown(kv, {"pi", "pipos"});
            const auto it = kv.find("pi");
            if (it == kv.end()) throw CLI::ValidationError("--params", "bitwise needs pi=p0/p1/...");
            const bool is_signed = kv.count("pipos") > 0 || resolve_signed_hint(support);
            return BitwiseParams(is_signed, single(kv, "pipos", 0.5, false), it->second);
        }
    }
    throw std::logic_error("unreachable family");
}

void print_metrics_table(const TrainResult& r) {
    auto row = [](const char* name, const Metrics& m) {
        if (std::isnan(m.bits))
            std::printf("%-6s  bits=NA        rmse=%-12.6f n=%zu", name, m.rmse, m.count);
        else
            std::printf("%-6s  bits=%-9.6f rmse=%-12.6f n=%zu", name, m.bits, m.rmse, m.count);
        if (m.out_of_support > 0) std::printf("  out_of_support=%zu", m.out_of_support);
        std::printf("\n");
    };
    row("train", r.train_metrics);
    row("valid", r.valid_metrics);
    row("test", r.test_metrics);
}

void print_result_line(const std::string& loss_name, int k, const Metrics& test) {
    if (std::isnan(test.bits))
        std::printf("RESULT family=%s k=%d bits=NA rmse=%.6f\n", loss_name.c_str(), k, test.rmse);
    else
        std::printf("RESULT family=%s k=%d bits=%.6f rmse=%.6f\n", loss_name.c_str(), k, test.bits,
                    test.rmse);
}

int cmd_fit(const std::string& data_path, const std::string& target, const std::string& family_s,
            int k, const std::string& support_s, int bits, bool bits_given, const std::string& lr_s,
            int epochs, int batch, int hidden, std::uint64_t seed, const std::string& out_path) {
    TrainConfig cfg;
    cfg.support = parse_support(support_s);
    if (family_s == "sqerr") {
        cfg.sqerr = true;
    } else {
        cfg.family = parse_family(family_s);
    }
    cfg.k = k;
    // an explicit --bits acts as a floor; otherwise bounded requests take
    // exactly the smallest covering variant
    cfg.bitwise_bits =
        (!bits_given && cfg.support.kind() == Support::Kind::bounded) ? 1 : bits;
    cfg.hidden_dim = hidden;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.seed = seed;
    if (lr_s != "sweep") {
        cfg.learning_rate = std::stod(lr_s);
        if (cfg.learning_rate <= 0) throw CLI::ValidationError("--lr", "must be positive or 'sweep'");
    }
    if (!cfg.sqerr && cfg.family == Family::dweib) {
        const Support s = cfg.support;
        if (s.kind() == Support::Kind::unbounded || s.low() != 0)
            throw CLI::ValidationError("--support", "dweib requires nonneg or 0:u support");
    }

    const Dataset data = load_csv(data_path, target, seed);
    const TrainResult r = train(data, cfg);

    const Support actual = resolved_support(cfg);
    if (!cfg.sqerr && cfg.family == Family::bitwise) {
        int actual_bits = 0;
        for (std::int64_t cap = actual.high(); cap > 0; cap >>= 1) ++actual_bits;
        std::printf("bitwise support: [%lld, %lld] (%d magnitude bits, %s)\n",
                    static_cast<long long>(actual.low()), static_cast<long long>(actual.high()),
                    actual_bits, actual.low() < 0 ? "signed" : "nonnegative");
    }
    for (const SweepEntry& e : r.sweep) {
        if (e.diverged)
            std::printf("sweep lr=%-10g diverged\n", e.lr);
        else
            std::printf("sweep lr=%-10g val=%.6f\n", e.lr, e.val_metric);
    }
    std::printf("selected lr=%g\n", r.selected_lr);
    print_metrics_table(r);
    print_result_line(cfg.sqerr ? "sqerr" : std::string(family_name(cfg.family)), cfg.k,
                      r.test_metrics);
    if (!out_path.empty()) save_checkpoint(r.model, out_path);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::string& target) {
    const MlpModel model = load_checkpoint(model_path);
    const Dataset data = load_csv(data_path, target, model.config.seed);
    TrainResult r;
    r.model = model;
    r.train_metrics = evaluate(model, data, SplitTag::train);
    r.valid_metrics = evaluate(model, data, SplitTag::valid);
    r.test_metrics = evaluate(model, data, SplitTag::test);
    print_metrics_table(r);
    print_result_line(model.config.sqerr ? "sqerr" : std::string(family_name(model.config.family)),
                      model.config.k, r.test_metrics);
    return 0;
}

int cmd_pmf(const std::string& family_s, const std::string& params_s, const std::string& support_s,
            const std::string& range_s) {
    const Family family = parse_family(family_s);
    Support support = parse_support(support_s);
    const FamilyParams params = build_family_params(family, parse_params(params_s), support);
    if (family == Family::bitwise) support = bitwise_support(std::get<BitwiseParams>(params));

    const auto colon = range_s.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--range", "expected a:b");
    const std::int64_t lo = std::stoll(range_s.substr(0, colon));
    const std::int64_t hi = std::stoll(range_s.substr(colon + 1));
    if (lo > hi) throw CLI::ValidationError("--range", "need a <= b");

    std::printf("%8s  %-22s  %-12s\n", "n", "p(n)", "-log2 p(n)");
    double covered = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) {
        if (!support.contains(n)) continue;
        const double lp = log_prob(params, n, support);
        covered += std::exp(lp);
        std::printf("%8lld  %-22.16g  %-12.8g\n", static_cast<long long>(n), std::exp(lp),
                    -lp / kLn2);
    }
    std::printf("# mass outside printed range <= %.6g\n", std::max(0.0, 1.0 - covered));
    return 0;
}

int cmd_sample(const std::string& family_s, const std::string& params_s,
               const std::string& support_s, int count, std::uint64_t seed) {
    const Family family = parse_family(family_s);
    Support support = parse_support(support_s);
    const FamilyParams params = build_family_params(family, parse_params(params_s), support);
    if (family == Family::bitwise) support = bitwise_support(std::get<BitwiseParams>(params));
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
        std::printf("%lld\n", static_cast<long long>(sample(params, support, rng)));
    return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, std::uint64_t seed,
              const std::string& out_path) {
    const Synth s = make_synth(kind, n, seed);
    write_csv(s.data, out_path);
    std::ofstream meta(out_path + ".meta.json");
    if (!meta) throw std::runtime_error("cannot write " + out_path + ".meta.json");
    meta << s.meta_json << '\n';
    std::printf("wrote %s (%zu rows) and %s.meta.json\n", out_path.c_str(), s.data.n(),
                out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integer distributions: fitting, evaluation, pmf tables, sampling, verification"};
    app.require_subcommand(1);

    std::string data_path, target = "y", family = "dalap", support = "unbounded", lr = "sweep";
    std::string out_path, model_path, params, range = "-10:10", kind = "dalap";
    int k = 1, bits = 31, epochs = 100, batch = 128, hidden = 128, count = 10;
    std::size_t n_rows = 1000;
    std::uint64_t seed = 42;

    CLI::App* fit = app.add_subcommand("fit", "fit a model on CSV data");
    fit->add_option("--data", data_path, "CSV file")->required();
    fit->add_option("--target", target, "target column name");
    fit->add_option("--family", family,
                    "dalap|danorm|dnormal|dlaplace|dlogistic|dweib|bitwise|sqerr");
    fit->add_option("--k", k, "mixture components (1, 2, 4, 8, 10)");
    fit->add_option("--support", support, "unbounded|nonneg|l:u");
    CLI::Option* bits_opt = fit->add_option("--bits", bits, "bitwise magnitude bits");
    fit->add_option("--lr", lr, "learning rate or 'sweep'");
    fit->add_option("--epochs", epochs, "training epochs");
    fit->add_option("--batch", batch, "minibatch size");
    fit->add_option("--hidden", hidden, "hidden layer width");
    fit->add_option("--seed", seed, "random seed");
    fit->add_option("--out", out_path, "checkpoint output path");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on CSV data");
    eval->add_option("--model", model_path, "checkpoint path")->required();
    eval->add_option("--data", data_path, "CSV file")->required();
    eval->add_option("--target", target, "target column name");

    CLI::App* pmf = app.add_subcommand("pmf", "print a pmf table");
    pmf->add_option("--family", family, "family name")->required();
    pmf->add_option("--params", params, "name=value pairs, lists with '/'")->required();
    pmf->add_option("--support", support, "unbounded|nonneg|l:u");
    pmf->add_option("--range", range, "a:b rows to print");

    CLI::App* smp = app.add_subcommand("sample", "draw seeded samples");
    smp->add_option("--family", family, "family name")->required();
    smp->add_option("--params", params, "name=value pairs, lists with '/'")->required();
    smp->add_option("--support", support, "unbounded|nonneg|l:u");
    smp->add_option("--n", count, "number of draws");
    smp->add_option("--seed", seed, "random seed");

    CLI::App* chk = app.add_subcommand("check", "run the oracle verification suite");

    CLI::App* syn = app.add_subcommand("synth", "generate a synthetic dataset");
    syn->add_option("--kind", kind, "constant|linear|dalap|dnormal|bitwise|geometric");
    syn->add_option("--n", n_rows, "number of rows");
    syn->add_option("--seed", seed, "random seed");
    syn->add_option("--out", out_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed())
            return cmd_fit(data_path, target, family, k, support, bits, bits_opt->count() > 0, lr,
                           epochs, batch, hidden, seed, out_path);
        if (eval->parsed()) return cmd_eval(model_path, data_path, target);
        if (pmf->parsed()) return cmd_pmf(family, params, support, range);
        if (smp->parsed()) return cmd_sample(family, params, support, count, seed);
        if (chk->parsed()) return intdist::run_property_checks(std::cout) ? 0 : 1;
        if (syn->parsed()) return cmd_synth(kind, n_rows, seed, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
