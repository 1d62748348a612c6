#include "intdist/trainer.hpp"

#include "intdist/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace intdist {

namespace {

constexpr double kHeadEps = 1e-6;

enum class HeadAct { identity, sigmoid_unit, sigmoid_cap, softplus_eps };

// Bitwise serves the smallest covering variant of the requested support,
// with at least the configured bit count.
BitwiseShape resolved_bitwise_shape(const TrainConfig& c) {
    return bitwise_covering_shape(c.support, c.bitwise_bits);
}

int params_per_component(const TrainConfig& c, bool bitwise_signed) {
    if (c.family == Family::bitwise)
        return resolved_bitwise_shape(c).bits + (bitwise_signed ? 1 : 0);
    return 2;
}

bool resolve_bitwise_signed(const Support& s) {
    return s.kind() == Support::Kind::unbounded || s.low() < 0;
}

std::vector<HeadAct> head_map(const TrainConfig& c, bool bitwise_signed) {
    std::vector<HeadAct> acts;
    if (c.sqerr) {
        acts.push_back(HeadAct::identity);
        return acts;
    }
    if (c.k > 1)
        for (int i = 0; i < c.k; ++i) acts.push_back(HeadAct::identity);  // mixing logits
    for (int comp = 0; comp < c.k; ++comp) {
        switch (c.family) {
            case Family::dalap:
                acts.push_back(HeadAct::identity);
                acts.push_back(HeadAct::sigmoid_unit);
                break;
            case Family::danorm:
                acts.push_back(HeadAct::identity);
                acts.push_back(HeadAct::sigmoid_cap);
                break;
            case Family::dnormal:
            case Family::dlaplace:
            case Family::dlogistic:
                acts.push_back(HeadAct::identity);
                acts.push_back(HeadAct::softplus_eps);
                break;
            case Family::dweib:
                acts.push_back(HeadAct::softplus_eps);
                acts.push_back(HeadAct::softplus_eps);
                break;
            case Family::bitwise:
                for (int i = 0; i < params_per_component(c, bitwise_signed); ++i)
                    acts.push_back(HeadAct::sigmoid_unit);
                break;
        }
    }
    return acts;
}

const char* act_name(HeadAct a) {
    switch (a) {
        case HeadAct::identity: return "identity";
        case HeadAct::sigmoid_unit: return "sigmoid01";
        case HeadAct::sigmoid_cap: return "sigmoid095";
        case HeadAct::softplus_eps: return "softplus";
    }
    return "?";
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double softplus(double x) { return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0); }

// value and derivative of one head activation
std::pair<double, double> apply_act(HeadAct a, double raw) {
    switch (a) {
        case HeadAct::identity:
            return {raw, 1.0};
        case HeadAct::sigmoid_unit: {
            const double s = sigmoid(raw);
            if (s < kHeadEps) return {kHeadEps, 0.0};
            if (s > 1.0 - kHeadEps) return {1.0 - kHeadEps, 0.0};
            return {s, s * (1.0 - s)};
        }
        case HeadAct::sigmoid_cap: {
            const double s = sigmoid(raw);
            if (s < kHeadEps) return {kHeadEps, 0.0};
            if (s > kDanormGammaMax) return {kDanormGammaMax, 0.0};
            return {s, s * (1.0 - s)};
        }
        case HeadAct::softplus_eps:
            return {softplus(raw) + kHeadEps, sigmoid(raw)};
    }
    throw std::logic_error("apply_act: unreachable");
}

FamilyParams component_from(const TrainConfig& c, bool bitwise_signed,
                            std::span<const double> vals) {
    switch (c.family) {
        case Family::dalap: return DalapParams(vals[0], vals[1]);
        case Family::danorm: return DanormParams(vals[0], vals[1], c.danorm_window);
        case Family::dnormal: return DNormalParams(vals[0], vals[1]);
        case Family::dlaplace: return DLaplaceParams(vals[0], vals[1]);
        case Family::dlogistic: return DLogisticParams(vals[0], vals[1]);
        case Family::dweib: return DWeibullParams(vals[0], vals[1]);
        case Family::bitwise: {
            const std::size_t off = bitwise_signed ? 1 : 0;
            std::vector<double> probs(vals.begin() + off, vals.end());
            return BitwiseParams(bitwise_signed, bitwise_signed ? vals[0] : 0.5, std::move(probs));
        }
    }
    throw std::logic_error("component_from: unreachable");
}

struct Workspace {
    std::vector<double> xs;      // standardized features
    std::vector<double> h;       // hidden pre-relu (reused as post-relu)
    std::vector<bool> active;    // relu mask
    std::vector<double> out;     // raw head outputs
    std::vector<double> dout;    // dloss/dout
    std::vector<double> dh;
};

void forward(const MlpModel& m, std::span<const double> features, Workspace& ws) {
    ws.out.assign(static_cast<std::size_t>(m.head_dim), 0.0);
    if (m.bare) {
        ws.out.assign(m.bare_head.begin(), m.bare_head.end());
        return;
    }
    ws.xs.resize(static_cast<std::size_t>(m.input_dim));
    for (int i = 0; i < m.input_dim; ++i)
        ws.xs[static_cast<std::size_t>(i)] =
            (features[static_cast<std::size_t>(i)] - m.feat_mean[static_cast<std::size_t>(i)]) /
            m.feat_std[static_cast<std::size_t>(i)];
    ws.h.assign(static_cast<std::size_t>(m.hidden_dim), 0.0);
    ws.active.assign(static_cast<std::size_t>(m.hidden_dim), false);
    for (int j = 0; j < m.hidden_dim; ++j) {
        double acc = m.b1[static_cast<std::size_t>(j)];
        const double* wrow = &m.w1[static_cast<std::size_t>(j) * static_cast<std::size_t>(m.input_dim)];
        for (int i = 0; i < m.input_dim; ++i) acc += wrow[i] * ws.xs[static_cast<std::size_t>(i)];
        if (acc > 0.0) {
            ws.h[static_cast<std::size_t>(j)] = acc;
            ws.active[static_cast<std::size_t>(j)] = true;
        }
    }
    for (int o = 0; o < m.head_dim; ++o) {
        double acc = m.b2[static_cast<std::size_t>(o)];
        const double* wrow = &m.w2[static_cast<std::size_t>(o) * static_cast<std::size_t>(m.hidden_dim)];
        for (int j = 0; j < m.hidden_dim; ++j) acc += wrow[j] * ws.h[static_cast<std::size_t>(j)];
        ws.out[static_cast<std::size_t>(o)] = acc;
    }
}

// dloss/dout for one instance; returns the loss.
double loss_and_dout(const MlpModel& m, std::int64_t y, Workspace& ws) {
    const TrainConfig& c = m.config;
    ws.dout.assign(static_cast<std::size_t>(m.head_dim), 0.0);
    if (c.sqerr) {
        const double diff = ws.out[0] - static_cast<double>(y);
        ws.dout[0] = 2.0 * diff;
        return diff * diff;
    }
    const std::vector<HeadAct> acts = head_map(c, m.bitwise_signed);
    std::vector<double> deriv(acts.size());
    std::vector<double> vals(acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) {
        const auto [v, d] = apply_act(acts[i], ws.out[i]);
        vals[i] = v;
        deriv[i] = d;
    }

    // assemble the mixture (K = 1 carries a single implicit zero logit)
    const int pc = params_per_component(c, m.bitwise_signed);
    std::vector<double> logits;
    std::vector<FamilyParams> comps;
    std::size_t pos = 0;
    if (c.k > 1) {
        logits.assign(vals.begin(), vals.begin() + c.k);
        pos = static_cast<std::size_t>(c.k);
    } else {
        logits = {0.0};
    }
    for (int comp = 0; comp < c.k; ++comp) {
        comps.push_back(component_from(c, m.bitwise_signed,
                                       std::span<const double>(vals).subspan(pos, pc)));
        pos += static_cast<std::size_t>(pc);
    }
    const MixtureParams mix(std::move(logits), std::move(comps));
    const Support sup = resolved_support(c);

    const double lp = log_prob(mix, y, sup);
    if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();

    const GradRecord g = grad_log_prob(mix, y, sup);
    // GradRecord order: w0..w{K-1}, then component parameters; the head skips
    // the logit slots at K = 1.
    const std::size_t skip = c.k > 1 ? 0 : 1;
    for (std::size_t i = skip; i < g.size(); ++i) {
        const std::size_t j = i - skip;
        ws.dout[j] = -g[i].second * deriv[j];
    }
    return -lp;
}

void backward(const MlpModel& m, Workspace& ws, ModelGrads& grads) {
    if (m.bare) {
        for (int o = 0; o < m.head_dim; ++o)
            grads.bare_head[static_cast<std::size_t>(o)] += ws.dout[static_cast<std::size_t>(o)];
        return;
    }
    ws.dh.assign(static_cast<std::size_t>(m.hidden_dim), 0.0);
    for (int o = 0; o < m.head_dim; ++o) {
        const double d = ws.dout[static_cast<std::size_t>(o)];
        grads.b2[static_cast<std::size_t>(o)] += d;
        const std::size_t row = static_cast<std::size_t>(o) * static_cast<std::size_t>(m.hidden_dim);
        for (int j = 0; j < m.hidden_dim; ++j) {
            grads.w2[row + static_cast<std::size_t>(j)] += d * ws.h[static_cast<std::size_t>(j)];
            ws.dh[static_cast<std::size_t>(j)] += d * m.w2[row + static_cast<std::size_t>(j)];
        }
    }
    for (int j = 0; j < m.hidden_dim; ++j) {
        if (!ws.active[static_cast<std::size_t>(j)]) continue;
        const double d = ws.dh[static_cast<std::size_t>(j)];
        grads.b1[static_cast<std::size_t>(j)] += d;
        const std::size_t row = static_cast<std::size_t>(j) * static_cast<std::size_t>(m.input_dim);
        for (int i = 0; i < m.input_dim; ++i)
            grads.w1[row + static_cast<std::size_t>(i)] += d * ws.xs[static_cast<std::size_t>(i)];
    }
}

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& w, const std::vector<double>& g, AdamState& st, double lr,
               int t) {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < w.size(); ++i) {
        st.m[i] = b1 * st.m[i] + (1.0 - b1) * g[i];
        st.v[i] = b2 * st.v[i] + (1.0 - b2) * g[i] * g[i];
        w[i] -= lr * (st.m[i] / c1) / (std::sqrt(st.v[i] / c2) + eps);
    }
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

MlpModel init_model(const Dataset& data, const TrainConfig& c) {
    MlpModel m;
    m.config = c;
    m.bitwise_signed = resolve_bitwise_signed(c.support);
    m.input_dim = static_cast<int>(data.dim());
    m.hidden_dim = c.hidden_dim;
    m.head_dim = head_dim(c);
    m.bare = m.input_dim == 0;
    if (m.bare) {
        m.bare_head.assign(static_cast<std::size_t>(m.head_dim), 0.0);
        return m;
    }
    Rng rng(c.seed ^ 0x1417ULL);
    auto uniform_init = [&](std::vector<double>& w, std::size_t n, int fan_in) {
        const double bound = 1.0 / std::sqrt(std::max(1, fan_in));
        w.resize(n);
        for (double& x : w) x = bound * (2.0 * rng.uniform() - 1.0);
    };
    uniform_init(m.w1, static_cast<std::size_t>(m.hidden_dim) * static_cast<std::size_t>(m.input_dim),
                 m.input_dim);
    uniform_init(m.b1, static_cast<std::size_t>(m.hidden_dim), m.input_dim);
    uniform_init(m.w2, static_cast<std::size_t>(m.head_dim) * static_cast<std::size_t>(m.hidden_dim),
                 m.hidden_dim);
    uniform_init(m.b2, static_cast<std::size_t>(m.head_dim), m.hidden_dim);

    // feature standardization from the training split
    m.feat_mean.assign(static_cast<std::size_t>(m.input_dim), 0.0);
    m.feat_std.assign(static_cast<std::size_t>(m.input_dim), 0.0);
    const std::vector<std::size_t> tr = data.indices_of(SplitTag::train);
    for (std::size_t i : tr) {
        const auto row = data.row(i);
        for (int j = 0; j < m.input_dim; ++j)
            m.feat_mean[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
    }
    for (double& x : m.feat_mean) x /= std::max<std::size_t>(1, tr.size());
    for (std::size_t i : tr) {
        const auto row = data.row(i);
        for (int j = 0; j < m.input_dim; ++j) {
            const double d = row[static_cast<std::size_t>(j)] - m.feat_mean[static_cast<std::size_t>(j)];
            m.feat_std[static_cast<std::size_t>(j)] += d * d;
        }
    }
    for (double& x : m.feat_std) {
        x = std::sqrt(x / std::max<std::size_t>(1, tr.size()));
        if (x < 1e-12) x = 1.0;
    }
    return m;
}

double validation_metric(const MlpModel& m, const Dataset& data) {
    const Metrics v = evaluate(m, data, SplitTag::valid);
    if (m.config.sqerr) return v.rmse * v.rmse;
    return v.bits;
}

// One full optimization run at a fixed learning rate; returns nullopt on
// divergence (non-finite loss, non-finite weights, or an evaluation that
// falls off the distribution's sound region).
std::optional<std::pair<MlpModel, double>> run_one_rate(const Dataset& data, const TrainConfig& c,
                                                        double lr) {
    MlpModel model = init_model(data, c);
    const std::vector<std::size_t> train_idx = data.indices_of(SplitTag::train);
    if (train_idx.empty()) throw std::invalid_argument("train: empty training split");

    AdamState s_w1(model.w1.size()), s_b1(model.b1.size()), s_w2(model.w2.size()),
        s_b2(model.b2.size()), s_bare(model.bare_head.size());
    ModelGrads grads;
    grads.w1.resize(model.w1.size());
    grads.b1.resize(model.b1.size());
    grads.w2.resize(model.w2.size());
    grads.b2.resize(model.b2.size());
    grads.bare_head.resize(model.bare_head.size());

    Rng shuffle_rng(c.seed ^ 0xd1ceULL);
    std::vector<std::size_t> order = train_idx;
    Workspace ws;

    MlpModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    int t = 0;

    try {
        for (int epoch = 0; epoch < c.epochs; ++epoch) {
            for (std::size_t i = order.size(); i > 1; --i) {
                const std::size_t j = shuffle_rng.below(i);
                std::swap(order[i - 1], order[j]);
            }
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(c.batch_size)) {
                const std::size_t stop =
                    std::min(order.size(), start + static_cast<std::size_t>(c.batch_size));
                grads.zero();
                for (std::size_t bi = start; bi < stop; ++bi) {
                    const std::size_t i = order[bi];
                    forward(model, data.row(i), ws);
                    const double loss = loss_and_dout(model, data.targets[i], ws);
                    if (!std::isfinite(loss)) return std::nullopt;
                    backward(model, ws, grads);
                }
                const double scale = 1.0 / static_cast<double>(stop - start);
                for (auto* g : {&grads.w1, &grads.b1, &grads.w2, &grads.b2, &grads.bare_head})
                    for (double& x : *g) x *= scale;
                ++t;
                if (model.bare) {
                    adam_step(model.bare_head, grads.bare_head, s_bare, lr, t);
                    if (!all_finite(model.bare_head)) return std::nullopt;
                } else {
                    adam_step(model.w1, grads.w1, s_w1, lr, t);
                    adam_step(model.b1, grads.b1, s_b1, lr, t);
                    adam_step(model.w2, grads.w2, s_w2, lr, t);
                    adam_step(model.b2, grads.b2, s_b2, lr, t);
                    if (!all_finite(model.w1) || !all_finite(model.w2)) return std::nullopt;
                }
            }
            const double val = validation_metric(model, data);
            if (!std::isfinite(val)) return std::nullopt;
            if (val < best_val) {
                best_val = val;
                best = model;
            }
        }
    } catch (const std::domain_error&) {
        return std::nullopt;  // wandered off the sound region: treat as divergence
    }
    return std::make_pair(std::move(best), best_val);
}

}  // namespace

void ModelGrads::zero() {
    for (auto* g : {&w1, &b1, &w2, &b2, &bare_head}) std::fill(g->begin(), g->end(), 0.0);
}

Support resolved_support(const TrainConfig& config) {
    if (!config.sqerr && config.family == Family::bitwise) {
        const BitwiseShape shape = resolved_bitwise_shape(config);
        return bitwise_support(shape.bits, shape.is_signed);
    }
    return config.support;
}

int head_dim(const TrainConfig& config) {
    if (config.sqerr) return 1;
    const int pc = params_per_component(config, resolve_bitwise_signed(config.support));
    return config.k == 1 ? pc : config.k * (pc + 1);
}

MixtureParams head_to_params(std::span<const double> raw, const TrainConfig& config) {
    const bool sgn = resolve_bitwise_signed(config.support);
    const std::vector<HeadAct> acts = head_map(config, sgn);
    if (raw.size() != acts.size())
        throw std::invalid_argument("head_to_params: expected " + std::to_string(acts.size()) +
                                    " raw outputs, got " + std::to_string(raw.size()));
    std::vector<double> vals(acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) vals[i] = apply_act(acts[i], raw[i]).first;

    const int pc = params_per_component(config, sgn);
    std::vector<double> logits;
    std::vector<FamilyParams> comps;
    std::size_t pos = 0;
    if (config.k > 1) {
        logits.assign(vals.begin(), vals.begin() + config.k);
        pos = static_cast<std::size_t>(config.k);
    } else {
        logits = {0.0};
    }
    for (int comp = 0; comp < config.k; ++comp) {
        comps.push_back(component_from(config, sgn, std::span<const double>(vals).subspan(pos, pc)));
        pos += static_cast<std::size_t>(pc);
    }
    return MixtureParams(std::move(logits), std::move(comps));
}

double instance_loss(const MlpModel& model, std::span<const double> features, std::int64_t y) {
    Workspace ws;
    forward(model, features, ws);
    return loss_and_dout(model, y, ws);
}

void instance_grad(const MlpModel& model, std::span<const double> features, std::int64_t y,
                   ModelGrads& grads) {
    Workspace ws;
    forward(model, features, ws);
    loss_and_dout(model, y, ws);
    backward(model, ws, grads);
}

TrainResult train(const Dataset& data, const TrainConfig& config) {
    if (config.k != 1 && config.k != 2 && config.k != 4 && config.k != 8 && config.k != 10)
        throw std::invalid_argument("train: K must be one of 1, 2, 4, 8, 10");
    for (SplitTag tag : {SplitTag::train, SplitTag::valid, SplitTag::test})
        if (data.indices_of(tag).empty())
            throw std::invalid_argument("train: empty split in dataset");

    if (!config.sqerr) {
        const Support sup = resolved_support(config);
        std::size_t bad = 0;
        std::size_t first = 0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            if (!sup.contains(data.targets[i])) {
                if (bad == 0) first = i;
                ++bad;
            }
        }
        if (bad > 0)
            throw std::invalid_argument(
                "train: " + std::to_string(bad) + " targets outside the support (first at data row " +
                std::to_string(first + 1) + "); refusing to fit");
    }

    std::vector<double> rates =
        config.learning_rate > 0.0 ? std::vector<double>{config.learning_rate} : config.sweep_rates;

    TrainResult result;
    bool have_best = false;
    double best_val = std::numeric_limits<double>::infinity();
    for (double lr : rates) {
        auto outcome = run_one_rate(data, config, lr);
        SweepEntry entry;
        entry.lr = lr;
        if (!outcome) {
            entry.diverged = true;
        } else {
            entry.val_metric = outcome->second;
            if (outcome->second < best_val) {
                best_val = outcome->second;
                result.model = std::move(outcome->first);
                result.selected_lr = lr;
                have_best = true;
            }
        }
        result.sweep.push_back(entry);
    }
    if (!have_best) throw std::runtime_error("train: every learning rate diverged");

    result.train_metrics = evaluate(result.model, data, SplitTag::train);
    result.valid_metrics = evaluate(result.model, data, SplitTag::valid);
    result.test_metrics = evaluate(result.model, data, SplitTag::test);
    return result;
}

Metrics evaluate(const MlpModel& model, const Dataset& data, SplitTag tag) {
    const TrainConfig& c = model.config;
    const Support sup = resolved_support(c);
    Metrics out;
    Workspace ws;
    double bits_acc = 0.0;
    double se_acc = 0.0;
    std::size_t scored = 0;
    for (std::size_t i : data.indices_of(tag)) {
        forward(model, data.row(i), ws);
        const std::int64_t y = data.targets[i];
        ++out.count;
        if (c.sqerr) {
            const double diff = ws.out[0] - static_cast<double>(y);
            se_acc += diff * diff;
            continue;
        }
        if (!sup.contains(y)) {
            ++out.out_of_support;
            continue;
        }
        const MixtureParams mix = head_to_params(ws.out, c);
        bits_acc += -log_prob(mix, y, sup) / kLn2;
        const double diff = mean(mix, sup) - static_cast<double>(y);
        se_acc += diff * diff;
        ++scored;
    }
    if (c.sqerr) {
        out.bits = std::numeric_limits<double>::quiet_NaN();
        out.rmse = out.count ? std::sqrt(se_acc / static_cast<double>(out.count)) : 0.0;
        return out;
    }
    out.bits = scored ? bits_acc / static_cast<double>(scored) : 0.0;
    out.rmse = scored ? std::sqrt(se_acc / static_cast<double>(scored)) : 0.0;
    // every per-instance -log2 p is nonnegative, so the mean must be too
    if (out.bits < 0.0) throw std::logic_error("evaluate: negative mean bits");
    return out;
}

namespace {

nlohmann::json support_to_json(const Support& s) {
    nlohmann::json j;
    switch (s.kind()) {
        case Support::Kind::unbounded: j["kind"] = "unbounded"; break;
        case Support::Kind::lower_bounded:
            j["kind"] = "lower_bounded";
            j["low"] = s.low();
            break;
        case Support::Kind::bounded:
            j["kind"] = "bounded";
            j["low"] = s.low();
            j["high"] = s.high();
            break;
    }
    return j;
}

Support support_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind");
    if (kind == "unbounded") return Support::unbounded();
    if (kind == "lower_bounded") return Support::lower_bounded(j.at("low").get<std::int64_t>());
    if (kind == "bounded")
        return Support::bounded(j.at("low").get<std::int64_t>(), j.at("high").get<std::int64_t>());
    throw std::runtime_error("checkpoint: unknown support kind " + kind);
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::string& path) {
    const TrainConfig& c = model.config;
    nlohmann::json j;
    j["schema"] = "intdist-checkpoint-v1";
    j["loss"] = c.sqerr ? "sqerr" : std::string(family_name(c.family));
    j["k"] = c.k;
    j["support"] = support_to_json(c.support);
    j["bitwise_bits"] = c.bitwise_bits;
    j["bitwise_signed"] = model.bitwise_signed;
    j["danorm_window"] = c.danorm_window;
    j["hidden_dim"] = c.hidden_dim;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["seed"] = c.seed;
    j["learning_rate"] = c.learning_rate;
    j["bare"] = model.bare;
    j["input_dim"] = model.input_dim;
    j["head_dim"] = model.head_dim;
    std::vector<std::string> acts;
    if (!c.sqerr)
        for (HeadAct a : head_map(c, model.bitwise_signed)) acts.emplace_back(act_name(a));
    else
        acts.emplace_back("identity");
    j["head_map"] = acts;
    j["w1"] = model.w1;
    j["b1"] = model.b1;
    j["w2"] = model.w2;
    j["b2"] = model.b2;
    j["bare_head"] = model.bare_head;
    j["feat_mean"] = model.feat_mean;
    j["feat_std"] = model.feat_std;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(2) << '\n';
}

MlpModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    if (j.at("schema") != "intdist-checkpoint-v1")
        throw std::runtime_error("checkpoint: unsupported schema");
    MlpModel m;
    TrainConfig c;
    const std::string loss = j.at("loss");
    c.sqerr = loss == "sqerr";
    if (!c.sqerr) c.family = parse_family(loss);
    c.k = j.at("k");
    c.support = support_from_json(j.at("support"));
    c.bitwise_bits = j.at("bitwise_bits");
    c.danorm_window = j.at("danorm_window");
    c.hidden_dim = j.at("hidden_dim");
    c.epochs = j.at("epochs");
    c.batch_size = j.at("batch_size");
    c.seed = j.at("seed");
    c.learning_rate = j.at("learning_rate");
    m.config = c;
    m.bitwise_signed = j.at("bitwise_signed");
    m.bare = j.at("bare");
    m.input_dim = j.at("input_dim");
    m.hidden_dim = c.hidden_dim;
    m.head_dim = j.at("head_dim");
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();
    m.bare_head = j.at("bare_head").get<std::vector<double>>();
    m.feat_mean = j.at("feat_mean").get<std::vector<double>>();
    m.feat_std = j.at("feat_std").get<std::vector<double>>();
    return m;
}

}  // namespace intdist
