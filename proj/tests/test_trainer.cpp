#include <doctest.h>

#include "intdist/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace intdist;

namespace {

TrainConfig config_for(Family f, int k = 1) {
    TrainConfig c;
    c.family = f;
    c.k = k;
    c.support = f == Family::dweib ? Support::lower_bounded(0) : Support::unbounded();
    if (f == Family::bitwise) {
        c.support = Support::lower_bounded(0);
        c.bitwise_bits = 4;
    }
    return c;
}

MlpModel tiny_model(const Dataset& data, const TrainConfig& c, std::uint64_t seed) {
    // small random weights: outputs stay near zero, far from the activation
    // clamps and ReLU kinks that would spoil finite differences
    MlpModel m;
    m.config = c;
    m.bitwise_signed = false;
    m.input_dim = static_cast<int>(data.dim());
    m.hidden_dim = 4;
    m.head_dim = head_dim(c);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> w(-0.3, 0.3);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (double& x : v) x = w(gen);
    };
    fill(m.w1, static_cast<std::size_t>(m.hidden_dim * m.input_dim));
    fill(m.b1, static_cast<std::size_t>(m.hidden_dim));
    fill(m.w2, static_cast<std::size_t>(m.head_dim * m.hidden_dim));
    fill(m.b2, static_cast<std::size_t>(m.head_dim));
    m.feat_mean.assign(static_cast<std::size_t>(m.input_dim), 0.0);
    m.feat_std.assign(static_cast<std::size_t>(m.input_dim), 1.0);
    return m;
}

Dataset tiny_data(std::uint64_t seed, std::int64_t lo, std::int64_t hi) {
    Dataset d;
    d.feature_names = {"a", "b", "c"};
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> xs(-1.0, 1.0);
    std::uniform_int_distribution<std::int64_t> ys(lo, hi);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 3; ++j) d.features.push_back(xs(gen));
        d.targets.push_back(ys(gen));
        d.split.push_back(SplitTag::train);
    }
    return d;
}

// dLoss/dWeight over a small batch, by central differences on a copy.
double fd_weight(const MlpModel& model, const Dataset& data, std::vector<double> MlpModel::*field,
                 std::size_t idx) {
    const double h = 1e-5;
    MlpModel m = model;
    auto batch_loss = [&](const MlpModel& mm) {
        double acc = 0.0;
        for (std::size_t i = 0; i < data.n(); ++i)
            acc += instance_loss(mm, data.row(i), data.targets[i]);
        return acc;
    };
    (m.*field)[idx] = (model.*field)[idx] + h;
    const double up = batch_loss(m);
    (m.*field)[idx] = (model.*field)[idx] - h;
    const double down = batch_loss(m);
    return (up - down) / (2.0 * h);
}

bool weights_grad_check(const MlpModel& model, const Dataset& data, double rel) {
    ModelGrads g;
    g.w1.assign(model.w1.size(), 0.0);
    g.b1.assign(model.b1.size(), 0.0);
    g.w2.assign(model.w2.size(), 0.0);
    g.b2.assign(model.b2.size(), 0.0);
    g.bare_head.assign(model.bare_head.size(), 0.0);
    for (std::size_t i = 0; i < data.n(); ++i) instance_grad(model, data.row(i), data.targets[i], g);

    const std::pair<std::vector<double> MlpModel::*, std::vector<double> ModelGrads::*> fields[] = {
        {&MlpModel::w1, &ModelGrads::w1},
        {&MlpModel::b1, &ModelGrads::b1},
        {&MlpModel::w2, &ModelGrads::w2},
        {&MlpModel::b2, &ModelGrads::b2},
    };
    for (const auto& [mf, gf] : fields) {
        for (std::size_t i = 0; i < (model.*mf).size(); ++i) {
            const double analytic = (g.*gf)[i];
            const double fd = fd_weight(model, data, mf, i);
            if (std::fabs(analytic - fd) > rel * std::max(std::fabs(analytic), std::fabs(fd)) + 1e-5)
                return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("head_to_params activations") {
    // zero raw outputs: dalap gets mu 0, gamma sigmoid(0) = 1/2
    TrainConfig dal = config_for(Family::dalap);
    const MixtureParams m0 = head_to_params(std::vector<double>{0.0, 0.0}, dal);
    CHECK(std::get<DalapParams>(m0.components[0]).mu == 0.0);
    CHECK(std::get<DalapParams>(m0.components[0]).gamma == doctest::Approx(0.5));

    // saturated negative raw clamps gamma at its floor
    const MixtureParams m1 = head_to_params(std::vector<double>{0.0, -50.0}, dal);
    CHECK(std::get<DalapParams>(m1.components[0]).gamma == doctest::Approx(1e-6));

    // danorm caps at 0.95
    TrainConfig dn = config_for(Family::danorm);
    const MixtureParams m2 = head_to_params(std::vector<double>{0.0, 50.0}, dn);
    CHECK(std::get<DanormParams>(m2.components[0]).gamma == doctest::Approx(0.95));

    // scale families go through softplus + eps
    TrainConfig nl = config_for(Family::dnormal);
    const MixtureParams m3 = head_to_params(std::vector<double>{1.5, 0.0}, nl);
    CHECK(std::get<DNormalParams>(m3.components[0]).sigma == doctest::Approx(kLn2 + 1e-6));

    CHECK_THROWS_AS(head_to_params(std::vector<double>{0.0}, dal), std::invalid_argument);

    // head widths: K(P+1) with logits only for K > 1
    CHECK(head_dim(config_for(Family::dalap, 1)) == 2);
    CHECK(head_dim(config_for(Family::dalap, 4)) == 12);
    CHECK(head_dim(config_for(Family::bitwise, 1)) == 4);
    TrainConfig sq;
    sq.sqerr = true;
    CHECK(head_dim(sq) == 1);
}

TEST_CASE("end-to-end gradient check for every loss") {
    const Dataset data = tiny_data(5, -3, 3);
    const Dataset nn_data = tiny_data(6, 0, 3);

    for (Family f : {Family::dalap, Family::danorm, Family::dnormal, Family::dlaplace,
                     Family::dlogistic}) {
        const TrainConfig c = config_for(f);
        CHECK_MESSAGE(weights_grad_check(tiny_model(data, c, 11), data, 1e-3),
                      "family ", family_name(f));
    }
    for (Family f : {Family::dweib, Family::bitwise}) {
        const TrainConfig c = config_for(f);
        CHECK_MESSAGE(weights_grad_check(tiny_model(nn_data, c, 13), nn_data, 1e-3),
                      "family ", family_name(f));
    }
    // mixture head: logits plus per-component parameters
    const TrainConfig mix = config_for(Family::dalap, 4);
    CHECK(weights_grad_check(tiny_model(data, mix, 17), data, 1e-3));
    // squared-error baseline
    TrainConfig sq;
    sq.sqerr = true;
    CHECK(weights_grad_check(tiny_model(data, sq, 19), data, 1e-3));
}

TEST_CASE("training is deterministic and the loss moves down early") {
    const Synth s = synth_constant(600, 21);

    for (Family f : {Family::dalap, Family::danorm, Family::dnormal, Family::dlaplace,
                     Family::dlogistic, Family::dweib, Family::bitwise}) {
        TrainConfig c = config_for(f);
        c.learning_rate = 1e-3;
        c.hidden_dim = 16;
        c.batch_size = 64;
        c.epochs = 1;
        const double bits1 = train(s.data, c).train_metrics.bits;
        c.epochs = 10;
        const double bits10 = train(s.data, c).train_metrics.bits;
        CHECK_MESSAGE(bits10 < bits1, "family ", family_name(f), " bits ", bits1, " -> ", bits10);
    }

    TrainConfig c = config_for(Family::dalap);
    c.learning_rate = 1e-3;
    c.hidden_dim = 16;
    c.epochs = 5;
    const TrainResult a = train(s.data, c);
    const TrainResult b = train(s.data, c);
    CHECK(a.test_metrics.bits == b.test_metrics.bits);  // bit-identical
    CHECK(a.test_metrics.rmse == b.test_metrics.rmse);
    CHECK(a.model.w1 == b.model.w1);
}

TEST_CASE("targets outside the support abort with a clear message") {
    Synth s = synth_constant(50, 23);  // targets are 7
    TrainConfig c = config_for(Family::bitwise);
    c.bitwise_bits = 2;  // support [0, 3]
    CHECK_THROWS_WITH_AS(train(s.data, c), doctest::Contains("outside the support"),
                         std::invalid_argument);
    // a bounded request snaps to the smallest covering variant
    c.support = Support::bounded(0, 100);
    c.bitwise_bits = 2;
    CHECK(resolved_support(c) == Support::bounded(0, 127));
    CHECK(head_dim(c) == 7);
    c.support = Support::bounded(-3, 12);
    CHECK(resolved_support(c) == Support::bounded(-15, 15));
    CHECK(head_dim(c) == 5);  // sign bit plus four magnitude bits
}

TEST_CASE("checkpoint round trip preserves evaluation bit-for-bit") {
    const Synth s = synth_dalap(800, 2.2, 0.5, 29);
    TrainConfig c = config_for(Family::dalap);
    c.learning_rate = 0.01;
    c.epochs = 20;
    const TrainResult r = train(s.data, c);

    const std::string path = (std::filesystem::temp_directory_path() / "intdist_ckpt_test.json").string();
    save_checkpoint(r.model, path);
    const MlpModel loaded = load_checkpoint(path);
    const Metrics again = evaluate(loaded, s.data, SplitTag::test);
    CHECK(again.bits == r.test_metrics.bits);
    CHECK(again.rmse == r.test_metrics.rmse);
    std::filesystem::remove(path);
}

TEST_CASE("constant targets drive dalap bits toward zero") {
    const Synth s = synth_constant(600, 21);
    TrainConfig c = config_for(Family::dalap);
    c.learning_rate = 3.4e-3;
    c.epochs = 200;
    c.batch_size = 64;
    c.hidden_dim = 16;
    const TrainResult r = train(s.data, c);
    CHECK(r.test_metrics.bits <= 0.05);
    CHECK(r.test_metrics.rmse <= 0.05);
}

TEST_CASE("a two-component mixture separates bimodal targets") {
    // targets drawn around -9 and +9; a single dalap must waste bits on the
    // gap, a K=2 mixture can park one component on each mode
    Dataset d;
    d.feature_names = {"x"};
    Rng rng(33);
    const DalapParams lo(-9.0, 0.25), hi(9.0, 0.25);
    for (int i = 0; i < 1500; ++i) {
        d.features.push_back(rng.normal());
        const bool which = rng.bernoulli(0.5);
        d.targets.push_back(sample(which ? hi : lo, Support::unbounded(), rng));
        const double u = rng.uniform();
        d.split.push_back(u < 0.7 ? SplitTag::train : (u < 0.8 ? SplitTag::valid : SplitTag::test));
    }
    TrainConfig c = config_for(Family::dalap, 1);
    c.learning_rate = 1e-2;
    c.epochs = 120;
    c.hidden_dim = 8;
    const double bits1 = train(d, c).test_metrics.bits;
    c.k = 2;
    const double bits2 = train(d, c).test_metrics.bits;
    CHECK(bits2 < bits1 - 1.0);
}

TEST_CASE("sqerr baseline on realizable linear data") {
    const Synth s = synth_linear(3000, 31);
    TrainConfig c;
    c.sqerr = true;
    c.learning_rate = 3.4e-3;
    c.epochs = 150;
    c.hidden_dim = 32;
    const TrainResult r = train(s.data, c);
    CHECK(std::isnan(r.test_metrics.bits));
    CHECK(r.test_metrics.rmse < 0.5);
}
