#pragma once

#include "intdist/dataset.hpp"
#include "intdist/mixture.hpp"

#include <optional>

// Gradient training of distribution parameters: either bare (no features;
// the head vector is the parameter set) or through a one-hidden-layer
// perceptron with a rectifier, with the family's negative log-likelihood or
// squared error as the loss.  Everything is deterministic under the seed.

namespace intdist {

struct TrainConfig {
    bool sqerr = false;  // squared-error baseline instead of a family loss
    Family family = Family::dalap;
    int k = 1;  // mixture components, one of 1, 2, 4, 8, 10
    Support support = Support::unbounded();
    // Minimum magnitude bits for bitwise; bounded supports snap to the
    // smallest covering variant at least this wide.  The default gives a
    // 32-wide signed head on unbounded supports.
    int bitwise_bits = 31;
    int hidden_dim = 128;
    int danorm_window = 500;
    double learning_rate = 0.0;  // 0 = sweep
    std::vector<double> sweep_rates = {3.4e-3, 1e-3, 3.4e-4, 1e-4, 3.4e-5, 1e-5};
    int epochs = 100;
    int batch_size = 128;
    std::uint64_t seed = 42;
};

struct Metrics {
    double bits = 0.0;  // mean -log2 p per instance; NaN for the sqerr baseline
    double rmse = 0.0;
    std::size_t count = 0;
    std::size_t out_of_support = 0;  // targets outside the support: counted, not scored
};

struct MlpModel {
    TrainConfig config;
    bool bitwise_signed = false;  // resolved from the requested support
    bool bare = false;            // no features: head trained directly
    int input_dim = 0;
    int hidden_dim = 0;
    int head_dim = 0;
    std::vector<double> w1, b1;  // hidden x input, row-major
    std::vector<double> w2, b2;  // head x hidden
    std::vector<double> bare_head;
    std::vector<double> feat_mean, feat_std;
};

struct SweepEntry {
    double lr = 0.0;
    bool diverged = false;
    double val_metric = 0.0;  // validation bits (or mse for sqerr)
};

struct TrainResult {
    MlpModel model;
    Metrics train_metrics, valid_metrics, test_metrics;
    double selected_lr = 0.0;
    std::vector<SweepEntry> sweep;
};

// Support the model actually predicts over (bitwise snaps to its covering
// variant; everything else keeps the configured support).
Support resolved_support(const TrainConfig& config);

// Number of raw head outputs the loss requires: 2 per location-dispersion
// family, bit count (+ sign) for bitwise, 1 for squared error; K(P + 1) for
// mixtures, with no logit outputs at K = 1.
int head_dim(const TrainConfig& config);

// Raw outputs -> distribution parameters: mu passes through, gamma maps by
// sigmoid (capped at 0.95 for danorm), scales by softplus + 1e-6, bit
// probabilities by sigmoid, mixture logits pass through.
MixtureParams head_to_params(std::span<const double> raw, const TrainConfig& config);

// Per-instance loss and gradient, exposed for the end-to-end derivative
// tests.
double instance_loss(const MlpModel& model, std::span<const double> features, std::int64_t y);

struct ModelGrads {
    std::vector<double> w1, b1, w2, b2, bare_head;
    void zero();
};
void instance_grad(const MlpModel& model, std::span<const double> features, std::int64_t y,
                   ModelGrads& grads);

// Minibatch Adam over the configured epochs; with learning_rate 0 runs every
// sweep rate and keeps the model with the best validation metric.  A sweep
// point whose loss turns non-finite is recorded as diverged and skipped.
TrainResult train(const Dataset& data, const TrainConfig& config);

Metrics evaluate(const MlpModel& model, const Dataset& data, SplitTag tag);

void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace intdist
