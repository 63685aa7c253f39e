#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "addnet/dataset.hpp"
#include "addnet/network.hpp"
#include "addnet/op_counter.hpp"

namespace addnet {

enum class OperatorKind { Ef, Classic };

OperatorKind operator_from_name(const std::string& name);
const char* operator_name(OperatorKind op);

struct SgdConfig {
    double learning_rate = 0.005;
    std::size_t batch_size = 150;
    std::size_t epochs = 5;
    std::uint64_t seed = 1;
    GradMode grad_mode = GradMode::InputScaled;
};

struct EpochMetrics {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    // Cumulative instrumented-op tallies since training started.
    std::uint64_t mult_count = 0;
    std::uint64_t add_count = 0;
    std::uint64_t sign_count = 0;
    std::uint64_t compare_count = 0;
};

using MetricsSink = std::function<void(const EpochMetrics&)>;

// One line of the metrics run log (JSON object, sorted keys, no timestamp).
std::string metrics_json_line(const EpochMetrics& m);

struct TrainResult {
    Network net;
    std::vector<EpochMetrics> history;
};

// Plain SGD: per epoch a seeded shuffle, then minibatch forward/backward and
// p <- p - lr * (batch-summed gradient) / batch_n.  Identical (net, data,
// config) produce bitwise-identical parameters and metrics.  Throws
// DivergenceError when a loss turns non-finite.
TrainResult sgd_train(Network net, const Dataset& train, const Dataset& test,
                      const SgdConfig& cfg, const MetricsSink& sink = {});

// Fraction of samples whose prediction matches the label: argmax of the
// outputs, or output > 0.5 for single-output networks.
double evaluate(const Network& net, const Dataset& data);

std::pair<double, Vec> loss_and_grad(const Network& net, const Vec& output, int label);

// Glorot-style uniform init on [-sqrt(6/(fan_in+fan_out)), +...); a starts at
// all ones (neutral scaling) and b at zero.
AdditiveDense make_additive_dense(std::size_t d, std::size_t M, Activation act, Rng& rng);
ClassicDense make_classic_dense(std::size_t d, std::size_t M, Activation act, Rng& rng);
AdditiveConv make_additive_conv(const Shape3& in, std::size_t filters, std::size_t kh,
                                std::size_t kw, Activation act, Rng& rng);
ClassicConv make_classic_conv(const Shape3& in, std::size_t filters, std::size_t kh,
                              std::size_t kw, Activation act, Rng& rng);

// XOR: 2 inputs -> 10 hidden neurons (chosen operator, ReLU) -> 1 classic
// output, MSE loss; dataset is the four XOR points.
std::pair<Network, Dataset> build_xor_experiment(OperatorKind op, std::uint64_t seed);

// MNIST MLPs: 784 -> 300 -> 100 -> 10 (two hidden layers) or
// 784 -> 300 -> 150 -> 60 -> 10 (three); hidden layers use the chosen
// operator, the output layer is always classic, softmax/cross-entropy.
Network build_mnist_mlp(OperatorKind op, int hidden_layers, Activation act,
                        std::uint64_t seed);

// LeNet-style: conv(6@5x5) -> pool -> conv(16@5x5) -> pool -> flatten ->
// classic dense 256 -> 10.  Convolutions use the chosen operator; the output
// layer is always classic.
Network build_lenet(OperatorKind op, Activation act, std::uint64_t seed);

}  // namespace addnet
