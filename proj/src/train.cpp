#include "addnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace addnet {

OperatorKind operator_from_name(const std::string& name) {
    if (name == "ef") return OperatorKind::Ef;
    if (name == "classic") return OperatorKind::Classic;
    throw ParamError("unknown operator '" + name + "' (expected ef|classic)");
}

const char* operator_name(OperatorKind op) {
    return op == OperatorKind::Ef ? "ef" : "classic";
}

std::string metrics_json_line(const EpochMetrics& m) {
    nlohmann::json j;
    j["epoch"] = m.epoch;
    j["train_loss"] = m.train_loss;
    j["train_acc"] = m.train_acc;
    j["test_acc"] = m.test_acc;
    j["mults"] = m.mult_count;
    j["adds"] = m.add_count;
    j["signs"] = m.sign_count;
    j["compares"] = m.compare_count;
    return j.dump();
}

namespace {

int predicted_label(const Vec& output) {
    if (output.size() == 1) return output[0] > 0.5 ? 1 : 0;
    return static_cast<int>(std::max_element(output.begin(), output.end()) -
                            output.begin());
}

}  // namespace

std::pair<double, Vec> loss_and_grad(const Network& net, const Vec& output, int label) {
    if (net.loss == LossKind::CrossEntropy)
        return softmax_cross_entropy(output, one_hot(label, static_cast<int>(output.size())));
    if (output.size() == 1) return mse_loss(output, Vec{static_cast<double>(label)});
    return mse_loss(output, one_hot(label, static_cast<int>(output.size())));
}

TrainResult sgd_train(Network net, const Dataset& train, const Dataset& test,
                      const SgdConfig& cfg, const MetricsSink& sink) {
    // learning_rate == 0 is allowed as a degenerate null update.
    if (cfg.learning_rate < 0.0 || !std::isfinite(cfg.learning_rate))
        throw ParamError("sgd_train: learning_rate must be >= 0");
    if (cfg.batch_size == 0) throw ParamError("sgd_train: batch_size must be >= 1");
    if (cfg.epochs == 0) throw ParamError("sgd_train: epochs must be >= 1");
    if (train.size() == 0) throw ShapeError("sgd_train: empty training set");

    const std::size_t n = train.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);

    TrainResult result;
    NetGrads grads = zero_grads(net);
    const ops::CountScope run_scope;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.next_index(i)]);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t batch_n = std::min(cfg.batch_size, n - start);
            for (LayerGrads& g : grads) {
                std::fill(g.W.data.begin(), g.W.data.end(), 0.0);
                std::fill(g.a.begin(), g.a.end(), 0.0);
                std::fill(g.b.begin(), g.b.end(), 0.0);
            }
            for (std::size_t k = 0; k < batch_n; ++k) {
                const std::size_t idx = order[start + k];
                const ForwardTrace trace = forward_trace(net, train.row(idx));
                auto [loss, dout] = loss_and_grad(net, trace.output, train.labels[idx]);
                if (!std::isfinite(loss))
                    throw DivergenceError(epoch, batch_index,
                                          "sgd_train: non-finite loss at epoch " +
                                              std::to_string(epoch) + ", batch " +
                                              std::to_string(batch_index));
                loss_sum += loss;
                if (predicted_label(trace.output) == train.labels[idx]) ++correct;
                backward_accumulate(net, trace, dout, cfg.grad_mode, grads);
            }
            apply_update(net, grads, cfg.learning_rate / static_cast<double>(batch_n));
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss_sum / static_cast<double>(n);
        m.train_acc = static_cast<double>(correct) / static_cast<double>(n);
        m.test_acc = test.size() > 0 ? evaluate(net, test) : 0.0;
        const ops::OpCounts c = run_scope.sample();
        m.mult_count = c.mults;
        m.add_count = c.adds;
        m.sign_count = c.signs;
        m.compare_count = c.compares;
        if (sink) sink(m);
        result.history.push_back(m);
    }
    result.net = std::move(net);
    return result;
}

double evaluate(const Network& net, const Dataset& data) {
    if (data.size() == 0) throw ShapeError("evaluate: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (predicted_label(forward(net, data.row(i))) == data.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

double glorot_radius(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

AdditiveDense make_additive_dense(std::size_t d, std::size_t M, Activation act, Rng& rng) {
    const double r = glorot_radius(d, M);
    return AdditiveDense{uniform_init(d, M, -r, r, rng), Vec(M, 1.0), Vec(M, 0.0), act};
}

ClassicDense make_classic_dense(std::size_t d, std::size_t M, Activation act, Rng& rng) {
    const double r = glorot_radius(d, M);
    return ClassicDense{uniform_init(d, M, -r, r, rng), Vec(M, 0.0), act};
}

AdditiveConv make_additive_conv(const Shape3& in, std::size_t filters, std::size_t kh,
                                std::size_t kw, Activation act, Rng& rng) {
    const std::size_t k = in.c * kh * kw;
    const double r = glorot_radius(k, filters);
    return AdditiveConv{in,          kh, kw, 1, uniform_init(k, filters, -r, r, rng),
                        Vec(filters, 1.0), Vec(filters, 0.0), act};
}

ClassicConv make_classic_conv(const Shape3& in, std::size_t filters, std::size_t kh,
                              std::size_t kw, Activation act, Rng& rng) {
    const std::size_t k = in.c * kh * kw;
    const double r = glorot_radius(k, filters);
    return ClassicConv{in, kh, kw, 1, uniform_init(k, filters, -r, r, rng),
                       Vec(filters, 0.0), act};
}

std::pair<Network, Dataset> build_xor_experiment(OperatorKind op, std::uint64_t seed) {
    Rng rng(seed);
    Network net;
    net.loss = LossKind::MSE;
    if (op == OperatorKind::Ef)
        net.layers.emplace_back(make_additive_dense(2, 10, Activation::ReLU, rng));
    else
        net.layers.emplace_back(make_classic_dense(2, 10, Activation::ReLU, rng));
    net.layers.emplace_back(make_classic_dense(10, 1, Activation::Identity, rng));

    Matrix samples(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
    return {std::move(net), make_dataset(std::move(samples), {0, 1, 1, 0}, 2)};
}

Network build_mnist_mlp(OperatorKind op, int hidden_layers, Activation act,
                        std::uint64_t seed) {
    std::vector<std::size_t> widths;
    if (hidden_layers == 2)
        widths = {784, 300, 100, 10};
    else if (hidden_layers == 3)
        widths = {784, 300, 150, 60, 10};
    else
        throw ParamError("build_mnist_mlp: hidden_layers must be 2 or 3");

    Rng rng(seed);
    Network net;
    net.loss = LossKind::CrossEntropy;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const bool output = i + 2 == widths.size();
        if (output)
            net.layers.emplace_back(
                make_classic_dense(widths[i], widths[i + 1], Activation::Identity, rng));
        else if (op == OperatorKind::Ef)
            net.layers.emplace_back(make_additive_dense(widths[i], widths[i + 1], act, rng));
        else
            net.layers.emplace_back(make_classic_dense(widths[i], widths[i + 1], act, rng));
    }
    return net;
}

Network build_lenet(OperatorKind op, Activation act, std::uint64_t seed) {
    Rng rng(seed);
    Network net;
    net.loss = LossKind::CrossEntropy;
    const Shape3 in1{1, 28, 28};
    const Shape3 pool1{6, 24, 24};
    const Shape3 in2{6, 12, 12};
    const Shape3 pool2{16, 8, 8};
    if (op == OperatorKind::Ef) {
        net.layers.emplace_back(make_additive_conv(in1, 6, 5, 5, act, rng));
        net.layers.emplace_back(MaxPool2{pool1});
        net.layers.emplace_back(make_additive_conv(in2, 16, 5, 5, act, rng));
    } else {
        net.layers.emplace_back(make_classic_conv(in1, 6, 5, 5, act, rng));
        net.layers.emplace_back(MaxPool2{pool1});
        net.layers.emplace_back(make_classic_conv(in2, 16, 5, 5, act, rng));
    }
    net.layers.emplace_back(MaxPool2{pool2});
    net.layers.emplace_back(Flatten{});
    net.layers.emplace_back(make_classic_dense(16 * 4 * 4, 10, Activation::Identity, rng));
    return net;
}

}  // namespace addnet
