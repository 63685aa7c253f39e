// addnet: train / eval / bench / verify for additive (ef-operator) networks.
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 divergence,
// 5 op-count mismatch (bench), 6 verification failure (verify).

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addnet/checkpoint.hpp"
#include "addnet/constructions.hpp"
#include "addnet/dataset.hpp"
#include "addnet/op_counter.hpp"
#include "addnet/train.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitCountMismatch = 5;
constexpr int kExitVerifyFailure = 6;

struct RunConfig {
    std::string arch;
    std::string op = "ef";
    std::string activation = "relu";
    std::string grad_mode = "input";
    double lr = 0.005;
    std::size_t epochs = 0;  // 0: per-arch default
    std::size_t batch_size = 0;
    std::uint64_t seed = 1;
    std::string data_dir;
    std::size_t train_limit = 10000;
    std::size_t test_limit = 2000;
    std::string checkpoint_out = "addnet-checkpoint.json";
    std::string metrics_out = "metrics.jsonl";
    std::string checkpoint_in;
};

struct LoadedData {
    addnet::Dataset train;
    addnet::Dataset test;
};

LoadedData load_mnist_dirs(const RunConfig& cfg) {
    if (cfg.data_dir.empty())
        throw addnet::FormatError("--data-dir is required for arch '" + cfg.arch +
                                  "' (directory with the IDX files)");
    auto load_pair = [&](const std::string& images, const std::string& labels) {
        try {
            return addnet::make_dataset(
                addnet::load_idx_images(cfg.data_dir + "/" + images),
                addnet::load_idx_labels(cfg.data_dir + "/" + labels), 10);
        } catch (const addnet::FormatError& e) {
            throw addnet::FormatError(std::string(e.what()) + " (from --data-dir " +
                                      cfg.data_dir + ")");
        }
    };
    LoadedData data{load_pair("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
                    load_pair("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")};
    data.train = addnet::subset_seeded(data.train, cfg.train_limit, cfg.seed ^ 0x5u);
    data.test = addnet::subset_seeded(data.test, cfg.test_limit, cfg.seed ^ 0x7u);
    if (data.train.size() == 0 || data.test.size() == 0)
        throw addnet::FormatError("empty dataset after applying subset limits");
    return data;
}

int cmd_train(const RunConfig& cfg) {
    using namespace addnet;
    const OperatorKind op = operator_from_name(cfg.op);
    const Activation act = activation_from_name(cfg.activation);

    SgdConfig sgd;
    sgd.learning_rate = cfg.lr;
    sgd.seed = cfg.seed;
    sgd.grad_mode = grad_mode_from_name(cfg.grad_mode);

    Network net;
    Dataset train, test;
    if (cfg.arch == "xor") {
        auto [n, d] = build_xor_experiment(op, cfg.seed);
        net = std::move(n);
        train = d;
        test = std::move(d);
        sgd.batch_size = cfg.batch_size ? cfg.batch_size : 4;
        sgd.epochs = cfg.epochs ? cfg.epochs : 1000;
    } else {
        if (cfg.arch == "mlp2")
            net = build_mnist_mlp(op, 2, act, cfg.seed);
        else if (cfg.arch == "mlp3")
            net = build_mnist_mlp(op, 3, act, cfg.seed);
        else if (cfg.arch == "lenet")
            net = build_lenet(op, act, cfg.seed);
        else
            throw ParamError("unknown --arch '" + cfg.arch + "'");
        LoadedData data = load_mnist_dirs(cfg);
        train = std::move(data.train);
        test = std::move(data.test);
        sgd.batch_size = cfg.batch_size ? cfg.batch_size : 150;
        sgd.epochs = cfg.epochs ? cfg.epochs : 5;
    }

    std::ofstream log(cfg.metrics_out, std::ios::trunc);
    if (!log) throw FormatError("cannot open metrics log: " + cfg.metrics_out);
    MetricsSink sink = [&log](const EpochMetrics& m) {
        log << metrics_json_line(m) << '\n';
        log.flush();
        std::printf("epoch %3zu  loss %.6f  train_acc %.4f  test_acc %.4f\n", m.epoch,
                    m.train_loss, m.train_acc, m.test_acc);
        std::fflush(stdout);
    };

    TrainResult result = sgd_train(std::move(net), train, test, sgd, sink);

    std::map<std::string, std::string> echo{
        {"arch", cfg.arch},
        {"operator", cfg.op},
        {"activation", cfg.activation},
        {"lr", std::to_string(cfg.lr)},
        {"epochs", std::to_string(sgd.epochs)},
        {"batch_size", std::to_string(sgd.batch_size)},
        {"seed", std::to_string(cfg.seed)},
        {"grad_mode", cfg.grad_mode},
    };
    save_checkpoint(result.net, cfg.checkpoint_out, echo);

    const EpochMetrics& last = result.history.back();
    std::printf("final test accuracy: %.4f\n", last.test_acc);
    std::printf("total multiplications: %" PRIu64 "\n", last.mult_count);
    std::printf("checkpoint: %s\nmetrics: %s\n", cfg.checkpoint_out.c_str(),
                cfg.metrics_out.c_str());
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
    using namespace addnet;
    if (cfg.checkpoint_in.empty()) throw ParamError("--checkpoint is required");
    LoadedCheckpoint loaded = load_checkpoint(cfg.checkpoint_in);

    Dataset data;
    const auto arch_it = loaded.config.find("arch");
    if (arch_it != loaded.config.end() && arch_it->second == "xor") {
        data = build_xor_experiment(OperatorKind::Ef, 1).second;
    } else {
        RunConfig dcfg = cfg;
        dcfg.arch = arch_it != loaded.config.end() ? arch_it->second : "mlp2";
        data = load_mnist_dirs(dcfg).test;
    }

    std::printf("operator: %s\n", operator_kind(loaded.net));
    for (const auto& [k, v] : loaded.config) std::printf("config %s = %s\n", k.c_str(), v.c_str());

    const std::size_t classes = static_cast<std::size_t>(data.n_classes);
    std::vector<std::size_t> confusion(classes * classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec out = forward(loaded.net, data.row(i));
        int pred;
        if (out.size() == 1)
            pred = out[0] > 0.5 ? 1 : 0;
        else
            pred = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        if (pred == data.labels[i]) ++correct;
        confusion[static_cast<std::size_t>(data.labels[i]) * classes +
                  static_cast<std::size_t>(pred)]++;
    }
    std::printf("accuracy: %.4f (%zu/%zu)\n",
                static_cast<double>(correct) / static_cast<double>(data.size()), correct,
                data.size());
    std::printf("confusion (rows = true label, cols = prediction):\n");
    for (std::size_t r = 0; r < classes; ++r) {
        for (std::size_t c = 0; c < classes; ++c)
            std::printf("%6zu", confusion[r * classes + c]);
        std::printf("\n");
    }
    return kExitOk;
}

int cmd_bench(std::uint64_t seed, std::size_t random_shapes) {
    using namespace addnet;
    using ops::LayerOperator;
    std::vector<std::pair<std::size_t, std::size_t>> shapes = {
        {16, 10}, {16, 300}, {784, 10}, {784, 300}};
    Rng rng(seed);
    for (std::size_t i = 0; i < random_shapes; ++i)
        shapes.push_back({1 + rng.next_index(256), 1 + rng.next_index(64)});

    std::printf("%-8s %-8s %-9s %-12s %-12s %-12s %-12s %s\n", "d", "M", "operator",
                "mults", "mults_pred", "adds", "adds_pred", "status");
    bool all_ok = true;
    for (const auto& [d, M] : shapes) {
        for (const LayerOperator op : {LayerOperator::Additive, LayerOperator::Classic}) {
            Rng init(seed ^ (d * 31 + M));
            Vec x(d);
            for (double& v : x) v = init.uniform(-1.0, 1.0);
            ops::OpCounts measured;
            if (op == LayerOperator::Additive) {
                AdditiveDense layer = make_additive_dense(d, M, Activation::Identity, init);
                measured = ops::scoped_count([&] { additive_dense_forward(layer, x); });
            } else {
                ClassicDense layer = make_classic_dense(d, M, Activation::Identity, init);
                measured = ops::scoped_count([&] { classic_dense_forward(layer, x); });
            }
            const ops::OpCounts predicted = ops::theoretical_dense(op, d, M);
            const bool ok = measured.matches_predicted(predicted);
            all_ok = all_ok && ok;
            std::printf("%-8zu %-8zu %-9s %-12" PRIu64 " %-12" PRIu64 " %-12" PRIu64
                        " %-12" PRIu64 " %s\n",
                        d, M, op == LayerOperator::Additive ? "ef" : "classic",
                        measured.mults, predicted.mults, measured.adds, predicted.adds,
                        ok ? "ok" : "MISMATCH");
        }
    }

    // ef convolutions: one multiplication per output position per channel.
    std::printf("\n%-22s %-9s %-12s %-12s %s\n", "conv (CxHxW k K)", "operator", "mults",
                "mults_pred", "status");
    const std::vector<std::tuple<Shape3, std::size_t, std::size_t>> conv_shapes = {
        {Shape3{1, 28, 28}, 5, 6}, {Shape3{6, 12, 12}, 5, 16}, {Shape3{3, 9, 9}, 3, 4}};
    for (const auto& [in, k, K] : conv_shapes) {
        Rng init(seed ^ in.size());
        Vec img(in.size());
        for (double& v : img) v = init.uniform(0.0, 1.0);
        for (const LayerOperator op : {LayerOperator::Additive, LayerOperator::Classic}) {
            const Shape3 out = conv_out_shape(in, k, k, 1, K);
            const std::size_t P = out.h * out.w;
            ops::OpCounts measured;
            if (op == LayerOperator::Additive) {
                AdditiveConv layer = make_additive_conv(in, K, k, k, Activation::Identity, init);
                measured = ops::scoped_count([&] { additive_conv_forward(layer, img); });
            } else {
                ClassicConv layer = make_classic_conv(in, K, k, k, Activation::Identity, init);
                measured = ops::scoped_count([&] { classic_conv_forward(layer, img); });
            }
            const ops::OpCounts predicted =
                ops::theoretical_conv(op, in.c * k * k, K, P);
            const bool ok = measured.matches_predicted(predicted);
            all_ok = all_ok && ok;
            std::printf("%zux%zux%zu k=%zu K=%-7zu %-9s %-12" PRIu64 " %-12" PRIu64 " %s\n",
                        in.c, in.h, in.w, k, K,
                        op == LayerOperator::Additive ? "ef" : "classic", measured.mults,
                        predicted.mults, ok ? "ok" : "MISMATCH");
        }
    }
    return all_ok ? kExitOk : kExitCountMismatch;
}

int cmd_verify(const std::vector<std::size_t>& dims, std::size_t cases, std::size_t nets,
               std::size_t inputs, std::size_t terms, std::uint64_t seed) {
    using namespace addnet::constructions;
    std::printf("config: dims=");
    for (std::size_t i = 0; i < dims.size(); ++i)
        std::printf("%s%zu", i ? "," : "", dims[i]);
    std::printf(" cases=%zu nets=%zu inputs=%zu terms=%zu seed=%" PRIu64 "\n", cases, nets,
                inputs, terms, seed);
    std::vector<VerifyReport> reports;
    reports.push_back(verify_sign_network_exactness(dims, cases, seed));
    reports.push_back(verify_relu_conversion(nets, inputs, seed + 1));
    reports.push_back(verify_superposition(terms, 500, seed + 2, false));
    reports.push_back(verify_superposition(terms, 500, seed + 3, true));

    bool all_ok = true;
    for (const VerifyReport& r : reports) {
        std::printf("%-34s %zu cases, %zu failures", r.name.c_str(), r.cases, r.failures);
        if (r.boundary_cases > 0)
            std::printf("; boundary sign(0)=0: %zu cases, %zu failures", r.boundary_cases,
                        r.boundary_failures);
        std::printf("  [%s]\n", r.passed() ? "PASS" : "FAIL");
        all_ok = all_ok && r.passed();
    }
    return all_ok ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"additive (ef-operator) neural networks: training, evaluation, "
                 "op-count benchmarks and construction verifiers"};
    app.require_subcommand(1);

    RunConfig cfg;

    CLI::App* train = app.add_subcommand("train", "train a network and write checkpoint + metrics");
    train->add_option("--arch", cfg.arch, "xor | mlp2 | mlp3 | lenet")->required();
    train->add_option("--operator", cfg.op, "ef | classic");
    train->add_option("--activation", cfg.activation, "relu | tanh | sigmoid | identity");
    train->add_option("--lr", cfg.lr, "learning rate (> 0)")
        ->check(CLI::PositiveNumber);
    train->add_option("--epochs", cfg.epochs, "epochs (default: 1000 for xor, 5 otherwise)");
    train->add_option("--batch-size", cfg.batch_size,
                      "batch size (default: 4 for xor, 150 otherwise)");
    train->add_option("--seed", cfg.seed, "RNG seed (init, shuffle, subsets)");
    train->add_option("--grad-mode", cfg.grad_mode, "input | sign (ef W-gradient rule)");
    train->add_option("--data-dir", cfg.data_dir, "directory with the four MNIST IDX files");
    train->add_option("--train-limit", cfg.train_limit,
                      "training subset size after seeded shuffle (0 = all)");
    train->add_option("--test-limit", cfg.test_limit, "test subset size (0 = all)");
    train->add_option("--checkpoint-out", cfg.checkpoint_out, "checkpoint output path");
    train->add_option("--metrics-out", cfg.metrics_out, "metrics JSONL output path");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", cfg.checkpoint_in, "checkpoint path")->required();
    eval->add_option("--data-dir", cfg.data_dir, "directory with the IDX files");
    eval->add_option("--test-limit", cfg.test_limit, "test subset size (0 = all)");
    eval->add_option("--seed", cfg.seed, "subset seed (match the training run)");

    std::uint64_t bench_seed = 1;
    std::size_t bench_random = 50;
    CLI::App* bench = app.add_subcommand("bench", "measured vs theoretical op counts");
    bench->add_option("--seed", bench_seed, "seed for the random shape sweep");
    bench->add_option("--random-shapes", bench_random, "number of random shapes");

    std::vector<std::size_t> dims = {1, 2, 3, 5};
    std::size_t cases = 1000, nets = 100, inputs = 100, terms = 8;
    std::uint64_t verify_seed = 1;
    CLI::App* verify = app.add_subcommand("verify", "construction verification suites");
    verify->add_option("--dims", dims, "sign-network dimensions (e.g. 1,2,3,5)")
        ->delimiter(',');
    verify->add_option("--cases", cases, "sign-network cases per dimension");
    verify->add_option("--nets", nets, "random nets for the ReLU conversion suite");
    verify->add_option("--inputs", inputs, "inputs per net");
    verify->add_option("--terms", terms, "max superposition terms");
    verify->add_option("--seed", verify_seed, "suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (train->parsed()) return cmd_train(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (bench->parsed()) return cmd_bench(bench_seed, bench_random);
        if (verify->parsed()) return cmd_verify(dims, cases, nets, inputs, terms, verify_seed);
    } catch (const addnet::DivergenceError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return kExitDivergence;
    } catch (const addnet::FormatError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const addnet::ParamError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const addnet::ShapeError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
