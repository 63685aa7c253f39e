// Acceptance suite: one criterion per entry, one PASS/FAIL line each.
// Run with no arguments for all criteria, or with criterion numbers
// (e.g. `acceptance 1 6`) for a subset.  Exit 0 iff every selected
// criterion passes.
//
// Criteria 8 and 9 train on the deterministic synthetic digit corpus written
// in MNIST IDX layout (generated under the system temp directory); point
// ADDNET_DATA_DIR at a directory with the real MNIST files to run them on
// MNIST instead.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "addnet/checkpoint.hpp"
#include "addnet/constructions.hpp"
#include "addnet/ef_ops.hpp"
#include "addnet/op_counter.hpp"
#include "addnet/synth_digits.hpp"
#include "addnet/train.hpp"

#include "fd.hpp"

using namespace addnet;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// --------------------------------------------------------------- criterion 1
// ef algebra on 10,000 random vectors (d <= 64): Eq.1/Eq.2 equivalence,
// symmetry, negation antisymmetry, and ef_dot(x,x) == 2||x||_1, all exact.
Outcome ef_algebra_suite() {
    Rng rng(2024);
    std::size_t failures = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t d = 1 + rng.next_index(64);
        Vec x(d), y(d), negx(d);
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = rng.uniform(-10.0, 10.0);
            y[i] = rng.uniform(-10.0, 10.0);
        }
        if (rep % 17 == 0) x[rng.next_index(d)] = 0.0;  // exercise sign(0)
        for (std::size_t i = 0; i < d; ++i) negx[i] = -x[i];

        for (std::size_t i = 0; i < d; ++i)
            if (ef_term(x[i], y[i]) != ef_term_alt(x[i], y[i])) ++failures;
        if (ef_dot(x, y) != ef_dot(y, x)) ++failures;
        if (ef_dot(negx, y) != -ef_dot(x, y)) ++failures;
        double l1 = 0.0;
        for (double v : x) l1 += std::fabs(v);
        if (ef_dot(x, x) != 2.0 * l1) ++failures;
    }
    return {failures == 0, "10000 vectors, " + std::to_string(failures) + " failures"};
}

// --------------------------------------------------------------- criterion 2
Outcome sign_network_exactness() {
    const auto r = constructions::verify_sign_network_exactness({1, 2, 3, 5}, 1000, 4242);
    return {r.passed(), std::to_string(r.cases) + " cases, " +
                            std::to_string(r.failures) + " failures; boundary " +
                            std::to_string(r.boundary_cases) + " cases, " +
                            std::to_string(r.boundary_failures) + " failures"};
}

// --------------------------------------------------------------- criterion 3
Outcome relu_conversion() {
    const auto r = constructions::verify_relu_conversion(100, 100, 777);
    return {r.passed(),
            std::to_string(r.cases) + " checks, " + std::to_string(r.failures) + " failures"};
}

// --------------------------------------------------------------- criterion 4
Outcome superposition_oracle() {
    const auto plain = constructions::verify_superposition(8, 500, 31337, false);
    const auto relu = constructions::verify_superposition(8, 500, 31338, true);
    return {plain.passed() && relu.passed(),
            std::to_string(plain.cases) + "+" + std::to_string(relu.cases) + " cases, " +
                std::to_string(plain.failures + relu.failures) + " failures"};
}

// --------------------------------------------------------------- criterion 5
Outcome gradient_fidelity() {
    Rng rng(555);
    fd::Report sign_mode, scaled_mode;
    const Activation acts[] = {Activation::Identity, Activation::Tanh, Activation::Sigmoid,
                               Activation::ReLU};
    for (int rep = 0; rep < 150; ++rep) {  // dense configurations
        const Activation act = acts[rng.next_index(4)];
        for (int attempt = 0; attempt < 100; ++attempt) {
            const std::size_t d = 2 + rng.next_index(5), M = 1 + rng.next_index(4);
            AdditiveDense l{Matrix(d, M), Vec(M), Vec(M), act};
            for (double& w : l.W.data) w = fd::bounded_away(rng);
            for (double& a : l.a) a = fd::bounded_away(rng);
            for (double& b : l.b) b = fd::bounded_away(rng);
            Vec x(d);
            for (double& v : x) v = fd::bounded_away(rng);
            if (act == Activation::ReLU) {
                bool off_kink = true;
                for (double s : additive_dense_forward(l, x).second.s)
                    if (std::fabs(s) < 1e-2) off_kink = false;
                if (!off_kink) continue;
            }
            Vec up(M);
            for (double& v : up) v = rng.uniform(-1.0, 1.0);
            fd::check_additive_dense(l, x, up, GradMode::SignConsistent, sign_mode);
            fd::check_additive_dense(l, x, up, GradMode::InputScaled, scaled_mode);
            break;
        }
    }
    for (int rep = 0; rep < 50; ++rep) {  // conv configurations
        const Shape3 in{1 + rng.next_index(2), 4, 4};
        const std::size_t K = 1 + rng.next_index(3);
        AdditiveConv l{in, 2, 2, 1, Matrix(in.c * 4, K), Vec(K), Vec(K),
                       rep % 2 == 0 ? Activation::Tanh : Activation::Identity};
        for (double& w : l.kernels.data) w = fd::bounded_away(rng);
        for (double& a : l.a) a = fd::bounded_away(rng);
        for (double& b : l.b) b = fd::bounded_away(rng);
        Vec x(in.size());
        for (double& v : x) v = fd::bounded_away(rng);
        Vec up(K * 9);
        for (double& v : up) v = rng.uniform(-1.0, 1.0);
        fd::check_additive_conv(l, x, up, GradMode::SignConsistent, sign_mode);
        fd::check_additive_conv(l, x, up, GradMode::InputScaled, scaled_mode);
    }
    const bool pass = sign_mode.failures == 0 && scaled_mode.failures == 0;
    return {pass, "200 configurations; sign-mode " + std::to_string(sign_mode.checked) +
                      " coords, " + std::to_string(sign_mode.failures) +
                      " failures; input-scaled mode (ga,gb) " + std::to_string(scaled_mode.checked) +
                      " coords, " + std::to_string(scaled_mode.failures) + " failures"};
}

// --------------------------------------------------------------- criterion 6
Outcome multiplication_accounting() {
    using ops::LayerOperator;
    Rng rng(666);
    std::size_t failures = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.next_index(400);
        const std::size_t M = 1 + rng.next_index(80);
        Vec x(d);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        AdditiveDense add = make_additive_dense(d, M, Activation::Identity, rng);
        if (!ops::scoped_count([&] { additive_dense_forward(add, x); })
                 .matches_predicted(ops::theoretical_dense(LayerOperator::Additive, d, M)))
            ++failures;
        ClassicDense classic = make_classic_dense(d, M, Activation::Identity, rng);
        if (!ops::scoped_count([&] { classic_dense_forward(classic, x); })
                 .matches_predicted(ops::theoretical_dense(LayerOperator::Classic, d, M)))
            ++failures;
    }
    // the headline dense shape: 300 vs 235,200 multiplications
    Vec x784(784);
    for (double& v : x784) v = rng.uniform(0.0, 1.0);
    AdditiveDense add = make_additive_dense(784, 300, Activation::ReLU, rng);
    ClassicDense classic = make_classic_dense(784, 300, Activation::ReLU, rng);
    const auto ca = ops::scoped_count([&] { additive_dense_forward(add, x784); });
    const auto cc = ops::scoped_count([&] { classic_dense_forward(classic, x784); });
    if (ca.mults != 300 || cc.mults != 235200) ++failures;
    return {failures == 0, "50 random shapes + d=784/M=300 (" + std::to_string(ca.mults) +
                               " vs " + std::to_string(cc.mults) + " mults), " +
                               std::to_string(failures) + " failures"};
}

// --------------------------------------------------------------- criterion 7
Outcome xor_reproduction() {
    std::size_t solved = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto [net, data] = build_xor_experiment(OperatorKind::Ef, seed);
        SgdConfig cfg;
        cfg.learning_rate = 0.01;
        cfg.batch_size = 4;
        cfg.epochs = 1000;
        cfg.seed = seed;
        cfg.grad_mode = GradMode::InputScaled;
        const TrainResult r = sgd_train(std::move(net), data, data, cfg);
        if (evaluate(r.net, data) == 1.0) ++solved;
    }
    return {solved >= 12, std::to_string(solved) +
                              "/20 seeds reach 100% XOR accuracy "
                              "(lr 0.01, InputScaled, 1000 epochs; need >= 12)"};
}

// ------------------------------------------------------------ criteria 8 + 9
struct DeskData {
    Dataset train;
    Dataset test;
    std::string source;
};

DeskData desk_scale_data() {
    DeskData d;
    const char* env = std::getenv("ADDNET_DATA_DIR");
    std::string dir;
    if (env && *env) {
        dir = env;
        d.source = "MNIST at " + dir;
    } else {
        dir = (std::filesystem::temp_directory_path() / "addnet-acceptance-corpus").string();
        std::filesystem::create_directories(dir);
        if (!std::filesystem::exists(dir + "/train-images-idx3-ubyte"))
            synth::write_idx_corpus(dir, 12000, 2400, 9);
        d.source = "synthetic corpus at " + dir;
    }
    Dataset train = make_dataset(load_idx_images(dir + "/train-images-idx3-ubyte"),
                                 load_idx_labels(dir + "/train-labels-idx1-ubyte"), 10);
    Dataset test = make_dataset(load_idx_images(dir + "/t10k-images-idx3-ubyte"),
                                load_idx_labels(dir + "/t10k-labels-idx1-ubyte"), 10);
    d.train = subset_seeded(train, 10000, 1 ^ 0x5u);
    d.test = subset_seeded(test, 2000, 1 ^ 0x7u);
    return d;
}

Outcome mnist_desk_scale() {
    const DeskData data = desk_scale_data();
    SgdConfig cfg;
    cfg.learning_rate = 0.005;
    cfg.batch_size = 150;
    cfg.epochs = 5;
    cfg.seed = 1;
    cfg.grad_mode = GradMode::InputScaled;

    const TrainResult ef = sgd_train(build_mnist_mlp(OperatorKind::Ef, 2, Activation::ReLU, 1),
                                     data.train, data.test, cfg);
    const double ef_acc = ef.history.back().test_acc;
    const TrainResult cl =
        sgd_train(build_mnist_mlp(OperatorKind::Classic, 2, Activation::ReLU, 1), data.train,
                  data.test, cfg);
    const double cl_acc = cl.history.back().test_acc;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "ef %.4f (need >= 0.90), classic %.4f, gap %+.2f pp (need <= 2.5); %s",
                  ef_acc, cl_acc, (cl_acc - ef_acc) * 100.0, data.source.c_str());
    return {ef_acc >= 0.90 && (cl_acc - ef_acc) <= 0.025, buf};
}

Outcome lenet_desk_scale() {
    const DeskData data = desk_scale_data();
    SgdConfig cfg;
    cfg.learning_rate = 0.005;
    cfg.batch_size = 150;
    cfg.epochs = 2;
    cfg.seed = 1;
    cfg.grad_mode = GradMode::InputScaled;

    const Network net = build_lenet(OperatorKind::Ef, Activation::ReLU, 1);
    const bool classic_head = std::holds_alternative<ClassicDense>(net.layers.back());
    const TrainResult r = sgd_train(net, data.train, data.test, cfg);
    const double acc = r.history.back().test_acc;

    // bench the conv multiplication contract: 1 per output position per channel
    bool conv_counts_ok = true;
    Rng rng(99);
    for (const Layer& l : net.layers) {
        if (const auto* conv = std::get_if<AdditiveConv>(&l)) {
            Vec img(conv->in.size());
            for (double& v : img) v = rng.uniform(0.0, 1.0);
            const Shape3 out =
                conv_out_shape(conv->in, conv->kh, conv->kw, conv->stride, conv->kernels.cols);
            const auto counts = ops::scoped_count([&] { additive_conv_forward(*conv, img); });
            if (counts.mults != conv->kernels.cols * out.h * out.w) conv_counts_ok = false;
        }
    }

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "ef lenet %.4f (need >= 0.85), classic head %s, conv mults/position %s; %s",
                  acc, classic_head ? "yes" : "NO", conv_counts_ok ? "==1" : "MISMATCH",
                  data.source.c_str());
    return {acc >= 0.85 && classic_head && conv_counts_ok, buf};
}

// -------------------------------------------------------------- criterion 10
Outcome determinism_and_persistence() {
    const Dataset digits = synth::make_digits(600, 33);
    const Dataset train = subset_seeded(digits, 500, 1);
    const Dataset test = subset_seeded(digits, 100, 2);

    SgdConfig cfg;
    cfg.learning_rate = 0.005;
    cfg.batch_size = 50;
    cfg.epochs = 2;
    cfg.seed = 7;

    auto run_log = [&](const std::string& path) {
        std::ofstream log(path, std::ios::trunc);
        MetricsSink sink = [&log](const EpochMetrics& m) { log << metrics_json_line(m) << '\n'; };
        return sgd_train(build_mnist_mlp(OperatorKind::Ef, 2, Activation::ReLU, 7), train,
                         test, cfg, sink);
    };
    const std::string p1 =
        (std::filesystem::temp_directory_path() / "addnet_metrics_a.jsonl").string();
    const std::string p2 =
        (std::filesystem::temp_directory_path() / "addnet_metrics_b.jsonl").string();
    const TrainResult r1 = run_log(p1);
    const TrainResult r2 = run_log(p2);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), {});
    };
    const bool logs_identical = slurp(p1) == slurp(p2) && !slurp(p1).empty();

    const std::string ckpt =
        (std::filesystem::temp_directory_path() / "addnet_acceptance_ckpt.json").string();
    save_checkpoint(r1.net, ckpt, {{"arch", "mlp2"}});
    const LoadedCheckpoint loaded = load_checkpoint(ckpt);
    const bool eval_identical = evaluate(loaded.net, test) == evaluate(r1.net, test);

    const std::string ckpt2 =
        (std::filesystem::temp_directory_path() / "addnet_acceptance_ckpt2.json").string();
    save_checkpoint(loaded.net, ckpt2, {{"arch", "mlp2"}});
    const bool bytes_identical = slurp(ckpt) == slurp(ckpt2);

    std::string detail = std::string("metrics logs byte-identical: ") +
                         (logs_identical ? "yes" : "NO") +
                         "; checkpoint round-trip evaluate identical: " +
                         (eval_identical ? "yes" : "NO") +
                         "; checkpoint bytes idempotent: " + (bytes_identical ? "yes" : "NO");
    return {logs_identical && eval_identical && bytes_identical, detail};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "ef-operator algebra (exact, 10k vectors)", ef_algebra_suite},
        {2, "sign-network exactness", sign_network_exactness},
        {3, "identity-to-ReLU conversion", relu_conversion},
        {4, "sign-superposition oracle", superposition_oracle},
        {5, "gradient fidelity vs finite differences", gradient_fidelity},
        {6, "multiplication accounting", multiplication_accounting},
        {7, "XOR reproduction (majority of 20 seeds)", xor_reproduction},
        {8, "MNIST-scale MLP desk run", mnist_desk_scale},
        {9, "LeNet desk run", lenet_desk_scale},
        {10, "determinism and persistence", determinism_and_persistence},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2d] %-44s %s (%.1fs; %s)\n", c.id, c.name,
                    out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
