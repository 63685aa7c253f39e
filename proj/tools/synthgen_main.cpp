// Writes a deterministic synthetic digit corpus in MNIST IDX layout, for
// running the MNIST-style experiments where the real files are unavailable.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "addnet/synth_digits.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic 28x28 digit corpus in IDX format"};
    std::string out_dir;
    std::size_t n_train = 12000, n_test = 2000;
    std::uint64_t seed = 9;
    app.add_option("--out", out_dir, "output directory (must exist)")->required();
    app.add_option("--train-n", n_train, "training samples");
    app.add_option("--test-n", n_test, "test samples");
    app.add_option("--seed", seed, "corpus seed");

    CLI11_PARSE(app, argc, argv);
    try {
        addnet::synth::write_idx_corpus(out_dir, n_train, n_test, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::printf("wrote %zu train / %zu test samples to %s\n", n_train, n_test,
                out_dir.c_str());
    return 0;
}
