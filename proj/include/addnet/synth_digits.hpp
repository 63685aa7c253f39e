#pragma once

#include <cstdint>

#include "addnet/dataset.hpp"

namespace addnet::synth {

// Deterministic 28x28 ten-class digit corpus: per-class stroke skeletons
// rendered with randomized affine jitter (scale, rotation, shear, shift),
// stroke thickness, brightness and background noise.  Same (n, seed) gives
// the same corpus on every platform.  A stand-in for MNIST where the real
// IDX files are not available; it exercises the identical pipeline.
Dataset make_digits(std::size_t n, std::uint64_t seed);

// Writes train/test IDX pairs (train-images-idx3-ubyte etc.) under dir.
void write_idx_corpus(const std::string& dir, std::size_t n_train, std::size_t n_test,
                      std::uint64_t seed);

}  // namespace addnet::synth
