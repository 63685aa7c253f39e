#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "addnet/tensor.hpp"

namespace addnet {

// Paired samples and class labels.  Sample values live in [0, 1].
struct Dataset {
    Matrix samples;           // N x D
    std::vector<int> labels;  // N values in [0, n_classes)
    int n_classes = 0;

    std::size_t size() const { return samples.rows; }
    Vec row(std::size_t i) const;
};

Dataset make_dataset(Matrix samples, std::vector<int> labels, int n_classes);

// Unit basis vector e_label of length n_classes.
Vec one_hot(int label, int n_classes);

// Keeps the first `limit` samples after a seeded Fisher-Yates shuffle;
// limit == 0 or >= size keeps everything (still shuffled).
Dataset subset_seeded(const Dataset& data, std::size_t limit, std::uint64_t seed);

// ---------------------------------------------------------------------------
// IDX container format (the MNIST distribution's): all integers big-endian.
// Image file: magic 0x00000803, then N, rows, cols, then N*rows*cols pixel
// bytes.  Label file: magic 0x00000801, then N, then N label bytes.

// Loads an image file as an N x (rows*cols) matrix, pixel bytes / 255.
Matrix load_idx_images(const std::string& path);

// Loads a label file; every label must be in [0, 10).
std::vector<int> load_idx_labels(const std::string& path);

// Inverse writers (quantize values in [0,1] to bytes).  rows*cols must
// divide each sample row; used by tests and the synthetic-corpus tool.
void write_idx_images(const std::string& path, const Matrix& samples,
                      std::uint32_t rows, std::uint32_t cols);
void write_idx_labels(const std::string& path, const std::vector<int>& labels);

}  // namespace addnet
