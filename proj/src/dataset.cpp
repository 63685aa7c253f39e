#include "addnet/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "addnet/common.hpp"

namespace addnet {

Vec Dataset::row(std::size_t i) const {
    if (i >= samples.rows) throw ShapeError("Dataset::row: index out of range");
    const double* p = samples.data.data() + i * samples.cols;
    return Vec(p, p + samples.cols);
}

Dataset make_dataset(Matrix samples, std::vector<int> labels, int n_classes) {
    if (samples.rows != labels.size())
        throw ShapeError("make_dataset: sample/label counts differ");
    if (n_classes <= 0) throw ParamError("make_dataset: n_classes must be positive");
    for (int l : labels)
        if (l < 0 || l >= n_classes) throw ParamError("make_dataset: label out of range");
    return Dataset{std::move(samples), std::move(labels), n_classes};
}

Vec one_hot(int label, int n_classes) {
    if (label < 0 || label >= n_classes) throw ParamError("one_hot: label out of range");
    Vec v(static_cast<std::size_t>(n_classes), 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    return v;
}

Dataset subset_seeded(const Dataset& data, std::size_t limit, std::uint64_t seed) {
    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_index(i)]);
    const std::size_t keep = (limit == 0 || limit > n) ? n : limit;

    Matrix samples(keep, data.samples.cols);
    std::vector<int> labels(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t src = order[i];
        std::copy_n(data.samples.data.data() + src * data.samples.cols, data.samples.cols,
                    samples.data.data() + i * samples.cols);
        labels[i] = data.labels[src];
    }
    return Dataset{std::move(samples), std::move(labels), data.n_classes};
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;  // 2051
constexpr std::uint32_t kLabelMagic = 0x00000801;  // 2049

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& buf, std::size_t offset,
                          const std::string& path) {
    if (offset + 4 > buf.size())
        throw FormatError(path + ": truncated at byte offset " + std::to_string(offset));
    return (std::uint32_t(buf[offset]) << 24) | (std::uint32_t(buf[offset + 1]) << 16) |
           (std::uint32_t(buf[offset + 2]) << 8) | std::uint32_t(buf[offset + 3]);
}

void append_u32_be(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + path);
}

}  // namespace

Matrix load_idx_images(const std::string& path) {
    const auto buf = read_file(path);
    const std::uint32_t magic = read_u32_be(buf, 0, path);
    if (magic != kImageMagic)
        throw FormatError(path + ": bad image magic " + std::to_string(magic) +
                          " at byte offset 0 (expected 2051)");
    const std::uint32_t n = read_u32_be(buf, 4, path);
    const std::uint32_t rows = read_u32_be(buf, 8, path);
    const std::uint32_t cols = read_u32_be(buf, 12, path);
    const std::size_t expected = 16 + std::size_t(n) * rows * cols;
    if (buf.size() != expected)
        throw FormatError(path + ": declared size needs " + std::to_string(expected) +
                          " bytes but file has " + std::to_string(buf.size()) +
                          " (divergence at byte offset " +
                          std::to_string(std::min(buf.size(), expected)) + ")");
    Matrix m(n, std::size_t(rows) * cols);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = static_cast<double>(buf[16 + i]) / 255.0;
    return m;
}

std::vector<int> load_idx_labels(const std::string& path) {
    const auto buf = read_file(path);
    const std::uint32_t magic = read_u32_be(buf, 0, path);
    if (magic != kLabelMagic)
        throw FormatError(path + ": bad label magic " + std::to_string(magic) +
                          " at byte offset 0 (expected 2049)");
    const std::uint32_t n = read_u32_be(buf, 4, path);
    const std::size_t expected = 8 + std::size_t(n);
    if (buf.size() != expected)
        throw FormatError(path + ": declared size needs " + std::to_string(expected) +
                          " bytes but file has " + std::to_string(buf.size()) +
                          " (divergence at byte offset " +
                          std::to_string(std::min(buf.size(), expected)) + ")");
    std::vector<int> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const unsigned char b = buf[8 + i];
        if (b >= 10)
            throw FormatError(path + ": label byte " + std::to_string(int(b)) +
                              " out of range at byte offset " + std::to_string(8 + i));
        labels[i] = b;
    }
    return labels;
}

void write_idx_images(const std::string& path, const Matrix& samples,
                      std::uint32_t rows, std::uint32_t cols) {
    if (samples.cols != std::size_t(rows) * cols)
        throw ShapeError("write_idx_images: sample width != rows*cols");
    std::string bytes;
    bytes.reserve(16 + samples.data.size());
    append_u32_be(bytes, kImageMagic);
    append_u32_be(bytes, static_cast<std::uint32_t>(samples.rows));
    append_u32_be(bytes, rows);
    append_u32_be(bytes, cols);
    for (double v : samples.data) {
        const long q = std::lround(std::min(1.0, std::max(0.0, v)) * 255.0);
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(q)));
    }
    write_file(path, bytes);
}

void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::string bytes;
    bytes.reserve(8 + labels.size());
    append_u32_be(bytes, kLabelMagic);
    append_u32_be(bytes, static_cast<std::uint32_t>(labels.size()));
    for (int l : labels) {
        if (l < 0 || l >= 10) throw ParamError("write_idx_labels: label out of range");
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(l)));
    }
    write_file(path, bytes);
}

}  // namespace addnet
