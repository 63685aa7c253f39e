#include "addnet/tensor.hpp"

#include <string>

#include "addnet/op_counter.hpp"

namespace addnet {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols)
        throw ShapeError("Matrix: got " + std::to_string(data.size()) +
                         " values for a " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " matrix");
}

Vec Matrix::column(std::size_t j) const {
    if (j >= cols) throw ShapeError("Matrix::column: index out of range");
    Vec out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = data[i * cols + j];
    return out;
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) throw ParamError("Rng::uniform: requires lo < hi");
    return lo + next_unit() * (hi - lo);
}

std::size_t Rng::next_index(std::size_t n) {
    if (n == 0) throw ParamError("Rng::next_index: requires n > 0");
    // Multiply-shift range reduction; bias is negligible for n << 2^64 and
    // the result is platform-independent.
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
    if (!(lo < hi)) throw ParamError("uniform_init: requires lo < hi");
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(lo, hi);
    return m;
}

Vec matvec(const Matrix& W, const Vec& x) {
    if (W.rows != x.size())
        throw ShapeError("matvec: W has " + std::to_string(W.rows) +
                         " rows but x has length " + std::to_string(x.size()));
    Vec out(W.cols, 0.0);
    for (std::size_t i = 0; i < W.rows; ++i) {
        const double xi = x[i];
        const double* row = W.data.data() + i * W.cols;
        for (std::size_t j = 0; j < W.cols; ++j) out[j] += xi * row[j];
    }
    auto& c = ops::thread_counter();
    c.mults += static_cast<std::uint64_t>(W.rows) * W.cols;
    c.adds += static_cast<std::uint64_t>(W.rows) * W.cols;
    return out;
}

}  // namespace addnet
