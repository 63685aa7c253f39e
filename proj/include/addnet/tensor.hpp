#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "addnet/common.hpp"

namespace addnet {

using Vec = std::vector<double>;

// Dense row-major matrix of binary64 values.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // data.size() == rows * cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> values);

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    // Explicit copy of column j; ef-products consume per-column weights.
    Vec column(std::size_t j) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

// splitmix64: the 64-bit mixing generator of Steele, Lea & Flood.  State
// update s += 0x9E3779B97F4A7C15; output mixes the new state with
// z ^= z >> 30, z *= 0xBF58476D1CE4E5B9, z ^= z >> 27,
// z *= 0x94D049BB133111EB, z ^= z >> 31.  Integer-only, so streams are
// identical on every platform for a given seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53 random bits.
    double next_unit();

    // Uniform on [lo, hi); requires lo < hi.
    double uniform(double lo, double hi);

    // Uniform integer in [0, n); requires n > 0.
    std::size_t next_index(std::size_t n);

  private:
    std::uint64_t state_;
};

Matrix zeros(std::size_t rows, std::size_t cols);

// Every element i.i.d. uniform on [lo, hi), drawn row-major.
Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

// Classical product x·W (x as a row vector): out[j] = sum_i x[i] * W[i][j].
// The baseline c-operator scoring; tallies rows*cols mults and adds.
Vec matvec(const Matrix& W, const Vec& x);

}  // namespace addnet
