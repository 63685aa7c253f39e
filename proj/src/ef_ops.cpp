#include "addnet/ef_ops.hpp"

#include <cmath>
#include <string>

#include "addnet/op_counter.hpp"

namespace addnet {

namespace {

// Uninstrumented kernel shared by the scalar and vector entry points.
// Tallies per term (done in bulk by the callers): 2 signs, 1 compare,
// 2 abs, 1 add, plus 1 negation iff the term is negative.
inline double ef_term_raw(double x, double y, std::uint64_t& negations) {
    const double magnitude = std::fabs(x) + std::fabs(y);
    if (x == 0.0 || y == 0.0) return 0.0;
    if ((x > 0.0) != (y > 0.0)) {
        ++negations;
        return -magnitude;
    }
    return magnitude;
}

}  // namespace

double ef_term(double x, double y) {
    auto& c = ops::thread_counter();
    c.signs += 2;
    c.compares += 1;
    c.abs_ops += 2;
    c.adds += 1;
    std::uint64_t neg = 0;
    const double r = ef_term_raw(x, y, neg);
    c.negations += neg;
    return r;
}

double ef_term_alt(double x, double y) {
    auto& c = ops::thread_counter();
    c.signs += 2;
    c.adds += 1;
    std::uint64_t neg = 0;
    double tx, ty;
    if (x > 0.0) {
        tx = y;
    } else if (x < 0.0) {
        tx = -y;
        ++neg;
    } else {
        tx = 0.0;
    }
    if (y > 0.0) {
        ty = x;
    } else if (y < 0.0) {
        ty = -x;
        ++neg;
    } else {
        ty = 0.0;
    }
    c.negations += neg;
    return tx + ty;
}

double ef_dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size())
        throw ShapeError("ef_dot: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()) + " differ");
    const std::size_t d = x.size();
    std::uint64_t neg = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += ef_term_raw(x[i], y[i], neg);
    auto& c = ops::thread_counter();
    c.signs += 2 * d;
    c.compares += d;
    c.abs_ops += 2 * d;
    c.adds += 2 * d;  // one add inside each term, one accumulation per term
    c.negations += neg;
    return acc;
}

Vec ef_matprod(const Vec& x, const Matrix& W) {
    if (W.rows != x.size())
        throw ShapeError("ef_matprod: W has " + std::to_string(W.rows) +
                         " rows but x has length " + std::to_string(x.size()));
    Vec out(W.cols, 0.0);
    std::uint64_t neg = 0;
    for (std::size_t i = 0; i < W.rows; ++i) {
        const double xi = x[i];
        const double* row = W.data.data() + i * W.cols;
        for (std::size_t j = 0; j < W.cols; ++j) out[j] += ef_term_raw(xi, row[j], neg);
    }
    const std::uint64_t n = static_cast<std::uint64_t>(W.rows) * W.cols;
    auto& c = ops::thread_counter();
    c.signs += 2 * n;
    c.compares += n;
    c.abs_ops += 2 * n;
    c.adds += 2 * n;
    c.negations += neg;
    return out;
}

}  // namespace addnet
