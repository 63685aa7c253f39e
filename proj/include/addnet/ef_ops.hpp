#pragma once

#include "addnet/tensor.hpp"

// The ef-operator: a multiplication-free vector product.  The "product" of
// two scalars is the sum of their absolute values, carrying the sign of the
// ordinary product; the vector form sums these terms, and on the diagonal it
// induces twice the l1 norm: ef_dot(x, x) == 2*||x||_1.
//
// sign(0) = 0 throughout the library.  This makes the two scalar forms agree
// bit for bit, makes the zero vector an annihilator, and gives the sign
// networks a well-defined value on their decision boundary.

namespace addnet {

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// sign(x*y) * (|x| + |y|), computed without a multiplication: the product's
// sign comes from comparing the operand signs, and applying it is a
// conditional negation.
double ef_term(double x, double y);

// Equivalent form sign(x)*y + sign(y)*x, the sign "products" again realized
// as conditional negation.  Agrees with ef_term exactly on all finite inputs.
double ef_term_alt(double x, double y);

// sum_i ef_term(x[i], y[i]), accumulated in index order from 0.0.
double ef_dot(const Vec& x, const Vec& y);

// out[j] = ef_dot(x, column j of W).  Evaluated row-major for locality; the
// per-column accumulation order is identical to ef_dot on an extracted column.
Vec ef_matprod(const Vec& x, const Matrix& W);

}  // namespace addnet
