#pragma once

#include <cmath>
#include <vector>

#include "addnet/common.hpp"

// Error-free real arithmetic on floating-point expansions (Shewchuk's
// nonoverlapping-component representation).  A value is a sum of doubles with
// disjoint bit ranges, ordered by increasing magnitude; add, scale-by-double,
// negation, absolute value and sign are all exact.  Used to evaluate the
// universal-approximation constructions in real arithmetic, where their
// telescoping identities hold exactly (plain double evaluation carries
// ulp-level wobble through the layer boundaries).
//
// Requires round-to-nearest and no overflow; magnitudes here stay far from
// both ends of the double range.

namespace addnet::exact {

inline void two_sum(double a, double b, double& hi, double& lo) {
    hi = a + b;
    const double bb = hi - a;
    const double aa = hi - bb;
    lo = (a - aa) + (b - bb);
}

inline void two_prod(double a, double b, double& hi, double& lo) {
    hi = a * b;
    lo = std::fma(a, b, -hi);
}

class Value {
  public:
    Value() = default;  // zero
    explicit Value(double v) {
        if (v != 0.0) comps_.push_back(v);
    }

    bool is_zero() const { return comps_.empty(); }

    // Sign of the exact value: the largest-magnitude component dominates the
    // (nonoverlapping) rest.
    int sign() const {
        if (comps_.empty()) return 0;
        return comps_.back() > 0.0 ? 1 : -1;
    }

    Value negated() const {
        Value r = *this;
        for (double& c : r.comps_) c = -c;
        return r;
    }

    Value abs() const { return sign() < 0 ? negated() : *this; }

    // Exact sum (grow by one double at a time, zero-eliminating).
    Value plus(const Value& other) const {
        Value r = *this;
        for (double c : other.comps_) r.grow(c);
        return r;
    }

    Value plus(double d) const {
        Value r = *this;
        r.grow(d);
        return r;
    }

    Value minus(const Value& other) const { return plus(other.negated()); }

    // Exact product with a plain double.
    Value times(double b) const {
        Value r;
        if (b == 0.0 || comps_.empty()) return r;
        double q, h, t, lo;
        two_prod(comps_[0], b, q, h);
        if (h != 0.0) r.comps_.push_back(h);
        for (std::size_t i = 1; i < comps_.size(); ++i) {
            two_prod(comps_[i], b, t, lo);
            double q2, h2;
            two_sum(q, lo, q2, h2);
            if (h2 != 0.0) r.comps_.push_back(h2);
            two_sum(q2, t, q, h2);
            if (h2 != 0.0) r.comps_.push_back(h2);
        }
        if (q != 0.0) r.comps_.push_back(q);
        return r;
    }

    // Nearby double (summed small to large); for display, not for equality.
    double approx() const {
        double s = 0.0;
        for (double c : comps_) s += c;
        return s;
    }

    std::size_t component_count() const { return comps_.size(); }

  private:
    void grow(double b) {
        if (b == 0.0) return;
        std::vector<double> out;
        out.reserve(comps_.size() + 1);
        double q = b, h;
        for (double c : comps_) {
            two_sum(q, c, q, h);
            if (h != 0.0) out.push_back(h);
        }
        if (q != 0.0) out.push_back(q);
        comps_ = std::move(out);
    }

    std::vector<double> comps_;
};

// sign(x*y) * (|x| + |y|) in exact arithmetic, sign(0) = 0 as elsewhere.
inline Value ef_term(const Value& x, const Value& y) {
    const int sx = x.sign(), sy = y.sign();
    if (sx == 0 || sy == 0) return Value{};
    const Value mag = x.abs().plus(y.abs());
    return sx != sy ? mag.negated() : mag;
}

}  // namespace addnet::exact
