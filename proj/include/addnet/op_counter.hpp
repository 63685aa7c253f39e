#pragma once

#include <cstddef>
#include <cstdint>

#include "addnet/common.hpp"

// Operation accounting.
//
// Counting is by semantic operation class at the library-call level: the
// scoring primitives (ef_term / ef_dot / ef_matprod, matvec, and the
// scale-and-bias step of the dense and convolutional layers) tally the
// arithmetic they perform into a thread-local counter.  Activation
// functions, losses, pooling, backward passes and parameter updates are
// not instrumented; the counts quantify the scoring cost the two operator
// families are compared on.
//
// Per ef term the tally is: 2 sign evaluations, 1 comparison of the signs,
// 2 absolute values, 1 addition, and at most 1 negation.  Negations are the
// only data-dependent class (a negation executes only when the term is
// negative); every other class is determined by shape alone.

namespace addnet::ops {

struct OpCounts {
    std::uint64_t mults = 0;
    std::uint64_t adds = 0;
    std::uint64_t signs = 0;
    std::uint64_t compares = 0;
    std::uint64_t abs_ops = 0;
    std::uint64_t negations = 0;

    OpCounts& operator+=(const OpCounts& o) {
        mults += o.mults;
        adds += o.adds;
        signs += o.signs;
        compares += o.compares;
        abs_ops += o.abs_ops;
        negations += o.negations;
        return *this;
    }
    friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
    friend OpCounts operator-(const OpCounts& a, const OpCounts& b) {
        OpCounts d;
        d.mults = a.mults - b.mults;
        d.adds = a.adds - b.adds;
        d.signs = a.signs - b.signs;
        d.compares = a.compares - b.compares;
        d.abs_ops = a.abs_ops - b.abs_ops;
        d.negations = a.negations - b.negations;
        return d;
    }
    friend bool operator==(const OpCounts&, const OpCounts&) = default;

    // Equality over the shape-determined classes (everything but negations).
    bool matches_predicted(const OpCounts& predicted) const {
        return mults == predicted.mults && adds == predicted.adds &&
               signs == predicted.signs && compares == predicted.compares &&
               abs_ops == predicted.abs_ops;
    }
};

// Running tally for the current thread.  Monotone non-decreasing; scopes
// snapshot it, so nested scopes compose additively.
OpCounts& thread_counter();

void reset_thread_counter();

// Tallies attributable to the computation between construction and sample().
class CountScope {
  public:
    CountScope() : start_(thread_counter()) {}
    OpCounts sample() const { return thread_counter() - start_; }

  private:
    OpCounts start_;
};

template <typename F>
OpCounts scoped_count(F&& computation) {
    CountScope scope;
    computation();
    return scope.sample();
}

enum class LayerOperator { Additive, Classic };

// Closed-form predicted counts for one dense forward pass (d inputs, M
// neurons).  Additive: M mults (the a[j]*u[j] scalings; 0 with unit-scaling
// fast path), 2dM + M adds, 2dM signs, dM compares, 2dM abs.  Classic:
// dM mults, dM adds (accumulation seeded with the bias).  Predicted
// negations are 0 and excluded from comparisons (see matches_predicted).
OpCounts theoretical_dense(LayerOperator op, std::size_t d, std::size_t M,
                           bool unit_scaling = false);

// Same closed forms per output element, for a convolution with K filters of
// flattened length k over P output positions per channel.
OpCounts theoretical_conv(LayerOperator op, std::size_t k, std::size_t K,
                          std::size_t P, bool unit_scaling = false);

}  // namespace addnet::ops
