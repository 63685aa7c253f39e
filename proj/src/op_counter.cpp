#include "addnet/op_counter.hpp"

namespace addnet::ops {

OpCounts& thread_counter() {
    thread_local OpCounts counter;
    return counter;
}

void reset_thread_counter() { thread_counter() = OpCounts{}; }

OpCounts theoretical_dense(LayerOperator op, std::size_t d, std::size_t M,
                           bool unit_scaling) {
    OpCounts c;
    switch (op) {
        case LayerOperator::Additive:
            c.mults = unit_scaling ? 0 : M;
            c.adds = 2 * d * M + M;
            c.signs = 2 * d * M;
            c.compares = d * M;
            c.abs_ops = 2 * d * M;
            return c;
        case LayerOperator::Classic:
            c.mults = d * M;
            c.adds = d * M;
            return c;
    }
    throw ParamError("theoretical_dense: unknown layer operator");
}

OpCounts theoretical_conv(LayerOperator op, std::size_t k, std::size_t K,
                          std::size_t P, bool unit_scaling) {
    // Each of the K*P output elements is one dense neuron over a k-long patch.
    return theoretical_dense(op, k, K * P, unit_scaling);
}

}  // namespace addnet::ops
