#pragma once

#include <variant>
#include <vector>

#include "addnet/layers.hpp"

namespace addnet {

using Layer = std::variant<AdditiveDense, ClassicDense, AdditiveConv, ClassicConv,
                           MaxPool2, Flatten>;

enum class LossKind { CrossEntropy, MSE };

struct Network {
    std::vector<Layer> layers;
    LossKind loss = LossKind::CrossEntropy;
};

Vec forward(const Network& net, const Vec& x);

// Forward pass keeping per-layer caches for backprop.
using LayerCache = std::variant<DenseCache, ConvCache, PoolCache, std::monostate>;

struct ForwardTrace {
    Vec output;
    std::vector<LayerCache> caches;  // one per layer
};

ForwardTrace forward_trace(const Network& net, const Vec& x);

// Parameter-gradient accumulator for one layer; unused members stay empty.
struct LayerGrads {
    Matrix W;
    Vec a;
    Vec b;
};

using NetGrads = std::vector<LayerGrads>;

NetGrads zero_grads(const Network& net);

// Backpropagates the loss gradient, adding parameter gradients into `grads`.
// Returns the gradient w.r.t. the network input.
Vec backward_accumulate(const Network& net, const ForwardTrace& trace,
                        const Vec& output_grad, GradMode mode, NetGrads& grads);

// p <- p - scale * g for every parameter (scale = lr / batch size).
void apply_update(Network& net, const NetGrads& grads, double scale);

std::size_t parameter_count(const Network& net);

// True if the two networks have the same layer kinds and shapes (parameter
// values may differ).
bool same_architecture(const Network& a, const Network& b);

// Output width of the network's last parameterized layer.
std::size_t output_size(const Network& net);

const char* layer_kind_name(const Layer& layer);

// "ef" if any layer is additive, else "classic".
const char* operator_kind(const Network& net);

}  // namespace addnet
