#pragma once

#include <cstddef>
#include <utility>

#include "addnet/activations.hpp"
#include "addnet/ef_ops.hpp"
#include "addnet/tensor.hpp"

namespace addnet {

// Which W-gradient rule an additive layer trains with.  Differentiating the
// scoring function kills the delta terms (they vanish almost surely) and
// leaves a_j * sign(x_i) — SignConsistent, the actual derivative of the
// forward map away from sign boundaries.  InputScaled uses a_j * x_i
// instead, scaling that rule by the input magnitude.
enum class GradMode { InputScaled, SignConsistent };

const char* grad_mode_name(GradMode m);
GradMode grad_mode_from_name(const std::string& name);

// f(a ⊙ (x ◇ W) + b): the additive (ef-operator) neuron bank.  W is d x M,
// a and b are length M.  The a[j]*u[j] scalings are the only multiplications
// in the forward pass; with unit_scaling set (requires a == all ones) they
// are skipped and the pass is multiplication-free.
struct AdditiveDense {
    Matrix W;
    Vec a;
    Vec b;
    Activation activation = Activation::Identity;
    bool unit_scaling = false;
};

// f(xW + b): the classical affine neuron bank (c-operator baseline).
struct ClassicDense {
    Matrix W;
    Vec b;
    Activation activation = Activation::Identity;
};

struct Shape3 {
    std::size_t c = 0, h = 0, w = 0;
    std::size_t size() const { return c * h * w; }
    friend bool operator==(const Shape3&, const Shape3&) = default;
};

// Convolution with the ef-product over each receptive field.  kernels is
// (in.c*kh*kw) x K, one flattened filter per column, patch layout
// [channel][ky][kx]; a and b are per output channel.  One multiplication per
// output position per channel (the a[j] scaling).
struct AdditiveConv {
    Shape3 in;
    std::size_t kh = 0, kw = 0, stride = 1;
    Matrix kernels;
    Vec a;
    Vec b;
    Activation activation = Activation::Identity;
};

// Classical convolution, same geometry.
struct ClassicConv {
    Shape3 in;
    std::size_t kh = 0, kw = 0, stride = 1;
    Matrix kernels;
    Vec b;
    Activation activation = Activation::Identity;
};

// 2x2 non-overlapping max pool per channel; spatial dims must be even.
struct MaxPool2 {
    Shape3 in;
};

// Marker layer: feature maps are already flat vectors, forward is identity.
struct Flatten {};

Shape3 conv_out_shape(const Shape3& in, std::size_t kh, std::size_t kw,
                      std::size_t stride, std::size_t filters);

// ---------------------------------------------------------------------------
// Forward / backward.  Caches record what backward consumes: the input x,
// the ef products u, and the pre-activations s.

struct DenseCache {
    Vec x;
    Vec u;  // x ◇ W (empty for classic layers)
    Vec s;  // pre-activation
};

struct ConvCache {
    Vec x;
    Vec u;  // per output element, channel-major (empty for classic)
    Vec s;
};

struct PoolCache {
    std::vector<std::size_t> argmax;  // input index that won each window
};

struct AdditiveDenseGrads {
    Matrix W;
    Vec a;
    Vec b;
    Vec x;
};

struct ClassicDenseGrads {
    Matrix W;
    Vec b;
    Vec x;
};

struct AdditiveConvGrads {
    Matrix kernels;
    Vec a;
    Vec b;
    Vec x;
};

struct ClassicConvGrads {
    Matrix kernels;
    Vec b;
    Vec x;
};

std::pair<Vec, DenseCache> additive_dense_forward(const AdditiveDense& layer, const Vec& x);
AdditiveDenseGrads additive_dense_backward(const AdditiveDense& layer, const DenseCache& cache,
                                           const Vec& upstream, GradMode mode);

std::pair<Vec, DenseCache> classic_dense_forward(const ClassicDense& layer, const Vec& x);
ClassicDenseGrads classic_dense_backward(const ClassicDense& layer, const DenseCache& cache,
                                         const Vec& upstream);

std::pair<Vec, ConvCache> additive_conv_forward(const AdditiveConv& layer, const Vec& x);
AdditiveConvGrads additive_conv_backward(const AdditiveConv& layer, const ConvCache& cache,
                                         const Vec& upstream, GradMode mode);

std::pair<Vec, ConvCache> classic_conv_forward(const ClassicConv& layer, const Vec& x);
ClassicConvGrads classic_conv_backward(const ClassicConv& layer, const ConvCache& cache,
                                       const Vec& upstream);

std::pair<Vec, PoolCache> maxpool2_forward(const MaxPool2& layer, const Vec& x);
Vec maxpool2_backward(const MaxPool2& layer, const PoolCache& cache, const Vec& upstream);

// ---------------------------------------------------------------------------
// Losses.

// Numerically stable (max-shifted) softmax + cross-entropy against a one-hot
// target.  Returns the loss and the gradient w.r.t. the logits (p - y).
std::pair<double, Vec> softmax_cross_entropy(const Vec& logits, const Vec& onehot);

// loss = (1/n) sum (pred-target)^2; gradient (2/n)(pred-target).
std::pair<double, Vec> mse_loss(const Vec& pred, const Vec& target);

}  // namespace addnet
