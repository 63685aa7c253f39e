#include "addnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "addnet/op_counter.hpp"

namespace addnet {

const char* grad_mode_name(GradMode m) {
    return m == GradMode::InputScaled ? "input" : "sign";
}

GradMode grad_mode_from_name(const std::string& name) {
    if (name == "input") return GradMode::InputScaled;
    if (name == "sign") return GradMode::SignConsistent;
    throw ParamError("unknown gradient mode '" + name + "' (expected input|sign)");
}

const char* activation_name(Activation f) {
    switch (f) {
        case Activation::Identity: return "identity";
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ParamError("unknown activation '" + name + "'");
}

Shape3 conv_out_shape(const Shape3& in, std::size_t kh, std::size_t kw,
                      std::size_t stride, std::size_t filters) {
    if (in.h < kh || in.w < kw)
        throw ShapeError("conv: input spatial size smaller than kernel");
    if (stride == 0) throw ParamError("conv: stride must be positive");
    return Shape3{filters, (in.h - kh) / stride + 1, (in.w - kw) / stride + 1};
}

namespace {

void check_dense_shapes(std::size_t xlen, std::size_t rows, std::size_t cols,
                        std::size_t alen, std::size_t blen, const char* who) {
    if (xlen != rows)
        throw ShapeError(std::string(who) + ": input length " + std::to_string(xlen) +
                         " != weight rows " + std::to_string(rows));
    if (cols != blen || (alen != blen && alen != std::size_t(-1)))
        throw ShapeError(std::string(who) + ": inconsistent parameter widths");
}

}  // namespace

std::pair<Vec, DenseCache> additive_dense_forward(const AdditiveDense& layer, const Vec& x) {
    check_dense_shapes(x.size(), layer.W.rows, layer.W.cols, layer.a.size(),
                       layer.b.size(), "additive_dense_forward");
    const std::size_t M = layer.W.cols;
    if (layer.unit_scaling)
        for (double av : layer.a)
            if (av != 1.0)
                throw ParamError("additive dense: unit_scaling set but a != 1");

    Vec u = ef_matprod(x, layer.W);
    Vec s(M);
    if (layer.unit_scaling) {
        for (std::size_t j = 0; j < M; ++j) s[j] = u[j] + layer.b[j];
        ops::thread_counter().adds += M;
    } else {
        for (std::size_t j = 0; j < M; ++j) s[j] = layer.a[j] * u[j] + layer.b[j];
        auto& c = ops::thread_counter();
        c.mults += M;
        c.adds += M;
    }
    Vec y(M);
    for (std::size_t j = 0; j < M; ++j) y[j] = activate(layer.activation, s[j]);
    return {std::move(y), DenseCache{x, std::move(u), std::move(s)}};
}

namespace {

void additive_dense_backward_acc(const AdditiveDense& layer, const DenseCache& cache,
                                 const Vec& upstream, GradMode mode,
                                 AdditiveDenseGrads& g) {
    const std::size_t d = layer.W.rows;
    const std::size_t M = layer.W.cols;
    if (upstream.size() != M)
        throw ShapeError("additive_dense_backward: upstream length mismatch");

    // t[j] = upstream_j * f'(s_j) * a_j, reused by the W and x gradients.
    Vec t(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double up = upstream[j] * activate_deriv(layer.activation, cache.s[j]);
        g.a[j] += up * cache.u[j];
        g.b[j] += up;
        t[j] = up * layer.a[j];
    }
    for (std::size_t i = 0; i < d; ++i) {
        const double xi = cache.x[i];
        const double gi = mode == GradMode::InputScaled ? xi : sign(xi);
        const double* wrow = layer.W.data.data() + i * M;
        double* grow = g.W.data.data() + i * M;
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            grow[j] += gi * t[j];
            if (wrow[j] > 0.0)
                acc += t[j];
            else if (wrow[j] < 0.0)
                acc -= t[j];
        }
        g.x[i] += acc;
    }
}

}  // namespace

AdditiveDenseGrads additive_dense_backward(const AdditiveDense& layer, const DenseCache& cache,
                                           const Vec& upstream, GradMode mode) {
    AdditiveDenseGrads g{Matrix(layer.W.rows, layer.W.cols), Vec(layer.a.size(), 0.0),
                         Vec(layer.b.size(), 0.0), Vec(layer.W.rows, 0.0)};
    additive_dense_backward_acc(layer, cache, upstream, mode, g);
    return g;
}

std::pair<Vec, DenseCache> classic_dense_forward(const ClassicDense& layer, const Vec& x) {
    check_dense_shapes(x.size(), layer.W.rows, layer.W.cols, std::size_t(-1),
                       layer.b.size(), "classic_dense_forward");
    const std::size_t d = layer.W.rows;
    const std::size_t M = layer.W.cols;
    Vec s = layer.b;  // accumulation seeded with the bias: d*M mults, d*M adds
    for (std::size_t i = 0; i < d; ++i) {
        const double xi = x[i];
        const double* row = layer.W.data.data() + i * M;
        for (std::size_t j = 0; j < M; ++j) s[j] += xi * row[j];
    }
    auto& c = ops::thread_counter();
    c.mults += static_cast<std::uint64_t>(d) * M;
    c.adds += static_cast<std::uint64_t>(d) * M;
    Vec y(M);
    for (std::size_t j = 0; j < M; ++j) y[j] = activate(layer.activation, s[j]);
    return {std::move(y), DenseCache{x, Vec{}, std::move(s)}};
}

namespace {

void classic_dense_backward_acc(const ClassicDense& layer, const DenseCache& cache,
                                const Vec& upstream, ClassicDenseGrads& g) {
    const std::size_t d = layer.W.rows;
    const std::size_t M = layer.W.cols;
    if (upstream.size() != M)
        throw ShapeError("classic_dense_backward: upstream length mismatch");
    Vec t(M);
    for (std::size_t j = 0; j < M; ++j) {
        t[j] = upstream[j] * activate_deriv(layer.activation, cache.s[j]);
        g.b[j] += t[j];
    }
    for (std::size_t i = 0; i < d; ++i) {
        const double xi = cache.x[i];
        const double* wrow = layer.W.data.data() + i * M;
        double* grow = g.W.data.data() + i * M;
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            grow[j] += xi * t[j];
            acc += t[j] * wrow[j];
        }
        g.x[i] += acc;
    }
}

}  // namespace

ClassicDenseGrads classic_dense_backward(const ClassicDense& layer, const DenseCache& cache,
                                         const Vec& upstream) {
    ClassicDenseGrads g{Matrix(layer.W.rows, layer.W.cols), Vec(layer.b.size(), 0.0),
                        Vec(layer.W.rows, 0.0)};
    classic_dense_backward_acc(layer, cache, upstream, g);
    return g;
}

// ---------------------------------------------------------------------------
// Convolutions.  Patches are flattened [channel][ky][kx], matching the kernel
// column layout.

namespace {

struct ConvGeom {
    std::size_t k;   // patch length
    std::size_t K;   // filters
    Shape3 out;
    std::size_t P;   // positions per channel
};

ConvGeom conv_geometry(const Shape3& in, std::size_t kh, std::size_t kw, std::size_t stride,
                       const Matrix& kernels, std::size_t blen, std::size_t xlen,
                       const char* who) {
    if (xlen != in.size())
        throw ShapeError(std::string(who) + ": input length " + std::to_string(xlen) +
                         " != feature map size " + std::to_string(in.size()));
    if (kernels.rows != in.c * kh * kw)
        throw ShapeError(std::string(who) + ": kernel rows != c*kh*kw");
    if (kernels.cols != blen)
        throw ShapeError(std::string(who) + ": parameter widths inconsistent");
    const Shape3 out = conv_out_shape(in, kh, kw, stride, kernels.cols);
    return ConvGeom{kernels.rows, kernels.cols, out, out.h * out.w};
}

inline void gather_patch(const Vec& x, const Shape3& in, std::size_t kh, std::size_t kw,
                         std::size_t y0, std::size_t x0, Vec& patch) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < in.c; ++c)
        for (std::size_t ky = 0; ky < kh; ++ky) {
            const double* src = x.data() + (c * in.h + y0 + ky) * in.w + x0;
            for (std::size_t kx = 0; kx < kw; ++kx) patch[idx++] = src[kx];
        }
}

}  // namespace

std::pair<Vec, ConvCache> additive_conv_forward(const AdditiveConv& layer, const Vec& x) {
    const ConvGeom geo =
        conv_geometry(layer.in, layer.kh, layer.kw, layer.stride, layer.kernels,
                      layer.b.size(), x.size(), "additive_conv_forward");
    if (layer.a.size() != geo.K)
        throw ShapeError("additive_conv_forward: a length != filter count");

    Vec out(geo.K * geo.P), u(geo.K * geo.P), s(geo.K * geo.P), patch(geo.k);
    std::size_t p = 0;
    for (std::size_t oy = 0; oy < geo.out.h; ++oy)
        for (std::size_t ox = 0; ox < geo.out.w; ++ox, ++p) {
            gather_patch(x, layer.in, layer.kh, layer.kw, oy * layer.stride,
                         ox * layer.stride, patch);
            const Vec up = ef_matprod(patch, layer.kernels);
            for (std::size_t j = 0; j < geo.K; ++j) {
                const double sj = layer.a[j] * up[j] + layer.b[j];
                u[j * geo.P + p] = up[j];
                s[j * geo.P + p] = sj;
                out[j * geo.P + p] = activate(layer.activation, sj);
            }
        }
    auto& c = ops::thread_counter();
    c.mults += static_cast<std::uint64_t>(geo.K) * geo.P;
    c.adds += static_cast<std::uint64_t>(geo.K) * geo.P;
    return {std::move(out), ConvCache{x, std::move(u), std::move(s)}};
}

namespace {

void additive_conv_backward_acc(const AdditiveConv& layer, const ConvCache& cache,
                                const Vec& upstream, GradMode mode, AdditiveConvGrads& g) {
    const ConvGeom geo =
        conv_geometry(layer.in, layer.kh, layer.kw, layer.stride, layer.kernels,
                      layer.b.size(), cache.x.size(), "additive_conv_backward");
    if (upstream.size() != geo.K * geo.P)
        throw ShapeError("additive_conv_backward: upstream length mismatch");

    Vec patch(geo.k), t(geo.K);
    std::size_t p = 0;
    for (std::size_t oy = 0; oy < geo.out.h; ++oy)
        for (std::size_t ox = 0; ox < geo.out.w; ++ox, ++p) {
            const std::size_t y0 = oy * layer.stride, x0 = ox * layer.stride;
            gather_patch(cache.x, layer.in, layer.kh, layer.kw, y0, x0, patch);
            for (std::size_t j = 0; j < geo.K; ++j) {
                const std::size_t o = j * geo.P + p;
                const double up = upstream[o] * activate_deriv(layer.activation, cache.s[o]);
                g.a[j] += up * cache.u[o];
                g.b[j] += up;
                t[j] = up * layer.a[j];
            }
            std::size_t i = 0;
            for (std::size_t c = 0; c < layer.in.c; ++c)
                for (std::size_t ky = 0; ky < layer.kh; ++ky)
                    for (std::size_t kx = 0; kx < layer.kw; ++kx, ++i) {
                        const double pi = patch[i];
                        const double gi = mode == GradMode::InputScaled ? pi : sign(pi);
                        const double* krow = layer.kernels.data.data() + i * geo.K;
                        double* grow = g.kernels.data.data() + i * geo.K;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < geo.K; ++j) {
                            grow[j] += gi * t[j];
                            if (krow[j] > 0.0)
                                acc += t[j];
                            else if (krow[j] < 0.0)
                                acc -= t[j];
                        }
                        g.x[(c * layer.in.h + y0 + ky) * layer.in.w + x0 + kx] += acc;
                    }
        }
}

}  // namespace

AdditiveConvGrads additive_conv_backward(const AdditiveConv& layer, const ConvCache& cache,
                                         const Vec& upstream, GradMode mode) {
    AdditiveConvGrads g{Matrix(layer.kernels.rows, layer.kernels.cols),
                        Vec(layer.a.size(), 0.0), Vec(layer.b.size(), 0.0),
                        Vec(cache.x.size(), 0.0)};
    additive_conv_backward_acc(layer, cache, upstream, mode, g);
    return g;
}

std::pair<Vec, ConvCache> classic_conv_forward(const ClassicConv& layer, const Vec& x) {
    const ConvGeom geo =
        conv_geometry(layer.in, layer.kh, layer.kw, layer.stride, layer.kernels,
                      layer.b.size(), x.size(), "classic_conv_forward");
    Vec out(geo.K * geo.P), s(geo.K * geo.P), patch(geo.k);
    std::size_t p = 0;
    for (std::size_t oy = 0; oy < geo.out.h; ++oy)
        for (std::size_t ox = 0; ox < geo.out.w; ++ox, ++p) {
            gather_patch(x, layer.in, layer.kh, layer.kw, oy * layer.stride,
                         ox * layer.stride, patch);
            for (std::size_t j = 0; j < geo.K; ++j) {
                double acc = layer.b[j];
                const double* kcol = layer.kernels.data.data();
                for (std::size_t i = 0; i < geo.k; ++i) acc += patch[i] * kcol[i * geo.K + j];
                s[j * geo.P + p] = acc;
                out[j * geo.P + p] = activate(layer.activation, acc);
            }
        }
    auto& c = ops::thread_counter();
    c.mults += static_cast<std::uint64_t>(geo.k) * geo.K * geo.P;
    c.adds += static_cast<std::uint64_t>(geo.k) * geo.K * geo.P;
    return {std::move(out), ConvCache{x, Vec{}, std::move(s)}};
}

namespace {

void classic_conv_backward_acc(const ClassicConv& layer, const ConvCache& cache,
                               const Vec& upstream, ClassicConvGrads& g) {
    const ConvGeom geo =
        conv_geometry(layer.in, layer.kh, layer.kw, layer.stride, layer.kernels,
                      layer.b.size(), cache.x.size(), "classic_conv_backward");
    if (upstream.size() != geo.K * geo.P)
        throw ShapeError("classic_conv_backward: upstream length mismatch");
    Vec patch(geo.k), t(geo.K);
    std::size_t p = 0;
    for (std::size_t oy = 0; oy < geo.out.h; ++oy)
        for (std::size_t ox = 0; ox < geo.out.w; ++ox, ++p) {
            const std::size_t y0 = oy * layer.stride, x0 = ox * layer.stride;
            gather_patch(cache.x, layer.in, layer.kh, layer.kw, y0, x0, patch);
            for (std::size_t j = 0; j < geo.K; ++j) {
                const std::size_t o = j * geo.P + p;
                t[j] = upstream[o] * activate_deriv(layer.activation, cache.s[o]);
                g.b[j] += t[j];
            }
            std::size_t i = 0;
            for (std::size_t c = 0; c < layer.in.c; ++c)
                for (std::size_t ky = 0; ky < layer.kh; ++ky)
                    for (std::size_t kx = 0; kx < layer.kw; ++kx, ++i) {
                        const double pi = patch[i];
                        const double* krow = layer.kernels.data.data() + i * geo.K;
                        double* grow = g.kernels.data.data() + i * geo.K;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < geo.K; ++j) {
                            grow[j] += pi * t[j];
                            acc += t[j] * krow[j];
                        }
                        g.x[(c * layer.in.h + y0 + ky) * layer.in.w + x0 + kx] += acc;
                    }
        }
}

}  // namespace

ClassicConvGrads classic_conv_backward(const ClassicConv& layer, const ConvCache& cache,
                                       const Vec& upstream) {
    ClassicConvGrads g{Matrix(layer.kernels.rows, layer.kernels.cols),
                       Vec(layer.b.size(), 0.0), Vec(cache.x.size(), 0.0)};
    classic_conv_backward_acc(layer, cache, upstream, g);
    return g;
}

std::pair<Vec, PoolCache> maxpool2_forward(const MaxPool2& layer, const Vec& x) {
    const Shape3& in = layer.in;
    if (x.size() != in.size()) throw ShapeError("maxpool2_forward: input length mismatch");
    if (in.h % 2 != 0 || in.w % 2 != 0)
        throw ShapeError("maxpool2_forward: spatial dims must be even");
    const std::size_t oh = in.h / 2, ow = in.w / 2;
    Vec out(in.c * oh * ow);
    PoolCache cache{std::vector<std::size_t>(out.size())};
    for (std::size_t c = 0; c < in.c; ++c)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const std::size_t base = (c * in.h + 2 * oy) * in.w + 2 * ox;
                std::size_t best = base;
                double v = x[base];
                for (const std::size_t cand :
                     {base + 1, base + in.w, base + in.w + 1})
                    if (x[cand] > v) {
                        v = x[cand];
                        best = cand;
                    }
                const std::size_t o = (c * oh + oy) * ow + ox;
                out[o] = v;
                cache.argmax[o] = best;
            }
    return {std::move(out), std::move(cache)};
}

Vec maxpool2_backward(const MaxPool2& layer, const PoolCache& cache, const Vec& upstream) {
    if (upstream.size() != cache.argmax.size())
        throw ShapeError("maxpool2_backward: upstream length mismatch");
    Vec gx(layer.in.size(), 0.0);
    for (std::size_t o = 0; o < upstream.size(); ++o) gx[cache.argmax[o]] += upstream[o];
    return gx;
}

std::pair<double, Vec> softmax_cross_entropy(const Vec& logits, const Vec& onehot) {
    if (logits.size() != onehot.size())
        throw ShapeError("softmax_cross_entropy: length mismatch");
    std::size_t ones = 0, label = 0;
    for (std::size_t i = 0; i < onehot.size(); ++i) {
        if (onehot[i] == 1.0) {
            ++ones;
            label = i;
        } else if (onehot[i] != 0.0) {
            throw ParamError("softmax_cross_entropy: target is not one-hot");
        }
    }
    if (ones != 1) throw ParamError("softmax_cross_entropy: target is not one-hot");

    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    Vec p(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    const double loss = -(logits[label] - m - std::log(z));
    Vec g = std::move(p);
    g[label] -= 1.0;
    return {loss, std::move(g)};
}

std::pair<double, Vec> mse_loss(const Vec& pred, const Vec& target) {
    if (pred.size() != target.size()) throw ShapeError("mse_loss: length mismatch");
    if (pred.empty()) throw ShapeError("mse_loss: empty vectors");
    const double n = static_cast<double>(pred.size());
    double loss = 0.0;
    Vec g(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        loss += d * d;
        g[i] = 2.0 * d / n;
    }
    return {loss / n, std::move(g)};
}

}  // namespace addnet
