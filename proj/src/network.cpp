#include "addnet/network.hpp"

#include <algorithm>

namespace addnet {

namespace {

struct ForwardVisitor {
    const Vec& x;
    LayerCache& cache;

    Vec operator()(const AdditiveDense& l) {
        auto [y, c] = additive_dense_forward(l, x);
        cache = std::move(c);
        return std::move(y);
    }
    Vec operator()(const ClassicDense& l) {
        auto [y, c] = classic_dense_forward(l, x);
        cache = std::move(c);
        return std::move(y);
    }
    Vec operator()(const AdditiveConv& l) {
        auto [y, c] = additive_conv_forward(l, x);
        cache = std::move(c);
        return std::move(y);
    }
    Vec operator()(const ClassicConv& l) {
        auto [y, c] = classic_conv_forward(l, x);
        cache = std::move(c);
        return std::move(y);
    }
    Vec operator()(const MaxPool2& l) {
        auto [y, c] = maxpool2_forward(l, x);
        cache = std::move(c);
        return std::move(y);
    }
    Vec operator()(const Flatten&) {
        cache = std::monostate{};
        return x;
    }
};

}  // namespace

ForwardTrace forward_trace(const Network& net, const Vec& x) {
    ForwardTrace trace;
    trace.caches.resize(net.layers.size());
    Vec cur = x;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        cur = std::visit(ForwardVisitor{cur, trace.caches[i]}, net.layers[i]);
    trace.output = std::move(cur);
    return trace;
}

Vec forward(const Network& net, const Vec& x) { return forward_trace(net, x).output; }

NetGrads zero_grads(const Network& net) {
    NetGrads grads(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        LayerGrads& g = grads[i];
        if (const auto* ad = std::get_if<AdditiveDense>(&l)) {
            g.W = Matrix(ad->W.rows, ad->W.cols);
            g.a = Vec(ad->a.size(), 0.0);
            g.b = Vec(ad->b.size(), 0.0);
        } else if (const auto* cd = std::get_if<ClassicDense>(&l)) {
            g.W = Matrix(cd->W.rows, cd->W.cols);
            g.b = Vec(cd->b.size(), 0.0);
        } else if (const auto* ac = std::get_if<AdditiveConv>(&l)) {
            g.W = Matrix(ac->kernels.rows, ac->kernels.cols);
            g.a = Vec(ac->a.size(), 0.0);
            g.b = Vec(ac->b.size(), 0.0);
        } else if (const auto* cc = std::get_if<ClassicConv>(&l)) {
            g.W = Matrix(cc->kernels.rows, cc->kernels.cols);
            g.b = Vec(cc->b.size(), 0.0);
        }
    }
    return grads;
}

Vec backward_accumulate(const Network& net, const ForwardTrace& trace,
                        const Vec& output_grad, GradMode mode, NetGrads& grads) {
    if (grads.size() != net.layers.size())
        throw ShapeError("backward_accumulate: grads/layers size mismatch");
    Vec up = output_grad;
    for (std::size_t i = net.layers.size(); i-- > 0;) {
        const Layer& l = net.layers[i];
        LayerGrads& g = grads[i];
        if (const auto* ad = std::get_if<AdditiveDense>(&l)) {
            auto lg = additive_dense_backward(*ad, std::get<DenseCache>(trace.caches[i]),
                                              up, mode);
            for (std::size_t k = 0; k < lg.W.data.size(); ++k) g.W.data[k] += lg.W.data[k];
            for (std::size_t k = 0; k < lg.a.size(); ++k) g.a[k] += lg.a[k];
            for (std::size_t k = 0; k < lg.b.size(); ++k) g.b[k] += lg.b[k];
            up = std::move(lg.x);
        } else if (const auto* cd = std::get_if<ClassicDense>(&l)) {
            auto lg = classic_dense_backward(*cd, std::get<DenseCache>(trace.caches[i]), up);
            for (std::size_t k = 0; k < lg.W.data.size(); ++k) g.W.data[k] += lg.W.data[k];
            for (std::size_t k = 0; k < lg.b.size(); ++k) g.b[k] += lg.b[k];
            up = std::move(lg.x);
        } else if (const auto* ac = std::get_if<AdditiveConv>(&l)) {
            auto lg = additive_conv_backward(*ac, std::get<ConvCache>(trace.caches[i]),
                                             up, mode);
            for (std::size_t k = 0; k < lg.kernels.data.size(); ++k)
                g.W.data[k] += lg.kernels.data[k];
            for (std::size_t k = 0; k < lg.a.size(); ++k) g.a[k] += lg.a[k];
            for (std::size_t k = 0; k < lg.b.size(); ++k) g.b[k] += lg.b[k];
            up = std::move(lg.x);
        } else if (const auto* cc = std::get_if<ClassicConv>(&l)) {
            auto lg = classic_conv_backward(*cc, std::get<ConvCache>(trace.caches[i]), up);
            for (std::size_t k = 0; k < lg.kernels.data.size(); ++k)
                g.W.data[k] += lg.kernels.data[k];
            for (std::size_t k = 0; k < lg.b.size(); ++k) g.b[k] += lg.b[k];
            up = std::move(lg.x);
        } else if (const auto* mp = std::get_if<MaxPool2>(&l)) {
            up = maxpool2_backward(*mp, std::get<PoolCache>(trace.caches[i]), up);
        }
        // Flatten: gradient passes through unchanged.
    }
    return up;
}

namespace {

template <typename F>
void for_each_param(Network& net, const NetGrads& grads, F&& f) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& l = net.layers[i];
        const LayerGrads& g = grads[i];
        if (auto* ad = std::get_if<AdditiveDense>(&l)) {
            f(ad->W.data, g.W.data);
            f(ad->a, g.a);
            f(ad->b, g.b);
        } else if (auto* cd = std::get_if<ClassicDense>(&l)) {
            f(cd->W.data, g.W.data);
            f(cd->b, g.b);
        } else if (auto* ac = std::get_if<AdditiveConv>(&l)) {
            f(ac->kernels.data, g.W.data);
            f(ac->a, g.a);
            f(ac->b, g.b);
        } else if (auto* cc = std::get_if<ClassicConv>(&l)) {
            f(cc->kernels.data, g.W.data);
            f(cc->b, g.b);
        }
    }
}

}  // namespace

void apply_update(Network& net, const NetGrads& grads, double scale) {
    for_each_param(net, grads, [scale](std::vector<double>& p, const std::vector<double>& g) {
        if (p.size() != g.size()) throw ShapeError("apply_update: gradient shape mismatch");
        for (std::size_t k = 0; k < p.size(); ++k) p[k] -= scale * g[k];
    });
}

std::size_t parameter_count(const Network& net) {
    std::size_t n = 0;
    for (const Layer& l : net.layers) {
        if (const auto* ad = std::get_if<AdditiveDense>(&l))
            n += ad->W.data.size() + ad->a.size() + ad->b.size();
        else if (const auto* cd = std::get_if<ClassicDense>(&l))
            n += cd->W.data.size() + cd->b.size();
        else if (const auto* ac = std::get_if<AdditiveConv>(&l))
            n += ac->kernels.data.size() + ac->a.size() + ac->b.size();
        else if (const auto* cc = std::get_if<ClassicConv>(&l))
            n += cc->kernels.data.size() + cc->b.size();
    }
    return n;
}

bool same_architecture(const Network& a, const Network& b) {
    if (a.layers.size() != b.layers.size() || a.loss != b.loss) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const Layer& la = a.layers[i];
        const Layer& lb = b.layers[i];
        const bool dense_a = std::holds_alternative<AdditiveDense>(la) ||
                             std::holds_alternative<ClassicDense>(la);
        const bool dense_b = std::holds_alternative<AdditiveDense>(lb) ||
                             std::holds_alternative<ClassicDense>(lb);
        const bool conv_a = std::holds_alternative<AdditiveConv>(la) ||
                            std::holds_alternative<ClassicConv>(la);
        const bool conv_b = std::holds_alternative<AdditiveConv>(lb) ||
                            std::holds_alternative<ClassicConv>(lb);
        if (dense_a && dense_b) {
            auto dims = [](const Layer& l) {
                if (const auto* ad = std::get_if<AdditiveDense>(&l))
                    return std::pair{ad->W.rows, ad->W.cols};
                const auto& cd = std::get<ClassicDense>(l);
                return std::pair{cd.W.rows, cd.W.cols};
            };
            if (dims(la) != dims(lb)) return false;
        } else if (conv_a && conv_b) {
            auto dims = [](const Layer& l) {
                if (const auto* ac = std::get_if<AdditiveConv>(&l))
                    return std::tuple{ac->in, ac->kh, ac->kw, ac->kernels.cols};
                const auto& cc = std::get<ClassicConv>(l);
                return std::tuple{cc.in, cc.kh, cc.kw, cc.kernels.cols};
            };
            if (dims(la) != dims(lb)) return false;
        } else if (la.index() != lb.index()) {
            return false;
        } else if (const auto* mp = std::get_if<MaxPool2>(&la)) {
            if (!(mp->in == std::get<MaxPool2>(lb).in)) return false;
        }
    }
    return true;
}

std::size_t output_size(const Network& net) {
    for (std::size_t i = net.layers.size(); i-- > 0;) {
        const Layer& l = net.layers[i];
        if (const auto* ad = std::get_if<AdditiveDense>(&l)) return ad->W.cols;
        if (const auto* cd = std::get_if<ClassicDense>(&l)) return cd->W.cols;
        if (const auto* ac = std::get_if<AdditiveConv>(&l)) {
            const Shape3 o = conv_out_shape(ac->in, ac->kh, ac->kw, ac->stride,
                                            ac->kernels.cols);
            return o.size();
        }
        if (const auto* cc = std::get_if<ClassicConv>(&l)) {
            const Shape3 o = conv_out_shape(cc->in, cc->kh, cc->kw, cc->stride,
                                            cc->kernels.cols);
            return o.size();
        }
    }
    throw ParamError("output_size: network has no parameterized layer");
}

const char* layer_kind_name(const Layer& layer) {
    switch (layer.index()) {
        case 0: return "additive_dense";
        case 1: return "classic_dense";
        case 2: return "additive_conv";
        case 3: return "classic_conv";
        case 4: return "maxpool2";
        case 5: return "flatten";
    }
    return "?";
}

const char* operator_kind(const Network& net) {
    for (const Layer& l : net.layers)
        if (std::holds_alternative<AdditiveDense>(l) || std::holds_alternative<AdditiveConv>(l))
            return "ef";
    return "classic";
}

}  // namespace addnet
