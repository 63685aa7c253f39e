#include "addnet/constructions.hpp"

#include <cmath>

#include "addnet/ef_ops.hpp"

namespace addnet::constructions {

Network build_sign_network(const SignNetSpec& spec) {
    const std::size_t d = spec.y.size();
    if (d < 1) throw ParamError("build_sign_network: dimension must be >= 1");
    for (double v : spec.y)
        if (!std::isfinite(v)) throw ParamError("build_sign_network: non-finite y");
    if (!std::isfinite(spec.bias)) throw ParamError("build_sign_network: non-finite bias");

    Network net;
    net.loss = LossKind::MSE;

    AdditiveDense l1{Matrix(d, 3 * d), Vec(3 * d), Vec(3 * d, 0.0), Activation::Identity};
    for (std::size_t i = 0; i < d; ++i) {
        l1.W.at(i, 3 * i) = 1.0;
        l1.W.at(i, 3 * i + 1) = 1.0;
        l1.W.at(i, 3 * i + 2) = 2.0;
        l1.a[3 * i] = l1.a[3 * i + 1] = l1.a[3 * i + 2] = spec.y[i];
    }
    net.layers.emplace_back(std::move(l1));

    AdditiveDense l2{Matrix(3 * d, 1), Vec{1.0}, Vec{spec.bias}, Activation::Identity};
    for (std::size_t i = 0; i < d; ++i) {
        l2.W.at(3 * i, 0) = 1.0;
        l2.W.at(3 * i + 1, 0) = 1.0;
        l2.W.at(3 * i + 2, 0) = -2.0;
    }
    net.layers.emplace_back(std::move(l2));

    AdditiveDense l3{Matrix(1, 2, {2.0, 1.0}), Vec{1.0, 1.0}, Vec{0.0, 0.0},
                     Activation::Identity};
    net.layers.emplace_back(std::move(l3));

    AdditiveDense l4{Matrix(2, 1, {1.0, -1.0}), Vec{1.0}, Vec{0.0}, Activation::Identity};
    net.layers.emplace_back(std::move(l4));
    return net;
}

AdditiveDense negate_layer(const AdditiveDense& layer) {
    AdditiveDense out = layer;
    for (double& w : out.W.data) w = -w;
    for (double& b : out.b) b = -b;
    return out;
}

AdditiveDense input_negation_layer(const AdditiveDense& layer) {
    AdditiveDense out = layer;
    for (double& w : out.W.data) w = -w;
    return out;
}

double relu_split_residual(const AdditiveDense& layer, const Vec& x) {
    if (layer.activation != Activation::Identity)
        throw ParamError("relu_split_residual: layer must have identity activation");
    Vec pos(x.size()), neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        pos[i] = x[i] > 0.0 ? x[i] : 0.0;
        neg[i] = -x[i] > 0.0 ? -x[i] : 0.0;
    }
    Matrix negW = layer.W;
    for (double& w : negW.data) w = -w;

    const Vec u_pos = ef_matprod(pos, layer.W);
    const Vec u_neg = ef_matprod(neg, negW);
    const Vec u = ef_matprod(x, layer.W);
    double worst = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double lhs = layer.a[j] * u_pos[j] + layer.a[j] * u_neg[j] + layer.b[j];
        const double rhs = layer.a[j] * u[j] + layer.b[j];
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return worst;
}

std::vector<AdditiveDense> pair_form_layers(const Network& net) {
    if (net.layers.empty()) throw ParamError("pair_form_layers: empty network");
    std::vector<AdditiveDense> out;
    out.reserve(net.layers.size());
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto* src = std::get_if<AdditiveDense>(&net.layers[li]);
        if (!src || src->activation != Activation::Identity)
            throw ParamError(
                "pair_form_layers: network must be additive with identity activations");
        const std::size_t d = src->W.rows, M = src->W.cols;
        const bool first = li == 0;
        AdditiveDense conv{Matrix(first ? d : 2 * d, 2 * M), Vec(2 * M), Vec(2 * M),
                           Activation::ReLU};
        for (std::size_t j = 0; j < M; ++j) {
            conv.a[j] = src->a[j];
            conv.a[M + j] = src->a[j];
            conv.b[j] = src->b[j];
            conv.b[M + j] = -src->b[j];
            for (std::size_t i = 0; i < d; ++i) {
                const double w = src->W.at(i, j);
                conv.W.at(i, j) = w;
                conv.W.at(i, M + j) = -w;
                if (!first) {
                    conv.W.at(d + i, j) = -w;
                    conv.W.at(d + i, M + j) = w;
                }
            }
        }
        out.push_back(std::move(conv));
    }
    return out;
}

Network convert_to_relu_network(const Network& net) {
    Network out;
    out.loss = net.loss;
    std::vector<AdditiveDense> pairs = pair_form_layers(net);
    const std::size_t M = pairs.back().W.cols / 2;
    for (AdditiveDense& l : pairs) out.layers.emplace_back(std::move(l));

    // [ReLU(g), ReLU(-g)] -> g; a final ReLU would clip negative outputs.
    ClassicDense recombine{Matrix(2 * M, M), Vec(M, 0.0), Activation::Identity};
    for (std::size_t j = 0; j < M; ++j) {
        recombine.W.at(j, j) = 1.0;
        recombine.W.at(M + j, j) = -1.0;
    }
    out.layers.emplace_back(std::move(recombine));
    return out;
}

Network build_superposition(const SuperpositionSpec& spec, bool relu) {
    const std::size_t n = spec.terms.size();
    if (n < 1) throw ParamError("build_superposition: need at least one term");
    const std::size_t d = spec.terms[0].y.size();
    for (const SuperpositionTerm& t : spec.terms)
        if (t.y.size() != d)
            throw ParamError("build_superposition: mismatched y dimensions");

    // One chain of layers per term; all chains have equal depth.
    std::vector<std::vector<AdditiveDense>> chains;
    chains.reserve(n);
    for (const SuperpositionTerm& t : spec.terms) {
        const Network sub = build_sign_network(SignNetSpec{t.y, t.theta});
        if (relu) {
            chains.push_back(pair_form_layers(sub));
        } else {
            std::vector<AdditiveDense> chain;
            for (const Layer& l : sub.layers) chain.push_back(std::get<AdditiveDense>(l));
            chains.push_back(std::move(chain));
        }
    }

    Network net;
    net.loss = LossKind::MSE;
    const std::size_t depth = chains[0].size();
    for (std::size_t li = 0; li < depth; ++li) {
        std::size_t in_total = 0, out_total = 0;
        for (const auto& chain : chains) {
            in_total += chain[li].W.rows;
            out_total += chain[li].W.cols;
        }
        const bool shared_input = li == 0;  // every chain reads x itself
        AdditiveDense merged{Matrix(shared_input ? d : in_total, out_total),
                             Vec(out_total), Vec(out_total), chains[0][li].activation};
        std::size_t row0 = 0, col0 = 0;
        for (const auto& chain : chains) {
            const AdditiveDense& l = chain[li];
            for (std::size_t i = 0; i < l.W.rows; ++i)
                for (std::size_t j = 0; j < l.W.cols; ++j)
                    merged.W.at((shared_input ? 0 : row0) + i, col0 + j) = l.W.at(i, j);
            for (std::size_t j = 0; j < l.W.cols; ++j) {
                merged.a[col0 + j] = l.a[j];
                merged.b[col0 + j] = l.b[j];
            }
            row0 += l.W.rows;
            col0 += l.W.cols;
        }
        net.layers.emplace_back(std::move(merged));
    }

    // Classic output layer carrying the alphas: weights [alpha] per subnet
    // output, or [alpha, -alpha] against the (g, -g) pair in ReLU form.
    const std::size_t per = relu ? 2 : 1;
    ClassicDense head{Matrix(per * n, 1), Vec{0.0}, Activation::Identity};
    for (std::size_t k = 0; k < n; ++k) {
        if (relu) {
            head.W.at(2 * k, 0) = spec.terms[k].alpha;
            head.W.at(2 * k + 1, 0) = -spec.terms[k].alpha;
        } else {
            head.W.at(k, 0) = spec.terms[k].alpha;
        }
    }
    net.layers.emplace_back(std::move(head));
    return net;
}

// ---------------------------------------------------------------------------
// Exact evaluation.

namespace {

std::vector<exact::Value> exact_dense_additive(const AdditiveDense& l,
                                               const std::vector<exact::Value>& x) {
    if (x.size() != l.W.rows) throw ShapeError("exact_forward: input length mismatch");
    std::vector<exact::Value> out(l.W.cols);
    for (std::size_t j = 0; j < l.W.cols; ++j) {
        exact::Value u;
        for (std::size_t i = 0; i < l.W.rows; ++i)
            u = u.plus(exact::ef_term(x[i], exact::Value(l.W.at(i, j))));
        exact::Value s = u.times(l.a[j]).plus(l.b[j]);
        if (l.activation == Activation::ReLU)
            s = s.sign() > 0 ? s : exact::Value{};
        else if (l.activation != Activation::Identity)
            throw ParamError("exact_forward: only identity/ReLU activations supported");
        out[j] = std::move(s);
    }
    return out;
}

std::vector<exact::Value> exact_dense_classic(const ClassicDense& l,
                                              const std::vector<exact::Value>& x) {
    if (x.size() != l.W.rows) throw ShapeError("exact_forward: input length mismatch");
    std::vector<exact::Value> out(l.W.cols);
    for (std::size_t j = 0; j < l.W.cols; ++j) {
        exact::Value s(l.b[j]);
        for (std::size_t i = 0; i < l.W.rows; ++i) s = s.plus(x[i].times(l.W.at(i, j)));
        if (l.activation == Activation::ReLU)
            s = s.sign() > 0 ? s : exact::Value{};
        else if (l.activation != Activation::Identity)
            throw ParamError("exact_forward: only identity/ReLU activations supported");
        out[j] = std::move(s);
    }
    return out;
}

}  // namespace

std::vector<exact::Value> exact_forward(const Network& net, const Vec& x) {
    std::vector<exact::Value> cur(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cur[i] = exact::Value(x[i]);
    for (const Layer& layer : net.layers) {
        if (const auto* ad = std::get_if<AdditiveDense>(&layer))
            cur = exact_dense_additive(*ad, cur);
        else if (const auto* cd = std::get_if<ClassicDense>(&layer))
            cur = exact_dense_classic(*cd, cur);
        else if (!std::holds_alternative<Flatten>(layer))
            throw ParamError("exact_forward: unsupported layer kind");
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Verification suites.

namespace {

Vec random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    Vec v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

VerifyReport verify_sign_network_exactness(const std::vector<std::size_t>& dims,
                                           std::size_t cases_per_dim, std::uint64_t seed) {
    VerifyReport report;
    report.name = "sign-network exactness";
    Rng rng(seed);
    for (const std::size_t d : dims) {
        for (std::size_t c = 0; c < cases_per_dim; ++c) {
            Vec y, x;
            double bias, t;
            do {
                y = random_vec(rng, d, -1.0, 1.0);
                x = random_vec(rng, d, -1.0, 1.0);
                bias = rng.uniform(-1.0, 1.0);
                t = bias;
                for (std::size_t i = 0; i < d; ++i) t += y[i] * x[i];
            } while (std::fabs(t) <= 1e-9);

            const Network net = build_sign_network(SignNetSpec{y, bias});
            const auto out = exact_forward(net, x);
            ++report.cases;
            const double oracle = sign(t);
            // Exact: the network's real-arithmetic output equals the oracle.
            const bool exact_ok =
                out.size() == 1 && out[0].minus(exact::Value(oracle)).is_zero();
            // The plain double forward must agree in sign off the boundary.
            const Vec dbl = forward(net, x);
            const bool double_ok = dbl.size() == 1 && sign(dbl[0]) == oracle;
            if (!exact_ok || !double_ok) ++report.failures;
        }

        // Boundary pins: y.x + bias == 0 exactly must yield exactly 0.
        {
            const Vec y = random_vec(rng, d, -1.0, 1.0);
            const Network net = build_sign_network(SignNetSpec{y, 0.0});
            const auto out = exact_forward(net, Vec(d, 0.0));
            ++report.boundary_cases;
            if (!(out.size() == 1 && out[0].is_zero())) ++report.boundary_failures;
        }
        if (d >= 2) {
            // x chosen so the contributions cancel exactly: y = (a, a, 0...),
            // x = (c, -c, 0...).
            Vec y(d, 0.0), x(d, 0.0);
            const double a = rng.uniform(0.1, 1.0);
            const double c = rng.uniform(0.1, 1.0);
            y[0] = a;
            y[1] = a;
            x[0] = c;
            x[1] = -c;
            const Network net = build_sign_network(SignNetSpec{y, 0.0});
            const auto out = exact_forward(net, x);
            ++report.boundary_cases;
            if (!(out.size() == 1 && out[0].is_zero())) ++report.boundary_failures;
        }
    }
    return report;
}

VerifyReport verify_relu_conversion(std::size_t num_nets, std::size_t inputs_per_net,
                                    std::uint64_t seed) {
    VerifyReport report;
    report.name = "ReLU conversion equivalence";
    Rng rng(seed);
    for (std::size_t n = 0; n < num_nets; ++n) {
        const std::size_t depth = 1 + rng.next_index(3);
        std::size_t width_in = 1 + rng.next_index(5);
        Network net;
        net.loss = LossKind::MSE;
        for (std::size_t li = 0; li < depth; ++li) {
            const std::size_t width_out = 1 + rng.next_index(5);
            AdditiveDense l{Matrix(width_in, width_out), Vec(width_out), Vec(width_out),
                            Activation::Identity};
            for (double& w : l.W.data) w = rng.uniform(-2.0, 2.0);
            for (double& a : l.a) a = rng.uniform(-2.0, 2.0);
            for (double& b : l.b) b = rng.uniform(-2.0, 2.0);
            net.layers.emplace_back(std::move(l));
            width_in = width_out;
        }
        const Network relu_net = convert_to_relu_network(net);

        // Width doubling is structural.
        for (std::size_t li = 0; li < depth; ++li) {
            const auto& orig = std::get<AdditiveDense>(net.layers[li]);
            const auto& conv = std::get<AdditiveDense>(relu_net.layers[li]);
            ++report.cases;
            if (conv.W.cols != 2 * orig.W.cols || conv.activation != Activation::ReLU)
                ++report.failures;
        }

        const std::size_t in_dim = std::get<AdditiveDense>(net.layers[0]).W.rows;
        for (std::size_t k = 0; k < inputs_per_net; ++k) {
            const Vec x = random_vec(rng, in_dim, -2.0, 2.0);
            const Vec a = forward(net, x);
            const Vec b = forward(relu_net, x);
            ++report.cases;
            if (a.size() != b.size()) {
                ++report.failures;
                continue;
            }
            for (std::size_t j = 0; j < a.size(); ++j)
                if (std::fabs(a[j] - b[j]) > 1e-9) {
                    ++report.failures;
                    break;
                }
        }

        // negation / input-negation / ReLU-split identities on the first layer
        const auto& l0 = std::get<AdditiveDense>(net.layers[0]);
        const AdditiveDense neg = negate_layer(l0);
        const AdditiveDense inn = input_negation_layer(l0);
        for (std::size_t k = 0; k < 3; ++k) {
            const Vec x = random_vec(rng, l0.W.rows, -2.0, 2.0);
            Vec negx(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) negx[i] = -x[i];
            const Vec g = additive_dense_forward(l0, x).first;
            const Vec g1 = additive_dense_forward(neg, x).first;
            const Vec g2 = additive_dense_forward(inn, negx).first;
            ++report.cases;
            bool ok = true;
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (std::fabs(g1[j] + g[j]) > 1e-12) ok = false;
                if (std::fabs(g2[j] - g[j]) > 1e-12) ok = false;
            }
            if (relu_split_residual(l0, x) > 1e-12) ok = false;
            if (!ok) ++report.failures;
        }
    }
    return report;
}

VerifyReport verify_superposition(std::size_t max_terms, std::size_t num_inputs,
                                  std::uint64_t seed, bool relu) {
    VerifyReport report;
    report.name = relu ? "superposition oracle (ReLU form)" : "superposition oracle";
    Rng rng(seed);
    const std::size_t d = 2 + rng.next_index(3);
    for (std::size_t n = 1; n <= max_terms; ++n) {
        SuperpositionSpec spec;
        for (std::size_t k = 0; k < n; ++k)
            spec.terms.push_back(SuperpositionTerm{rng.uniform(-2.0, 2.0),
                                                   random_vec(rng, d, -1.0, 1.0),
                                                   rng.uniform(-1.0, 1.0)});
        const Network net = build_superposition(spec, relu);
        const std::size_t inputs = (num_inputs + max_terms - 1) / max_terms;
        for (std::size_t k = 0; k < inputs; ++k) {
            Vec x;
            bool off_boundary;
            do {
                x = random_vec(rng, d, -1.0, 1.0);
                off_boundary = true;
                for (const SuperpositionTerm& t : spec.terms) {
                    double s = t.theta;
                    for (std::size_t i = 0; i < d; ++i) s += t.y[i] * x[i];
                    if (std::fabs(s) <= 1e-9) off_boundary = false;
                }
            } while (!off_boundary);

            // Direct Eq.-18-style oracle in exact arithmetic: each sign is
            // computed from the exact inner product.
            exact::Value oracle;
            for (const SuperpositionTerm& t : spec.terms) {
                exact::Value s(t.theta);
                for (std::size_t i = 0; i < d; ++i)
                    s = s.plus(exact::Value(x[i]).times(t.y[i]));
                oracle = oracle.plus(exact::Value(t.alpha).times(double(s.sign())));
            }
            const auto out = exact_forward(net, x);
            ++report.cases;
            if (!(out.size() == 1 && out[0].minus(oracle).is_zero())) ++report.failures;
        }
    }
    return report;
}

}  // namespace addnet::constructions
