#include "addnet/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace addnet {

namespace {

using nlohmann::json;

json shape_json(const Shape3& s) { return json::array({s.c, s.h, s.w}); }

Shape3 shape_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("checkpoint: bad shape triple");
    return Shape3{j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw FormatError(std::string("checkpoint: non-finite value in ") + what);
}

json layer_json(const Layer& layer) {
    json j;
    j["kind"] = layer_kind_name(layer);
    if (const auto* ad = std::get_if<AdditiveDense>(&layer)) {
        j["activation"] = activation_name(ad->activation);
        j["rows"] = ad->W.rows;
        j["cols"] = ad->W.cols;
        j["W"] = ad->W.data;
        j["a"] = ad->a;
        j["b"] = ad->b;
    } else if (const auto* cd = std::get_if<ClassicDense>(&layer)) {
        j["activation"] = activation_name(cd->activation);
        j["rows"] = cd->W.rows;
        j["cols"] = cd->W.cols;
        j["W"] = cd->W.data;
        j["b"] = cd->b;
    } else if (const auto* ac = std::get_if<AdditiveConv>(&layer)) {
        j["activation"] = activation_name(ac->activation);
        j["in"] = shape_json(ac->in);
        j["kh"] = ac->kh;
        j["kw"] = ac->kw;
        j["stride"] = ac->stride;
        j["filters"] = ac->kernels.cols;
        j["kernels"] = ac->kernels.data;
        j["a"] = ac->a;
        j["b"] = ac->b;
    } else if (const auto* cc = std::get_if<ClassicConv>(&layer)) {
        j["activation"] = activation_name(cc->activation);
        j["in"] = shape_json(cc->in);
        j["kh"] = cc->kh;
        j["kw"] = cc->kw;
        j["stride"] = cc->stride;
        j["filters"] = cc->kernels.cols;
        j["kernels"] = cc->kernels.data;
        j["b"] = cc->b;
    } else if (const auto* mp = std::get_if<MaxPool2>(&layer)) {
        j["in"] = shape_json(mp->in);
    }
    return j;
}

Layer layer_from(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    auto vec = [&](const char* key) { return j.at(key).get<std::vector<double>>(); };
    if (kind == "additive_dense") {
        AdditiveDense l;
        l.activation = activation_from_name(j.at("activation").get<std::string>());
        l.W = Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), vec("W"));
        l.a = vec("a");
        l.b = vec("b");
        check_finite(l.W.data, "W");
        check_finite(l.a, "a");
        check_finite(l.b, "b");
        if (l.a.size() != l.W.cols || l.b.size() != l.W.cols)
            throw FormatError("checkpoint: additive_dense widths inconsistent");
        return l;
    }
    if (kind == "classic_dense") {
        ClassicDense l;
        l.activation = activation_from_name(j.at("activation").get<std::string>());
        l.W = Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), vec("W"));
        l.b = vec("b");
        check_finite(l.W.data, "W");
        check_finite(l.b, "b");
        if (l.b.size() != l.W.cols)
            throw FormatError("checkpoint: classic_dense widths inconsistent");
        return l;
    }
    if (kind == "additive_conv" || kind == "classic_conv") {
        const Shape3 in = shape_from(j.at("in"));
        const auto kh = j.at("kh").get<std::size_t>();
        const auto kw = j.at("kw").get<std::size_t>();
        const auto stride = j.at("stride").get<std::size_t>();
        const auto filters = j.at("filters").get<std::size_t>();
        Matrix kernels(in.c * kh * kw, filters, vec("kernels"));
        check_finite(kernels.data, "kernels");
        const Activation act = activation_from_name(j.at("activation").get<std::string>());
        if (kind == "additive_conv") {
            AdditiveConv l{in, kh, kw, stride, std::move(kernels), vec("a"), vec("b"), act};
            check_finite(l.a, "a");
            check_finite(l.b, "b");
            return l;
        }
        return ClassicConv{in, kh, kw, stride, std::move(kernels), vec("b"), act};
    }
    if (kind == "maxpool2") return MaxPool2{shape_from(j.at("in"))};
    if (kind == "flatten") return Flatten{};
    throw FormatError("checkpoint: unknown layer kind '" + kind + "'");
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path,
                     const std::map<std::string, std::string>& config) {
    json j;
    j["format"] = "addnet-checkpoint";
    j["version"] = kCheckpointVersion;
    j["operator"] = operator_kind(net);
    j["loss"] = net.loss == LossKind::CrossEntropy ? "cross_entropy" : "mse";
    j["layers"] = json::array();
    for (const Layer& l : net.layers) j["layers"].push_back(layer_json(l));
    j["config"] = config;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open checkpoint for writing: " + path);
    out << j.dump(1) << '\n';
    if (!out) throw FormatError("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("checkpoint parse error in " + path + ": " + e.what());
    }
    if (j.value("format", "") != "addnet-checkpoint")
        throw FormatError("checkpoint: missing format tag in " + path);
    const int version = j.value("version", -1);
    if (version != kCheckpointVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");

    LoadedCheckpoint loaded;
    const std::string loss = j.at("loss").get<std::string>();
    if (loss == "cross_entropy")
        loaded.net.loss = LossKind::CrossEntropy;
    else if (loss == "mse")
        loaded.net.loss = LossKind::MSE;
    else
        throw FormatError("checkpoint: unknown loss kind '" + loss + "'");
    for (const json& lj : j.at("layers")) loaded.net.layers.push_back(layer_from(lj));
    if (j.contains("config"))
        loaded.config = j.at("config").get<std::map<std::string, std::string>>();
    return loaded;
}

}  // namespace addnet
