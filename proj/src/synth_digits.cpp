#include "addnet/synth_digits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace addnet::synth {

namespace {

struct Pt {
    double x, y;
};

using Strokes = std::vector<std::array<Pt, 2>>;

Strokes polyline(std::initializer_list<Pt> pts) {
    Strokes s;
    auto it = pts.begin();
    for (auto next = std::next(it); next != pts.end(); ++it, ++next)
        s.push_back({*it, *next});
    return s;
}

void append(Strokes& dst, const Strokes& src) { dst.insert(dst.end(), src.begin(), src.end()); }

Strokes ring(double cx, double cy, double rx, double ry, int sides) {
    Strokes s;
    for (int i = 0; i < sides; ++i) {
        const double a0 = 2.0 * M_PI * i / sides;
        const double a1 = 2.0 * M_PI * (i + 1) / sides;
        s.push_back({Pt{cx + rx * std::cos(a0), cy + ry * std::sin(a0)},
                     Pt{cx + rx * std::cos(a1), cy + ry * std::sin(a1)}});
    }
    return s;
}

// Stroke skeletons in a unit box, y growing downward.
const std::array<Strokes, 10>& glyphs() {
    static const std::array<Strokes, 10> g = [] {
        std::array<Strokes, 10> a;
        a[0] = ring(0.5, 0.5, 0.27, 0.40, 10);
        a[1] = polyline({{0.32, 0.26}, {0.52, 0.08}, {0.52, 0.92}});
        a[2] = polyline({{0.22, 0.28}, {0.32, 0.11}, {0.65, 0.09}, {0.78, 0.26},
                         {0.72, 0.45}, {0.22, 0.90}, {0.80, 0.90}});
        a[3] = polyline({{0.24, 0.12}, {0.62, 0.10}, {0.76, 0.26}, {0.54, 0.46},
                         {0.78, 0.66}, {0.62, 0.89}, {0.23, 0.87}});
        a[4] = polyline({{0.62, 0.08}, {0.20, 0.60}, {0.85, 0.60}});
        append(a[4], polyline({{0.66, 0.34}, {0.66, 0.92}}));
        a[5] = polyline({{0.76, 0.10}, {0.27, 0.10}, {0.25, 0.44}, {0.60, 0.42},
                         {0.78, 0.60}, {0.66, 0.87}, {0.24, 0.88}});
        a[6] = polyline({{0.66, 0.09}, {0.38, 0.40}, {0.29, 0.62}});
        append(a[6], ring(0.50, 0.68, 0.21, 0.21, 8));
        a[7] = polyline({{0.20, 0.10}, {0.80, 0.10}, {0.42, 0.90}});
        a[8] = ring(0.50, 0.29, 0.20, 0.18, 8);
        append(a[8], ring(0.50, 0.70, 0.24, 0.21, 8));
        a[9] = ring(0.52, 0.32, 0.21, 0.21, 8);
        append(a[9], polyline({{0.73, 0.34}, {0.66, 0.90}}));
        return a;
    }();
    return g;
}

double dist_to_segment(double px, double py, const Pt& a, const Pt& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double wx = px - a.x, wy = py - a.y;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

void render(int label, Rng& rng, double* pixels) {
    constexpr int kSide = 28;
    const double scale_x = rng.uniform(0.72, 0.95);
    const double scale_y = rng.uniform(0.72, 0.95);
    const double rot = rng.uniform(-0.13, 0.13);
    const double shear = rng.uniform(-0.12, 0.12);
    const double tx = rng.uniform(-1.6, 1.6);
    const double ty = rng.uniform(-1.6, 1.6);
    const double thickness = rng.uniform(1.1, 1.7);
    const double brightness = rng.uniform(0.85, 1.0);
    const double noise_level = rng.uniform(0.01, 0.05);

    const double cr = std::cos(rot), sr = std::sin(rot);
    auto map = [&](const Pt& p) {
        double u = (p.x - 0.5) * kSide, v = (p.y - 0.5) * kSide;
        u += shear * v;
        const double ru = cr * u - sr * v, rv = sr * u + cr * v;
        return Pt{scale_x * ru + kSide / 2.0 + tx, scale_y * rv + kSide / 2.0 + ty};
    };

    Strokes segs;
    for (const auto& s : glyphs()[static_cast<std::size_t>(label)])
        segs.push_back({map(s[0]), map(s[1])});

    constexpr double kEdge = 0.9;  // soft edge width in pixels
    for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x) {
            double dmin = 1e30;
            for (const auto& s : segs)
                dmin = std::min(dmin, dist_to_segment(x + 0.5, y + 0.5, s[0], s[1]));
            double v = std::clamp((thickness - dmin) / kEdge + 0.5, 0.0, 1.0) * brightness;
            v += rng.uniform(0.0, noise_level);
            pixels[y * kSide + x] = std::clamp(v, 0.0, 1.0);
        }
}

}  // namespace

Dataset make_digits(std::size_t n, std::uint64_t seed) {
    Matrix samples(n, 28 * 28);
    std::vector<int> labels(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.next_index(10));
        render(labels[i], rng, samples.data.data() + i * samples.cols);
    }
    return make_dataset(std::move(samples), std::move(labels), 10);
}

void write_idx_corpus(const std::string& dir, std::size_t n_train, std::size_t n_test,
                      std::uint64_t seed) {
    const Dataset train = make_digits(n_train, seed);
    const Dataset test = make_digits(n_test, seed ^ 0x7465737473657421ULL);
    write_idx_images(dir + "/train-images-idx3-ubyte", train.samples, 28, 28);
    write_idx_labels(dir + "/train-labels-idx1-ubyte", train.labels);
    write_idx_images(dir + "/t10k-images-idx3-ubyte", test.samples, 28, 28);
    write_idx_labels(dir + "/t10k-labels-idx1-ubyte", test.labels);
}

}  // namespace addnet::synth
