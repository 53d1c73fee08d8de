#include "geomclass/datagen.hpp"

#include "geomclass/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace geomclass::datagen {

namespace {

constexpr double kTau = 6.283185307179586;

using geom::Point;

std::vector<Point> base_triangle(rng::Rng&) {
    return {{0.0, 1.0}, {-0.866, -0.5}, {0.866, -0.5}};
}

std::vector<Point> base_rectangle(rng::Rng& r) {
    double aspect = r.uniform(1.5, 3.0);
    double h = 1.0 / aspect;
    return {{-1, -h}, {1, -h}, {1, h}, {-1, h}};
}

std::vector<Point> base_ellipse64(rng::Rng& r) {
    double aspect = r.uniform(1.2, 2.5);
    std::vector<Point> pts;
    for (int i = 0; i < 64; ++i) {
        double a = kTau * i / 64;
        pts.push_back({std::cos(a), std::sin(a) / aspect});
    }
    return pts;
}

std::vector<Point> base_lshape(rng::Rng& r) {
    double t = r.uniform(0.3, 0.6);  // leg thickness
    return {{0, 0}, {1, 0}, {1, t}, {t, t}, {t, 1}, {0, 1}};
}

std::vector<Point> base_star5(rng::Rng& r) {
    double inner = r.uniform(0.3, 0.5);
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) {
        double a = kTau * i / 10 + kTau / 4;
        double rad = i % 2 == 0 ? 1.0 : inner;
        pts.push_back({rad * std::cos(a), rad * std::sin(a)});
    }
    return pts;
}

std::vector<Point> base_shape(std::size_t cls, rng::Rng& r) {
    switch (cls) {
        case 0: return base_triangle(r);
        case 1: return base_rectangle(r);
        case 2: return base_ellipse64(r);
        case 3: return base_lshape(r);
        case 4: return base_star5(r);
    }
    throw std::invalid_argument("class index out of range");
}

double diameter(const std::vector<Point>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    return best;
}

geom::Geometry finish(std::vector<Point> pts, rng::Rng& r, double jitter_frac,
                      const std::string& id) {
    double rotation = r.uniform(0.0, kTau);
    double scale = r.uniform(0.5, 2.0);
    double tx = r.uniform(0.0, 100.0);
    double ty = r.uniform(0.0, 100.0);
    std::size_t start = r.below(pts.size());
    double sigma = jitter_frac * diameter(pts);

    double ca = std::cos(rotation), sa = std::sin(rotation);
    geom::Ring ring;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point p = pts[(i + start) % pts.size()];
        if (sigma > 0.0) {
            p.x += r.normal(0.0, sigma);
            p.y += r.normal(0.0, sigma);
        }
        ring.vertices.push_back({scale * (ca * p.x - sa * p.y) + tx,
                                 scale * (sa * p.x + ca * p.y) + ty});
    }
    ring.vertices.push_back(ring.vertices.front());

    geom::Geometry g;
    g.id = id;
    g.rings.push_back(std::move(ring));
    return g;
}

}  // namespace

std::vector<std::string> class_names(std::size_t classes) {
    static const std::vector<std::string> all = {"triangle", "rectangle", "ellipse64",
                                                 "lshape", "star5"};
    if (classes < 2 || classes > all.size())
        throw std::invalid_argument("supported class counts: 2..5");
    return {all.begin(), all.begin() + static_cast<long>(classes)};
}

std::vector<Sample> generate(std::size_t classes, std::size_t per_class,
                             std::uint64_t seed) {
    class_names(classes);  // validates range
    if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");

    rng::Rng root(seed);
    std::vector<Sample> out;
    out.reserve(classes * per_class);
    for (std::size_t cls = 0; cls < classes; ++cls)
        for (std::size_t i = 0; i < per_class; ++i) {
            // independent per-sample stream: parallel-safe and order-stable
            rng::Rng r = root.split(cls * 1'000'003 + i);
            auto pts = base_shape(cls, r);
            Sample s;
            s.label = static_cast<int>(cls);
            s.geometry = finish(std::move(pts), r, 0.02,
                                class_names(classes)[cls] + "-" + std::to_string(i));
            out.push_back(std::move(s));
        }
    return out;
}

std::vector<Sample> generate_hard_pair(std::size_t per_class, std::uint64_t seed,
                                       double overlap) {
    if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
    if (!(overlap >= 0.0 && overlap <= 1.0))
        throw std::invalid_argument("overlap must be in [0, 1]");

    rng::Rng root(seed);
    std::vector<Sample> out;
    out.reserve(2 * per_class);
    for (std::size_t cls = 0; cls < 2; ++cls)
        for (std::size_t i = 0; i < per_class; ++i) {
            rng::Rng r = root.split(cls * 1'000'003 + i);
            double lo = cls == 0 ? 1.0 : 2.0 - overlap;
            double aspect = r.uniform(lo, lo + 1.0);
            double h = 1.0 / aspect;
            std::vector<Point> pts = {{-1, -h}, {1, -h}, {1, h}, {-1, h}};
            Sample s;
            s.label = static_cast<int>(cls);
            s.geometry = finish(std::move(pts), r, 0.0,
                                "rect" + std::to_string(cls) + "-" + std::to_string(i));
            out.push_back(std::move(s));
        }
    return out;
}

double hard_pair_bayes_accuracy(double overlap) {
    // Equal priors, unit-width uniform densities: the minimum-density overlap
    // integral equals the overlap width, giving error overlap / 2.
    return 1.0 - overlap / 2.0;
}

}  // namespace geomclass::datagen
