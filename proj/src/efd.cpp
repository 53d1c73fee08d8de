#include "geomclass/efd.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geomclass::efd {

namespace {

constexpr double kPi = std::numbers::pi;

struct EdgeWalk {
    std::vector<double> dx, dy, dt, t;  // per edge; t is cumulative, t[0] = dt[0]
    double perimeter = 0.0;
};

// Edge deltas of the closed ring with zero-length edges dropped.
EdgeWalk walk(const geom::Ring& ring) {
    EdgeWalk w;
    const auto& v = ring.vertices;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        double dx = v[i + 1].x - v[i].x;
        double dy = v[i + 1].y - v[i].y;
        double dt = std::hypot(dx, dy);
        if (dt == 0.0) continue;
        acc += dt;
        w.dx.push_back(dx);
        w.dy.push_back(dy);
        w.dt.push_back(dt);
        w.t.push_back(acc);
    }
    w.perimeter = acc;
    if (w.dx.size() < 2 || !(w.perimeter > 0.0))
        throw std::invalid_argument("degenerate ring for EFD");
    return w;
}

}  // namespace

EfdCoefficients efd(const geom::Ring& ring, std::size_t order) {
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    EdgeWalk w = walk(ring);
    const double T = w.perimeter;
    const std::size_t ne = w.dx.size();

    EfdCoefficients c;
    c.harmonics.assign(order, {0.0, 0.0, 0.0, 0.0});
    for (std::size_t n = 1; n <= order; ++n) {
        const double k = T / (2.0 * static_cast<double>(n * n) * kPi * kPi);
        const double f = 2.0 * static_cast<double>(n) * kPi / T;
        double a = 0.0, b = 0.0, cc = 0.0, d = 0.0;
        for (std::size_t p = 0; p < ne; ++p) {
            double t0 = p == 0 ? 0.0 : w.t[p - 1];
            double cos1 = std::cos(f * w.t[p]), cos0 = std::cos(f * t0);
            double sin1 = std::sin(f * w.t[p]), sin0 = std::sin(f * t0);
            double vx = w.dx[p] / w.dt[p];
            double vy = w.dy[p] / w.dt[p];
            a += vx * (cos1 - cos0);
            b += vx * (sin1 - sin0);
            cc += vy * (cos1 - cos0);
            d += vy * (sin1 - sin0);
        }
        c.harmonics[n - 1] = {k * a, k * b, k * cc, k * d};
    }

    // DC component so reconstruction starts from the ring's own location.
    double a0 = 0.0, c0 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t p = 0; p < ne; ++p) {
        double t0 = p == 0 ? 0.0 : w.t[p - 1];
        double xi = cx - (w.dx[p] / w.dt[p]) * t0;
        double delta = cy - (w.dy[p] / w.dt[p]) * t0;
        double dt2 = w.t[p] * w.t[p] - t0 * t0;
        a0 += (w.dx[p] / (2.0 * w.dt[p])) * dt2 + xi * w.dt[p];
        c0 += (w.dy[p] / (2.0 * w.dt[p])) * dt2 + delta * w.dt[p];
        cx += w.dx[p];
        cy += w.dy[p];
    }
    c.locus_x = ring.vertices.front().x + a0 / T;
    c.locus_y = ring.vertices.front().y + c0 / T;
    return c;
}

EfdCoefficients normalize_efd(const EfdCoefficients& c) {
    if (c.order() < 1) throw std::invalid_argument("need at least one harmonic");
    const auto& h1 = c.harmonics[0];
    double a1 = h1[0], b1 = h1[1], c1 = h1[2], d1 = h1[3];
    if (a1 * a1 + b1 * b1 + c1 * c1 + d1 * d1 == 0.0)
        throw std::invalid_argument("degenerate first ellipse");

    // Phase of the first ellipse: rotates the parameter start.
    double theta = 0.5 * std::atan2(2.0 * (a1 * b1 + c1 * d1),
                                    a1 * a1 - b1 * b1 + c1 * c1 - d1 * d1);

    EfdCoefficients out;
    out.harmonics.resize(c.order());
    for (std::size_t n = 1; n <= c.order(); ++n) {
        const auto& h = c.harmonics[n - 1];
        double ct = std::cos(static_cast<double>(n) * theta);
        double st = std::sin(static_cast<double>(n) * theta);
        out.harmonics[n - 1] = {h[0] * ct + h[1] * st, -h[0] * st + h[1] * ct,
                                h[2] * ct + h[3] * st, -h[2] * st + h[3] * ct};
    }

    // Orientation of the semi-major axis: rotates the coordinate frame.
    double psi = std::atan2(out.harmonics[0][2], out.harmonics[0][0]);
    double cp = std::cos(psi), sp = std::sin(psi);
    for (auto& h : out.harmonics) {
        double a = cp * h[0] + sp * h[2];
        double b = cp * h[1] + sp * h[3];
        double cc = -sp * h[0] + cp * h[2];
        double d = -sp * h[1] + cp * h[3];
        h = {a, b, cc, d};
    }

    double size = out.harmonics[0][0];
    if (size == 0.0) throw std::invalid_argument("degenerate first ellipse");
    double scale = std::abs(size);
    for (auto& h : out.harmonics)
        for (double& v : h) v /= scale;
    if (out.harmonics[0][0] < 0.0) {
        // Force a1 > 0 by flipping the axis direction (psi + pi).
        for (auto& h : out.harmonics)
            for (double& v : h) v = -v;
    }
    out.locus_x = 0.0;
    out.locus_y = 0.0;
    return out;
}

EfdCoefficients flip_sign_variant(const EfdCoefficients& c) {
    // theta -> theta + pi multiplies harmonic n by (-1)^n; restoring a1 > 0
    // then negates everything, net factor (-1)^(n+1).
    EfdCoefficients out = c;
    for (std::size_t n = 1; n <= out.order(); ++n) {
        if (n % 2 == 0)
            for (double& v : out.harmonics[n - 1]) v = -v;
    }
    return out;
}

std::vector<geom::Point> reconstruct(const EfdCoefficients& c, std::size_t samples) {
    if (samples < 3) throw std::invalid_argument("samples must be >= 3");
    std::vector<geom::Point> pts(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(samples);
        double x = c.locus_x, y = c.locus_y;
        for (std::size_t n = 1; n <= c.order(); ++n) {
            double phase = 2.0 * kPi * static_cast<double>(n) * t;
            const auto& h = c.harmonics[n - 1];
            x += h[0] * std::cos(phase) + h[1] * std::sin(phase);
            y += h[2] * std::cos(phase) + h[3] * std::sin(phase);
        }
        pts[i] = {x, y};
    }
    return pts;
}

std::size_t feature_length(std::size_t order) {
    return order == 0 ? 3 : 3 + 8 * order + 2;
}

FeatureVector features(const geom::Geometry& g, std::size_t order) {
    geom::GeometryStats st = geom::stats(g);

    FeatureVector fv;
    if (order >= 1) {
        // Multipolygons: descriptors of the largest-area ring.
        const geom::Ring* ring = &g.rings.front();
        if (g.rings.size() > 1) {
            double best = -1.0;
            for (const auto& r : g.rings) {
                geom::Geometry tmp;
                tmp.rings.push_back(r);
                double area = geom::stats(tmp).area;
                if (area > best) {
                    best = area;
                    ring = &r;
                }
            }
        }
        EfdCoefficients raw = efd(*ring, order);
        EfdCoefficients norm = normalize_efd(raw);

        fv.values.push_back(raw.locus_x);
        fv.layout.push_back("locus_a0");
        fv.values.push_back(raw.locus_y);
        fv.layout.push_back("locus_c0");
        static const char* names[4] = {"a", "b", "c", "d"};
        for (std::size_t n = 1; n <= order; ++n)
            for (int k = 0; k < 4; ++k) {
                fv.values.push_back(raw.harmonics[n - 1][k]);
                fv.layout.push_back(std::string("raw_") + names[k] + std::to_string(n));
            }
        for (std::size_t n = 1; n <= order; ++n)
            for (int k = 0; k < 4; ++k) {
                fv.values.push_back(norm.harmonics[n - 1][k]);
                fv.layout.push_back(std::string("norm_") + names[k] + std::to_string(n));
            }
    }
    fv.values.push_back(st.area);
    fv.layout.push_back("area");
    fv.values.push_back(static_cast<double>(st.vertex_count));
    fv.layout.push_back("vertex_count");
    fv.values.push_back(st.boundary_length);
    fv.layout.push_back("boundary_length");
    return fv;
}

}  // namespace geomclass::efd
