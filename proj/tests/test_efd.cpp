#include "doctest.h"

#include "geomclass/efd.hpp"
#include "geomclass/rng.hpp"

#include <cmath>

using namespace geomclass;
using efd::EfdCoefficients;
using geom::Point;
using geom::Ring;

namespace {

Ring make_ring(std::initializer_list<Point> pts) {
    Ring r;
    r.vertices = pts;
    return r;
}

Ring unit_square() {
    return make_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
}

Ring random_ring(rng::Rng& r, int n) {
    Ring ring;
    for (int i = 0; i < n; ++i) {
        double ang = 2.0 * M_PI * i / n;
        double rad = r.uniform(0.5, 1.5);
        ring.vertices.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    ring.vertices.push_back(ring.vertices.front());
    return ring;
}

Ring transform(const Ring& ring, double angle, double scale, double tx, double ty,
               int start_shift) {
    Ring out;
    int n = static_cast<int>(ring.vertices.size()) - 1;  // distinct vertices
    double ca = std::cos(angle), sa = std::sin(angle);
    for (int i = 0; i < n; ++i) {
        const Point& p = ring.vertices[(i + start_shift) % n];
        out.vertices.push_back({scale * (ca * p.x - sa * p.y) + tx,
                                scale * (sa * p.x + ca * p.y) + ty});
    }
    out.vertices.push_back(out.vertices.front());
    return out;
}

double max_rel_diff(const EfdCoefficients& a, const EfdCoefficients& b) {
    double worst = 0.0;
    for (std::size_t n = 0; n < a.order(); ++n)
        for (int k = 0; k < 4; ++k) {
            double diff = std::abs(a.harmonics[n][k] - b.harmonics[n][k]);
            double scale = std::max({std::abs(a.harmonics[n][k]),
                                     std::abs(b.harmonics[n][k]), 1.0});
            worst = std::max(worst, diff / scale);
        }
    return worst;
}

double normalized_distance(const EfdCoefficients& a, const EfdCoefficients& b) {
    return std::min(max_rel_diff(a, b), max_rel_diff(a, efd::flip_sign_variant(b)));
}

// Brute-force nearest distance from p to the ring boundary.
double boundary_distance(const Point& p, const Ring& ring) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < ring.vertices.size(); ++i)
        best = std::min(best, geom::point_segment_distance(p, ring.vertices[i],
                                                           ring.vertices[i + 1]));
    return best;
}

double hausdorff_to_ring(const std::vector<Point>& pts, const Ring& ring) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, boundary_distance(p, ring));
    return worst;
}

double reconstruction_rms(const Ring& ring, std::size_t order, std::size_t samples) {
    auto coeffs = efd::efd(ring, order);
    auto pts = efd::reconstruct(coeffs, samples);
    double acc = 0.0;
    for (const auto& p : pts) {
        double d = boundary_distance(p, ring);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pts.size()));
}

}  // namespace

TEST_CASE("efd order 1 of a square is a non-degenerate ellipse") {
    auto c = efd::efd(unit_square(), 1);
    const auto& h = c.harmonics[0];
    CHECK(h[0] * h[0] + h[1] * h[1] > 0.0);
    CHECK(h[2] * h[2] + h[3] * h[3] > 0.0);
}

TEST_CASE("efd translation acts only on the locus") {
    rng::Rng r(2);
    Ring ring = random_ring(r, 10);
    auto c0 = efd::efd(ring, 6);
    Ring moved = ring;
    for (auto& p : moved.vertices) {
        p.x += 13.5;
        p.y -= 4.25;
    }
    auto c1 = efd::efd(moved, 6);
    for (std::size_t n = 0; n < 6; ++n)
        for (int k = 0; k < 4; ++k)
            CHECK(c1.harmonics[n][k] ==
                  doctest::Approx(c0.harmonics[n][k]).epsilon(1e-10));
    CHECK(c1.locus_x == doctest::Approx(c0.locus_x + 13.5).epsilon(1e-10));
    CHECK(c1.locus_y == doctest::Approx(c0.locus_y - 4.25).epsilon(1e-10));
}

TEST_CASE("efd drops zero-length edges") {
    Ring dup = make_ring({{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
    Ring clean = unit_square();
    auto cd = efd::efd(dup, 4);
    auto cc = efd::efd(clean, 4);
    CHECK(max_rel_diff(cd, cc) < 1e-12);
}

TEST_CASE("efd rejects degenerate rings") {
    Ring degenerate = make_ring({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
    CHECK_THROWS_AS(efd::efd(degenerate, 2), std::invalid_argument);
}

TEST_CASE("higher order reconstructs the square better") {
    CHECK(reconstruction_rms(unit_square(), 10, 400) <
          reconstruction_rms(unit_square(), 2, 400));
}

TEST_CASE("normalize_efd forces the first harmonic to (1, 0, 0, d)") {
    rng::Rng r(6);
    for (int i = 0; i < 10; ++i) {
        auto norm = efd::normalize_efd(efd::efd(random_ring(r, 9), 5));
        CHECK(norm.harmonics[0][0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(norm.harmonics[0][1]) < 1e-9);
        CHECK(std::abs(norm.harmonics[0][2]) < 1e-9);
        CHECK(std::abs(norm.harmonics[0][3]) <= 1.0 + 1e-9);
        CHECK(norm.locus_x == 0.0);
        CHECK(norm.locus_y == 0.0);
    }
}

TEST_CASE("normalized descriptors are similarity invariant") {
    rng::Rng r(14);
    for (int i = 0; i < 20; ++i) {
        Ring ring = random_ring(r, 11);
        Ring moved = transform(ring, 37.0 * M_PI / 180.0, 3.0, 5.0, -2.0, 2);
        auto n0 = efd::normalize_efd(efd::efd(ring, 8));
        auto n1 = efd::normalize_efd(efd::efd(moved, 8));
        CHECK(normalized_distance(n0, n1) < 1e-6);
    }
}

TEST_CASE("orientation flip negates the sine coefficients") {
    // Reversing traversal maps t -> T - t, so cos terms (a, c) are unchanged
    // and sin terms (b, d) flip sign.
    rng::Rng r(19);
    Ring ring = random_ring(r, 9);
    Ring reversed;
    reversed.vertices.assign(ring.vertices.rbegin(), ring.vertices.rend());
    auto cf = efd::efd(ring, 5);
    auto cb = efd::efd(reversed, 5);
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(cb.harmonics[n][0] == doctest::Approx(cf.harmonics[n][0]).epsilon(1e-9));
        CHECK(cb.harmonics[n][1] == doctest::Approx(-cf.harmonics[n][1]).epsilon(1e-9));
        CHECK(cb.harmonics[n][2] == doctest::Approx(cf.harmonics[n][2]).epsilon(1e-9));
        CHECK(cb.harmonics[n][3] == doctest::Approx(-cf.harmonics[n][3]).epsilon(1e-9));
    }
}

TEST_CASE("circle 64-gon has axis ratio near 1") {
    Ring ring;
    for (int i = 0; i < 64; ++i) {
        double a = 2.0 * M_PI * i / 64;
        ring.vertices.push_back({std::cos(a), std::sin(a)});
    }
    ring.vertices.push_back(ring.vertices.front());
    auto norm = efd::normalize_efd(efd::efd(ring, 2));
    CHECK(std::abs(std::abs(norm.harmonics[0][3]) - 1.0) < 1e-2);
}

TEST_CASE("reconstruct order 1 yields an exact ellipse") {
    rng::Rng r(8);
    auto c = efd::efd(random_ring(r, 7), 1);
    auto pts = efd::reconstruct(c, 60);
    // Algebraic check: points satisfy the parametric ellipse equation exactly,
    // so the quadratic form through five points fits all with tiny residual.
    // Simpler equivalent: recompute from the parametrization directly.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double t = static_cast<double>(i) / static_cast<double>(pts.size());
        double phase = 2.0 * M_PI * t;
        double x = c.locus_x + c.harmonics[0][0] * std::cos(phase) +
                   c.harmonics[0][1] * std::sin(phase);
        double y = c.locus_y + c.harmonics[0][2] * std::cos(phase) +
                   c.harmonics[0][3] * std::sin(phase);
        CHECK(std::abs(pts[i].x - x) < 1e-9);
        CHECK(std::abs(pts[i].y - y) < 1e-9);
    }
}

TEST_CASE("Hausdorff distance non-increasing over orders 1..4") {
    // Fourier truncation minimizes L2 error, not the sup distance, so single
    // order steps may regress by a hair on spiky contours. Tolerance pinned
    // at 1% of the perimeter per step, with a strict end-to-end check.
    rng::Rng r(31);
    for (int trial = 0; trial < 10; ++trial) {
        Ring ring = random_ring(r, 12);
        geom::Geometry g;
        g.rings.push_back(ring);
        double slack = 0.01 * geom::stats(g).boundary_length;
        double prev = 1e300, first = 0.0, last = 0.0;
        for (std::size_t order = 1; order <= 4; ++order) {
            auto pts = efd::reconstruct(efd::efd(ring, order), 256);
            double h = hausdorff_to_ring(pts, ring);
            CHECK(h <= prev + slack);
            if (order == 1) first = h;
            last = h;
            prev = h;
        }
        CHECK(last <= first);
    }
}

TEST_CASE("order 30 RMS error below 1% of perimeter on a 20-vertex polygon") {
    rng::Rng r(12);
    Ring ring = random_ring(r, 20);
    geom::Geometry g;
    g.rings.push_back(ring);
    double perimeter = geom::stats(g).boundary_length;
    CHECK(reconstruction_rms(ring, 30, 600) < 0.01 * perimeter);
}

TEST_CASE("features layout and lengths") {
    geom::Geometry g;
    g.rings.push_back(unit_square());

    auto f0 = efd::features(g, 0);
    REQUIRE(f0.values.size() == 3);
    CHECK(f0.values[0] == doctest::Approx(1.0));
    CHECK(f0.values[1] == doctest::Approx(5.0));
    CHECK(f0.values[2] == doctest::Approx(4.0));

    auto f4 = efd::features(g, 4);
    CHECK(f4.values.size() == 37);
    CHECK(f4.layout.size() == 37);

    for (std::size_t o : {0u, 1u, 2u, 3u, 4u, 6u, 8u, 12u, 16u, 20u, 24u})
        CHECK(efd::features(g, o).values.size() == efd::feature_length(o));
}

TEST_CASE("features: translated congruent rings share normalized block") {
    rng::Rng r(44);
    Ring ring = random_ring(r, 8);
    geom::Geometry g1, g2;
    g1.rings.push_back(ring);
    Ring moved = ring;
    for (auto& p : moved.vertices) {
        p.x += 7;
        p.y += 11;
    }
    g2.rings.push_back(moved);

    auto f1 = efd::features(g1, 3);
    auto f2 = efd::features(g2, 3);
    for (std::size_t i = 0; i < f1.layout.size(); ++i) {
        if (f1.layout[i].starts_with("norm_"))
            CHECK(f1.values[i] == doctest::Approx(f2.values[i]).epsilon(1e-6));
    }
    CHECK(f1.values[0] != doctest::Approx(f2.values[0]));  // locus differs
}
