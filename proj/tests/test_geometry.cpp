#include "doctest.h"

#include "geomclass/geometry.hpp"
#include "geomclass/rng.hpp"

#include <cmath>

using namespace geomclass;
using geom::Geometry;
using geom::Point;
using geom::Ring;

namespace {

Ring make_ring(std::initializer_list<Point> pts) {
    Ring r;
    r.vertices = pts;
    return r;
}

Geometry make_geometry(std::initializer_list<Point> pts) {
    Geometry g;
    g.rings.push_back(make_ring(pts));
    return g;
}

Geometry unit_square() {
    return make_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
}

// Independent shoelace oracle: triangle fan from the first vertex.
double fan_area(const Ring& r) {
    double twice = 0.0;
    const auto& v = r.vertices;
    for (std::size_t i = 1; i + 2 < v.size(); ++i) {
        double ax = v[i].x - v[0].x, ay = v[i].y - v[0].y;
        double bx = v[i + 1].x - v[0].x, by = v[i + 1].y - v[0].y;
        twice += ax * by - bx * ay;
    }
    return std::abs(twice) * 0.5;
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

}  // namespace

TEST_CASE("parse_wkt accepts minimal closed ring") {
    Geometry g = geom::parse_wkt("POLYGON ((0 0, 1 0, 1 1, 0 0))");
    CHECK(g.rings.size() == 1);
    CHECK(g.rings[0].vertices.size() == 4);
}

TEST_CASE("parse_wkt rejects open ring") {
    CHECK_THROWS_AS(geom::parse_wkt("POLYGON ((0 0, 1 0, 1 1))"), geom::ParseError);
}

TEST_CASE("parse_wkt multipolygon") {
    Geometry g =
        geom::parse_wkt("MULTIPOLYGON (((0 0,1 0,1 1,0 0)),((2 2,3 2,3 3,2 2)))");
    CHECK(g.rings.size() == 2);
}

TEST_CASE("parse_wkt rejects holes and bad input") {
    CHECK_THROWS_WITH_AS(
        geom::parse_wkt("POLYGON ((0 0,4 0,4 4,0 0),(1 1,2 1,2 2,1 1))"),
        doctest::Contains("interior ring"), geom::ParseError);
    CHECK_THROWS_AS(geom::parse_wkt("LINESTRING (0 0, 1 1)"), geom::ParseError);
    CHECK_THROWS_AS(geom::parse_wkt("POLYGON ((0 0, 1 x, 1 1, 0 0))"), geom::ParseError);
}

TEST_CASE("wkt round trip is a fixpoint") {
    rng::Rng r(11);
    for (int i = 0; i < 20; ++i) {
        Geometry g;
        g.rings.push_back(random_ring(r, 8));
        if (i % 3 == 0) g.rings.push_back(random_ring(r, 5));
        std::string once = geom::to_wkt(g);
        std::string twice = geom::to_wkt(geom::parse_wkt(once));
        CHECK(once == twice);
    }
}

TEST_CASE("parse_geojson basics") {
    const char* doc = R"({
      "type": "FeatureCollection",
      "features": [
        {"type":"Feature","properties":{"kind":"a"},
         "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
        {"type":"Feature","properties":{"kind":"b"},
         "geometry":{"type":"Polygon","coordinates":[[[2,2],[3,2],[3,3],[2,2]]]}}
      ]})";
    auto entries = geom::parse_geojson(doc, "kind");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].second == "a");
    CHECK(entries[1].second == "b");
}

TEST_CASE("parse_geojson rejects holes, missing labels, bad json") {
    const char* holed = R"({
      "type": "FeatureCollection",
      "features": [
        {"type":"Feature","properties":{"kind":"a"},
         "geometry":{"type":"Polygon","coordinates":[
           [[0,0],[4,0],[4,4],[0,0]],[[1,1],[2,1],[2,2],[1,1]]]}}
      ]})";
    CHECK_THROWS_WITH_AS(geom::parse_geojson(holed, "kind"),
                         doctest::Contains("interior ring"), std::invalid_argument);

    const char* unlabeled = R"({
      "type": "FeatureCollection",
      "features": [
        {"type":"Feature","properties":{},
         "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}
      ]})";
    CHECK_THROWS_AS(geom::parse_geojson(unlabeled, "kind"), std::invalid_argument);
    CHECK_THROWS_AS(geom::parse_geojson("{not json", "kind"), geom::ParseError);
}

TEST_CASE("parse_geojson empty collection") {
    CHECK(geom::parse_geojson(R"({"type":"FeatureCollection","features":[]})", "kind")
              .empty());
}

TEST_CASE("vertex_mean includes the closing duplicate") {
    Point m = geom::vertex_mean(unit_square());
    CHECK(m.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.y == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("vertex_mean matches the published building example") {
    // 5-digit truncated coordinates of the 7-row building ring.
    Geometry g = make_geometry({{4.86447, 52.33384},
                                {4.86447, 52.33386},
                                {4.86456, 52.33386},
                                {4.86456, 52.33386},
                                {4.86423, 52.33405},
                                {4.86423, 52.33405},
                                {4.86447, 52.33384}});
    Point m = geom::vertex_mean(g);
    CHECK(std::abs(m.x - 4.8644271) < 1e-4);
    CHECK(std::abs(m.y - 52.3339057) < 1e-4);
}

TEST_CASE("vertex_mean is translation equivariant") {
    Geometry g = unit_square();
    Point m0 = geom::vertex_mean(g);
    for (auto& p : g.rings[0].vertices) {
        p.x += 10;
        p.y += 10;
    }
    Point m1 = geom::vertex_mean(g);
    CHECK(m1.x == doctest::Approx(m0.x + 10).epsilon(1e-12));
    CHECK(m1.y == doctest::Approx(m0.y + 10).epsilon(1e-12));
}

TEST_CASE("stats on unit square and scaling law") {
    auto st = geom::stats(unit_square());
    CHECK(st.area == doctest::Approx(1.0));
    CHECK(st.boundary_length == doctest::Approx(4.0));
    CHECK(st.vertex_count == 5);

    Geometry big = unit_square();
    for (auto& p : big.rings[0].vertices) {
        p.x *= 2;
        p.y *= 2;
    }
    auto st2 = geom::stats(big);
    CHECK(st2.area == doctest::Approx(4.0));
    CHECK(st2.boundary_length == doctest::Approx(8.0));
}

TEST_CASE("stats: self-intersecting bowtie has zero shoelace area") {
    // Shoelace of the bowtie cancels exactly; |.| of the signed sum is 0.
    Geometry g = make_geometry({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}});
    CHECK(geom::stats(g).area == doctest::Approx(0.0));
}

TEST_CASE("stats area and invariance on random rings") {
    rng::Rng r(5);
    for (int i = 0; i < 30; ++i) {
        Ring ring = random_ring(r, 12);
        Geometry g;
        g.rings.push_back(ring);
        auto st = geom::stats(g);
        CHECK(st.area == doctest::Approx(fan_area(ring)).epsilon(1e-12));

        Geometry shifted = g;
        for (auto& p : shifted.rings[0].vertices) {
            p.x += 123.5;
            p.y -= 77.25;
        }
        auto st2 = geom::stats(shifted);
        CHECK(st2.area == doctest::Approx(st.area).epsilon(1e-9));
        CHECK(st2.boundary_length == doctest::Approx(st.boundary_length).epsilon(1e-9));
    }
}

TEST_CASE("douglas_peucker removes collinear midpoint") {
    Ring r = make_ring({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}});
    Ring out = geom::douglas_peucker(r, 0.1);
    CHECK(out.vertices.size() == 5);
    CHECK(out.vertices.front().x == out.vertices.back().x);
    CHECK(out.vertices.front().y == out.vertices.back().y);
}

TEST_CASE("douglas_peucker epsilon 0 removes only exactly-collinear vertices") {
    Ring r = make_ring({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {1, 2.0001}, {0, 2}, {0, 0}});
    Ring out = geom::douglas_peucker(r, 0.0);
    CHECK(out.vertices.size() == 6);  // the collinear (1,0) dropped, jittered one kept
}

TEST_CASE("douglas_peucker deviation bound on a circle") {
    const int n = 100;
    const double radius = 3.0;
    Ring ring;
    for (int i = 0; i < n; ++i) {
        double ang = 2.0 * M_PI * i / n;
        ring.vertices.push_back({radius * std::cos(ang), radius * std::sin(ang)});
    }
    ring.vertices.push_back(ring.vertices.front());
    double eps = 0.2 * radius;
    Ring out = geom::douglas_peucker(ring, eps);
    CHECK(out.vertices.size() < ring.vertices.size());

    // Every removed vertex lies within eps of the simplified chain; every kept
    // vertex comes from the input (brute force over all segments).
    for (const auto& p : ring.vertices) {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < out.vertices.size(); ++i)
            best = std::min(best, geom::point_segment_distance(p, out.vertices[i],
                                                               out.vertices[i + 1]));
        CHECK(best <= eps + 1e-12);
    }
    for (const auto& p : out.vertices) {
        bool found = false;
        for (const auto& q : ring.vertices)
            if (p.x == q.x && p.y == q.y) found = true;
        CHECK(found);
    }
}
