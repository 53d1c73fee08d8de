#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geomclass::geom {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Closed vertex ring: first vertex equals last, >= 4 stored vertices.
// Self-intersection is allowed; holes are not representable.
struct Ring {
    std::vector<Point> vertices;
};

// One ring = polygon, several rings = multipolygon.
struct Geometry {
    std::vector<Ring> rings;
    std::string id;

    std::size_t vertex_count() const {
        std::size_t n = 0;
        for (const auto& r : rings) n += r.vertices.size();
        return n;
    }
};

struct GeometryStats {
    double area = 0.0;             // sum of |shoelace| per ring
    std::size_t vertex_count = 0;  // stored vertices incl. closing duplicates
    double boundary_length = 0.0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " at position " + std::to_string(position)),
          position(position) {}
    std::size_t position;
};

// Throws std::invalid_argument when a ring is open, too short or non-finite.
void validate(const Geometry& g);

// WKT POLYGON / MULTIPOLYGON. Polygons with interior rings are rejected.
Geometry parse_wkt(std::string_view text);
std::string to_wkt(const Geometry& g);

// GeoJSON FeatureCollection of Polygon/MultiPolygon features; the label is
// read from the named property of each feature.
std::vector<std::pair<Geometry, std::string>> parse_geojson(
    std::string_view text, const std::string& label_property);

// Arithmetic mean over all stored vertices, closing duplicates included.
Point vertex_mean(const Geometry& g);

GeometryStats stats(const Geometry& g);

// Closed-ring Douglas-Peucker: the ring is split at the vertex farthest from
// the start vertex, both open chains are simplified, and the halves rejoined.
Ring douglas_peucker(const Ring& ring, double epsilon);

// Perpendicular distance from p to segment [a, b].
double point_segment_distance(const Point& p, const Point& a, const Point& b);

}  // namespace geomclass::geom
