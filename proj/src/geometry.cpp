#include "geomclass/geometry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace geomclass::geom {

void validate(const Geometry& g) {
    if (g.rings.empty()) throw std::invalid_argument("geometry has no rings");
    for (const auto& r : g.rings) {
        if (r.vertices.size() < 4)
            throw std::invalid_argument("ring has fewer than 4 stored vertices");
        const Point& first = r.vertices.front();
        const Point& last = r.vertices.back();
        if (first.x != last.x || first.y != last.y)
            throw std::invalid_argument("ring not closed");
        for (const auto& p : r.vertices)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("non-finite coordinate");
    }
}

namespace {

// Minimal recursive-descent WKT reader with position-annotated errors.
class WktReader {
public:
    explicit WktReader(std::string_view text) : text_(text) {}

    Geometry read() {
        skip_ws();
        std::string tag = read_word();
        Geometry g;
        if (tag == "POLYGON") {
            g.rings.push_back(read_polygon());
        } else if (tag == "MULTIPOLYGON") {
            expect('(');
            g.rings.push_back(read_polygon());
            while (peek() == ',') {
                ++pos_;
                g.rings.push_back(read_polygon());
            }
            expect(')');
        } else {
            throw ParseError("unsupported geometry type '" + tag + "'", 0);
        }
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);
        validate(g);
        return g;
    }

private:
    Ring read_polygon() {
        expect('(');
        Ring ring = read_ring();
        if (peek() == ',')
            throw ParseError("interior ring present", pos_);
        expect(')');
        return ring;
    }

    Ring read_ring() {
        expect('(');
        Ring r;
        r.vertices.push_back(read_point());
        while (peek() == ',') {
            ++pos_;
            r.vertices.push_back(read_point());
        }
        expect(')');
        if (r.vertices.size() < 4) throw ParseError("ring too short", pos_);
        const Point& a = r.vertices.front();
        const Point& b = r.vertices.back();
        if (a.x != b.x || a.y != b.y) throw ParseError("ring not closed", pos_);
        return r;
    }

    Point read_point() {
        Point p;
        p.x = read_number();
        p.y = read_number();
        return p;
    }

    double read_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E'))
            ++pos_;
        if (start == pos_) throw ParseError("expected number", pos_);
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc{} || res.ptr != text_.data() + pos_)
            throw ParseError("malformed number", start);
        return value;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    std::string read_word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string format_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Geometry parse_wkt(std::string_view text) { return WktReader(text).read(); }

std::string to_wkt(const Geometry& g) {
    std::string out;
    auto append_ring = [&](const Ring& r) {
        out += "((";
        for (std::size_t i = 0; i < r.vertices.size(); ++i) {
            if (i) out += ", ";
            out += format_coord(r.vertices[i].x);
            out += ' ';
            out += format_coord(r.vertices[i].y);
        }
        out += "))";
    };
    if (g.rings.size() == 1) {
        out = "POLYGON ";
        append_ring(g.rings[0]);
    } else {
        out = "MULTIPOLYGON (";
        for (std::size_t i = 0; i < g.rings.size(); ++i) {
            if (i) out += ", ";
            append_ring(g.rings[i]);
        }
        out += ')';
    }
    return out;
}

std::vector<std::pair<Geometry, std::string>> parse_geojson(
    std::string_view text, const std::string& label_property) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
    }
    if (doc.value("type", "") != "FeatureCollection")
        throw std::invalid_argument("expected a FeatureCollection");

    auto ring_from_coords = [](const nlohmann::json& coords) {
        Ring r;
        for (const auto& pt : coords) {
            if (!pt.is_array() || pt.size() < 2)
                throw std::invalid_argument("malformed coordinate pair");
            r.vertices.push_back({pt[0].get<double>(), pt[1].get<double>()});
        }
        return r;
    };

    std::vector<std::pair<Geometry, std::string>> out;
    std::size_t index = 0;
    for (const auto& feature : doc.value("features", nlohmann::json::array())) {
        const auto& props = feature.value("properties", nlohmann::json::object());
        if (!props.contains(label_property))
            throw std::invalid_argument("feature " + std::to_string(index) +
                                        " missing label property '" + label_property + "'");
        std::string label = props[label_property].is_string()
                                ? props[label_property].get<std::string>()
                                : props[label_property].dump();

        const auto& geometry = feature.at("geometry");
        std::string type = geometry.value("type", "");
        Geometry g;
        if (feature.contains("id"))
            g.id = feature["id"].is_string() ? feature["id"].get<std::string>()
                                             : feature["id"].dump();
        else
            g.id = std::to_string(index);

        const auto& coords = geometry.at("coordinates");
        if (type == "Polygon") {
            if (coords.size() != 1)
                throw std::invalid_argument("interior ring present in feature " +
                                            std::to_string(index));
            g.rings.push_back(ring_from_coords(coords[0]));
        } else if (type == "MultiPolygon") {
            for (const auto& poly : coords) {
                if (poly.size() != 1)
                    throw std::invalid_argument("interior ring present in feature " +
                                                std::to_string(index));
                g.rings.push_back(ring_from_coords(poly[0]));
            }
        } else {
            throw std::invalid_argument("unsupported geometry type '" + type + "'");
        }
        validate(g);
        out.emplace_back(std::move(g), std::move(label));
        ++index;
    }
    return out;
}

Point vertex_mean(const Geometry& g) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const auto& r : g.rings)
        for (const auto& p : r.vertices) {
            sx += p.x;
            sy += p.y;
            ++n;
        }
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

GeometryStats stats(const Geometry& g) {
    GeometryStats s;
    for (const auto& r : g.rings) {
        double twice_area = 0.0;
        for (std::size_t i = 0; i + 1 < r.vertices.size(); ++i) {
            const Point& a = r.vertices[i];
            const Point& b = r.vertices[i + 1];
            twice_area += a.x * b.y - b.x * a.y;
            s.boundary_length += std::hypot(b.x - a.x, b.y - a.y);
        }
        s.area += std::abs(twice_area) * 0.5;
        s.vertex_count += r.vertices.size();
    }
    return s;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace {

// Simplify the open chain vertices[first..last], keeping endpoints.
void dp_open(const std::vector<Point>& v, std::size_t first, std::size_t last,
             double epsilon, std::vector<bool>& keep) {
    if (last <= first + 1) return;
    double max_dist = -1.0;
    std::size_t max_idx = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        double d = point_segment_distance(v[i], v[first], v[last]);
        if (d > max_dist) {
            max_dist = d;
            max_idx = i;
        }
    }
    if (max_dist > epsilon) {
        keep[max_idx] = true;
        dp_open(v, first, max_idx, epsilon, keep);
        dp_open(v, max_idx, last, epsilon, keep);
    }
}

}  // namespace

Ring douglas_peucker(const Ring& ring, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    const auto& v = ring.vertices;
    std::size_t n = v.size();
    if (n <= 4) return ring;

    // Split at the vertex most distant from the start (closing duplicate at
    // index n-1 equals index 0, so search 1..n-2).
    std::size_t split = 1;
    double best = -1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double d = std::hypot(v[i].x - v[0].x, v[i].y - v[0].y);
        if (d > best) {
            best = d;
            split = i;
        }
    }

    std::vector<bool> keep(n, false);
    keep[0] = keep[split] = keep[n - 1] = true;
    dp_open(v, 0, split, epsilon, keep);
    dp_open(v, split, n - 1, epsilon, keep);

    Ring out;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) out.vertices.push_back(v[i]);
    // Degenerate rings can simplify below the 3-distinct-vertex floor;
    // fall back to keeping the straddling vertices.
    if (out.vertices.size() < 4) return ring;
    return out;
}

}  // namespace geomclass::geom
