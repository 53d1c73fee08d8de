#include "geomclass/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geomclass::enc {

GeometrySequence to_sequence(const geom::Geometry& g) {
    GeometrySequence seq;
    seq.id = g.id;
    for (std::size_t ri = 0; ri < g.rings.size(); ++ri) {
        const auto& verts = g.rings[ri].vertices;
        const bool final_ring = (ri + 1 == g.rings.size());
        for (std::size_t vi = 0; vi < verts.size(); ++vi) {
            VertexVector v;
            v.x = verts[vi].x;
            v.y = verts[vi].y;
            const bool last = (vi + 1 == verts.size());
            if (!last)
                v.r_full = 1.0;
            else if (final_ring)
                v.r_final = 1.0;
            else
                v.r_sub = 1.0;
            seq.vectors.push_back(v);
        }
    }
    return seq;
}

ScaleFactor compute_scale_factor(std::span<const geom::Geometry> geoms) {
    if (geoms.empty()) throw std::invalid_argument("empty geometry list");
    std::vector<double> bounds;
    bounds.reserve(geoms.size() * 2);
    for (const auto& g : geoms) {
        geom::Point mean = geom::vertex_mean(g);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : g.rings)
            for (const auto& p : r.vertices) {
                lo = std::min({lo, p.x - mean.x, p.y - mean.y});
                hi = std::max({hi, p.x - mean.x, p.y - mean.y});
            }
        bounds.push_back(lo);
        bounds.push_back(hi);
    }
    double mean = 0.0;
    for (double b : bounds) mean += b;
    mean /= static_cast<double>(bounds.size());
    double var = 0.0;
    for (double b : bounds) var += (b - mean) * (b - mean);
    var /= static_cast<double>(bounds.size());  // population std (ddof = 0)
    double s = std::sqrt(var);
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("degenerate dataset: scale factor is zero");
    return {s};
}

GeometrySequence normalize(const GeometrySequence& seq, geom::Point mean, ScaleFactor s) {
    if (!(s.s > 0.0)) throw std::invalid_argument("scale factor must be positive");
    GeometrySequence out = seq;
    for (auto& v : out.vectors) {
        if (v.is_padding()) continue;
        v.x = (v.x - mean.x) / s.s;
        v.y = (v.y - mean.y) / s.s;
    }
    return out;
}

GeometrySequence denormalize(const GeometrySequence& seq, geom::Point mean, ScaleFactor s) {
    if (!(s.s > 0.0)) throw std::invalid_argument("scale factor must be positive");
    GeometrySequence out = seq;
    for (auto& v : out.vectors) {
        if (v.is_padding()) continue;
        v.x = v.x * s.s + mean.x;
        v.y = v.y * s.s + mean.y;
    }
    return out;
}

geom::Geometry simplify_if_needed(const geom::Geometry& g, std::size_t max_points) {
    if (max_points < 8) throw std::invalid_argument("max_points must be >= 8");
    if (g.vertex_count() <= max_points) return g;

    geom::GeometryStats st = geom::stats(g);
    double epsilon = (st.boundary_length / static_cast<double>(st.vertex_count)) * 0.01;
    for (int attempt = 0; attempt < 60; ++attempt) {
        geom::Geometry out;
        out.id = g.id;
        for (const auto& r : g.rings)
            out.rings.push_back(geom::douglas_peucker(r, epsilon));
        if (out.vertex_count() <= max_points) return out;
        epsilon *= 2.0;
    }
    throw std::runtime_error("simplify_if_needed: vertex budget not met after 60 doublings");
}

std::vector<Batch> bin_and_pad(std::vector<GeometrySequence> seqs,
                               std::size_t batch_size, std::size_t n_bin) {
    if (seqs.empty()) throw std::invalid_argument("empty sequence list");
    if (batch_size < 1 || n_bin < batch_size)
        throw std::invalid_argument("require n_bin >= batch_size >= 1");

    std::stable_sort(seqs.begin(), seqs.end(),
                     [](const GeometrySequence& a, const GeometrySequence& b) {
                         if (a.length() != b.length()) return a.length() > b.length();
                         return a.id < b.id;
                     });

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < seqs.size(); start += n_bin) {
        std::size_t end = std::min(start + n_bin, seqs.size());
        std::size_t m_bin = seqs[start].length();  // bin maximum, sorted descending
        for (std::size_t bstart = start; bstart < end; bstart += batch_size) {
            std::size_t bend = std::min(bstart + batch_size, end);
            Batch batch;
            batch.m_bin = m_bin;
            for (std::size_t i = bstart; i < bend; ++i) {
                GeometrySequence padded = seqs[i];
                padded.vectors.resize(m_bin);  // zero rows appended
                batch.labels.push_back(padded.label);
                batch.sequences.push_back(std::move(padded));
            }
            batches.push_back(std::move(batch));
        }
    }
    return batches;
}

}  // namespace geomclass::enc
