#pragma once

#include "geomclass/geometry.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace geomclass::enc {

// 5-wide per-vertex encoding: normalized coordinates plus a one-hot render
// flag. Padding rows are all-zero in all five components.
struct VertexVector {
    double x = 0.0;
    double y = 0.0;
    double r_full = 0.0;   // within-ring vertex
    double r_sub = 0.0;    // last vertex of a non-final ring
    double r_final = 0.0;  // last vertex of the final ring

    bool is_padding() const {
        return x == 0.0 && y == 0.0 && r_full == 0.0 && r_sub == 0.0 && r_final == 0.0;
    }
};

struct GeometrySequence {
    std::vector<VertexVector> vectors;
    int label = -1;
    std::string id;

    std::size_t length() const { return vectors.size(); }
};

// Dataset-level coordinate scale, Kuhl-style population std of the centered
// bounding extrema of every geometry.
struct ScaleFactor {
    double s = 1.0;
};

// Length-uniform padded batch ready for tensor conversion.
struct Batch {
    std::vector<GeometrySequence> sequences;  // all padded to m_bin rows
    std::vector<int> labels;
    std::size_t m_bin = 0;
};

// One VertexVector per stored vertex in ring order, coordinates raw.
GeometrySequence to_sequence(const geom::Geometry& g);

// Centered bounding extrema of all geometries -> population std.
// Throws std::invalid_argument on an empty list or a degenerate (s == 0) set.
ScaleFactor compute_scale_factor(std::span<const geom::Geometry> geoms);

// (p - mean) / s on every real vertex; flags and padding untouched.
GeometrySequence normalize(const GeometrySequence& seq, geom::Point mean, ScaleFactor s);
GeometrySequence denormalize(const GeometrySequence& seq, geom::Point mean, ScaleFactor s);

// Douglas-Peucker with a doubling epsilon schedule until the vertex budget
// is met; geometries at or under budget pass through unchanged.
geom::Geometry simplify_if_needed(const geom::Geometry& g, std::size_t max_points);

// Sort descending by length (ties by id), group into bins of n_bin, pad each
// bin to its own maximum length, then slice bins into batches of batch_size.
std::vector<Batch> bin_and_pad(std::vector<GeometrySequence> seqs,
                               std::size_t batch_size, std::size_t n_bin);

}  // namespace geomclass::enc
