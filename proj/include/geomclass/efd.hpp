#pragma once

#include "geomclass/geometry.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace geomclass::efd {

// Elliptic Fourier coefficients of a closed contour. Row n-1 holds the
// n-th harmonic (a_n, b_n, c_n, d_n); locus is the DC component (A0, C0).
struct EfdCoefficients {
    std::vector<std::array<double, 4>> harmonics;
    double locus_x = 0.0;  // A0
    double locus_y = 0.0;  // C0

    std::size_t order() const { return harmonics.size(); }
};

// Fixed-length shallow-model input. Layout for order o >= 1:
//   A0, C0, 4*o raw coefficients, 4*o normalized coefficients,
//   area, vertex_count, boundary_length
// and just the three geometry properties for o == 0.
struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> layout;
};

EfdCoefficients efd(const geom::Ring& ring, std::size_t order);

// Kuhl-Giardina normalization: start-position, scale, rotation and
// translation invariant. Result has a1 = 1, b1 = 0, c1 = 0, |d1| <= 1,
// locus (0, 0). The residual semi-major-axis sign ambiguity multiplies
// harmonic n by (-1)^(n+1); comparisons should test both variants.
EfdCoefficients normalize_efd(const EfdCoefficients& c);

// The alternative normalized form under the axis-sign ambiguity.
EfdCoefficients flip_sign_variant(const EfdCoefficients& c);

// Evaluate the truncated Fourier series at `samples` uniform parameter values.
std::vector<geom::Point> reconstruct(const EfdCoefficients& c, std::size_t samples);

// Descriptors computed on the largest-area ring, plus area / vertex count /
// boundary length of the whole geometry.
FeatureVector features(const geom::Geometry& g, std::size_t order);

std::size_t feature_length(std::size_t order);

}  // namespace geomclass::efd
