#pragma once

#include "geomclass/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace geomclass::datagen {

// Synthetic shape classes: triangle, rectangle, ellipse64, lshape, star5.
// Chosen so the classes are separable from low-order descriptors while
// exercising non-convexity (star, L) and long sequences (ellipse64).
std::vector<std::string> class_names(std::size_t classes);

struct Sample {
    geom::Geometry geometry;
    int label = 0;
};

// Deterministic labeled dataset: per sample a base shape with random uniform
// rotation [0, 2pi), scale [0.5, 2], translation in a 100x100 field, Gaussian
// vertex jitter (sigma = 2% of shape diameter) and a random start-vertex
// rotation. Output order is (class, index); generation is seed-reproducible.
std::vector<Sample> generate(std::size_t classes, std::size_t per_class,
                             std::uint64_t seed);

// Two rectangle classes whose aspect ratios are uniform on unit-width ranges
// overlapping by `overlap` (class 0: [1, 2], class 1: [2 - overlap,
// 3 - overlap]). No vertex jitter, so the Bayes accuracy is exact.
std::vector<Sample> generate_hard_pair(std::size_t per_class, std::uint64_t seed,
                                       double overlap = 0.3);

// Closed-form Bayes-optimal accuracy of the hard-pair task.
double hard_pair_bayes_accuracy(double overlap);

}  // namespace geomclass::datagen
