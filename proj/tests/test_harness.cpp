#include "doctest.h"

#include "geomclass/datagen.hpp"
#include "geomclass/efd.hpp"
#include "geomclass/harness.hpp"
#include "geomclass/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

using namespace geomclass;

namespace {

geom::Geometry close_ring(std::vector<geom::Point> pts, const std::string& id) {
    pts.push_back(pts.front());
    geom::Geometry g;
    g.id = id;
    g.rings.push_back({std::move(pts)});
    return g;
}

// Scalene quadrilateral under a random similarity transform; `mirrored`
// flips orientation, which only the Fourier descriptors can see.
geom::Geometry chiral_sample(bool mirrored, rng::Rng& r, const std::string& id) {
    std::vector<geom::Point> base = {{0, 0}, {4, 0}, {3, 2}, {0, 1}};
    if (mirrored)
        for (auto& p : base) p.x = -p.x;
    double a = r.uniform(0.0, 6.2831853);
    double s = r.uniform(0.5, 2.0);
    double tx = r.uniform(-50.0, 50.0), ty = r.uniform(-50.0, 50.0);
    std::size_t shift = r.below(base.size());
    std::vector<geom::Point> pts;
    for (std::size_t i = 0; i < base.size(); ++i) {
        geom::Point p = base[(i + shift) % base.size()];
        pts.push_back({s * (std::cos(a) * p.x - std::sin(a) * p.y) + tx,
                       s * (std::sin(a) * p.x + std::cos(a) * p.y) + ty});
    }
    return close_ring(std::move(pts), id);
}

void check_partition(const harness::Split& s, std::size_t n) {
    std::vector<std::size_t> all;
    all.insert(all.end(), s.train.begin(), s.train.end());
    all.insert(all.end(), s.validation.begin(), s.validation.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    REQUIRE(all.size() == n);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
}

}  // namespace

TEST_CASE("split applies the large-dataset floors") {
    auto s = harness::split(13'208, 1);
    CHECK(s.train.size() == 10'568);
    CHECK(s.validation.size() == 1'320);
    CHECK(s.test.size() == 1'320);
    check_partition(s, 13'208);

    // 80/10/10 would leave the training set under its floor here.
    auto tight = harness::split(12'000, 1);
    CHECK(tight.train.size() == 10'000);
    CHECK(tight.validation.size() == 1'000);
    CHECK(tight.test.size() == 1'000);
}

TEST_CASE("split falls back to 80/10/10 for small datasets") {
    auto s = harness::split(1'000, 3);
    CHECK(s.train.size() == 800);
    CHECK(s.validation.size() == 100);
    CHECK(s.test.size() == 100);
    check_partition(s, 1'000);
    CHECK_THROWS(harness::split(5, 0));
}

TEST_CASE("split is deterministic per seed") {
    auto a = harness::split(500, 42);
    auto b = harness::split(500, 42);
    auto c = harness::split(500, 43);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.train != c.train);
}

TEST_CASE("stratified split balances every class exactly") {
    std::vector<int> labels;
    for (int c = 0; c < 5; ++c) labels.insert(labels.end(), 500, c);
    auto s = harness::split_stratified(labels, 0.8, 0.1, 7);
    CHECK(s.train.size() == 2'000);
    CHECK(s.validation.size() == 250);
    CHECK(s.test.size() == 250);
    check_partition(s, 2'500);
    for (int c = 0; c < 5; ++c) {
        auto count = [&](const std::vector<std::size_t>& part) {
            return std::count_if(part.begin(), part.end(),
                                 [&](std::size_t i) { return labels[i] == c; });
        };
        CHECK(count(s.train) == 400);
        CHECK(count(s.validation) == 50);
        CHECK(count(s.test) == 50);
    }
}

TEST_CASE("accuracy and majority baseline oracles") {
    CHECK(harness::accuracy({1, 0, 2, 2}, {1, 1, 2, 0}) == doctest::Approx(0.5));
    CHECK_THROWS(harness::accuracy({}, {}));
    CHECK_THROWS(harness::accuracy({1}, {1, 2}));

    // majority train class = 1; it covers 2 of 5 test labels
    CHECK(harness::majority_baseline({1, 1, 1, 0, 2}, {1, 1, 0, 2, 0}) ==
          doctest::Approx(0.4));
}

TEST_CASE("confusion matrix counts, trace and accuracy") {
    auto cm = harness::confusion({0, 1, 1, 2, 0}, {0, 1, 2, 2, 1}, 3);
    CHECK(cm.total() == 5);
    CHECK(cm.trace() == 3);
    CHECK(cm.accuracy() == doctest::Approx(0.6));
    CHECK(cm.counts[2][1] == 1);  // true 2 predicted 1
    CHECK(cm.counts[1][0] == 1);

    std::istringstream csv(cm.to_csv());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 4);  // header + one row per class

    CHECK_THROWS(harness::confusion({3}, {0}, 3));
    CHECK_THROWS(harness::confusion({0}, {0, 1}, 2));
}

TEST_CASE("feature matrix has one row per geometry") {
    auto samples = datagen::generate(2, 10, 3);
    std::vector<geom::Geometry> geoms;
    for (const auto& s : samples) geoms.push_back(s.geometry);
    auto X = harness::feature_matrix(geoms, 4);
    CHECK(X.rows() == 20);
    CHECK(static_cast<std::size_t>(X.cols()) == efd::feature_length(4));
    CHECK(X.allFinite());
}

TEST_CASE("grid search picks the order that can see chirality") {
    rng::Rng r(5);
    std::vector<geom::Geometry> geoms;
    std::vector<int> labels;
    for (int cls = 0; cls < 2; ++cls)
        for (int i = 0; i < 40; ++i) {
            geoms.push_back(chiral_sample(cls == 1, r,
                                          "g" + std::to_string(cls * 40 + i)));
            labels.push_back(cls);
        }

    harness::GridSpec grid;
    grid.orders = {0, 1};
    grid.depths = {3};
    auto result = harness::grid_search(shallow::ModelKind::dtree, geoms, labels, grid);
    REQUIRE(result.table.size() == 2);
    CHECK(result.best.order == 1);
    CHECK(result.best.mean_cv_accuracy >= 0.95);
    // mirror-image pairs share every order-0 property
    for (const auto& combo : result.table)
        if (combo.order == 0) CHECK(combo.mean_cv_accuracy < result.best.mean_cv_accuracy);

    auto X = harness::feature_matrix(geoms, result.best.order);
    auto pred = result.refit_model->predict(result.standardizer.apply(X));
    CHECK(harness::accuracy(pred, labels) >= 0.95);
}

TEST_CASE("grid search ties break toward the smaller order") {
    auto samples = datagen::generate(2, 30, 9);  // triangle vs rectangle
    std::vector<geom::Geometry> geoms;
    std::vector<int> labels;
    for (const auto& s : samples) {
        geoms.push_back(s.geometry);
        labels.push_back(s.label);
    }

    harness::GridSpec grid;
    grid.orders = {8, 2, 0};  // deliberately unsorted
    grid.depths = {4};
    auto result = harness::grid_search(shallow::ModelKind::dtree, geoms, labels, grid);
    CHECK(result.best.mean_cv_accuracy == doctest::Approx(1.0));
    CHECK(result.best.order == 0);

    grid.orders = {0, 2, 8};
    auto again = harness::grid_search(shallow::ModelKind::dtree, geoms, labels, grid);
    CHECK(again.best.order == result.best.order);
    CHECK(again.best.mean_cv_accuracy == result.best.mean_cv_accuracy);
}

TEST_CASE("grid search validates its inputs") {
    auto samples = datagen::generate(2, 10, 1);
    std::vector<geom::Geometry> geoms;
    std::vector<int> labels;
    for (const auto& s : samples) {
        geoms.push_back(s.geometry);
        labels.push_back(s.label);
    }
    harness::GridSpec grid;
    grid.depths = {3};
    CHECK_THROWS(harness::grid_search(shallow::ModelKind::dtree, geoms, labels, grid, 1));
    labels.pop_back();
    CHECK_THROWS(harness::grid_search(shallow::ModelKind::dtree, geoms, labels, grid));
    harness::GridSpec empty;
    empty.orders.clear();
    labels.push_back(0);
    CHECK_THROWS(harness::grid_search(shallow::ModelKind::dtree, geoms, labels, empty));
}

TEST_CASE("default grids match the published search ranges") {
    auto knn = harness::GridSpec::defaults(shallow::ModelKind::knn);
    CHECK(knn.ks.front() == 21);
    CHECK(knn.ks.back() == 30);
    auto dtree = harness::GridSpec::defaults(shallow::ModelKind::dtree);
    CHECK(dtree.depths.front() == 4);
    CHECK(dtree.depths.back() == 12);
    auto logreg = harness::GridSpec::defaults(shallow::ModelKind::logreg);
    CHECK(logreg.cs.front() == doctest::Approx(1e-3));
    CHECK(logreg.cs.back() == doctest::Approx(1e3));
    auto svm = harness::GridSpec::defaults(shallow::ModelKind::svm_rbf);
    CHECK(svm.cs.front() == doctest::Approx(1e-2));
    CHECK(svm.cs.back() == doctest::Approx(1e3));
    CHECK(svm.gammas.front() == doctest::Approx(1e-4));
    CHECK(svm.gammas.back() == doctest::Approx(1e4));
}

TEST_CASE("comparison report has the seven-row structure") {
    harness::ComparisonResults results;
    results.majority = 0.2;
    results.shallow_accuracy = {{"knn", 0.81}, {"logreg", 0.77}, {"svm_rbf", 0.84},
                                {"dtree", 0.9}};
    results.cnn = {{0.624, 0.002}};
    results.rnn = {{0.61, 0.004}};

    std::string text = harness::report_text(results);
    std::istringstream in(text);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 8);  // header + 7 method rows
    CHECK(text.find("0.624 ± 0.002") != std::string::npos);
    CHECK(text.find("Majority class") != std::string::npos);

    std::string csv = harness::report_csv(results);
    std::istringstream cin_(csv);
    lines = 0;
    while (std::getline(cin_, line)) ++lines;
    CHECK(lines == 8);
    CHECK(csv.find("cnn,0.624,0.002") != std::string::npos);
}
