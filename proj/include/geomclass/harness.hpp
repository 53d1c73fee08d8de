#pragma once

#include "geomclass/geometry.hpp"
#include "geomclass/shallow.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace geomclass::harness {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

// Seeded uniform shuffle, then partition. Validation and test respect the
// 1,000-sample floor (train floor 10,000) when the dataset is large enough;
// smaller datasets fall back to 80/10/10. Stratification is off by default.
Split split(std::size_t dataset_size, std::uint64_t seed);

// Per-class proportional split; used by the synthetic benchmark where exact
// class balance in every split is wanted.
Split split_stratified(const std::vector<int>& labels, double train_frac,
                       double val_frac, std::uint64_t seed);

struct ConfusionMatrix {
    std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

    std::size_t total() const;
    std::size_t trace() const;
    double accuracy() const { return static_cast<double>(trace()) / static_cast<double>(total()); }
    std::string to_csv() const;
};

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth);

// Frequency of the training-majority class within the test labels.
double majority_baseline(const std::vector<int>& train_labels,
                         const std::vector<int>& test_labels);

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truth, std::size_t num_classes);

// Hyperparameter lists; the EFD order axis is always searched.
struct GridSpec {
    std::vector<std::size_t> orders{0, 1, 2, 3, 4, 6, 8, 12, 16, 20, 24};
    std::vector<std::size_t> ks;          // knn
    std::vector<double> cs;               // logreg / svm
    std::vector<std::size_t> depths;      // dtree
    std::vector<double> gammas;           // svm

    static GridSpec defaults(shallow::ModelKind kind);
};

struct GridCombination {
    std::size_t order = 0;
    std::size_t k = 0;
    double c = 0.0;
    std::size_t depth = 0;
    double gamma = 0.0;
    double mean_cv_accuracy = 0.0;

    std::string describe(shallow::ModelKind kind) const;
};

struct GridSearchResult {
    GridCombination best;
    std::vector<GridCombination> table;
    std::unique_ptr<shallow::ShallowModel> refit_model;  // refit on full train set
    shallow::Standardizer standardizer;                  // for the refit model
};

// Exhaustive Cartesian product with seeded 5-fold cross validation over the
// training set; SVM and k-NN combinations evaluate on at most subset_cap
// training rows. The winner is refit on the full training set. Ties break by
// smaller order, then the earlier-listed hyperparameter values.
GridSearchResult grid_search(shallow::ModelKind kind,
                             const std::vector<geom::Geometry>& geoms,
                             const std::vector<int>& labels, const GridSpec& grid,
                             std::size_t folds = 5, std::size_t subset_cap = 10'000,
                             std::uint64_t seed = 42,
                             std::size_t svm_max_iter = 10'000'000);

// Feature matrix at the given EFD order, one row per geometry.
shallow::Matrix feature_matrix(const std::vector<geom::Geometry>& geoms,
                               std::size_t order);

struct ComparisonResults {
    double majority = 0.0;
    std::map<std::string, double> shallow_accuracy;        // knn, logreg, svm_rbf, dtree
    std::optional<std::pair<double, double>> cnn;           // mean, std
    std::optional<std::pair<double, double>> rnn;
};

// Seven-row table (majority, four shallow models, CNN, RNN) as aligned text.
std::string report_text(const ComparisonResults& results);
std::string report_csv(const ComparisonResults& results);

}  // namespace geomclass::harness
