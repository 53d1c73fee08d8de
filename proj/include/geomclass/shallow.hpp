#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace geomclass::shallow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Train-derived z-score standardizer; constant columns keep std 1.
struct Standardizer {
    Vector mean;
    Vector std;

    static Standardizer fit(const Matrix& X);
    Matrix apply(const Matrix& X) const;
};

enum class ModelKind { knn, logreg, dtree, svm_rbf };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

class ShallowModel {
public:
    virtual ~ShallowModel() = default;
    virtual ModelKind kind() const = 0;
    virtual std::vector<int> predict(const Matrix& X) const = 0;
    // Per-class scores where the model defines them (logreg: probabilities,
    // svm: one-vs-one vote totals); knn/dtree return vote fractions.
    virtual Matrix scores(const Matrix& X) const = 0;
    virtual std::string to_json() const = 0;

    std::size_t num_features() const { return num_features_; }
    std::size_t num_classes() const { return num_classes_; }

protected:
    std::size_t num_features_ = 0;
    std::size_t num_classes_ = 0;
    void check_features(const Matrix& X) const;
};

// Majority vote of the k Euclidean-nearest training rows; ties broken by
// smaller summed distance, then lower class index.
std::unique_ptr<ShallowModel> fit_knn(const Matrix& X, const std::vector<int>& y,
                                      std::size_t k);

// Multinomial softmax regression, cross-entropy + ||W||^2 / (2C) with an
// unregularized bias, full-batch gradient descent with backtracking line
// search. Stops when the gradient infinity norm drops below 1e-6 or after
// 5000 iterations.
std::unique_ptr<ShallowModel> fit_logreg(const Matrix& X, const std::vector<int>& y,
                                         double C);

// CART with Gini impurity; thresholds are midpoints of consecutive sorted
// unique values, ties by lower feature index then lower threshold.
std::unique_ptr<ShallowModel> fit_dtree(const Matrix& X, const std::vector<int>& y,
                                        std::size_t max_depth);

// RBF-kernel SVM trained by SMO (KKT tolerance 1e-3), one-vs-one multiclass
// with aggregate-decision-value tie breaking. Each binary subproblem stops at
// max_iter working-pair updates; hitting the cap flags the model unconverged.
std::unique_ptr<ShallowModel> fit_svm_rbf(const Matrix& X, const std::vector<int>& y,
                                          double C, double gamma,
                                          std::size_t max_iter = 10'000'000);

bool svm_converged(const ShallowModel& model);

std::unique_ptr<ShallowModel> model_from_json(const std::string& text);

}  // namespace geomclass::shallow
