#include "geomclass/shallow.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace geomclass::shallow {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

std::vector<int> labels_from(const std::vector<int>& y) {
    if (y.empty()) throw std::invalid_argument("empty label vector");
    return y;
}

std::size_t count_classes(const std::vector<int>& y) {
    int top = 0;
    for (int label : y) {
        if (label < 0) throw std::invalid_argument("negative class label");
        top = std::max(top, label);
    }
    return static_cast<std::size_t>(top) + 1;
}

void check_finite(const Matrix& X) {
    if (!X.allFinite()) throw std::invalid_argument("non-finite feature values");
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j].get<double>();
    return m;
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& X) {
    if (X.rows() == 0) throw std::invalid_argument("cannot standardize empty matrix");
    check_finite(X);
    Standardizer s;
    s.mean = X.colwise().mean();
    Matrix centered = X.rowwise() - s.mean.transpose();
    s.std = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < s.std.size(); ++j)
        if (s.std(j) == 0.0) s.std(j) = 1.0;
    return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
    if (X.cols() != mean.size())
        throw std::invalid_argument("feature dimension mismatch in standardizer");
    return (X.rowwise() - mean.transpose()).array().rowwise() /
           std.transpose().array();
}

void ShallowModel::check_features(const Matrix& X) const {
    if (static_cast<std::size_t>(X.cols()) != num_features_)
        throw std::invalid_argument("feature dimension mismatch");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::knn: return "knn";
        case ModelKind::logreg: return "logreg";
        case ModelKind::dtree: return "dtree";
        case ModelKind::svm_rbf: return "svm_rbf";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "knn") return ModelKind::knn;
    if (name == "logreg") return ModelKind::logreg;
    if (name == "dtree") return ModelKind::dtree;
    if (name == "svm_rbf" || name == "svm") return ModelKind::svm_rbf;
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

// ---------------------------------------------------------------- k-NN

namespace {

class KnnModel final : public ShallowModel {
public:
    KnnModel(Matrix X, std::vector<int> y, std::size_t k)
        : X_(std::move(X)), y_(std::move(y)), k_(k) {
        num_features_ = X_.cols();
        num_classes_ = count_classes(y_);
    }

    ModelKind kind() const override { return ModelKind::knn; }

    Matrix scores(const Matrix& Q) const override {
        check_features(Q);
        Matrix out = Matrix::Zero(Q.rows(), num_classes_);
        for (Eigen::Index q = 0; q < Q.rows(); ++q) {
            auto votes = vote(Q.row(q));
            for (std::size_t c = 0; c < num_classes_; ++c)
                out(q, c) = static_cast<double>(votes.first[c]) / static_cast<double>(k_);
        }
        return out;
    }

    std::vector<int> predict(const Matrix& Q) const override {
        check_features(Q);
        std::vector<int> out(Q.rows());
        for (Eigen::Index q = 0; q < Q.rows(); ++q) {
            auto [votes, dist] = vote(Q.row(q));
            int best = 0;
            for (std::size_t c = 1; c < num_classes_; ++c) {
                if (votes[c] > votes[best] ||
                    (votes[c] == votes[best] && dist[c] < dist[best]))
                    best = static_cast<int>(c);
            }
            out[q] = best;
        }
        return out;
    }

    std::string to_json() const override {
        json doc;
        doc["version"] = kModelFormatVersion;
        doc["kind"] = "knn";
        doc["k"] = k_;
        doc["X"] = matrix_to_json(X_);
        doc["y"] = y_;
        return doc.dump();
    }

    static std::unique_ptr<ShallowModel> from_json(const json& doc) {
        return std::make_unique<KnnModel>(matrix_from_json(doc.at("X")),
                                          doc.at("y").get<std::vector<int>>(),
                                          doc.at("k").get<std::size_t>());
    }

private:
    // Per-class vote counts and summed distances of the k nearest rows.
    std::pair<std::vector<int>, std::vector<double>> vote(
        const Eigen::RowVectorXd& q) const {
        std::vector<std::pair<double, std::size_t>> dist(X_.rows());
        for (Eigen::Index i = 0; i < X_.rows(); ++i)
            dist[i] = {(X_.row(i) - q).norm(), static_cast<std::size_t>(i)};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k_),
                          dist.end());
        std::vector<int> votes(num_classes_, 0);
        std::vector<double> sums(num_classes_, 0.0);
        for (std::size_t i = 0; i < k_; ++i) {
            int c = y_[dist[i].second];
            ++votes[c];
            sums[c] += dist[i].first;
        }
        // Classes without votes never win a tie: give them infinite distance.
        for (std::size_t c = 0; c < num_classes_; ++c)
            if (votes[c] == 0) sums[c] = std::numeric_limits<double>::infinity();
        return {votes, sums};
    }

    Matrix X_;
    std::vector<int> y_;
    std::size_t k_;
};

}  // namespace

std::unique_ptr<ShallowModel> fit_knn(const Matrix& X, const std::vector<int>& y,
                                      std::size_t k) {
    check_finite(X);
    if (k < 1 || k > static_cast<std::size_t>(X.rows()))
        throw std::invalid_argument("require 1 <= k <= n");
    return std::make_unique<KnnModel>(X, labels_from(y), k);
}

// ------------------------------------------------- logistic regression

namespace {

class LogRegModel final : public ShallowModel {
public:
    LogRegModel(Matrix W, Vector b, double C) : W_(std::move(W)), b_(std::move(b)), C_(C) {
        num_features_ = W_.rows();
        num_classes_ = W_.cols();
    }

    ModelKind kind() const override { return ModelKind::logreg; }

    Matrix scores(const Matrix& X) const override {
        check_features(X);
        return softmax(X * W_ + Vector::Ones(X.rows()) * b_.transpose());
    }

    std::vector<int> predict(const Matrix& X) const override {
        Matrix p = scores(X);
        std::vector<int> out(X.rows());
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            Eigen::Index best;
            p.row(i).maxCoeff(&best);
            out[i] = static_cast<int>(best);
        }
        return out;
    }

    std::string to_json() const override {
        json doc;
        doc["version"] = kModelFormatVersion;
        doc["kind"] = "logreg";
        doc["C"] = C_;
        doc["W"] = matrix_to_json(W_);
        doc["b"] = std::vector<double>(b_.data(), b_.data() + b_.size());
        return doc.dump();
    }

    static std::unique_ptr<ShallowModel> from_json(const json& doc) {
        auto bv = doc.at("b").get<std::vector<double>>();
        Vector b = Eigen::Map<Vector>(bv.data(), static_cast<long>(bv.size()));
        return std::make_unique<LogRegModel>(matrix_from_json(doc.at("W")), b,
                                             doc.at("C").get<double>());
    }

    static Matrix softmax(Matrix logits) {
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            double m = logits.row(i).maxCoeff();
            logits.row(i) = (logits.row(i).array() - m).exp();
            logits.row(i) /= logits.row(i).sum();
        }
        return logits;
    }

    const Matrix& weights() const { return W_; }

private:
    Matrix W_;  // features x classes
    Vector b_;
    double C_;
};

}  // namespace

std::unique_ptr<ShallowModel> fit_logreg(const Matrix& X, const std::vector<int>& y,
                                         double C) {
    check_finite(X);
    if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
    labels_from(y);
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const std::size_t K = count_classes(y);

    Matrix onehot = Matrix::Zero(n, K);
    for (std::size_t i = 0; i < n; ++i) onehot(static_cast<long>(i), y[i]) = 1.0;

    Matrix W = Matrix::Zero(d, K);
    Vector b = Vector::Zero(K);

    auto loss_of = [&](const Matrix& Wc, const Vector& bc) {
        Matrix p = LogRegModel::softmax(X * Wc + Vector::Ones(n) * bc.transpose());
        double ce = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            ce -= std::log(std::max(p(static_cast<long>(i), y[i]), 1e-300));
        ce /= static_cast<double>(n);
        return ce + Wc.squaredNorm() / (2.0 * C);
    };

    double step = 1.0;
    double loss = loss_of(W, b);
    for (int iter = 0; iter < 5000; ++iter) {
        Matrix p = LogRegModel::softmax(X * W + Vector::Ones(n) * b.transpose());
        Matrix diff = (p - onehot) / static_cast<double>(n);
        Matrix gW = X.transpose() * diff + W / C;
        Vector gb = diff.colwise().sum();
        double ginf = std::max(gW.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
        if (ginf < 1e-6) break;

        double g2 = gW.squaredNorm() + gb.squaredNorm();
        // Backtracking line search (Armijo); accepted steps never increase loss.
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Matrix Wn = W - step * gW;
            Vector bn = b - step * gb;
            double ln = loss_of(Wn, bn);
            if (ln <= loss - 1e-4 * step * g2) {
                W = std::move(Wn);
                b = std::move(bn);
                loss = ln;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        step = std::min(step * 2.0, 1e6);
    }
    return std::make_unique<LogRegModel>(W, b, C);
}

// -------------------------------------------------------- decision tree

namespace {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int leaf_class = 0;
};

class DTreeModel final : public ShallowModel {
public:
    DTreeModel(std::vector<TreeNode> nodes, std::size_t features, std::size_t classes,
               std::size_t depth)
        : nodes_(std::move(nodes)), max_depth_(depth) {
        num_features_ = features;
        num_classes_ = classes;
    }

    ModelKind kind() const override { return ModelKind::dtree; }

    std::vector<int> predict(const Matrix& X) const override {
        check_features(X);
        std::vector<int> out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            int node = 0;
            while (nodes_[node].feature >= 0)
                node = X(i, nodes_[node].feature) <= nodes_[node].threshold
                           ? nodes_[node].left
                           : nodes_[node].right;
            out[i] = nodes_[node].leaf_class;
        }
        return out;
    }

    Matrix scores(const Matrix& X) const override {
        auto labels = predict(X);
        Matrix out = Matrix::Zero(X.rows(), num_classes_);
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i, labels[i]) = 1.0;
        return out;
    }

    std::string to_json() const override {
        json nodes = json::array();
        for (const auto& n : nodes_)
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"leaf_class", n.leaf_class}});
        json doc;
        doc["version"] = kModelFormatVersion;
        doc["kind"] = "dtree";
        doc["max_depth"] = max_depth_;
        doc["num_features"] = num_features_;
        doc["num_classes"] = num_classes_;
        doc["nodes"] = nodes;
        return doc.dump();
    }

    static std::unique_ptr<ShallowModel> from_json(const json& doc) {
        std::vector<TreeNode> nodes;
        for (const auto& n : doc.at("nodes"))
            nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(),
                             n.at("left").get<int>(), n.at("right").get<int>(),
                             n.at("leaf_class").get<int>()});
        return std::make_unique<DTreeModel>(std::move(nodes),
                                            doc.at("num_features").get<std::size_t>(),
                                            doc.at("num_classes").get<std::size_t>(),
                                            doc.at("max_depth").get<std::size_t>());
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    std::vector<TreeNode> nodes_;
    std::size_t max_depth_;
};

double gini(const std::vector<int>& counts, double total) {
    double g = 1.0;
    for (int c : counts) {
        double f = static_cast<double>(c) / total;
        g -= f * f;
    }
    return g;
}

struct TreeBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    std::size_t num_classes;
    std::size_t max_depth;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t> indices, std::size_t depth) {
        std::vector<int> counts(num_classes, 0);
        for (std::size_t i : indices) ++counts[y[i]];
        int majority = 0;
        for (std::size_t c = 1; c < num_classes; ++c)
            if (counts[c] > counts[majority]) majority = static_cast<int>(c);

        int node_id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[node_id].leaf_class = majority;

        bool pure = counts[majority] == static_cast<int>(indices.size());
        if (pure || depth >= max_depth || indices.size() < 2) return node_id;

        double n = static_cast<double>(indices.size());
        double parent_gini = gini(counts, n);
        double best_decrease = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;

        for (Eigen::Index f = 0; f < X.cols(); ++f) {
            std::vector<std::pair<double, int>> vals;
            vals.reserve(indices.size());
            for (std::size_t i : indices) vals.emplace_back(X(i, f), y[i]);
            std::sort(vals.begin(), vals.end());

            std::vector<int> left(num_classes, 0);
            std::vector<int> right = counts;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left[vals[i].second];
                --right[vals[i].second];
                if (vals[i].first == vals[i + 1].first) continue;
                double nl = static_cast<double>(i + 1);
                double nr = n - nl;
                double decrease =
                    parent_gini - (nl / n) * gini(left, nl) - (nr / n) * gini(right, nr);
                // Strict improvement only: ties keep the earlier feature and
                // the lower threshold.
                if (decrease > best_decrease + 1e-15) {
                    best_decrease = decrease;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }

        if (best_feature < 0) return node_id;

        std::vector<std::size_t> li, ri;
        for (std::size_t i : indices)
            (X(i, best_feature) <= best_threshold ? li : ri).push_back(i);
        if (li.empty() || ri.empty()) return node_id;

        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        int l = build(std::move(li), depth + 1);
        int r = build(std::move(ri), depth + 1);
        nodes[node_id].left = l;
        nodes[node_id].right = r;
        return node_id;
    }
};

}  // namespace

std::unique_ptr<ShallowModel> fit_dtree(const Matrix& X, const std::vector<int>& y,
                                        std::size_t max_depth) {
    check_finite(X);
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    labels_from(y);
    TreeBuilder builder{X, y, count_classes(y), max_depth, {}};
    std::vector<std::size_t> all(X.rows());
    std::iota(all.begin(), all.end(), 0);
    builder.build(std::move(all), 0);
    return std::make_unique<DTreeModel>(std::move(builder.nodes), X.cols(),
                                        count_classes(y), max_depth);
}

// ----------------------------------------------------------- SVM (SMO)

namespace {

struct BinarySvm {
    std::vector<std::size_t> support;  // row indices into the ovo training set
    Vector alpha_y;                    // alpha_i * y_i for support rows
    double bias = 0.0;
    bool converged = true;
};

double rbf(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

// SMO with first-order working-pair selection: the worst KKT violator paired
// with the sample maximizing |E_i - E_j|.
BinarySvm solve_smo(const Matrix& X, const std::vector<double>& y, double C,
                    double gamma, std::size_t max_iter) {
    const std::size_t n = X.rows();
    const double tol = 1e-3;

    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            K(i, j) = K(j, i) = rbf(X.row(i), X.row(j), gamma);

    Vector alpha = Vector::Zero(n);
    double b = 0.0;
    Vector E(n);
    for (std::size_t i = 0; i < n; ++i) E(i) = -y[i];  // f = 0 initially

    BinarySvm result;
    std::size_t iter = 0;
    while (iter < max_iter) {
        // Worst violator.
        double worst = tol;
        long i1 = -1;
        for (std::size_t i = 0; i < n; ++i) {
            double r = E(i) * y[i];
            bool violating = (r < -tol && alpha(i) < C) || (r > tol && alpha(i) > 0.0);
            if (violating && std::abs(r) > worst) {
                worst = std::abs(r);
                i1 = static_cast<long>(i);
            }
        }
        if (i1 < 0) break;  // KKT satisfied to tolerance

        long i2 = -1;
        double gap = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (static_cast<long>(j) == i1) continue;
            double g = std::abs(E(i1) - E(j));
            if (g > gap) {
                gap = g;
                i2 = static_cast<long>(j);
            }
        }
        if (i2 < 0) break;

        auto try_pair = [&](long p, long q) -> bool {
            double y1 = y[p], y2 = y[q];
            double a1 = alpha(p), a2 = alpha(q);
            double s = y1 * y2;
            double L = s > 0 ? std::max(0.0, a1 + a2 - C) : std::max(0.0, a2 - a1);
            double H = s > 0 ? std::min(C, a1 + a2) : std::min(C, C + a2 - a1);
            if (L >= H) return false;
            double eta = K(p, p) + K(q, q) - 2.0 * K(p, q);
            if (eta <= 0.0) return false;
            double a2n = std::clamp(a2 + y2 * (E(p) - E(q)) / eta, L, H);
            if (std::abs(a2n - a2) < 1e-12 * (a2n + a2 + 1e-12)) return false;
            double a1n = a1 + s * (a2 - a2n);

            double b1 = b - E(p) - y1 * (a1n - a1) * K(p, p) - y2 * (a2n - a2) * K(p, q);
            double b2 = b - E(q) - y1 * (a1n - a1) * K(p, q) - y2 * (a2n - a2) * K(q, q);
            double bn;
            if (a1n > 0.0 && a1n < C)
                bn = b1;
            else if (a2n > 0.0 && a2n < C)
                bn = b2;
            else
                bn = 0.5 * (b1 + b2);

            E += y1 * (a1n - a1) * K.col(p) + y2 * (a2n - a2) * K.col(q);
            E.array() += bn - b;
            alpha(p) = a1n;
            alpha(q) = a2n;
            b = bn;
            return true;
        };

        if (!try_pair(i1, i2)) {
            // Fall back to a deterministic scan for any productive partner.
            bool progressed = false;
            for (std::size_t j = 0; j < n && !progressed; ++j)
                if (static_cast<long>(j) != i1) progressed = try_pair(i1, static_cast<long>(j));
            if (!progressed) break;
        }
        ++iter;
    }
    result.converged = iter < max_iter;

    for (std::size_t i = 0; i < n; ++i)
        if (alpha(i) > 1e-12) result.support.push_back(i);
    result.alpha_y.resize(static_cast<long>(result.support.size()));
    for (std::size_t k = 0; k < result.support.size(); ++k)
        result.alpha_y(static_cast<long>(k)) =
            alpha(static_cast<long>(result.support[k])) * y[result.support[k]];
    result.bias = b;
    return result;
}

class SvmModel final : public ShallowModel {
public:
    struct Pair {
        int class_a = 0, class_b = 0;  // decision > 0 votes class_a
        Matrix support_vectors;
        Vector alpha_y;
        double bias = 0.0;
    };

    SvmModel(std::vector<Pair> pairs, double C, double gamma, std::size_t features,
             std::size_t classes, bool converged)
        : pairs_(std::move(pairs)), C_(C), gamma_(gamma), converged_(converged) {
        num_features_ = features;
        num_classes_ = classes;
    }

    ModelKind kind() const override { return ModelKind::svm_rbf; }
    bool converged() const { return converged_; }

    double decision(const Pair& p, const Eigen::RowVectorXd& x) const {
        double f = p.bias;
        for (Eigen::Index i = 0; i < p.support_vectors.rows(); ++i)
            f += p.alpha_y(i) * rbf(p.support_vectors.row(i), x, gamma_);
        return f;
    }

    Matrix scores(const Matrix& X) const override {
        check_features(X);
        Matrix votes = Matrix::Zero(X.rows(), num_classes_);
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (const auto& p : pairs_) {
                double f = decision(p, X.row(i));
                votes(i, f > 0.0 ? p.class_a : p.class_b) += 1.0;
            }
        return votes;
    }

    std::vector<int> predict(const Matrix& X) const override {
        check_features(X);
        std::vector<int> out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            std::vector<double> votes(num_classes_, 0.0);
            std::vector<double> aggregate(num_classes_, 0.0);
            for (const auto& p : pairs_) {
                double f = decision(p, X.row(i));
                votes[f > 0.0 ? p.class_a : p.class_b] += 1.0;
                aggregate[p.class_a] += f;
                aggregate[p.class_b] -= f;
            }
            int best = 0;
            for (std::size_t c = 1; c < num_classes_; ++c)
                if (votes[c] > votes[best] ||
                    (votes[c] == votes[best] && aggregate[c] > aggregate[best]))
                    best = static_cast<int>(c);
            out[i] = best;
        }
        return out;
    }

    std::string to_json() const override {
        json jp = json::array();
        for (const auto& p : pairs_)
            jp.push_back({{"class_a", p.class_a},
                          {"class_b", p.class_b},
                          {"support_vectors", matrix_to_json(p.support_vectors)},
                          {"alpha_y", std::vector<double>(p.alpha_y.data(),
                                                          p.alpha_y.data() + p.alpha_y.size())},
                          {"bias", p.bias}});
        json doc;
        doc["version"] = kModelFormatVersion;
        doc["kind"] = "svm_rbf";
        doc["C"] = C_;
        doc["gamma"] = gamma_;
        doc["num_features"] = num_features_;
        doc["num_classes"] = num_classes_;
        doc["converged"] = converged_;
        doc["pairs"] = jp;
        return doc.dump();
    }

    static std::unique_ptr<ShallowModel> from_json(const json& doc) {
        std::vector<Pair> pairs;
        for (const auto& jp : doc.at("pairs")) {
            Pair p;
            p.class_a = jp.at("class_a").get<int>();
            p.class_b = jp.at("class_b").get<int>();
            p.support_vectors = matrix_from_json(jp.at("support_vectors"));
            auto av = jp.at("alpha_y").get<std::vector<double>>();
            p.alpha_y = Eigen::Map<Vector>(av.data(), static_cast<long>(av.size()));
            p.bias = jp.at("bias").get<double>();
            pairs.push_back(std::move(p));
        }
        return std::make_unique<SvmModel>(std::move(pairs), doc.at("C").get<double>(),
                                          doc.at("gamma").get<double>(),
                                          doc.at("num_features").get<std::size_t>(),
                                          doc.at("num_classes").get<std::size_t>(),
                                          doc.at("converged").get<bool>());
    }

private:
    std::vector<Pair> pairs_;
    double C_, gamma_;
    bool converged_;
};

}  // namespace

std::unique_ptr<ShallowModel> fit_svm_rbf(const Matrix& X, const std::vector<int>& y,
                                          double C, double gamma, std::size_t max_iter) {
    check_finite(X);
    if (!(C > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("C and gamma must be positive");
    labels_from(y);
    std::size_t K = count_classes(y);
    bool single_class = true;
    for (int label : y)
        if (label != y[0]) single_class = false;
    if (single_class) throw std::invalid_argument("single-class input");

    std::vector<SvmModel::Pair> pairs;
    bool all_converged = true;
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = a + 1; b < K; ++b) {
            std::vector<std::size_t> rows;
            std::vector<double> labels;
            for (std::size_t i = 0; i < static_cast<std::size_t>(X.rows()); ++i) {
                if (y[i] == static_cast<int>(a)) {
                    rows.push_back(i);
                    labels.push_back(1.0);
                } else if (y[i] == static_cast<int>(b)) {
                    rows.push_back(i);
                    labels.push_back(-1.0);
                }
            }
            bool has_pos = false, has_neg = false;
            for (double l : labels) (l > 0 ? has_pos : has_neg) = true;
            if (!has_pos || !has_neg) continue;
            Matrix sub(rows.size(), X.cols());
            for (std::size_t i = 0; i < rows.size(); ++i) sub.row(i) = X.row(rows[i]);

            BinarySvm svm = solve_smo(sub, labels, C, gamma, max_iter);
            all_converged = all_converged && svm.converged;

            SvmModel::Pair p;
            p.class_a = static_cast<int>(a);
            p.class_b = static_cast<int>(b);
            p.support_vectors.resize(static_cast<long>(svm.support.size()), X.cols());
            for (std::size_t k = 0; k < svm.support.size(); ++k)
                p.support_vectors.row(static_cast<long>(k)) =
                    sub.row(static_cast<long>(svm.support[k]));
            p.alpha_y = svm.alpha_y;
            p.bias = svm.bias;
            pairs.push_back(std::move(p));
        }

    return std::make_unique<SvmModel>(std::move(pairs), C, gamma, X.cols(), K,
                                      all_converged);
}

bool svm_converged(const ShallowModel& model) {
    const auto* svm = dynamic_cast<const SvmModel*>(&model);
    if (!svm) throw std::invalid_argument("not an SVM model");
    return svm->converged();
}

std::unique_ptr<ShallowModel> model_from_json(const std::string& text) {
    json doc = json::parse(text);
    std::string kind = doc.at("kind").get<std::string>();
    if (kind == "knn") return KnnModel::from_json(doc);
    if (kind == "logreg") return LogRegModel::from_json(doc);
    if (kind == "dtree") return DTreeModel::from_json(doc);
    if (kind == "svm_rbf") return SvmModel::from_json(doc);
    throw std::invalid_argument("unknown model kind '" + kind + "'");
}

}  // namespace geomclass::shallow
