#include "geomclass/harness.hpp"

#include "geomclass/efd.hpp"
#include "geomclass/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace geomclass::harness {

Split split(std::size_t dataset_size, std::uint64_t seed) {
    if (dataset_size < 10) throw std::invalid_argument("dataset too small to split");

    std::vector<std::size_t> indices(dataset_size);
    std::iota(indices.begin(), indices.end(), 0);
    rng::Rng r(seed);
    r.shuffle(indices);

    // 80/10/10 unless the floors (10k / 1k / 1k) fit.
    std::size_t val = dataset_size / 10;
    std::size_t test = dataset_size / 10;
    if (dataset_size >= 12'000) {
        val = std::max<std::size_t>(val, 1'000);
        test = std::max<std::size_t>(test, 1'000);
        if (dataset_size - val - test < 10'000) {
            val = test = 1'000;
        }
    }
    std::size_t train = dataset_size - val - test;

    Split s;
    s.seed = seed;
    s.train.assign(indices.begin(), indices.begin() + static_cast<long>(train));
    s.validation.assign(indices.begin() + static_cast<long>(train),
                        indices.begin() + static_cast<long>(train + val));
    s.test.assign(indices.begin() + static_cast<long>(train + val), indices.end());
    return s;
}

Split split_stratified(const std::vector<int>& labels, double train_frac,
                       double val_frac, std::uint64_t seed) {
    if (labels.empty()) throw std::invalid_argument("empty label list");
    int num_classes = *std::max_element(labels.begin(), labels.end()) + 1;

    Split s;
    s.seed = seed;
    rng::Rng r(seed);
    for (int c = 0; c < num_classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        r.shuffle(members);
        auto train_n = static_cast<std::size_t>(
            std::round(train_frac * static_cast<double>(members.size())));
        auto val_n = static_cast<std::size_t>(
            std::round(val_frac * static_cast<double>(members.size())));
        train_n = std::min(train_n, members.size());
        val_n = std::min(val_n, members.size() - train_n);
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i < train_n)
                s.train.push_back(members[i]);
            else if (i < train_n + val_n)
                s.validation.push_back(members[i]);
            else
                s.test.push_back(members[i]);
        }
    }
    return s;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (std::size_t v : row) n += v;
    return n;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream out;
    out << "true\\predicted";
    for (std::size_t c = 0; c < counts.size(); ++c) out << ",c" << c;
    out << '\n';
    for (std::size_t t = 0; t < counts.size(); ++t) {
        out << 'c' << t;
        for (std::size_t p = 0; p < counts.size(); ++p) out << ',' << counts[t][p];
        out << '\n';
    }
    return out.str();
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
    if (predictions.empty()) throw std::invalid_argument("empty prediction list");
    if (predictions.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        correct += predictions[i] == truth[i];
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double majority_baseline(const std::vector<int>& train_labels,
                         const std::vector<int>& test_labels) {
    if (train_labels.empty() || test_labels.empty())
        throw std::invalid_argument("empty label list");
    std::map<int, std::size_t> freq;
    for (int label : train_labels) ++freq[label];
    int majority = train_labels[0];
    std::size_t best = 0;
    for (const auto& [label, count] : freq)
        if (count > best) {
            best = count;
            majority = label;
        }
    std::size_t hits = 0;
    for (int label : test_labels) hits += label == majority;
    return static_cast<double>(hits) / static_cast<double>(test_labels.size());
}

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truth, std::size_t num_classes) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    ConfusionMatrix cm;
    cm.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (truth[i] < 0 || predictions[i] < 0 ||
            static_cast<std::size_t>(truth[i]) >= num_classes ||
            static_cast<std::size_t>(predictions[i]) >= num_classes)
            throw std::invalid_argument("label out of range");
        ++cm.counts[static_cast<std::size_t>(truth[i])]
                   [static_cast<std::size_t>(predictions[i])];
    }
    return cm;
}

// ------------------------------------------------------------ grid search

GridSpec GridSpec::defaults(shallow::ModelKind kind) {
    // Search ranges follow the published per-task presets; the widest listed
    // range per hyperparameter is used as the default.
    GridSpec g;
    switch (kind) {
        case shallow::ModelKind::knn:
            for (std::size_t k = 21; k <= 30; ++k) g.ks.push_back(k);
            break;
        case shallow::ModelKind::dtree:
            for (std::size_t d = 4; d <= 12; ++d) g.depths.push_back(d);
            break;
        case shallow::ModelKind::logreg:
            for (int e = -3; e <= 3; ++e) g.cs.push_back(std::pow(10.0, e));
            break;
        case shallow::ModelKind::svm_rbf:
            for (int e = -2; e <= 3; ++e) g.cs.push_back(std::pow(10.0, e));
            for (int e = -4; e <= 4; ++e) g.gammas.push_back(std::pow(10.0, e));
            break;
    }
    return g;
}

std::string GridCombination::describe(shallow::ModelKind kind) const {
    char buf[128];
    switch (kind) {
        case shallow::ModelKind::knn:
            std::snprintf(buf, sizeof(buf), "o=%zu k=%zu", order, k);
            break;
        case shallow::ModelKind::dtree:
            std::snprintf(buf, sizeof(buf), "o=%zu d=%zu", order, depth);
            break;
        case shallow::ModelKind::logreg:
            std::snprintf(buf, sizeof(buf), "o=%zu C=%g", order, c);
            break;
        case shallow::ModelKind::svm_rbf:
            std::snprintf(buf, sizeof(buf), "o=%zu C=%g gamma=%g", order, c, gamma);
            break;
    }
    return buf;
}

shallow::Matrix feature_matrix(const std::vector<geom::Geometry>& geoms,
                               std::size_t order) {
    if (geoms.empty()) throw std::invalid_argument("empty geometry list");
    shallow::Matrix X(static_cast<long>(geoms.size()),
                      static_cast<long>(efd::feature_length(order)));
    for (std::size_t i = 0; i < geoms.size(); ++i) {
        auto fv = efd::features(geoms[i], order);
        for (std::size_t j = 0; j < fv.values.size(); ++j)
            X(static_cast<long>(i), static_cast<long>(j)) = fv.values[j];
    }
    return X;
}

namespace {

std::unique_ptr<shallow::ShallowModel> fit_for(shallow::ModelKind kind,
                                               const shallow::Matrix& X,
                                               const std::vector<int>& y,
                                               const GridCombination& combo,
                                               std::size_t svm_max_iter) {
    switch (kind) {
        case shallow::ModelKind::knn:
            return shallow::fit_knn(X, y, std::min(combo.k, static_cast<std::size_t>(X.rows())));
        case shallow::ModelKind::logreg:
            return shallow::fit_logreg(X, y, combo.c);
        case shallow::ModelKind::dtree:
            return shallow::fit_dtree(X, y, combo.depth);
        case shallow::ModelKind::svm_rbf:
            return shallow::fit_svm_rbf(X, y, combo.c, combo.gamma, svm_max_iter);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

GridSearchResult grid_search(shallow::ModelKind kind,
                             const std::vector<geom::Geometry>& geoms,
                             const std::vector<int>& labels, const GridSpec& grid,
                             std::size_t folds, std::size_t subset_cap,
                             std::uint64_t seed, std::size_t svm_max_iter) {
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (geoms.size() != labels.size())
        throw std::invalid_argument("geometry/label count mismatch");
    if (grid.orders.empty()) throw std::invalid_argument("empty order grid");

    // Enumerate the Cartesian product in a deterministic order.
    std::vector<GridCombination> combos;
    for (std::size_t order : grid.orders) {
        switch (kind) {
            case shallow::ModelKind::knn:
                if (grid.ks.empty()) throw std::invalid_argument("empty k grid");
                for (std::size_t k : grid.ks) {
                    GridCombination c;
                    c.order = order;
                    c.k = k;
                    combos.push_back(c);
                }
                break;
            case shallow::ModelKind::dtree:
                if (grid.depths.empty()) throw std::invalid_argument("empty depth grid");
                for (std::size_t d : grid.depths) {
                    GridCombination c;
                    c.order = order;
                    c.depth = d;
                    combos.push_back(c);
                }
                break;
            case shallow::ModelKind::logreg:
                if (grid.cs.empty()) throw std::invalid_argument("empty C grid");
                for (double cv : grid.cs) {
                    GridCombination c;
                    c.order = order;
                    c.c = cv;
                    combos.push_back(c);
                }
                break;
            case shallow::ModelKind::svm_rbf:
                if (grid.cs.empty() || grid.gammas.empty())
                    throw std::invalid_argument("empty C/gamma grid");
                for (double cv : grid.cs)
                    for (double gv : grid.gammas) {
                        GridCombination c;
                        c.order = order;
                        c.c = cv;
                        c.gamma = gv;
                        combos.push_back(c);
                    }
                break;
        }
    }

    // Seeded fold assignment: a shuffled partition of the training rows.
    std::vector<std::size_t> rows(geoms.size());
    std::iota(rows.begin(), rows.end(), 0);
    rng::Rng r(seed);
    r.shuffle(rows);
    const bool capped =
        kind == shallow::ModelKind::knn || kind == shallow::ModelKind::svm_rbf;
    if (capped && rows.size() > subset_cap) rows.resize(subset_cap);

    std::vector<std::size_t> fold_of(geoms.size(), folds);  // `folds` = unused row
    for (std::size_t i = 0; i < rows.size(); ++i) fold_of[rows[i]] = i % folds;

    // Features per order, computed once.
    std::map<std::size_t, shallow::Matrix> features_by_order;
    for (std::size_t order : grid.orders)
        if (!features_by_order.count(order))
            features_by_order.emplace(order, feature_matrix(geoms, order));

    auto evaluate_combo = [&](GridCombination& combo) {
        const shallow::Matrix& X = features_by_order.at(combo.order);
        double acc_sum = 0.0;
        for (std::size_t fold = 0; fold < folds; ++fold) {
            std::vector<long> train_rows, val_rows;
            for (std::size_t i = 0; i < geoms.size(); ++i) {
                if (fold_of[i] == folds) continue;
                (fold_of[i] == fold ? val_rows : train_rows).push_back(static_cast<long>(i));
            }
            shallow::Matrix Xtr(train_rows.size(), X.cols());
            shallow::Matrix Xva(val_rows.size(), X.cols());
            std::vector<int> ytr, yva;
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                Xtr.row(static_cast<long>(i)) = X.row(train_rows[i]);
                ytr.push_back(labels[static_cast<std::size_t>(train_rows[i])]);
            }
            for (std::size_t i = 0; i < val_rows.size(); ++i) {
                Xva.row(static_cast<long>(i)) = X.row(val_rows[i]);
                yva.push_back(labels[static_cast<std::size_t>(val_rows[i])]);
            }
            auto std_ = shallow::Standardizer::fit(Xtr);
            auto model = fit_for(kind, std_.apply(Xtr), ytr, combo, svm_max_iter);
            acc_sum += accuracy(model->predict(std_.apply(Xva)), yva);
        }
        combo.mean_cv_accuracy = acc_sum / static_cast<double>(folds);
    };

    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("GEOMCLASS_THREADS"))
        workers = std::max<std::size_t>(1, std::strtoul(env, nullptr, 10));
    workers = std::max<std::size_t>(1, std::min(workers, combos.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= combos.size()) return;
            evaluate_combo(combos[i]);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // Winner: best CV accuracy; ties by smaller order then enumeration order
    // (which lists hyperparameter values first-listed first).
    std::size_t best = 0;
    for (std::size_t i = 1; i < combos.size(); ++i) {
        if (combos[i].mean_cv_accuracy > combos[best].mean_cv_accuracy ||
            (combos[i].mean_cv_accuracy == combos[best].mean_cv_accuracy &&
             combos[i].order < combos[best].order))
            best = i;
    }

    GridSearchResult result;
    result.best = combos[best];
    result.table = combos;

    // Refit on the full training set.
    const shallow::Matrix& X = features_by_order.at(result.best.order);
    result.standardizer = shallow::Standardizer::fit(X);
    result.refit_model =
        fit_for(kind, result.standardizer.apply(X), labels, result.best, svm_max_iter);
    return result;
}

// --------------------------------------------------------------- reporting

namespace {

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string report_text(const ComparisonResults& results) {
    std::ostringstream out;
    auto row = [&](const std::string& name, const std::string& value) {
        out << name;
        for (std::size_t i = name.size(); i < 22; ++i) out << ' ';
        out << value << '\n';
    };
    row("Method", "Accuracy");
    row("Majority class", fmt3(results.majority));
    const char* shallow_order[4] = {"knn", "logreg", "svm_rbf", "dtree"};
    const char* shallow_names[4] = {"k-NN", "Logistic regression", "SVM RBF",
                                    "Decision tree"};
    for (int i = 0; i < 4; ++i) {
        auto it = results.shallow_accuracy.find(shallow_order[i]);
        row(shallow_names[i], it == results.shallow_accuracy.end() ? "-" : fmt3(it->second));
    }
    auto deep = [&](const char* name,
                    const std::optional<std::pair<double, double>>& entry) {
        if (entry)
            row(name, fmt3(entry->first) + " ± " + fmt3(entry->second));
        else
            row(name, "-");
    };
    deep("CNN", results.cnn);
    deep("RNN", results.rnn);
    return out.str();
}

std::string report_csv(const ComparisonResults& results) {
    std::ostringstream out;
    out << "method,accuracy,std\n";
    out << "majority," << fmt3(results.majority) << ",\n";
    const char* shallow_order[4] = {"knn", "logreg", "svm_rbf", "dtree"};
    for (const char* name : shallow_order) {
        auto it = results.shallow_accuracy.find(name);
        out << name << ',' << (it == results.shallow_accuracy.end() ? "" : fmt3(it->second))
            << ",\n";
    }
    auto deep = [&](const char* name,
                    const std::optional<std::pair<double, double>>& entry) {
        out << name << ',';
        if (entry)
            out << fmt3(entry->first) << ',' << fmt3(entry->second);
        else
            out << ',';
        out << '\n';
    };
    deep("cnn", results.cnn);
    deep("rnn", results.rnn);
    return out.str();
}

}  // namespace geomclass::harness
