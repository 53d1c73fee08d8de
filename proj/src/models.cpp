#include "geomclass/models.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace geomclass::models {

using nn::Matrix;
using nn::Tensor3;

std::vector<int> SequenceClassifier::predict(const Tensor3& x) {
    Matrix probs = forward(x);
    std::vector<int> out(probs.rows());
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        Eigen::Index best;
        probs.row(i).maxCoeff(&best);
        out[i] = static_cast<int>(best);
    }
    return out;
}

std::size_t SequenceClassifier::parameter_count() {
    std::size_t n = 0;
    for (nn::Param* p : params()) n += static_cast<std::size_t>(p->value.size());
    return n;
}

void SequenceClassifier::zero_grads() {
    for (nn::Param* p : params()) p->grad.setZero();
}

std::string SequenceClassifier::checkpoint_json() {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["arch"] = arch();
    nlohmann::json tensors;
    for (nn::Param* p : params()) {
        nlohmann::json t;
        t["rows"] = p->value.rows();
        t["cols"] = p->value.cols();
        std::vector<std::string> data;
        data.reserve(static_cast<std::size_t>(p->value.size()));
        for (Eigen::Index i = 0; i < p->value.rows(); ++i)
            for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", p->value(i, j));
                data.emplace_back(buf);
            }
        t["data"] = data;
        tensors[p->name] = std::move(t);
    }
    doc["tensors"] = std::move(tensors);
    return doc.dump();
}

void SequenceClassifier::load_checkpoint_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.at("arch").get<std::string>() != arch())
        throw std::invalid_argument("checkpoint architecture mismatch");
    const auto& tensors = doc.at("tensors");
    for (nn::Param* p : params()) {
        const auto& t = tensors.at(p->name);
        if (t.at("rows").get<Eigen::Index>() != p->value.rows() ||
            t.at("cols").get<Eigen::Index>() != p->value.cols())
            throw std::invalid_argument("checkpoint shape mismatch for " + p->name);
        const auto& data = t.at("data");
        std::size_t idx = 0;
        for (Eigen::Index i = 0; i < p->value.rows(); ++i)
            for (Eigen::Index j = 0; j < p->value.cols(); ++j)
                p->value(i, j) = std::strtod(data[idx++].get<std::string>().c_str(), nullptr);
    }
}

// ------------------------------------------------------------------- CNN

CnnClassifier::CnnClassifier(std::size_t num_classes)
    : conv1_(5, 32, 5, true),
      conv2_(32, 64, 5, true),
      pool_(3),
      fc_(64, 64, nn::Activation::relu),
      head_(64, num_classes, nn::Activation::softmax) {
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    conv1_.weight.name = "conv1.weight";
    conv1_.bias.name = "conv1.bias";
    conv2_.weight.name = "conv2.weight";
    conv2_.bias.name = "conv2.bias";
    fc_.weight.name = "fc.weight";
    fc_.bias.name = "fc.bias";
    head_.weight.name = "head.weight";
    head_.bias.name = "head.bias";
}

Matrix CnnClassifier::forward(const Tensor3& x) {
    return head_.forward(fc_.forward(gap_.forward(conv2_.forward(pool_.forward(conv1_.forward(x))))));
}

void CnnClassifier::backward(const Matrix& grad_probs) {
    conv1_.backward(pool_.backward(conv2_.backward(gap_.backward(fc_.backward(head_.backward(grad_probs))))));
}

std::vector<nn::Param*> CnnClassifier::params() {
    std::vector<nn::Param*> out;
    for (auto* layer_params : {&conv1_, &conv2_})
        for (nn::Param* p : layer_params->params()) out.push_back(p);
    for (nn::Param* p : fc_.params()) out.push_back(p);
    for (nn::Param* p : head_.params()) out.push_back(p);
    return out;
}

void CnnClassifier::init(std::uint64_t seed) {
    rng::Rng r(seed);
    conv1_.init(r);
    conv2_.init(r);
    fc_.init(r);
    head_.init(r);
}

// ------------------------------------------------------------------- RNN

RnnClassifier::RnnClassifier(std::size_t num_classes)
    : bilstm_(5, 32), head_(64, num_classes, nn::Activation::softmax) {
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    head_.weight.name = "head.weight";
    head_.bias.name = "head.bias";
}

Matrix RnnClassifier::forward(const Tensor3& x) {
    return head_.forward(bilstm_.forward(x));
}

void RnnClassifier::backward(const Matrix& grad_probs) {
    bilstm_.backward(head_.backward(grad_probs));
}

std::vector<nn::Param*> RnnClassifier::params() {
    std::vector<nn::Param*> out = bilstm_.params();
    for (nn::Param* p : head_.params()) out.push_back(p);
    return out;
}

void RnnClassifier::init(std::uint64_t seed) {
    rng::Rng r(seed);
    bilstm_.init(r);
    head_.init(r);
}

std::unique_ptr<SequenceClassifier> build_cnn(std::size_t num_classes) {
    return std::make_unique<CnnClassifier>(num_classes);
}

std::unique_ptr<SequenceClassifier> build_rnn(std::size_t num_classes) {
    return std::make_unique<RnnClassifier>(num_classes);
}

Tensor3 to_tensor(const enc::Batch& batch) {
    Tensor3 t;
    t.samples.reserve(batch.sequences.size());
    t.lengths.reserve(batch.sequences.size());
    for (const auto& seq : batch.sequences) {
        Matrix m(static_cast<long>(seq.vectors.size()), 5);
        std::size_t len = seq.vectors.size();
        while (len > 0 && seq.vectors[len - 1].is_padding()) --len;
        for (std::size_t i = 0; i < seq.vectors.size(); ++i) {
            const auto& v = seq.vectors[i];
            m.row(static_cast<long>(i)) << v.x, v.y, v.r_full, v.r_sub, v.r_final;
        }
        t.samples.push_back(std::move(m));
        t.lengths.push_back(static_cast<Eigen::Index>(len));
    }
    return t;
}

// ------------------------------------------------------------- training

double evaluate_accuracy(SequenceClassifier& model,
                         const std::vector<enc::Batch>& batches) {
    std::size_t correct = 0, total = 0;
    for (const auto& batch : batches) {
        auto pred = model.predict(to_tensor(batch));
        for (std::size_t i = 0; i < pred.size(); ++i) {
            correct += pred[i] == batch.labels[i];
            ++total;
        }
    }
    if (total == 0) throw std::invalid_argument("no samples to evaluate");
    return static_cast<double>(correct) / static_cast<double>(total);
}

History train(SequenceClassifier& model, const std::vector<enc::Batch>& train_batches,
              const std::vector<enc::Batch>& val_batches, const TrainConfig& cfg) {
    if (train_batches.empty()) throw std::invalid_argument("no training batches");
    if (cfg.patience >= cfg.max_epochs)
        throw std::invalid_argument("patience must be < max_epochs");

    model.init(cfg.seed);
    rng::Rng order_rng(cfg.seed ^ 0xabcdef1234567890ull);

    auto snapshot = [&] {
        std::vector<Matrix> values;
        for (nn::Param* p : model.params()) values.push_back(p->value);
        return values;
    };
    auto restore = [&](const std::vector<Matrix>& values) {
        std::size_t i = 0;
        for (nn::Param* p : model.params()) p->value = values[i++];
    };

    History history;
    std::vector<Matrix> best = snapshot();
    std::size_t since_best = 0;
    std::size_t adam_t = 0;

    std::vector<std::size_t> order(train_batches.size());
    std::iota(order.begin(), order.end(), 0);

    auto layer_params = model.params();
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);  // interleave bins in shuffled order
        double loss_sum = 0.0;
        std::size_t correct = 0, total = 0;

        for (std::size_t bi : order) {
            const auto& batch = train_batches[bi];
            Tensor3 x = to_tensor(batch);
            Matrix probs = model.forward(x);
            Matrix grad;
            double loss = nn::cross_entropy(probs, batch.labels, &grad);
            if (!std::isfinite(loss))
                throw std::runtime_error(
                    "non-finite training loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(bi));
            loss_sum += loss * static_cast<double>(batch.labels.size());
            for (Eigen::Index i = 0; i < probs.rows(); ++i) {
                Eigen::Index p;
                probs.row(i).maxCoeff(&p);
                correct += static_cast<int>(p) == batch.labels[i];
                ++total;
            }
            model.zero_grads();
            model.backward(grad);
            nn::adam_step(layer_params, cfg.learning_rate, 0.9, 0.999, 1e-8, ++adam_t);
        }

        EpochRecord rec;
        rec.train_loss = loss_sum / static_cast<double>(total);
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(total);
        rec.val_accuracy =
            val_batches.empty() ? rec.train_accuracy : evaluate_accuracy(model, val_batches);
        history.epochs.push_back(rec);

        if (history.epochs.size() == 1 || rec.val_accuracy > history.best_val_accuracy) {
            history.best_val_accuracy = rec.val_accuracy;
            history.best_epoch = epoch;
            best = snapshot();
            since_best = 0;
        } else {
            ++since_best;
            if (since_best > cfg.patience) break;
        }
    }

    restore(best);
    return history;
}

std::string RepeatedResult::format() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", mean_accuracy, std_accuracy);
    return buf;
}

RepeatedResult repeated_runs(const ModelBuilder& builder,
                             const std::vector<enc::Batch>& train_batches,
                             const std::vector<enc::Batch>& val_batches,
                             const std::vector<enc::Batch>& test_batches,
                             const TrainConfig& cfg, std::size_t repeats) {
    if (repeats < 2) throw std::invalid_argument("repeats must be >= 2");

    RepeatedResult result;
    result.accuracies.assign(repeats, 0.0);

    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("GEOMCLASS_THREADS"))
        workers = std::max<std::size_t>(1, std::strtoul(env, nullptr, 10));
    workers = std::min(workers, repeats);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t run = next.fetch_add(1);
            if (run >= repeats) return;
            TrainConfig run_cfg = cfg;
            run_cfg.seed = cfg.seed + run;
            auto model = builder();
            train(*model, train_batches, val_batches, run_cfg);
            result.accuracies[run] = evaluate_accuracy(*model, test_batches);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    double mean = std::accumulate(result.accuracies.begin(), result.accuracies.end(), 0.0) /
                  static_cast<double>(repeats);
    double var = 0.0;
    for (double a : result.accuracies) var += (a - mean) * (a - mean);
    var /= static_cast<double>(repeats);  // population std
    result.mean_accuracy = mean;
    result.std_accuracy = std::sqrt(var);
    return result;
}

}  // namespace geomclass::models
