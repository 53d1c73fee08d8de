#pragma once

#include "geomclass/encoding.hpp"
#include "geomclass/neural.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace geomclass::models {

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t max_epochs = 100;
    std::size_t patience = 8;
    std::uint64_t seed = 42;
    double learning_rate = 1e-3;
    std::size_t n_bin = 512;  // 8 x batch_size by default
};

struct EpochRecord {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
};

struct History {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_accuracy = 0.0;
};

class SequenceClassifier {
public:
    virtual ~SequenceClassifier() = default;
    virtual nn::Matrix forward(const nn::Tensor3& x) = 0;  // probability rows
    virtual void backward(const nn::Matrix& grad_probs) = 0;
    virtual std::vector<nn::Param*> params() = 0;
    virtual void init(std::uint64_t seed) = 0;
    virtual std::string arch() const = 0;

    std::vector<int> predict(const nn::Tensor3& x);
    std::size_t parameter_count();
    void zero_grads();

    std::string checkpoint_json();
    void load_checkpoint_json(const std::string& text);
};

// conv(32, k5, ReLU) -> maxpool(3,3) -> conv(64, k5, ReLU) ->
// global average pool -> dense(64, ReLU) -> dense(classes, softmax)
class CnnClassifier final : public SequenceClassifier {
public:
    explicit CnnClassifier(std::size_t num_classes);
    nn::Matrix forward(const nn::Tensor3& x) override;
    void backward(const nn::Matrix& grad_probs) override;
    std::vector<nn::Param*> params() override;
    void init(std::uint64_t seed) override;
    std::string arch() const override { return "cnn"; }

private:
    nn::Conv1d conv1_, conv2_;
    nn::MaxPool1d pool_;
    nn::GlobalAvgPool gap_;
    nn::Dense fc_, head_;
};

// bidirectional LSTM (32 + 32) -> dense(classes, softmax)
class RnnClassifier final : public SequenceClassifier {
public:
    explicit RnnClassifier(std::size_t num_classes);
    nn::Matrix forward(const nn::Tensor3& x) override;
    void backward(const nn::Matrix& grad_probs) override;
    std::vector<nn::Param*> params() override;
    void init(std::uint64_t seed) override;
    std::string arch() const override { return "rnn"; }

private:
    nn::BiLstm bilstm_;
    nn::Dense head_;
};

std::unique_ptr<SequenceClassifier> build_cnn(std::size_t num_classes);
std::unique_ptr<SequenceClassifier> build_rnn(std::size_t num_classes);

nn::Tensor3 to_tensor(const enc::Batch& batch);

// Adam + early stopping on validation accuracy; restores the parameters of
// the best validation epoch. Aborts with diagnostics on a non-finite loss.
History train(SequenceClassifier& model, const std::vector<enc::Batch>& train_batches,
              const std::vector<enc::Batch>& val_batches, const TrainConfig& cfg);

double evaluate_accuracy(SequenceClassifier& model,
                         const std::vector<enc::Batch>& batches);

struct RepeatedResult {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std
    std::vector<double> accuracies;

    std::string format() const;  // "0.624 ± 0.002"
};

using ModelBuilder = std::function<std::unique_ptr<SequenceClassifier>()>;

// Independently seeded training runs (cfg.seed + run index); test accuracy
// mean and population std across runs.
RepeatedResult repeated_runs(const ModelBuilder& builder,
                             const std::vector<enc::Batch>& train_batches,
                             const std::vector<enc::Batch>& val_batches,
                             const std::vector<enc::Batch>& test_batches,
                             const TrainConfig& cfg, std::size_t repeats);

}  // namespace geomclass::models
