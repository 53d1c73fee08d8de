#pragma once

#include "geomclass/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace geomclass::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Batch of equal-length sequences; samples[i] is time x channels. When
// `lengths` is non-empty it gives the number of valid (non-padding) leading
// timesteps per sample; layers then ignore the padded suffix so predictions
// do not depend on how far a batch was padded.
struct Tensor3 {
    std::vector<Matrix> samples;
    std::vector<Eigen::Index> lengths;

    std::size_t batch() const { return samples.size(); }
    Eigen::Index time() const { return samples.empty() ? 0 : samples[0].rows(); }
    Eigen::Index channels() const { return samples.empty() ? 0 : samples[0].cols(); }
    Eigen::Index valid(std::size_t s) const {
        return lengths.empty() ? time() : lengths[s];
    }
};

// Named parameter tensor with its gradient and Adam moment slots.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix m, v;

    void init_moments() {
        grad = Matrix::Zero(value.rows(), value.cols());
        m = Matrix::Zero(value.rows(), value.cols());
        v = Matrix::Zero(value.rows(), value.cols());
    }
};

// Bias-corrected Adam update applied in place; t is the 1-based step count.
// Throws std::runtime_error naming the parameter on a non-finite gradient.
void adam_step(std::vector<Param*>& params, double lr, double beta1, double beta2,
               double eps, std::size_t t);

// Same-length 1D cross-correlation, odd kernel, stride 1, zero border padding.
class Conv1d {
public:
    Conv1d(std::size_t in_channels, std::size_t filters, std::size_t kernel, bool relu);

    void init(rng::Rng& rng);
    Tensor3 forward(const Tensor3& x);
    Tensor3 backward(const Tensor3& grad_out);
    std::vector<Param*> params();

    Param weight;  // (kernel * in_channels) x filters
    Param bias;    // 1 x filters

private:
    std::size_t in_channels_, filters_, kernel_;
    bool relu_;
    std::vector<Matrix> cols_;     // cached im2col per sample
    std::vector<Matrix> preact_;   // cached pre-activation when relu
    std::vector<Eigen::Index> lengths_;
    Eigen::Index in_time_ = 0;
};

// Per-channel max over windows of `pool`, stride = pool; a remainder window
// covers the tail. Backward routes to the argmax (first index on ties).
class MaxPool1d {
public:
    explicit MaxPool1d(std::size_t pool = 3) : pool_(pool) {}

    Tensor3 forward(const Tensor3& x);
    Tensor3 backward(const Tensor3& grad_out);

private:
    std::size_t pool_;
    std::vector<Eigen::MatrixX<Eigen::Index>> argmax_;
    Eigen::Index in_time_ = 0;
};

// Mean over the time axis; with per-sample lengths present only the valid
// leading timesteps contribute.
class GlobalAvgPool {
public:
    Matrix forward(const Tensor3& x);
    Tensor3 backward(const Matrix& grad_out);

private:
    Eigen::Index time_ = 0;
    std::vector<Eigen::Index> lengths_;
};

enum class Activation { none, relu, softmax };

class Dense {
public:
    Dense(std::size_t in, std::size_t units, Activation activation);

    void init(rng::Rng& rng);
    Matrix forward(const Matrix& x);
    Matrix backward(const Matrix& grad_out);
    std::vector<Param*> params();

    Param weight;  // in x units
    Param bias;    // 1 x units

private:
    Activation activation_;
    Matrix input_, preact_, output_;
};

struct LstmState {
    Vector hidden;
    Vector cell;
};

// Single-direction LSTM over a full sequence; only the final hidden state is
// returned (classification use), so backward receives d(final hidden).
class Lstm {
public:
    Lstm(std::size_t input_size, std::size_t units);

    void init(rng::Rng& rng);
    // One step, exposed for unit testing the cell equations.
    std::pair<Vector, LstmState> step(const Vector& x, const LstmState& state) const;
    Matrix forward(const Tensor3& x);                // batch x units
    Tensor3 backward(const Matrix& grad_final_h);    // gradients w.r.t. inputs
    std::vector<Param*> params();

    Param w_input;   // input_size x 4*units, gate order [i, f, g, o]
    Param w_hidden;  // units x 4*units
    Param bias;      // 1 x 4*units (forget block initialized to 1)

    std::size_t units() const { return units_; }

private:
    std::size_t input_size_, units_;
    Tensor3 input_;
    // caches indexed [sample][time]
    std::vector<std::vector<Vector>> h_, c_, gi_, gf_, gg_, go_;
};

// Forward and backward LSTM passes concatenated: batch x (2 * units).
class BiLstm {
public:
    BiLstm(std::size_t input_size, std::size_t units);

    void init(rng::Rng& rng);
    Matrix forward(const Tensor3& x);
    Tensor3 backward(const Matrix& grad_out);
    std::vector<Param*> params();

    Lstm forward_cell;
    Lstm backward_cell;

private:
    std::vector<Eigen::Index> lengths_;
};

// Mean negative log-likelihood of the true classes given probability rows;
// grad is with respect to the probabilities.
double cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                     Matrix* grad_probs = nullptr);

// Flips the time axis; with per-sample lengths present only the valid prefix
// is reversed in place and the padded suffix stays where it is.
Tensor3 reverse_time(const Tensor3& x);

}  // namespace geomclass::nn
