#include "geomclass/neural.hpp"

#include <cmath>
#include <stdexcept>

namespace geomclass::nn {

namespace {

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, rng::Rng& rng) {
    double limit = glorot_limit(fan_in, fan_out);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void adam_step(std::vector<Param*>& params, double lr, double beta1, double beta2,
               double eps, std::size_t t) {
    if (t < 1) throw std::invalid_argument("Adam step count must be >= 1");
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (Param* p : params) {
        if (!p->grad.allFinite())
            throw std::runtime_error("non-finite gradient for parameter '" + p->name + "'");
        p->m = beta1 * p->m + (1.0 - beta1) * p->grad;
        p->v = beta2 * p->v + (1.0 - beta2) * p->grad.cwiseProduct(p->grad);
        Matrix m_hat = p->m / bc1;
        Matrix v_hat = p->v / bc2;
        p->value.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + eps);
    }
}

// ----------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::size_t in_channels, std::size_t filters, std::size_t kernel,
               bool relu)
    : in_channels_(in_channels), filters_(filters), kernel_(kernel), relu_(relu) {
    if (kernel % 2 == 0) throw std::invalid_argument("kernel must be odd");
    weight.name = "conv.weight";
    bias.name = "conv.bias";
    weight.value = Matrix::Zero(static_cast<long>(kernel * in_channels), static_cast<long>(filters));
    bias.value = Matrix::Zero(1, static_cast<long>(filters));
    weight.init_moments();
    bias.init_moments();
}

void Conv1d::init(rng::Rng& rng) {
    glorot_fill(weight.value, kernel_ * in_channels_, filters_, rng);
    bias.value.setZero();
}

Tensor3 Conv1d::forward(const Tensor3& x) {
    if (static_cast<std::size_t>(x.channels()) != in_channels_)
        throw std::invalid_argument("conv1d channel mismatch");
    const Eigen::Index T = x.time();
    const long pad = static_cast<long>((kernel_ - 1) / 2);
    in_time_ = T;
    lengths_ = x.lengths;

    cols_.assign(x.batch(), {});
    preact_.assign(relu_ ? x.batch() : 0, {});

    Tensor3 out;
    out.lengths = x.lengths;
    out.samples.reserve(x.batch());
    for (std::size_t s = 0; s < x.batch(); ++s) {
        Matrix col = Matrix::Zero(T, static_cast<long>(kernel_ * in_channels_));
        for (long k = 0; k < static_cast<long>(kernel_); ++k) {
            long shift = k - pad;
            long lo = std::max(0L, -shift);
            long hi = std::min(static_cast<long>(T), static_cast<long>(T) - shift);
            if (hi <= lo) continue;
            col.block(lo, k * static_cast<long>(in_channels_), hi - lo,
                      static_cast<long>(in_channels_)) =
                x.samples[s].block(lo + shift, 0, hi - lo, static_cast<long>(in_channels_));
        }
        Matrix z = col * weight.value;
        z.rowwise() += bias.value.row(0);
        // Suppress outputs in the padded suffix so the result is identical
        // however far the batch was padded.
        if (!x.lengths.empty() && x.lengths[s] < T)
            z.bottomRows(T - x.lengths[s]).setZero();
        cols_[s] = std::move(col);
        if (relu_) {
            preact_[s] = z;
            out.samples.push_back(z.cwiseMax(0.0));
        } else {
            out.samples.push_back(std::move(z));
        }
    }
    return out;
}

Tensor3 Conv1d::backward(const Tensor3& grad_out) {
    const long pad = static_cast<long>((kernel_ - 1) / 2);
    Tensor3 grad_in;
    grad_in.samples.reserve(grad_out.batch());
    for (std::size_t s = 0; s < grad_out.batch(); ++s) {
        Matrix dz = grad_out.samples[s];
        if (relu_)
            dz = dz.cwiseProduct(
                (preact_[s].array() > 0.0).cast<double>().matrix());
        if (!lengths_.empty() && lengths_[s] < in_time_)
            dz.bottomRows(in_time_ - lengths_[s]).setZero();
        weight.grad += cols_[s].transpose() * dz;
        bias.grad.row(0) += dz.colwise().sum();

        Matrix dcol = dz * weight.value.transpose();
        Matrix dx = Matrix::Zero(in_time_, static_cast<long>(in_channels_));
        for (long k = 0; k < static_cast<long>(kernel_); ++k) {
            long shift = k - pad;
            long lo = std::max(0L, -shift);
            long hi = std::min(static_cast<long>(in_time_),
                               static_cast<long>(in_time_) - shift);
            if (hi <= lo) continue;
            dx.block(lo + shift, 0, hi - lo, static_cast<long>(in_channels_)) +=
                dcol.block(lo, k * static_cast<long>(in_channels_), hi - lo,
                           static_cast<long>(in_channels_));
        }
        grad_in.samples.push_back(std::move(dx));
    }
    return grad_in;
}

std::vector<Param*> Conv1d::params() { return {&weight, &bias}; }

// -------------------------------------------------------------- MaxPool1d

Tensor3 MaxPool1d::forward(const Tensor3& x) {
    const Eigen::Index T = x.time();
    if (T < 1) throw std::invalid_argument("empty time axis");
    const Eigen::Index C = x.channels();
    const Eigen::Index OT = (T + static_cast<Eigen::Index>(pool_) - 1) /
                            static_cast<Eigen::Index>(pool_);
    in_time_ = T;
    argmax_.assign(x.batch(), {});

    Tensor3 out;
    if (!x.lengths.empty()) {
        out.lengths.reserve(x.batch());
        for (Eigen::Index len : x.lengths)
            out.lengths.push_back(
                std::min(OT, (len + static_cast<Eigen::Index>(pool_) - 1) /
                                 static_cast<Eigen::Index>(pool_)));
    }
    out.samples.reserve(x.batch());
    for (std::size_t s = 0; s < x.batch(); ++s) {
        Matrix o(OT, C);
        Eigen::MatrixX<Eigen::Index> arg(OT, C);
        for (Eigen::Index w = 0; w < OT; ++w) {
            Eigen::Index lo = w * static_cast<Eigen::Index>(pool_);
            Eigen::Index hi = std::min(T, lo + static_cast<Eigen::Index>(pool_));
            for (Eigen::Index c = 0; c < C; ++c) {
                Eigen::Index best = lo;
                for (Eigen::Index t = lo + 1; t < hi; ++t)
                    if (x.samples[s](t, c) > x.samples[s](best, c)) best = t;
                o(w, c) = x.samples[s](best, c);
                arg(w, c) = best;
            }
        }
        argmax_[s] = std::move(arg);
        out.samples.push_back(std::move(o));
    }
    return out;
}

Tensor3 MaxPool1d::backward(const Tensor3& grad_out) {
    Tensor3 grad_in;
    grad_in.samples.reserve(grad_out.batch());
    for (std::size_t s = 0; s < grad_out.batch(); ++s) {
        Matrix dx = Matrix::Zero(in_time_, grad_out.channels());
        for (Eigen::Index w = 0; w < grad_out.time(); ++w)
            for (Eigen::Index c = 0; c < grad_out.channels(); ++c)
                dx(argmax_[s](w, c), c) += grad_out.samples[s](w, c);
        grad_in.samples.push_back(std::move(dx));
    }
    return grad_in;
}

// ---------------------------------------------------------- GlobalAvgPool

Matrix GlobalAvgPool::forward(const Tensor3& x) {
    time_ = x.time();
    if (time_ < 1) throw std::invalid_argument("empty time axis");
    lengths_ = x.lengths;
    Matrix out(static_cast<long>(x.batch()), x.channels());
    for (std::size_t s = 0; s < x.batch(); ++s) {
        Eigen::Index len = x.valid(s);
        if (len < 1) throw std::invalid_argument("empty valid length");
        out.row(static_cast<long>(s)) =
            x.samples[s].topRows(len).colwise().mean();
    }
    return out;
}

Tensor3 GlobalAvgPool::backward(const Matrix& grad_out) {
    Tensor3 grad_in;
    grad_in.samples.reserve(grad_out.rows());
    for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
        Eigen::Index len =
            lengths_.empty() ? time_ : lengths_[static_cast<std::size_t>(s)];
        Matrix dx = Matrix::Zero(time_, grad_out.cols());
        dx.topRows(len).rowwise() = grad_out.row(s) / static_cast<double>(len);
        grad_in.samples.push_back(std::move(dx));
    }
    return grad_in;
}

// ------------------------------------------------------------------ Dense

Dense::Dense(std::size_t in, std::size_t units, Activation activation)
    : activation_(activation) {
    weight.name = "dense.weight";
    bias.name = "dense.bias";
    weight.value = Matrix::Zero(static_cast<long>(in), static_cast<long>(units));
    bias.value = Matrix::Zero(1, static_cast<long>(units));
    weight.init_moments();
    bias.init_moments();
}

void Dense::init(rng::Rng& rng) {
    glorot_fill(weight.value, weight.value.rows(), weight.value.cols(), rng);
    bias.value.setZero();
}

Matrix Dense::forward(const Matrix& x) {
    if (x.cols() != weight.value.rows())
        throw std::invalid_argument("dense input width mismatch");
    input_ = x;
    preact_ = x * weight.value;
    preact_.rowwise() += bias.value.row(0);
    switch (activation_) {
        case Activation::none:
            output_ = preact_;
            break;
        case Activation::relu:
            output_ = preact_.cwiseMax(0.0);
            break;
        case Activation::softmax: {
            output_ = preact_;
            for (Eigen::Index i = 0; i < output_.rows(); ++i) {
                double m = output_.row(i).maxCoeff();
                output_.row(i) = (output_.row(i).array() - m).exp();
                output_.row(i) /= output_.row(i).sum();
            }
            break;
        }
    }
    return output_;
}

Matrix Dense::backward(const Matrix& grad_out) {
    Matrix dz;
    switch (activation_) {
        case Activation::none:
            dz = grad_out;
            break;
        case Activation::relu:
            dz = grad_out.cwiseProduct((preact_.array() > 0.0).cast<double>().matrix());
            break;
        case Activation::softmax: {
            dz.resize(grad_out.rows(), grad_out.cols());
            for (Eigen::Index i = 0; i < grad_out.rows(); ++i) {
                double dot = grad_out.row(i).dot(output_.row(i));
                dz.row(i) = output_.row(i).array() * (grad_out.row(i).array() - dot);
            }
            break;
        }
    }
    weight.grad += input_.transpose() * dz;
    bias.grad.row(0) += dz.colwise().sum();
    return dz * weight.value.transpose();
}

std::vector<Param*> Dense::params() { return {&weight, &bias}; }

// ------------------------------------------------------------------- LSTM

Lstm::Lstm(std::size_t input_size, std::size_t units)
    : input_size_(input_size), units_(units) {
    w_input.name = "lstm.w_input";
    w_hidden.name = "lstm.w_hidden";
    bias.name = "lstm.bias";
    w_input.value = Matrix::Zero(static_cast<long>(input_size), static_cast<long>(4 * units));
    w_hidden.value = Matrix::Zero(static_cast<long>(units), static_cast<long>(4 * units));
    bias.value = Matrix::Zero(1, static_cast<long>(4 * units));
    w_input.init_moments();
    w_hidden.init_moments();
    bias.init_moments();
}

void Lstm::init(rng::Rng& rng) {
    glorot_fill(w_input.value, input_size_, units_, rng);
    glorot_fill(w_hidden.value, units_, units_, rng);
    bias.value.setZero();
    // forget-gate bias = 1
    bias.value.block(0, static_cast<long>(units_), 1, static_cast<long>(units_))
        .setOnes();
}

std::pair<Vector, LstmState> Lstm::step(const Vector& x, const LstmState& state) const {
    if (x.size() != static_cast<long>(input_size_))
        throw std::invalid_argument("lstm input width mismatch");
    const long H = static_cast<long>(units_);
    Vector pre = w_input.value.transpose() * x + w_hidden.value.transpose() * state.hidden +
                 bias.value.row(0).transpose();
    LstmState next;
    next.hidden.resize(H);
    next.cell.resize(H);
    for (long u = 0; u < H; ++u) {
        double i = sigmoid(pre(u));
        double f = sigmoid(pre(H + u));
        double g = std::tanh(pre(2 * H + u));
        double o = sigmoid(pre(3 * H + u));
        next.cell(u) = f * state.cell(u) + i * g;
        next.hidden(u) = o * std::tanh(next.cell(u));
    }
    return {next.hidden, next};
}

Matrix Lstm::forward(const Tensor3& x) {
    if (static_cast<std::size_t>(x.channels()) != input_size_)
        throw std::invalid_argument("lstm input width mismatch");
    const long H = static_cast<long>(units_);
    const Eigen::Index T = x.time();
    input_ = x;
    h_.assign(x.batch(), {});
    c_.assign(x.batch(), {});
    gi_.assign(x.batch(), {});
    gf_.assign(x.batch(), {});
    gg_.assign(x.batch(), {});
    go_.assign(x.batch(), {});

    Matrix out(static_cast<long>(x.batch()), H);
    for (std::size_t s = 0; s < x.batch(); ++s) {
        const Eigen::Index L = x.valid(s);  // padded suffix is skipped
        if (L < 1) throw std::invalid_argument("empty valid length");
        Vector h = Vector::Zero(H), c = Vector::Zero(H);
        h_[s].reserve(T + 1);
        c_[s].reserve(T + 1);
        h_[s].push_back(h);
        c_[s].push_back(c);
        for (Eigen::Index t = 0; t < L; ++t) {
            Vector xt = x.samples[s].row(t).transpose();
            Vector pre = w_input.value.transpose() * xt +
                         w_hidden.value.transpose() * h + bias.value.row(0).transpose();
            Vector gi(H), gf(H), gg(H), go(H), cn(H), hn(H);
            for (long u = 0; u < H; ++u) {
                gi(u) = sigmoid(pre(u));
                gf(u) = sigmoid(pre(H + u));
                gg(u) = std::tanh(pre(2 * H + u));
                go(u) = sigmoid(pre(3 * H + u));
                cn(u) = gf(u) * c(u) + gi(u) * gg(u);
                hn(u) = go(u) * std::tanh(cn(u));
            }
            h = hn;
            c = cn;
            h_[s].push_back(h);
            c_[s].push_back(c);
            gi_[s].push_back(gi);
            gf_[s].push_back(gf);
            gg_[s].push_back(gg);
            go_[s].push_back(go);
        }
        out.row(static_cast<long>(s)) = h.transpose();
    }
    return out;
}

Tensor3 Lstm::backward(const Matrix& grad_final_h) {
    const long H = static_cast<long>(units_);
    const Eigen::Index T = input_.time();
    Tensor3 grad_in;
    grad_in.samples.reserve(input_.batch());

    for (std::size_t s = 0; s < input_.batch(); ++s) {
        const Eigen::Index L = input_.valid(s);
        Matrix dx = Matrix::Zero(T, static_cast<long>(input_size_));
        Vector dh = grad_final_h.row(static_cast<long>(s)).transpose();
        Vector dc = Vector::Zero(H);
        for (Eigen::Index t = L - 1; t >= 0; --t) {
            const Vector& gi = gi_[s][t];
            const Vector& gf = gf_[s][t];
            const Vector& gg = gg_[s][t];
            const Vector& go = go_[s][t];
            const Vector& c_prev = c_[s][t];
            const Vector& c_new = c_[s][t + 1];

            Vector dpre(4 * H);
            for (long u = 0; u < H; ++u) {
                double tc = std::tanh(c_new(u));
                double dgo = dh(u) * tc;
                double dcu = dc(u) + dh(u) * go(u) * (1.0 - tc * tc);
                double dgi = dcu * gg(u);
                double dgg = dcu * gi(u);
                double dgf = dcu * c_prev(u);
                dc(u) = dcu * gf(u);

                dpre(u) = dgi * gi(u) * (1.0 - gi(u));
                dpre(H + u) = dgf * gf(u) * (1.0 - gf(u));
                dpre(2 * H + u) = dgg * (1.0 - gg(u) * gg(u));
                dpre(3 * H + u) = dgo * go(u) * (1.0 - go(u));
            }

            Vector xt = input_.samples[s].row(t).transpose();
            w_input.grad += xt * dpre.transpose();
            w_hidden.grad += h_[s][t] * dpre.transpose();
            bias.grad.row(0) += dpre.transpose();
            dx.row(t) = (w_input.value * dpre).transpose();
            dh = w_hidden.value * dpre;
        }
        grad_in.samples.push_back(std::move(dx));
    }
    return grad_in;
}

std::vector<Param*> Lstm::params() { return {&w_input, &w_hidden, &bias}; }

// ----------------------------------------------------------------- BiLstm

BiLstm::BiLstm(std::size_t input_size, std::size_t units)
    : forward_cell(input_size, units), backward_cell(input_size, units) {
    forward_cell.w_input.name = "bilstm.fwd.w_input";
    forward_cell.w_hidden.name = "bilstm.fwd.w_hidden";
    forward_cell.bias.name = "bilstm.fwd.bias";
    backward_cell.w_input.name = "bilstm.bwd.w_input";
    backward_cell.w_hidden.name = "bilstm.bwd.w_hidden";
    backward_cell.bias.name = "bilstm.bwd.bias";
}

void BiLstm::init(rng::Rng& rng) {
    forward_cell.init(rng);
    backward_cell.init(rng);
}

Tensor3 reverse_time(const Tensor3& x) {
    Tensor3 out;
    out.lengths = x.lengths;
    out.samples.reserve(x.batch());
    for (std::size_t s = 0; s < x.batch(); ++s) {
        Eigen::Index len = x.valid(s);
        Matrix m = x.samples[s];
        m.topRows(len) = x.samples[s].topRows(len).colwise().reverse().eval();
        out.samples.push_back(std::move(m));
    }
    return out;
}

Matrix BiLstm::forward(const Tensor3& x) {
    lengths_ = x.lengths;
    Matrix f = forward_cell.forward(x);
    Matrix b = backward_cell.forward(reverse_time(x));
    Matrix out(f.rows(), f.cols() + b.cols());
    out << f, b;
    return out;
}

Tensor3 BiLstm::backward(const Matrix& grad_out) {
    const long H = static_cast<long>(forward_cell.units());
    Tensor3 df = forward_cell.backward(grad_out.leftCols(H));
    Tensor3 db = backward_cell.backward(grad_out.rightCols(H));
    db.lengths = lengths_;
    Tensor3 db_rev = reverse_time(db);
    for (std::size_t s = 0; s < df.batch(); ++s) df.samples[s] += db_rev.samples[s];
    return df;
}

std::vector<Param*> BiLstm::params() {
    std::vector<Param*> out = forward_cell.params();
    for (Param* p : backward_cell.params()) out.push_back(p);
    return out;
}

// ------------------------------------------------------------------- loss

double cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                     Matrix* grad_probs) {
    if (static_cast<std::size_t>(probs.rows()) != labels.size())
        throw std::invalid_argument("probability/label count mismatch");
    const double n = static_cast<double>(labels.size());
    double loss = 0.0;
    if (grad_probs) *grad_probs = Matrix::Zero(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double p = std::max(probs(static_cast<long>(i), labels[i]), 1e-300);
        loss -= std::log(p);
        if (grad_probs) (*grad_probs)(static_cast<long>(i), labels[i]) = -1.0 / (n * p);
    }
    return loss / n;
}

}  // namespace geomclass::nn
