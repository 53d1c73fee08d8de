#include "doctest.h"

#include "geomclass/models.hpp"
#include "geomclass/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace geomclass;

namespace {

// Two sequence classes separable by the sign of the coordinate channels.
std::vector<enc::Batch> make_batches(std::size_t per_class, std::uint64_t seed,
                                     std::size_t batch_size = 8, std::size_t n_bin = 16) {
    rng::Rng r(seed);
    std::vector<enc::GeometrySequence> seqs;
    for (int cls = 0; cls < 2; ++cls)
        for (std::size_t i = 0; i < per_class; ++i) {
            enc::GeometrySequence s;
            s.label = cls;
            s.id = "s" + std::to_string(cls) + "-" + std::to_string(i);
            std::size_t len = 6 + r.below(5);
            double mean = cls == 0 ? 0.8 : -0.8;
            for (std::size_t t = 0; t < len; ++t) {
                enc::VertexVector v;
                v.x = r.normal(mean, 0.2);
                v.y = r.normal(-mean, 0.2);
                if (t + 1 == len)
                    v.r_final = 1.0;
                else
                    v.r_full = 1.0;
                s.vectors.push_back(v);
            }
            seqs.push_back(std::move(s));
        }
    return enc::bin_and_pad(std::move(seqs), batch_size, n_bin);
}

}  // namespace

TEST_CASE("cnn parameter count") {
    // conv1 5x5x32+32, conv2 5x32x64+64, fc 64x64+64, head 64x9+9
    models::CnnClassifier cnn(9);
    CHECK(cnn.parameter_count() == 832 + 10304 + 4160 + 585);
    CHECK(cnn.parameter_count() == 15881);
}

TEST_CASE("rnn parameter count") {
    // per direction: 5x128 + 32x128 + 128 = 4864; head 64x10+10 = 650
    models::RnnClassifier rnn(10);
    CHECK(rnn.parameter_count() == 2 * 4864 + 650);
}

TEST_CASE("bilstm feature width is 64") {
    rng::Rng r(1);
    nn::BiLstm bilstm(5, 32);
    bilstm.init(r);
    nn::Tensor3 x;
    x.samples.assign(3, nn::Matrix::Random(7, 5));
    CHECK(bilstm.forward(x).cols() == 64);
}

TEST_CASE("classifiers emit probability rows") {
    auto batches = make_batches(8, 3);
    nn::Tensor3 x = models::to_tensor(batches[0]);
    for (auto* model : {static_cast<models::SequenceClassifier*>(new models::CnnClassifier(4)),
                        static_cast<models::SequenceClassifier*>(new models::RnnClassifier(4))}) {
        model->init(7);
        nn::Matrix probs = model->forward(x);
        CHECK(probs.cols() == 4);
        for (Eigen::Index i = 0; i < probs.rows(); ++i) {
            CHECK(probs.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(probs.row(i).minCoeff() >= 0.0);
        }
        delete model;
    }
}

TEST_CASE("to_tensor lays out the five channels") {
    enc::Batch batch;
    enc::GeometrySequence s;
    enc::VertexVector v;
    v.x = 1.5;
    v.y = -2.5;
    v.r_sub = 1.0;
    s.vectors.push_back(v);
    s.vectors.push_back({});  // padding row
    batch.sequences.push_back(s);
    batch.labels.push_back(0);
    batch.m_bin = 2;

    nn::Tensor3 t = models::to_tensor(batch);
    REQUIRE(t.batch() == 1);
    CHECK(t.time() == 2);
    CHECK(t.channels() == 5);
    CHECK(t.samples[0](0, 0) == 1.5);
    CHECK(t.samples[0](0, 1) == -2.5);
    CHECK(t.samples[0](0, 3) == 1.0);
    CHECK(t.samples[0].row(1).cwiseAbs().sum() == 0.0);
}

TEST_CASE("training memorizes a separable task") {
    auto train_batches = make_batches(20, 11);
    auto val_batches = make_batches(5, 12);

    models::TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.patience = 6;
    cfg.seed = 5;

    models::CnnClassifier cnn(2);
    auto history = models::train(cnn, train_batches, val_batches, cfg);
    CHECK(history.epochs.size() <= cfg.max_epochs);
    CHECK(models::evaluate_accuracy(cnn, train_batches) >= 0.95);

    models::RnnClassifier rnn(2);
    models::train(rnn, train_batches, val_batches, cfg);
    CHECK(models::evaluate_accuracy(rnn, train_batches) >= 0.95);
}

TEST_CASE("train validates its configuration") {
    auto batches = make_batches(4, 1);
    models::TrainConfig cfg;
    cfg.max_epochs = 5;
    cfg.patience = 5;  // must be < max_epochs
    models::RnnClassifier rnn(2);
    CHECK_THROWS(models::train(rnn, batches, batches, cfg));
    CHECK_THROWS(models::train(rnn, {}, batches, models::TrainConfig{}));
}

TEST_CASE("patience zero stops one epoch after the best") {
    auto train_batches = make_batches(10, 21);
    models::TrainConfig cfg;
    cfg.max_epochs = 40;
    cfg.patience = 0;
    cfg.seed = 9;
    models::RnnClassifier rnn(2);
    auto history = models::train(rnn, train_batches, train_batches, cfg);
    if (history.epochs.size() < cfg.max_epochs)
        CHECK(history.epochs.size() == history.best_epoch + 2);
}

TEST_CASE("training is deterministic for a fixed seed") {
    auto train_batches = make_batches(8, 31);
    models::TrainConfig cfg;
    cfg.max_epochs = 4;
    cfg.patience = 2;
    cfg.seed = 123;

    models::CnnClassifier a(2), b(2);
    auto ha = models::train(a, train_batches, train_batches, cfg);
    auto hb = models::train(b, train_batches, train_batches, cfg);
    CHECK(a.checkpoint_json() == b.checkpoint_json());
    REQUIRE(ha.epochs.size() == hb.epochs.size());
    for (std::size_t e = 0; e < ha.epochs.size(); ++e)
        CHECK(ha.epochs[e].train_loss == hb.epochs[e].train_loss);
}

TEST_CASE("checkpoints reload bit-exactly") {
    auto train_batches = make_batches(8, 41);
    models::TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.patience = 1;

    models::RnnClassifier trained(2);
    models::train(trained, train_batches, train_batches, cfg);
    std::string saved = trained.checkpoint_json();

    models::RnnClassifier fresh(2);
    fresh.load_checkpoint_json(saved);
    CHECK(fresh.checkpoint_json() == saved);
    nn::Tensor3 x = models::to_tensor(train_batches[0]);
    CHECK(fresh.predict(x) == trained.predict(x));

    models::CnnClassifier wrong(2);
    CHECK_THROWS(wrong.load_checkpoint_json(saved));  // architecture mismatch
}

TEST_CASE("repeated runs aggregate test accuracy") {
    auto train_batches = make_batches(10, 51);
    auto test_batches = make_batches(5, 52);
    models::TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.patience = 1;

    auto result = models::repeated_runs([] { return models::build_rnn(2); },
                                        train_batches, train_batches, test_batches,
                                        cfg, 2);
    REQUIRE(result.accuracies.size() == 2);
    double mean = (result.accuracies[0] + result.accuracies[1]) / 2.0;
    CHECK(result.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));
    double var = 0.0;
    for (double a : result.accuracies) var += (a - mean) * (a - mean);
    CHECK(result.std_accuracy == doctest::Approx(std::sqrt(var / 2.0)).epsilon(1e-9));
    CHECK(result.format().find("±") != std::string::npos);

    CHECK_THROWS(models::repeated_runs([] { return models::build_rnn(2); },
                                       train_batches, train_batches, test_batches,
                                       cfg, 1));
}

TEST_CASE("predictions are invariant to the amount of suffix padding") {
    // The same sequence padded to different batch lengths must produce the
    // same probabilities, otherwise accuracy depends on how sequences were
    // binned at evaluation time.
    rng::Rng r(61);
    enc::GeometrySequence s;
    s.label = 0;
    s.id = "pad-check";
    for (std::size_t t = 0; t < 9; ++t) {
        enc::VertexVector v;
        v.x = r.normal(0.3, 0.5);
        v.y = r.normal(-0.2, 0.5);
        if (t == 8)
            v.r_final = 1.0;
        else
            v.r_full = 1.0;
        s.vectors.push_back(v);
    }
    enc::Batch tight, loose;
    tight.m_bin = 9;
    loose.m_bin = 40;
    tight.sequences.push_back(s);
    tight.labels.push_back(0);
    while (s.vectors.size() < 40) s.vectors.push_back({});
    loose.sequences.push_back(s);
    loose.labels.push_back(0);

    for (auto builder : {models::build_cnn, models::build_rnn}) {
        auto model = builder(3);
        model->init(17);
        nn::Matrix a = model->forward(models::to_tensor(tight));
        nn::Matrix b = model->forward(models::to_tensor(loose));
        REQUIRE(a.rows() == b.rows());
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            CHECK(a(0, j) == doctest::Approx(b(0, j)).epsilon(1e-12));
    }
}
