// Command-line frontend for the geometry-classification pipeline:
// synthetic data generation, encoding, feature extraction, shallow and deep
// training, evaluation and comparison reporting.

#include "CLI11.hpp"

#include "geomclass/datagen.hpp"
#include "geomclass/efd.hpp"
#include "geomclass/encoding.hpp"
#include "geomclass/geometry.hpp"
#include "geomclass/harness.hpp"
#include "geomclass/io.hpp"
#include "geomclass/models.hpp"
#include "geomclass/shallow.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace geomclass;
using nlohmann::json;

namespace {

void write_run_manifest(const std::string& out_dir, const std::string& command,
                        const json& params) {
    json doc;
    doc["command"] = command;
    doc["parameters"] = params;
    io::write_file(out_dir + "/run_manifest.json", doc.dump(2) + "\n");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// "4:9" -> {4,5,...,9}
std::vector<std::size_t> parse_size_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return parse_size_list(text);
    std::size_t lo = std::stoul(text.substr(0, colon));
    std::size_t hi = std::stoul(text.substr(colon + 1));
    if (hi < lo) throw std::invalid_argument("empty range: " + text);
    std::vector<std::size_t> out;
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

io::Dataset dataset_from_samples(const std::vector<datagen::Sample>& samples,
                                 std::vector<std::string> class_names,
                                 std::uint64_t seed) {
    std::vector<int> labels;
    for (const auto& s : samples) labels.push_back(s.label);
    harness::Split split = harness::split_stratified(labels, 0.8, 0.1, seed);

    io::Dataset dataset;
    dataset.manifest.class_names = std::move(class_names);
    dataset.manifest.seed = seed;
    auto fill = [&](const std::string& name, const std::vector<std::size_t>& idx) {
        auto& records = dataset.splits[name];
        for (std::size_t i : idx)
            records.push_back({samples[i].geometry.id, samples[i].label,
                               samples[i].geometry});
    };
    fill("train", split.train);
    fill("validation", split.validation);
    fill("test", split.test);
    return dataset;
}

struct SplitGeometries {
    std::vector<geom::Geometry> geoms;
    std::vector<int> labels;
};

SplitGeometries geometries_of(const io::Dataset& dataset, const std::string& split) {
    auto it = dataset.splits.find(split);
    if (it == dataset.splits.end())
        throw std::runtime_error("dataset has no split '" + split + "'");
    SplitGeometries out;
    for (const auto& r : it->second) {
        out.geoms.push_back(r.geometry);
        out.labels.push_back(r.label);
    }
    return out;
}

// ------------------------------------------------------------ subcommands

int run_synth(std::size_t classes, std::size_t per_class, std::uint64_t seed,
              const std::string& out_dir, bool hard_pair, double overlap) {
    std::vector<datagen::Sample> samples;
    std::vector<std::string> names;
    if (hard_pair) {
        samples = datagen::generate_hard_pair(per_class, seed, overlap);
        names = {"rect_low_aspect", "rect_high_aspect"};
    } else {
        samples = datagen::generate(classes, per_class, seed);
        names = datagen::class_names(classes);
    }
    io::Dataset dataset = dataset_from_samples(samples, names, seed);
    io::save_dataset(out_dir, dataset);
    write_run_manifest(out_dir, "synth",
                       {{"classes", classes},
                        {"per_class", per_class},
                        {"seed", seed},
                        {"hard_pair", hard_pair},
                        {"overlap", overlap}});
    std::cout << "wrote dataset to " << out_dir << " (train "
              << dataset.splits["train"].size() << ", validation "
              << dataset.splits["validation"].size() << ", test "
              << dataset.splits["test"].size() << ")\n";
    return 0;
}

int run_encode(const std::string& data_dir, const std::string& out_dir,
               std::size_t max_points) {
    io::Dataset raw = io::load_benchmark(data_dir);

    // Scale factor from the training split only.
    std::vector<geom::Geometry> train_geoms;
    for (const auto& r : raw.splits.at("train"))
        train_geoms.push_back(enc::simplify_if_needed(r.geometry, max_points));
    enc::ScaleFactor s = enc::compute_scale_factor(train_geoms);

    io::EncodedDataset encoded;
    encoded.manifest = raw.manifest;
    encoded.manifest.scale_factor = s.s;
    encoded.manifest.std_convention = "population";
    encoded.manifest.max_points = max_points;
    for (const auto& [split, records] : raw.splits) {
        auto& seqs = encoded.splits[split];
        for (const auto& r : records) {
            geom::Geometry g = enc::simplify_if_needed(r.geometry, max_points);
            enc::GeometrySequence seq = enc::to_sequence(g);
            seq.label = r.label;
            seqs.push_back(enc::normalize(seq, geom::vertex_mean(g), s));
        }
    }
    io::save_encoded(out_dir, encoded);
    write_run_manifest(out_dir, "encode",
                       {{"data", data_dir},
                        {"max_points", max_points},
                        {"scale_factor", s.s}});
    std::cout << "scale factor s = " << s.s << "; encoded dataset written to "
              << out_dir << "\n";
    return 0;
}

int run_features(const std::string& data_dir, std::size_t order,
                 const std::string& out_path) {
    io::Dataset raw = io::load_benchmark(data_dir);
    std::ostringstream csv;
    bool header_done = false;
    for (const auto& [split, records] : raw.splits) {
        (void)split;
        for (const auto& r : records) {
            auto fv = efd::features(r.geometry, order);
            if (!header_done) {
                for (const auto& name : fv.layout) csv << name << ',';
                csv << "label\n";
                header_done = true;
            }
            for (double v : fv.values) csv << v << ',';
            csv << r.label << '\n';
        }
    }
    io::write_file(out_path, csv.str());
    std::cout << "features (order " << order << ") written to " << out_path << "\n";
    return 0;
}

int run_reconstruct(const std::string& wkt, std::size_t order, std::size_t samples,
                    const std::string& out_path) {
    geom::Geometry g = geom::parse_wkt(wkt);
    auto coeffs = efd::efd(g.rings.front(), order);
    auto pts = efd::reconstruct(coeffs, samples);
    std::ostringstream csv;
    csv << "x,y\n";
    for (const auto& p : pts) csv << p.x << ',' << p.y << '\n';
    if (out_path.empty())
        std::cout << csv.str();
    else {
        io::write_file(out_path, csv.str());
        std::cout << "reconstruction written to " << out_path << "\n";
    }
    return 0;
}

json evaluate_shallow(const shallow::ShallowModel& model,
                      const shallow::Standardizer& std_, std::size_t order,
                      const io::Dataset& raw, const std::string& split,
                      const std::string& out_dir, const std::string& method) {
    auto data = geometries_of(raw, split);
    auto X = std_.apply(harness::feature_matrix(data.geoms, order));
    auto pred = model.predict(X);
    double acc = harness::accuracy(pred, data.labels);
    auto cm = harness::confusion(pred, data.labels, raw.manifest.class_names.size());
    io::write_file(out_dir + "/confusion_" + method + "_" + split + ".csv", cm.to_csv());
    return {{"split", split}, {"accuracy", acc}};
}

void save_shallow_model(const std::string& path, const shallow::ShallowModel& model,
                        const shallow::Standardizer& std_, std::size_t order) {
    json doc;
    doc["version"] = 1;
    doc["order"] = order;
    doc["standardizer"] = {
        {"mean", std::vector<double>(std_.mean.data(), std_.mean.data() + std_.mean.size())},
        {"std", std::vector<double>(std_.std.data(), std_.std.data() + std_.std.size())}};
    doc["model"] = json::parse(model.to_json());
    io::write_file(path, doc.dump(2) + "\n");
}

std::tuple<std::unique_ptr<shallow::ShallowModel>, shallow::Standardizer, std::size_t>
load_shallow_model(const std::string& path) {
    json doc = json::parse(io::read_file(path));
    shallow::Standardizer std_;
    auto mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
    auto std_v = doc.at("standardizer").at("std").get<std::vector<double>>();
    std_.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<long>(mean.size()));
    std_.std = Eigen::Map<Eigen::VectorXd>(std_v.data(), static_cast<long>(std_v.size()));
    return {shallow::model_from_json(doc.at("model").dump()), std_,
            doc.at("order").get<std::size_t>()};
}

int run_train_shallow(const std::string& data_dir, const std::string& model_name,
                      std::size_t order, std::size_t k, double c, std::size_t depth,
                      double gamma, std::size_t max_iter, const std::string& out_dir) {
    io::Dataset raw = io::load_benchmark(data_dir);
    auto kind = shallow::model_kind_from_string(model_name);
    auto train = geometries_of(raw, "train");

    auto Xraw = harness::feature_matrix(train.geoms, order);
    auto std_ = shallow::Standardizer::fit(Xraw);
    auto X = std_.apply(Xraw);

    std::unique_ptr<shallow::ShallowModel> model;
    switch (kind) {
        case shallow::ModelKind::knn: model = shallow::fit_knn(X, train.labels, k); break;
        case shallow::ModelKind::logreg: model = shallow::fit_logreg(X, train.labels, c); break;
        case shallow::ModelKind::dtree: model = shallow::fit_dtree(X, train.labels, depth); break;
        case shallow::ModelKind::svm_rbf:
            model = shallow::fit_svm_rbf(X, train.labels, c, gamma, max_iter);
            break;
    }

    std::string method = shallow::to_string(kind);
    save_shallow_model(out_dir + "/model_" + method + ".json", *model, std_, order);

    json results;
    results["method"] = method;
    results["order"] = order;
    json evals = json::array();
    for (const std::string& split : {"validation", "test"})
        if (raw.splits.count(split))
            evals.push_back(evaluate_shallow(*model, std_, order, raw, split, out_dir, method));
    results["evaluations"] = evals;
    for (const auto& e : evals)
        if (e["split"] == "test") results["accuracy"] = e["accuracy"];
    auto test = geometries_of(raw, "test");
    results["majority"] = harness::majority_baseline(train.labels, test.labels);

    io::write_file(out_dir + "/results/" + method + ".json", results.dump(2) + "\n");
    write_run_manifest(out_dir, "train-shallow",
                       {{"data", data_dir}, {"model", method}, {"order", order},
                        {"k", k}, {"C", c}, {"depth", depth}, {"gamma", gamma},
                        {"max_iter", max_iter}});
    std::cout << method << " test accuracy: "
              << results.value("accuracy", 0.0) << "\n";
    return 0;
}

int run_grid_search(const std::string& data_dir, const std::string& model_name,
                    const std::string& orders, const std::string& ks,
                    const std::string& depths, const std::string& cs,
                    const std::string& gammas, std::size_t folds,
                    std::size_t subset_cap, std::size_t svm_max_iter,
                    std::uint64_t seed, const std::string& out_dir) {
    io::Dataset raw = io::load_benchmark(data_dir);
    auto kind = shallow::model_kind_from_string(model_name);
    auto train = geometries_of(raw, "train");

    harness::GridSpec grid = harness::GridSpec::defaults(kind);
    if (!orders.empty()) grid.orders = parse_size_list(orders);
    if (!ks.empty()) grid.ks = parse_size_range(ks);
    if (!depths.empty()) grid.depths = parse_size_range(depths);
    if (!cs.empty()) grid.cs = parse_double_list(cs);
    if (!gammas.empty()) grid.gammas = parse_double_list(gammas);

    auto result = harness::grid_search(kind, train.geoms, train.labels, grid, folds,
                                       subset_cap, seed, svm_max_iter);

    std::ostringstream table;
    table << "combination,mean_cv_accuracy\n";
    for (const auto& combo : result.table)
        table << combo.describe(kind) << ',' << combo.mean_cv_accuracy << '\n';
    std::string method = shallow::to_string(kind);
    io::write_file(out_dir + "/cv_table_" + method + ".csv", table.str());

    save_shallow_model(out_dir + "/model_" + method + ".json", *result.refit_model,
                       result.standardizer, result.best.order);

    json results;
    results["method"] = method;
    results["best"] = result.best.describe(kind);
    results["order"] = result.best.order;
    results["cv_accuracy"] = result.best.mean_cv_accuracy;
    if (raw.splits.count("test")) {
        auto eval = evaluate_shallow(*result.refit_model, result.standardizer,
                                     result.best.order, raw, "test", out_dir, method);
        results["accuracy"] = eval["accuracy"];
        auto test = geometries_of(raw, "test");
        results["majority"] = harness::majority_baseline(train.labels, test.labels);
    }
    io::write_file(out_dir + "/results/" + method + ".json", results.dump(2) + "\n");
    write_run_manifest(out_dir, "grid-search",
                       {{"data", data_dir}, {"model", method},
                        {"folds", folds}, {"subset_cap", subset_cap},
                        {"svm_max_iter", svm_max_iter}, {"seed", seed}});
    std::cout << "best " << method << ": " << result.best.describe(kind)
              << " (cv accuracy " << result.best.mean_cv_accuracy << ")\n";
    if (results.contains("accuracy"))
        std::cout << "test accuracy: " << results["accuracy"].get<double>() << "\n";
    return 0;
}

int run_train_deep(const std::string& data_dir, const std::string& arch,
                   std::size_t repeats, models::TrainConfig cfg,
                   const std::string& out_dir) {
    io::EncodedDataset encoded = io::load_encoded(data_dir);
    std::size_t num_classes = encoded.manifest.class_names.size();

    auto batches_of = [&](const std::string& split) {
        return enc::bin_and_pad(encoded.splits.at(split), cfg.batch_size, cfg.n_bin);
    };
    auto train_batches = batches_of("train");
    auto val_batches = batches_of("validation");
    auto test_batches = batches_of("test");

    models::ModelBuilder builder = [&]() {
        return arch == "cnn" ? models::build_cnn(num_classes)
                             : models::build_rnn(num_classes);
    };

    json results;
    results["method"] = arch;
    if (repeats >= 2) {
        auto rr = models::repeated_runs(builder, train_batches, val_batches,
                                        test_batches, cfg, repeats);
        results["accuracy"] = rr.mean_accuracy;
        results["std"] = rr.std_accuracy;
        results["runs"] = rr.accuracies;
        std::cout << arch << ": " << rr.format() << "\n";
    } else {
        auto model = builder();
        auto history = models::train(*model, train_batches, val_batches, cfg);
        double acc = models::evaluate_accuracy(*model, test_batches);
        io::write_file(out_dir + "/checkpoint_" + arch + ".json",
                       model->checkpoint_json());
        json epochs = json::array();
        for (const auto& e : history.epochs)
            epochs.push_back({{"train_loss", e.train_loss},
                              {"train_accuracy", e.train_accuracy},
                              {"val_accuracy", e.val_accuracy}});
        results["history"] = epochs;
        results["accuracy"] = acc;
        std::cout << arch << " test accuracy: " << acc << "\n";
    }
    io::write_file(out_dir + "/results/" + arch + ".json", results.dump(2) + "\n");
    write_run_manifest(out_dir, "train-deep",
                       {{"data", data_dir}, {"arch", arch}, {"repeats", repeats},
                        {"batch_size", cfg.batch_size}, {"max_epochs", cfg.max_epochs},
                        {"patience", cfg.patience}, {"seed", cfg.seed},
                        {"learning_rate", cfg.learning_rate}, {"n_bin", cfg.n_bin}});
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data_dir,
                 const std::string& split, const std::string& out_dir) {
    io::Dataset raw = io::load_benchmark(data_dir);
    auto [model, std_, order] = load_shallow_model(model_path);
    auto eval = evaluate_shallow(*model, std_, order, raw, split, out_dir,
                                 shallow::to_string(model->kind()));
    write_run_manifest(out_dir, "evaluate",
                       {{"model", model_path}, {"data", data_dir}, {"split", split}});
    std::cout << split << " accuracy: " << eval["accuracy"].get<double>() << "\n";
    return 0;
}

int run_report(const std::string& run_dir, const std::string& out_dir) {
    harness::ComparisonResults results;
    bool have_majority = false;
    for (const auto& entry : fs::directory_iterator(run_dir + "/results")) {
        if (entry.path().extension() != ".json") continue;
        json doc = json::parse(io::read_file(entry.path().string()));
        std::string method = doc.at("method").get<std::string>();
        if (doc.contains("majority") && !have_majority) {
            results.majority = doc["majority"].get<double>();
            have_majority = true;
        }
        if (method == "cnn")
            results.cnn = {doc.at("accuracy").get<double>(), doc.value("std", 0.0)};
        else if (method == "rnn")
            results.rnn = {doc.at("accuracy").get<double>(), doc.value("std", 0.0)};
        else if (doc.contains("accuracy"))
            results.shallow_accuracy[method] = doc["accuracy"].get<double>();
    }
    std::string text = harness::report_text(results);
    io::write_file(out_dir + "/comparison.txt", text);
    io::write_file(out_dir + "/comparison.csv", harness::report_csv(results));
    write_run_manifest(out_dir, "report", {{"run_dir", run_dir}});
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometry classification pipeline"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::string out_dir = "runs/latest";
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--out-dir", out_dir, "output directory");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::size_t classes = 5, per_class = 500;
    bool hard_pair = false;
    double overlap = 0.3;
    synth->add_option("--classes", classes, "number of shape classes (2-5)");
    synth->add_option("--per-class", per_class, "samples per class");
    synth->add_flag("--hard-pair", hard_pair, "generate the overlapping-rectangle task");
    synth->add_option("--overlap", overlap, "aspect-ratio overlap for --hard-pair");

    // encode
    auto* encode = app.add_subcommand("encode", "encode a raw dataset to sequences");
    std::string data_dir;
    std::size_t max_points = 1024;
    encode->add_option("--data", data_dir, "raw dataset directory")->required();
    encode->add_option("--max-points", max_points, "simplification vertex budget");

    // features
    auto* features = app.add_subcommand("features", "emit EFD feature CSV");
    std::string features_data, features_out = "features.csv";
    std::size_t features_order = 4;
    features->add_option("--data", features_data, "raw dataset directory")->required();
    features->add_option("--order", features_order, "EFD order");
    features->add_option("--out", features_out, "output CSV path");

    // reconstruct
    auto* reconstruct = app.add_subcommand("reconstruct", "EFD reconstruction of a WKT ring");
    std::string wkt, reconstruct_out;
    std::size_t rec_order = 4, rec_samples = 200;
    reconstruct->add_option("--wkt", wkt, "POLYGON WKT")->required();
    reconstruct->add_option("--order", rec_order, "EFD order");
    reconstruct->add_option("--samples", rec_samples, "sample count");
    reconstruct->add_option("--out", reconstruct_out, "output CSV (stdout if empty)");

    // train-shallow
    auto* train_shallow = app.add_subcommand("train-shallow", "train one shallow model");
    std::string ts_data, ts_model = "dtree";
    std::size_t ts_order = 3, ts_k = 5, ts_depth = 6, ts_max_iter = 10'000'000;
    double ts_c = 1.0, ts_gamma = 0.1;
    train_shallow->add_option("--data", ts_data, "raw dataset directory")->required();
    train_shallow->add_option("--model", ts_model, "knn|logreg|dtree|svm_rbf");
    train_shallow->add_option("--order", ts_order, "EFD order");
    train_shallow->add_option("--k", ts_k, "k-NN neighbour count");
    train_shallow->add_option("--c", ts_c, "C for logreg/svm");
    train_shallow->add_option("--depth", ts_depth, "decision tree depth");
    train_shallow->add_option("--gamma", ts_gamma, "RBF gamma");
    train_shallow->add_option("--max-iter", ts_max_iter, "SMO iteration cap");

    // grid-search
    auto* grid = app.add_subcommand("grid-search", "shallow-model grid search");
    std::string gs_data, gs_model = "dtree", gs_orders, gs_ks, gs_depths, gs_cs, gs_gammas;
    std::size_t gs_folds = 5, gs_subset_cap = 10'000, gs_svm_max_iter = 10'000'000;
    grid->add_option("--data", gs_data, "raw dataset directory")->required();
    grid->add_option("--model", gs_model, "knn|logreg|dtree|svm_rbf");
    grid->add_option("--orders", gs_orders, "comma list of EFD orders");
    grid->add_option("--ks", gs_ks, "k range lo:hi");
    grid->add_option("--depths", gs_depths, "depth range lo:hi");
    grid->add_option("--cs", gs_cs, "comma list of C values");
    grid->add_option("--gammas", gs_gammas, "comma list of gamma values");
    grid->add_option("--folds", gs_folds, "cross-validation folds");
    grid->add_option("--subset-cap", gs_subset_cap, "row cap for knn/svm search");
    grid->add_option("--svm-max-iter", gs_svm_max_iter, "SMO iteration cap");

    // train-deep
    auto* train_deep = app.add_subcommand("train-deep", "train CNN or RNN");
    std::string td_data, td_arch = "cnn";
    std::size_t td_repeats = 1;
    models::TrainConfig cfg;
    train_deep->add_option("--data", td_data, "encoded dataset directory")->required();
    train_deep->add_option("--arch", td_arch, "cnn|rnn")
        ->check(CLI::IsMember({"cnn", "rnn"}));
    train_deep->add_option("--repeats", td_repeats, "independent training runs");
    train_deep->add_option("--batch-size", cfg.batch_size, "batch size");
    train_deep->add_option("--epochs", cfg.max_epochs, "maximum epochs");
    train_deep->add_option("--patience", cfg.patience, "early-stopping patience");
    train_deep->add_option("--lr", cfg.learning_rate, "Adam learning rate");
    train_deep->add_option("--n-bin", cfg.n_bin, "bin size for length binning");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a saved shallow model");
    std::string ev_model, ev_data, ev_split = "test";
    evaluate->add_option("--model", ev_model, "saved model JSON")->required();
    evaluate->add_option("--data", ev_data, "raw dataset directory")->required();
    evaluate->add_option("--split", ev_split, "split name");

    // report
    auto* report = app.add_subcommand("report", "assemble the comparison table");
    std::string report_run_dir;
    report->add_option("--run-dir", report_run_dir, "directory with results/*.json")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) return run_synth(classes, per_class, seed, out_dir, hard_pair, overlap);
        if (*encode) return run_encode(data_dir, out_dir, max_points);
        if (*features) return run_features(features_data, features_order, features_out);
        if (*reconstruct)
            return run_reconstruct(wkt, rec_order, rec_samples, reconstruct_out);
        if (*train_shallow)
            return run_train_shallow(ts_data, ts_model, ts_order, ts_k, ts_c, ts_depth,
                                     ts_gamma, ts_max_iter, out_dir);
        if (*grid)
            return run_grid_search(gs_data, gs_model, gs_orders, gs_ks, gs_depths,
                                   gs_cs, gs_gammas, gs_folds, gs_subset_cap,
                                   gs_svm_max_iter, seed, out_dir);
        if (*train_deep) {
            cfg.seed = seed;
            return run_train_deep(td_data, td_arch, td_repeats, cfg, out_dir);
        }
        if (*evaluate) return run_evaluate(ev_model, ev_data, ev_split, out_dir);
        if (*report) return run_report(report_run_dir, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
