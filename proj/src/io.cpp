#include "geomclass/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geomclass::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string escape_json(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string DatasetManifest::to_json() const {
    json doc;
    doc["version"] = version;
    doc["class_names"] = class_names;
    doc["split_counts"] = split_counts;
    if (scale_factor) {
        doc["scale_factor"] = *scale_factor;
        doc["std_convention"] = std_convention;
    }
    doc["max_points"] = max_points;
    doc["feature_layout_version"] = feature_layout_version;
    doc["seed"] = seed;
    return doc.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    json doc = json::parse(text);
    DatasetManifest m;
    m.version = doc.at("version").get<int>();
    m.class_names = doc.at("class_names").get<std::vector<std::string>>();
    m.split_counts = doc.at("split_counts").get<std::map<std::string, std::size_t>>();
    if (doc.contains("scale_factor")) {
        m.scale_factor = doc["scale_factor"].get<double>();
        m.std_convention = doc.value("std_convention", "population");
    }
    m.max_points = doc.value("max_points", std::size_t{1024});
    m.feature_layout_version = doc.value("feature_layout_version", 1);
    m.seed = doc.value("seed", std::uint64_t{0});
    return m;
}

// Canonical line form: keys in sorted order, floats at 17 significant digits.
std::string raw_record_line(const RawRecord& record) {
    std::ostringstream out;
    out << "{\"id\":\"" << escape_json(record.id) << "\",\"label\":" << record.label
        << ",\"wkt\":\"" << escape_json(geom::to_wkt(record.geometry)) << "\"}";
    return out.str();
}

RawRecord parse_raw_record(const std::string& line) {
    json doc = json::parse(line);
    RawRecord r;
    r.id = doc.at("id").get<std::string>();
    r.label = doc.at("label").get<int>();
    r.geometry = geom::parse_wkt(doc.at("wkt").get<std::string>());
    r.geometry.id = r.id;
    return r;
}

std::string encoded_record_line(const enc::GeometrySequence& seq) {
    std::ostringstream out;
    out << "{\"id\":\"" << escape_json(seq.id) << "\",\"label\":" << seq.label
        << ",\"seq\":[";
    for (std::size_t i = 0; i < seq.vectors.size(); ++i) {
        const auto& v = seq.vectors[i];
        if (i) out << ',';
        out << '[' << fmt17(v.x) << ',' << fmt17(v.y) << ',' << v.r_full << ','
            << v.r_sub << ',' << v.r_final << ']';
    }
    out << "]}";
    return out.str();
}

enc::GeometrySequence parse_encoded_record(const std::string& line) {
    json doc = json::parse(line);
    enc::GeometrySequence seq;
    seq.id = doc.at("id").get<std::string>();
    seq.label = doc.at("label").get<int>();
    for (const auto& row : doc.at("seq")) {
        if (row.size() != 5) throw std::invalid_argument("sequence row width != 5");
        enc::VertexVector v;
        v.x = row[0].get<double>();
        v.y = row[1].get<double>();
        v.r_full = row[2].get<double>();
        v.r_sub = row[3].get<double>();
        v.r_final = row[4].get<double>();
        seq.vectors.push_back(v);
    }
    return seq;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
    fs::create_directories(dir);
    DatasetManifest manifest = dataset.manifest;
    manifest.split_counts.clear();
    for (const auto& [split, records] : dataset.splits)
        manifest.split_counts[split] = records.size();
    write_file(dir + "/manifest.json", manifest.to_json());
    for (const auto& [split, records] : dataset.splits) {
        std::ostringstream out;
        for (const auto& r : records) out << raw_record_line(r) << '\n';
        write_file(dir + "/" + split + ".jsonl", out.str());
    }
}

Dataset load_dataset(const std::string& dir) {
    if (!fs::exists(dir + "/manifest.json"))
        throw std::runtime_error("missing file: " + dir + "/manifest.json");
    Dataset dataset;
    dataset.manifest = DatasetManifest::from_json(read_file(dir + "/manifest.json"));
    for (const auto& [split, count] : dataset.manifest.split_counts) {
        std::string path = dir + "/" + split + ".jsonl";
        std::istringstream in(read_file(path));
        std::string line;
        std::vector<RawRecord> records;
        while (std::getline(in, line))
            if (!line.empty()) records.push_back(parse_raw_record(line));
        if (records.size() != count)
            throw std::runtime_error("record count mismatch in " + path);
        dataset.splits[split] = std::move(records);
    }
    return dataset;
}

void save_encoded(const std::string& dir, const EncodedDataset& dataset) {
    fs::create_directories(dir);
    DatasetManifest manifest = dataset.manifest;
    manifest.split_counts.clear();
    for (const auto& [split, seqs] : dataset.splits)
        manifest.split_counts[split] = seqs.size();
    write_file(dir + "/manifest.json", manifest.to_json());
    for (const auto& [split, seqs] : dataset.splits) {
        std::ostringstream out;
        for (const auto& s : seqs) out << encoded_record_line(s) << '\n';
        write_file(dir + "/" + split + ".encoded.jsonl", out.str());
    }
}

EncodedDataset load_encoded(const std::string& dir) {
    if (!fs::exists(dir + "/manifest.json"))
        throw std::runtime_error("missing file: " + dir + "/manifest.json");
    EncodedDataset dataset;
    dataset.manifest = DatasetManifest::from_json(read_file(dir + "/manifest.json"));
    for (const auto& [split, count] : dataset.manifest.split_counts) {
        std::string path = dir + "/" + split + ".encoded.jsonl";
        std::istringstream in(read_file(path));
        std::string line;
        std::vector<enc::GeometrySequence> seqs;
        while (std::getline(in, line))
            if (!line.empty()) seqs.push_back(parse_encoded_record(line));
        if (seqs.size() != count)
            throw std::runtime_error("record count mismatch in " + path);
        dataset.splits[split] = std::move(seqs);
    }
    return dataset;
}

Dataset load_benchmark(const std::string& dir) { return load_dataset(dir); }

}  // namespace geomclass::io
