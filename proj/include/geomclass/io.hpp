#pragma once

#include "geomclass/encoding.hpp"
#include "geomclass/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace geomclass::io {

struct DatasetManifest {
    int version = 1;
    std::vector<std::string> class_names;
    std::map<std::string, std::size_t> split_counts;
    std::optional<double> scale_factor;       // Eq-4 style dataset scale, train-derived
    std::string std_convention = "population";
    std::size_t max_points = 1024;
    int feature_layout_version = 1;
    std::uint64_t seed = 0;

    std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);
};

struct RawRecord {
    std::string id;
    int label = 0;
    geom::Geometry geometry;
};

// Raw datasets: manifest.json plus one <split>.jsonl per split, one record
// per line in canonical form (sorted keys, %.17g floats) so that
// save -> load -> save is byte identical.
struct Dataset {
    DatasetManifest manifest;
    std::map<std::string, std::vector<RawRecord>> splits;
};

// Encoded datasets: same manifest, records carry the 5-wide sequences.
struct EncodedDataset {
    DatasetManifest manifest;
    std::map<std::string, std::vector<enc::GeometrySequence>> splits;
};

std::string raw_record_line(const RawRecord& record);
RawRecord parse_raw_record(const std::string& line);

std::string encoded_record_line(const enc::GeometrySequence& seq);
enc::GeometrySequence parse_encoded_record(const std::string& line);

void save_dataset(const std::string& dir, const Dataset& dataset);
Dataset load_dataset(const std::string& dir);

void save_encoded(const std::string& dir, const EncodedDataset& dataset);
EncodedDataset load_encoded(const std::string& dir);

// Native-format loader; a directory without manifest.json is reported by
// name. GeoJSON ingestion (the adapter point for externally published data)
// goes through geom::parse_geojson plus save_dataset.
Dataset load_benchmark(const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace geomclass::io
