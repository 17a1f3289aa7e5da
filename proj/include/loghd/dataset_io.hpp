#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loghd/dataset.hpp"

namespace loghd {

struct DatasetSpec {
    std::string name;
    std::filesystem::path train_path;
    std::filesystem::path test_path;
    std::size_t feature_count = 0;  // 0 = take from the file
    std::size_t class_count = 0;    // 0 = take from the file
};

/// Train/test pair after scaling and label remapping.
struct LoadedDataset {
    std::string name;
    LabeledDataset train;
    LabeledDataset test;
    MinMaxScaler scaler;
    std::vector<std::int64_t> label_values;  // original label of each class index
};

struct KnownDataset {
    std::string_view name;
    std::size_t features;
    std::size_t classes;
    std::size_t train_rows;
    std::size_t test_rows;
};

/// Shape of the benchmark datasets this tool is usually run against.
std::span<const KnownDataset> known_datasets();

/// Rows are comma-separated features followed by an integer label, no
/// header. Features are min-max scaled with train statistics; labels are
/// remapped to 0..C-1 in sorted order of the training labels. Throws
/// IngestionError (with file and row number) on ragged rows, non-finite
/// values, bad labels, or test labels unseen in training.
LoadedDataset load_dataset(const DatasetSpec& spec);

/// Applies a fitted scaler and label map to a CSV file.
LabeledDataset load_split(const std::filesystem::path& path, const MinMaxScaler& scaler,
                          const std::vector<std::int64_t>& label_values);

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& data,
                       const std::vector<std::int64_t>& label_values = {});

struct BlobSpec {
    std::size_t classes = 4;
    std::size_t features = 16;
    std::size_t train_per_class = 40;
    std::size_t test_per_class = 20;
    double spread = 0.1;  // per-feature standard deviation around each center
    std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs with centers uniform in [0,1]^F, min-max scaled
/// with train statistics. Fully determined by the spec.
LoadedDataset generate_blobs(const BlobSpec& spec);

}  // namespace loghd
