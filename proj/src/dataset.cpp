#include "loghd/dataset.hpp"

#include <algorithm>
#include <string>

#include "loghd/errors.hpp"

namespace loghd {

namespace {

std::vector<std::size_t> count_labels(const std::vector<std::size_t>& labels, std::size_t class_count) {
    std::vector<std::size_t> counts(class_count, 0);
    for (std::size_t y : labels) {
        if (y >= class_count) throw TrainingError("label " + std::to_string(y) + " out of range");
        ++counts[y];
    }
    return counts;
}

void require_nonempty_classes(const std::vector<std::size_t>& counts) {
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw TrainingError("class " + std::to_string(c) + " has no samples");
    }
}

}  // namespace

std::vector<std::size_t> LabeledDataset::class_counts() const { return count_labels(labels, class_count); }

void LabeledDataset::validate() const {
    if (class_count == 0) throw TrainingError("dataset declares zero classes");
    if (features.size() != labels.size()) throw TrainingError("feature/label count mismatch");
    const std::size_t width = feature_count();
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != width) throw TrainingError("ragged feature row " + std::to_string(i));
    }
    require_nonempty_classes(class_counts());
}

std::vector<std::size_t> EncodedSet::class_counts() const { return count_labels(labels, class_count); }

void EncodedSet::require_every_class() const {
    if (class_count == 0) throw TrainingError("dataset declares zero classes");
    require_nonempty_classes(class_counts());
}

EncodedSet encode_dataset(const Encoder& encoder, const LabeledDataset& data) {
    EncodedSet out;
    out.class_count = data.class_count;
    out.labels = data.labels;
    out.samples.reserve(data.size());
    for (const auto& row : data.features) out.samples.push_back(encoder.encode(row));
    return out;
}

MinMaxScaler MinMaxScaler::fit(const LabeledDataset& train) {
    MinMaxScaler s;
    const std::size_t width = train.feature_count();
    s.minimum.assign(width, 0.0);
    s.maximum.assign(width, 0.0);
    if (train.features.empty()) return s;
    s.minimum = train.features.front();
    s.maximum = train.features.front();
    for (const auto& row : train.features) {
        for (std::size_t i = 0; i < width; ++i) {
            s.minimum[i] = std::min(s.minimum[i], row[i]);
            s.maximum[i] = std::max(s.maximum[i], row[i]);
        }
    }
    return s;
}

void MinMaxScaler::apply(std::vector<double>& row) const {
    if (row.size() != minimum.size()) throw InputError("scaler width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
        const double range = maximum[i] - minimum[i];
        row[i] = range > 0.0 ? (row[i] - minimum[i]) / range : 0.0;
    }
}

void MinMaxScaler::apply(LabeledDataset& data) const {
    for (auto& row : data.features) apply(row);
}

}  // namespace loghd
