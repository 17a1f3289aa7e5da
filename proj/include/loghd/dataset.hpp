#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loghd/encoder.hpp"
#include "loghd/hypervector.hpp"

namespace loghd {

struct LabeledDataset {
    std::vector<std::vector<double>> features;
    std::vector<std::size_t> labels;
    std::size_t class_count = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t feature_count() const noexcept { return features.empty() ? 0 : features.front().size(); }

    /// Per-class sample counts N_y.
    std::vector<std::size_t> class_counts() const;

    /// Throws TrainingError unless labels are in range, rows are consistent
    /// and every class has at least one sample.
    void validate() const;
};

/// A dataset passed through the encoder once. Training and evaluation
/// routines work on encoded samples so encoding cost is paid a single time.
struct EncodedSet {
    std::vector<Hypervector> samples;
    std::vector<std::size_t> labels;
    std::size_t class_count = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::vector<std::size_t> class_counts() const;
    void require_every_class() const;
};

EncodedSet encode_dataset(const Encoder& encoder, const LabeledDataset& data);

/// Per-feature min-max scaling to [0, 1], fitted on a training split.
/// Constant features map to 0.
struct MinMaxScaler {
    std::vector<double> minimum;
    std::vector<double> maximum;

    static MinMaxScaler fit(const LabeledDataset& train);
    void apply(std::vector<double>& row) const;
    void apply(LabeledDataset& data) const;
};

}  // namespace loghd
