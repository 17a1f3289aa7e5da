#pragma once

#include <span>
#include <vector>

#include "loghd/dataset.hpp"
#include "loghd/encoder.hpp"
#include "loghd/hypervector.hpp"

namespace loghd {

/// Conventional HDC classifier: one normalized prototype per class.
struct PrototypeModel {
    EncoderSpec encoder;
    std::vector<Hypervector> prototypes;

    std::size_t class_count() const noexcept { return prototypes.size(); }
};

/// H_c = normalize(sum of encodings of class c). Samples are accumulated in
/// dataset order. Throws TrainingError on an empty class or a zero sum.
PrototypeModel train_prototypes(const EncodedSet& data, const EncoderSpec& spec);
PrototypeModel train_prototypes(const LabeledDataset& data, const EncoderSpec& spec);

/// argmax_c cosine(h, H_c), ties to the lowest class index. Stored vectors
/// with zero norm score 0.
std::size_t classify_by_similarity(std::span<const Hypervector> prototypes, std::span<const double> encoded);

std::size_t predict_conventional(const PrototypeModel& model, const Encoder& encoder, std::span<const double> x);

}  // namespace loghd
