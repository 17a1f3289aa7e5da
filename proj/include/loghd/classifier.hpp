#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "loghd/codebook.hpp"
#include "loghd/compression.hpp"
#include "loghd/dataset.hpp"
#include "loghd/encoder.hpp"
#include "loghd/loghd.hpp"
#include "loghd/prototype.hpp"

namespace loghd {

enum class Method : std::uint8_t { conventional = 0, loghd = 1, sparsehd = 2, hybrid = 3 };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Decodes with nearest activation profile (true) or with argmax cosine
/// against one stored vector per class (false).
constexpr bool uses_profiles(Method m) { return m == Method::loghd || m == Method::hybrid; }

/// Method-agnostic stored model: the vectors that go into the bit image,
/// the optional profiles, and the metadata needed to decode them.
struct ClassifierModel {
    Method method = Method::conventional;
    EncoderSpec encoder;
    std::size_t class_count = 0;
    std::vector<Hypervector> vectors;            // prototypes (C) or bundles (n)
    std::vector<std::vector<double>> profiles;   // C x n for profile decoders
    std::optional<Codebook> codebook;
    SparsityMask mask;

    std::size_t hyper_dim() const noexcept { return encoder.hyper_dim; }
};

ClassifierModel make_classifier(const PrototypeModel& model, Method method = Method::conventional);
ClassifierModel make_classifier(const SparsePrototypes& model);
ClassifierModel make_classifier(const LogHDModel& model);
ClassifierModel make_classifier(const SparseLogHD& model);

std::size_t predict(const ClassifierModel& model, std::span<const double> encoded,
                    InferenceCounters* counters = nullptr);

double accuracy(const ClassifierModel& model, const EncodedSet& data);

/// Stored vectors (masked) followed by profiles when present.
std::vector<Tensor> model_tensors(const ClassifierModel& model);

/// Copy of `shape` whose coordinates are replaced by `tensors`.
ClassifierModel with_tensors(const ClassifierModel& shape, const std::vector<Tensor>& tensors);

QuantizedState quantize(const ClassifierModel& model, const QuantSpec& spec);

/// Dequantized model built from a quantized bit image.
ClassifierModel dequantized(const ClassifierModel& shape, const QuantizedState& state);

}  // namespace loghd
