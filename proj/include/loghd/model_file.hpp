#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "loghd/classifier.hpp"
#include "loghd/compression.hpp"
#include "loghd/dataset.hpp"

namespace loghd {

/// On-disk model: header, quantized payload, CRC-32 of the payload.
///
/// Layout (all integers little-endian, reals as IEEE-754 binary64):
///   "LOGHD1"
///   u8 method, u32 C, u32 D, u32 vector count, u32 k (0 = no codebook),
///   u8 bits, f64 sparsity
///   u32 input_dim, u64 encoder seed, u8 nonlinearity
///   u8 has_codebook [f64 alpha, f64 tie_epsilon, u64 pool cap, u64 seed,
///                    u32 n, C*n u8 symbols]
///   u32 label count, i64 labels...
///   u32 scaler width, f64 minima..., f64 maxima...
///   u32 tensor count, per tensor: u32 rows, u32 cols, f64 scale,
///                    u64 bit offset, u8 has_mask [ceil(cols/8) mask bytes]
///   u64 payload bits, payload bytes, u32 CRC-32(payload)
struct ModelFile {
    ClassifierModel shape;  // metadata; coordinates are restored from `state`
    QuantizedState state;
    std::vector<std::int64_t> label_values;
    MinMaxScaler scaler;

    /// Dequantized classifier ready for inference.
    ClassifierModel model() const;
};

ModelFile make_model_file(const ClassifierModel& model, const QuantSpec& quant,
                          std::vector<std::int64_t> label_values = {}, MinMaxScaler scaler = {});

std::vector<std::uint8_t> serialize_model(const ModelFile& file);

/// Throws FormatError on bad magic, truncation, inconsistent header, or a
/// checksum mismatch.
ModelFile parse_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

std::uint32_t payload_checksum(std::span<const std::uint8_t> payload);

}  // namespace loghd
