#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loghd/dataset.hpp"
#include "loghd/hypervector.hpp"
#include "loghd/loghd.hpp"
#include "loghd/prototype.hpp"

namespace loghd {

// ---------------------------------------------------------------------------
// Dimension-wise sparsification
// ---------------------------------------------------------------------------

struct SparsityMask {
    std::vector<std::uint8_t> retained;  // one flag per hypervector coordinate
    double sparsity = 0.0;
    std::size_t retained_count = 0;

    static SparsityMask dense(std::size_t dim);
    bool is_dense() const noexcept { return retained_count == retained.size(); }
};

/// round((1 - S) * D). Throws ConfigError unless 0 <= S < 1.
std::size_t retained_count_for(double sparsity, std::size_t dim);

/// Per-dimension saliency: population variance of the coordinate across the
/// stored vectors.
std::vector<double> dimension_saliency(std::span<const Hypervector> vectors);

/// Mask that drops the D - round((1-S)D) lowest-saliency dimensions; equal
/// scores drop the lower index first. Throws ConfigError when nothing would
/// be retained.
SparsityMask mask_from_scores(std::span<const double> scores, double sparsity);

/// Zeroes the masked-out dimensions of every vector and renormalizes.
void apply_mask(std::vector<Hypervector>& vectors, const SparsityMask& mask);

struct SparsePrototypes {
    PrototypeModel model;
    SparsityMask mask;
};

struct SparseLogHD {
    LogHDModel model;
    SparsityMask mask;
};

/// SparseHD-style pruning: one mask shared by all stored vectors. S = 0
/// returns the input unchanged.
SparsePrototypes sparsify(const PrototypeModel& model, double sparsity);

/// Prunes the bundles only; profiles are left untouched.
SparseLogHD sparsify(const LogHDModel& model, double sparsity);

/// Class- plus feature-axis compression: prune the bundles, then
/// re-estimate profiles against the pruned bundles on `train`.
SparseLogHD hybridize(const LogHDModel& model, double sparsity, const EncodedSet& train);

// ---------------------------------------------------------------------------
// Post-training quantization
// ---------------------------------------------------------------------------

/// Symmetric uniform per-tensor quantization. Codes are sign-magnitude:
/// the top bit of each b-bit word is the sign, the low b-1 bits hold the
/// magnitude (0 .. 2^(b-1)-1). At b = 1 only the sign is stored.
struct QuantSpec {
    unsigned bits = 8;

    void validate() const;
};

/// Row-major matrix of model coordinates with an optional column mask
/// shared by all rows (empty mask = every column stored).
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> column_mask;

    bool stored(std::size_t col) const { return column_mask.empty() || column_mask[col] != 0; }
    std::size_t stored_cols() const;
    std::size_t stored_coords() const { return rows * stored_cols(); }
};

struct QuantizedTensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> column_mask;
    double scale = 0.0;
    std::size_t bit_offset = 0;

    bool stored(std::size_t col) const { return column_mask.empty() || column_mask[col] != 0; }
    std::size_t stored_coords() const;
};

/// Bit-packed model memory image. Bit i lives in payload[i / 8] at position
/// i % 8; each coordinate's word is written least-significant bit first.
/// Scales and masks are metadata and are not part of the bit image.
struct QuantizedState {
    unsigned bits = 8;
    std::vector<QuantizedTensor> tensors;
    std::vector<std::uint8_t> payload;
    std::size_t payload_bits = 0;

    std::size_t payload_bytes() const noexcept { return payload.size(); }

    /// Throws FormatError if the metadata and the bit image disagree.
    void validate() const;
};

/// scale = max|x| / (2^(b-1) - 1) for b >= 2, mean|x| for b = 1, taken over
/// stored coordinates only. Throws DomainError on an all-zero tensor.
double quantization_scale(const Tensor& t, unsigned bits);

QuantizedState quantize(std::span<const Tensor> tensors, const QuantSpec& spec);

/// Masked-out coordinates come back as exact zeros.
std::vector<Tensor> dequantize(const QuantizedState& state);

bool get_bit(std::span<const std::uint8_t> payload, std::size_t index);
void flip_bit(std::span<std::uint8_t> payload, std::size_t index);

}  // namespace loghd
