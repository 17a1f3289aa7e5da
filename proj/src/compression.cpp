#include "loghd/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "loghd/errors.hpp"

namespace loghd {

SparsityMask SparsityMask::dense(std::size_t dim) {
    SparsityMask m;
    m.retained.assign(dim, 1);
    m.sparsity = 0.0;
    m.retained_count = dim;
    return m;
}

std::size_t retained_count_for(double sparsity, std::size_t dim) {
    if (!(sparsity >= 0.0 && sparsity < 1.0)) {
        throw ConfigError("sparsity must lie in [0, 1), got " + std::to_string(sparsity));
    }
    return static_cast<std::size_t>(std::llround((1.0 - sparsity) * static_cast<double>(dim)));
}

std::vector<double> dimension_saliency(std::span<const Hypervector> vectors) {
    if (vectors.empty()) return {};
    const std::size_t dim = vectors.front().size();
    const double count = static_cast<double>(vectors.size());
    std::vector<double> score(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (const auto& v : vectors) mean += v[d];
        mean /= count;
        double var = 0.0;
        for (const auto& v : vectors) var += (v[d] - mean) * (v[d] - mean);
        score[d] = var / count;
    }
    return score;
}

SparsityMask mask_from_scores(std::span<const double> scores, double sparsity) {
    const std::size_t dim = scores.size();
    const std::size_t keep = retained_count_for(sparsity, dim);
    if (keep == 0) throw ConfigError("sparsity " + std::to_string(sparsity) + " retains no dimensions");

    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    SparsityMask mask;
    mask.retained.assign(dim, 1);
    for (std::size_t i = 0; i < dim - keep; ++i) mask.retained[order[i]] = 0;
    mask.sparsity = sparsity;
    mask.retained_count = keep;
    return mask;
}

void apply_mask(std::vector<Hypervector>& vectors, const SparsityMask& mask) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        auto& v = vectors[i];
        if (v.size() != mask.retained.size()) throw InputError("mask/vector dimension mismatch");
        for (std::size_t d = 0; d < v.size(); ++d) {
            if (!mask.retained[d]) v[d] = 0.0;
        }
        if (norm(v) == 0.0) throw TrainingError("vector " + std::to_string(i) + " is zero after pruning");
        normalize(v);
    }
}

SparsePrototypes sparsify(const PrototypeModel& model, double sparsity) {
    const std::size_t dim = model.encoder.hyper_dim;
    retained_count_for(sparsity, dim);
    if (sparsity == 0.0) return {model, SparsityMask::dense(dim)};
    SparsePrototypes out{model, mask_from_scores(dimension_saliency(model.prototypes), sparsity)};
    apply_mask(out.model.prototypes, out.mask);
    return out;
}

SparseLogHD sparsify(const LogHDModel& model, double sparsity) {
    const std::size_t dim = model.hyper_dim();
    retained_count_for(sparsity, dim);
    if (sparsity == 0.0) return {model, SparsityMask::dense(dim)};
    SparseLogHD out{model, mask_from_scores(dimension_saliency(model.bundles), sparsity)};
    apply_mask(out.model.bundles, out.mask);
    return out;
}

SparseLogHD hybridize(const LogHDModel& model, double sparsity, const EncodedSet& train) {
    SparseLogHD out = sparsify(model, sparsity);
    if (sparsity != 0.0) out.model.profiles = estimate_profiles(out.model.bundles, train);
    return out;
}

// ---------------------------------------------------------------------------

void QuantSpec::validate() const {
    if (bits != 1 && bits != 2 && bits != 4 && bits != 8) {
        throw ConfigError("quantization bits must be one of {1, 2, 4, 8}, got " + std::to_string(bits));
    }
}

std::size_t Tensor::stored_cols() const {
    if (column_mask.empty()) return cols;
    return static_cast<std::size_t>(std::count_if(column_mask.begin(), column_mask.end(), [](auto f) { return f != 0; }));
}

std::size_t QuantizedTensor::stored_coords() const {
    if (column_mask.empty()) return rows * cols;
    return rows * static_cast<std::size_t>(
                      std::count_if(column_mask.begin(), column_mask.end(), [](auto f) { return f != 0; }));
}

bool get_bit(std::span<const std::uint8_t> payload, std::size_t index) {
    return (payload[index >> 3] >> (index & 7)) & 1u;
}

void flip_bit(std::span<std::uint8_t> payload, std::size_t index) {
    payload[index >> 3] ^= static_cast<std::uint8_t>(1u << (index & 7));
}

namespace {

void set_bit(std::vector<std::uint8_t>& payload, std::size_t index, bool value) {
    if (value) payload[index >> 3] |= static_cast<std::uint8_t>(1u << (index & 7));
}

std::uint32_t max_magnitude(unsigned bits) { return (1u << (bits - 1)) - 1u; }

void check_tensor(const Tensor& t) {
    if (t.values.size() != t.rows * t.cols) throw InputError("tensor value count does not match its shape");
    if (!t.column_mask.empty() && t.column_mask.size() != t.cols) throw InputError("tensor mask width mismatch");
    for (double v : t.values) {
        if (!std::isfinite(v)) throw DomainError("cannot quantize a non-finite coordinate");
    }
}

}  // namespace

double quantization_scale(const Tensor& t, unsigned bits) {
    double max_abs = 0.0;
    double sum_abs = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t c = 0; c < t.cols; ++c) {
            if (!t.stored(c)) continue;
            const double a = std::fabs(t.values[r * t.cols + c]);
            max_abs = std::max(max_abs, a);
            sum_abs += a;
            ++count;
        }
    }
    if (count == 0 || max_abs == 0.0) throw DomainError("cannot quantize an all-zero tensor (degenerate scale)");
    if (bits == 1) return sum_abs / static_cast<double>(count);
    return max_abs / static_cast<double>(max_magnitude(bits));
}

QuantizedState quantize(std::span<const Tensor> tensors, const QuantSpec& spec) {
    spec.validate();
    const unsigned bits = spec.bits;
    QuantizedState state;
    state.bits = bits;

    std::size_t total_bits = 0;
    for (const auto& t : tensors) {
        check_tensor(t);
        QuantizedTensor q;
        q.rows = t.rows;
        q.cols = t.cols;
        q.column_mask = t.column_mask;
        q.scale = quantization_scale(t, bits);
        q.bit_offset = total_bits;
        total_bits += t.stored_coords() * bits;
        state.tensors.push_back(std::move(q));
    }
    state.payload_bits = total_bits;
    state.payload.assign((total_bits + 7) / 8, 0);

    const std::uint32_t mag_max = bits == 1 ? 0 : max_magnitude(bits);
    for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
        const Tensor& t = tensors[ti];
        const QuantizedTensor& q = state.tensors[ti];
        std::size_t cursor = q.bit_offset;
        for (std::size_t r = 0; r < t.rows; ++r) {
            for (std::size_t c = 0; c < t.cols; ++c) {
                if (!t.stored(c)) continue;
                const double x = t.values[r * t.cols + c];
                std::uint32_t magnitude = 0;
                if (bits > 1) {
                    const double m = std::round(std::fabs(x) / q.scale);  // half away from zero
                    magnitude = static_cast<std::uint32_t>(std::min(m, static_cast<double>(mag_max)));
                }
                // Zero has a single canonical code (sign bit clear) for b >= 2.
                const bool negative = x < 0.0 && (bits == 1 || magnitude != 0);
                for (unsigned b = 0; b + 1 < bits; ++b) set_bit(state.payload, cursor + b, (magnitude >> b) & 1u);
                set_bit(state.payload, cursor + bits - 1, negative);
                cursor += bits;
            }
        }
    }
    return state;
}

void QuantizedState::validate() const {
    if (bits != 1 && bits != 2 && bits != 4 && bits != 8) throw FormatError("invalid bit width in model state");
    std::size_t expected = 0;
    for (const auto& t : tensors) {
        if (!t.column_mask.empty() && t.column_mask.size() != t.cols) throw FormatError("tensor mask width mismatch");
        if (t.bit_offset != expected) throw FormatError("tensor bit offsets are not contiguous");
        if (!(t.scale > 0.0) || !std::isfinite(t.scale)) throw FormatError("tensor scale must be positive");
        expected += t.stored_coords() * bits;
    }
    if (expected != payload_bits) throw FormatError("payload bit count does not match tensor layout");
    if (payload.size() != (payload_bits + 7) / 8) throw FormatError("payload byte count does not match bit count");
}

std::vector<Tensor> dequantize(const QuantizedState& state) {
    state.validate();
    const unsigned bits = state.bits;
    std::vector<Tensor> out;
    out.reserve(state.tensors.size());
    for (const auto& q : state.tensors) {
        Tensor t;
        t.rows = q.rows;
        t.cols = q.cols;
        t.column_mask = q.column_mask;
        t.values.assign(q.rows * q.cols, 0.0);
        std::size_t cursor = q.bit_offset;
        for (std::size_t r = 0; r < q.rows; ++r) {
            for (std::size_t c = 0; c < q.cols; ++c) {
                if (!q.stored(c)) continue;
                std::uint32_t magnitude = 0;
                for (unsigned b = 0; b + 1 < bits; ++b) {
                    magnitude |= static_cast<std::uint32_t>(get_bit(state.payload, cursor + b)) << b;
                }
                const bool negative = get_bit(state.payload, cursor + bits - 1);
                const double level = bits == 1 ? 1.0 : static_cast<double>(magnitude);
                double value = level * q.scale;
                if (negative && value != 0.0) value = -value;
                t.values[r * q.cols + c] = value;
                cursor += bits;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace loghd
