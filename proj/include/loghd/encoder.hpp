#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loghd/hypervector.hpp"

namespace loghd {

enum class Nonlinearity : std::uint8_t { cosine = 0, sign = 1, none = 2 };

std::string_view to_string(Nonlinearity nl);
Nonlinearity parse_nonlinearity(std::string_view name);

struct EncoderSpec {
    std::size_t input_dim = 1;
    std::size_t hyper_dim = 4096;
    std::uint64_t seed = 0;
    Nonlinearity nonlinearity = Nonlinearity::cosine;

    void validate() const;
    bool operator==(const EncoderSpec&) const = default;
};

/// Random-projection encoder.
///
/// Coordinate j of the output is nonlinearity(<w_j, x> + b_j) where the rows
/// w_j are i.i.d. standard normal and the phases b_j are uniform in [0, 2*pi),
/// all drawn from the spec's seed. The result is l2-normalized.
class Encoder {
public:
    explicit Encoder(EncoderSpec spec);

    const EncoderSpec& spec() const noexcept { return spec_; }

    /// Throws InputError if x.size() != input_dim.
    Hypervector encode(std::span<const double> x) const;

private:
    EncoderSpec spec_;
    std::vector<double> projection_;  // hyper_dim x input_dim, row-major
    std::vector<double> phase_;
};

/// One-shot encode; rebuilds the projection on every call.
Hypervector encode(const EncoderSpec& spec, std::span<const double> x);

}  // namespace loghd
