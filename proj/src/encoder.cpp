#include "loghd/encoder.hpp"

#include <cmath>
#include <numbers>

#include "loghd/errors.hpp"
#include "loghd/rng.hpp"

namespace loghd {

std::string_view to_string(Nonlinearity nl) {
    switch (nl) {
        case Nonlinearity::cosine: return "cosine";
        case Nonlinearity::sign: return "sign";
        case Nonlinearity::none: return "none";
    }
    return "unknown";
}

Nonlinearity parse_nonlinearity(std::string_view name) {
    if (name == "cosine") return Nonlinearity::cosine;
    if (name == "sign") return Nonlinearity::sign;
    if (name == "none") return Nonlinearity::none;
    throw ConfigError("unknown nonlinearity '" + std::string(name) + "'");
}

void EncoderSpec::validate() const {
    if (input_dim < 1) throw ConfigError("encoder input_dim must be >= 1");
    if (hyper_dim < 1) throw ConfigError("encoder hyper_dim must be >= 1");
    if (static_cast<std::uint8_t>(nonlinearity) > 2) throw ConfigError("invalid nonlinearity");
}

Encoder::Encoder(EncoderSpec spec) : spec_(spec) {
    spec_.validate();
    Rng rng(spec_.seed);
    projection_.resize(spec_.hyper_dim * spec_.input_dim);
    for (double& w : projection_) w = rng.normal();
    phase_.resize(spec_.hyper_dim);
    for (double& b : phase_) b = 2.0 * std::numbers::pi * rng.uniform();
}

Hypervector Encoder::encode(std::span<const double> x) const {
    if (x.size() != spec_.input_dim) {
        throw InputError("feature vector has length " + std::to_string(x.size()) + ", encoder expects " +
                         std::to_string(spec_.input_dim));
    }
    Hypervector h(spec_.hyper_dim);
    for (std::size_t j = 0; j < spec_.hyper_dim; ++j) {
        const double* row = projection_.data() + j * spec_.input_dim;
        double z = phase_[j];
        for (std::size_t i = 0; i < spec_.input_dim; ++i) z += row[i] * x[i];
        switch (spec_.nonlinearity) {
            case Nonlinearity::cosine: h[j] = std::cos(z); break;
            case Nonlinearity::sign: h[j] = z < 0.0 ? -1.0 : 1.0; break;
            case Nonlinearity::none: h[j] = z; break;
        }
    }
    normalize(h);
    return h;
}

Hypervector encode(const EncoderSpec& spec, std::span<const double> x) { return Encoder(spec).encode(x); }

}  // namespace loghd
