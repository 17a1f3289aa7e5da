#include "loghd/loghd.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "loghd/errors.hpp"
#include "loghd/rng.hpp"

namespace loghd {

void RefinementSpec::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("refinement learning rate must be > 0");
}

std::vector<Hypervector> build_bundles(const PrototypeModel& protos, const Codebook& cb) {
    if (protos.class_count() != cb.class_count()) {
        throw ConfigError("codebook has " + std::to_string(cb.class_count()) + " rows but model has " +
                          std::to_string(protos.class_count()) + " prototypes");
    }
    const std::size_t dim = protos.encoder.hyper_dim;
    std::vector<Hypervector> bundles(cb.code_length(), Hypervector(dim, 0.0));
    for (std::size_t j = 0; j < cb.code_length(); ++j) {
        auto& m = bundles[j];
        for (std::size_t c = 0; c < cb.class_count(); ++c) {
            const double w = symbol_weight(cb.at(c, j), cb.alphabet_size());
            if (w == 0.0) continue;
            const auto& h = protos.prototypes[c];
            for (std::size_t d = 0; d < dim; ++d) m[d] += w * h[d];
        }
        if (norm(m) == 0.0) throw TrainingError("bundle " + std::to_string(j) + " has a zero superposition");
        normalize(m);
    }
    return bundles;
}

std::vector<double> activation(std::span<const Hypervector> bundles, std::span<const double> encoded,
                               InferenceCounters* counters) {
    std::vector<double> a(bundles.size());
    for (std::size_t j = 0; j < bundles.size(); ++j) a[j] = cosine_or_zero(bundles[j], encoded);
    if (counters) counters->similarity_ops += bundles.size();
    return a;
}

std::vector<double> activation(const LogHDModel& model, const Encoder& encoder, std::span<const double> x) {
    return activation(model.bundles, encoder.encode(x));
}

std::vector<std::vector<double>> estimate_profiles(std::span<const Hypervector> bundles, const EncodedSet& data) {
    data.require_every_class();
    const std::size_t n = bundles.size();
    std::vector<std::vector<double>> sums(data.class_count, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto a = activation(bundles, data.samples[i]);
        auto& acc = sums[data.labels[i]];
        for (std::size_t j = 0; j < n; ++j) acc[j] += a[j];
    }
    const auto counts = data.class_counts();
    for (std::size_t c = 0; c < sums.size(); ++c) {
        for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

std::size_t nearest_profile(std::span<const std::vector<double>> profiles, std::span<const double> activations,
                            InferenceCounters* counters) {
    std::vector<double> dist(profiles.size());
    for (std::size_t c = 0; c < profiles.size(); ++c) {
        const auto& p = profiles[c];
        if (p.size() != activations.size()) throw InputError("profile length mismatch");
        double d2 = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double diff = activations[j] - p[j];
            d2 += diff * diff;
        }
        dist[c] = d2;
    }
    if (counters) counters->distance_ops += profiles.size();
    return argmin(dist);
}

std::size_t predict(const LogHDModel& model, std::span<const double> encoded, InferenceCounters* counters) {
    return nearest_profile(model.profiles, activation(model.bundles, encoded, counters), counters);
}

std::size_t predict(const LogHDModel& model, const Encoder& encoder, std::span<const double> x) {
    return predict(model, encoder.encode(x));
}

void refine_step(std::vector<Hypervector>& bundles, const Codebook& cb, std::span<const double> encoded,
                 std::size_t label, double learning_rate) {
    const double query_norm = norm(encoded);
    if (query_norm == 0.0) throw DomainError("refinement sample encodes to a zero vector");
    for (std::size_t j = 0; j < bundles.size(); ++j) {
        auto& m = bundles[j];
        if (m.size() != encoded.size()) throw InputError("bundle/sample dimension mismatch");
        double m_dot_h = 0.0;
        double m_sq = 0.0;
        for (std::size_t d = 0; d < m.size(); ++d) {
            m_dot_h += m[d] * encoded[d];
            m_sq += m[d] * m[d];
        }
        if (m_sq == 0.0) throw DomainError("bundle " + std::to_string(j) + " collapsed to zero");
        const double a = m_dot_h / (std::sqrt(m_sq) * query_norm);
        const double tau = symbol_target(cb.at(label, j), cb.alphabet_size());
        const double step = learning_rate * (tau - a);
        double new_sq = 0.0;
        for (std::size_t d = 0; d < m.size(); ++d) {
            m[d] += step * encoded[d];
            new_sq += m[d] * m[d];
        }
        if (new_sq == 0.0) throw DomainError("bundle " + std::to_string(j) + " collapsed to zero");
        const double inv = 1.0 / std::sqrt(new_sq);
        for (double& v : m) v *= inv;
    }
}

LogHDModel refine(const LogHDModel& model, const EncodedSet& data, const RefinementSpec& spec) {
    spec.validate();
    if (spec.epochs == 0) return model;
    if (data.class_count != model.class_count()) throw ConfigError("refinement data class count mismatch");

    LogHDModel out = model;
    Rng rng(spec.seed);
    std::vector<std::size_t> order(data.size());
    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t idx : order) {
            refine_step(out.bundles, out.codebook, data.samples[idx], data.labels[idx], spec.learning_rate);
        }
    }
    if (spec.refresh_profiles) out.profiles = estimate_profiles(out.bundles, data);
    return out;
}

LogHDModel train_loghd(const PrototypeModel& protos, const EncodedSet& train, const LogHDConfig& config) {
    CodebookSpec cs;
    cs.class_count = protos.class_count();
    cs.alphabet_size = config.alphabet_size;
    cs.code_length = config.code_length != 0
                         ? config.code_length
                         : min_code_length(cs.class_count, config.alphabet_size) + config.redundancy;
    cs.alpha = config.alpha;
    cs.tie_epsilon = config.tie_epsilon;
    cs.candidate_pool_cap = config.candidate_pool_cap;
    cs.seed = config.codebook_seed;

    LogHDModel model;
    model.encoder = protos.encoder;
    model.codebook = build_codebook(cs);
    model.bundles = build_bundles(protos, model.codebook);
    model.profiles = estimate_profiles(model.bundles, train);
    return refine(model, train, config.refinement);
}

namespace {

MemoryFootprint footprint(std::size_t classes, std::size_t dim, std::size_t vectors, std::size_t profile_coords,
                          unsigned bits) {
    MemoryFootprint f;
    f.vector_count = vectors;
    f.vector_coords = vectors * dim;
    f.profile_coords = profile_coords;
    f.baseline_coords = classes * dim;
    f.budget_fraction = static_cast<double>(f.vector_coords) / static_cast<double>(f.baseline_coords);
    f.bits = bits;
    f.total_bytes = ((f.vector_coords + f.profile_coords) * bits + 7) / 8;
    return f;
}

}  // namespace

MemoryFootprint model_memory(const LogHDModel& model, unsigned bits) {
    return footprint(model.class_count(), model.hyper_dim(), model.bundle_count(),
                     model.class_count() * model.bundle_count(), bits);
}

MemoryFootprint model_memory(const PrototypeModel& model, unsigned bits) {
    return footprint(model.class_count(), model.encoder.hyper_dim, model.class_count(), 0, bits);
}

}  // namespace loghd
