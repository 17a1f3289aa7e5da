#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loghd/codebook.hpp"
#include "loghd/dataset.hpp"
#include "loghd/encoder.hpp"
#include "loghd/hypervector.hpp"
#include "loghd/prototype.hpp"

namespace loghd {

/// Class-axis compressed classifier: n bundle hypervectors, one activation
/// profile per class, and the codebook that produced the bundles.
struct LogHDModel {
    EncoderSpec encoder;
    Codebook codebook;
    std::vector<Hypervector> bundles;           // n x D
    std::vector<std::vector<double>> profiles;  // C x n

    std::size_t class_count() const noexcept { return codebook.class_count(); }
    std::size_t bundle_count() const noexcept { return bundles.size(); }
    std::size_t hyper_dim() const noexcept { return encoder.hyper_dim; }
};

struct RefinementSpec {
    std::size_t epochs = 100;
    double learning_rate = 3e-4;
    std::uint64_t seed = 0;
    /// Re-estimate profiles against the refined bundles. When false the
    /// profiles computed before refinement are kept as-is.
    bool refresh_profiles = true;

    void validate() const;
};

/// Operation counts for one or more queries.
struct InferenceCounters {
    std::size_t similarity_ops = 0;  // D-dimensional cosine evaluations
    std::size_t distance_ops = 0;    // n-dimensional squared distances
};

/// M_j = normalize(sum_c g(B_cj) H_c). Throws TrainingError naming the
/// bundle when a superposition is the zero vector.
std::vector<Hypervector> build_bundles(const PrototypeModel& protos, const Codebook& cb);

/// A(h)_j = cosine(M_j, h) for an already-encoded query.
std::vector<double> activation(std::span<const Hypervector> bundles, std::span<const double> encoded,
                               InferenceCounters* counters = nullptr);
std::vector<double> activation(const LogHDModel& model, const Encoder& encoder, std::span<const double> x);

/// P_c = mean over class-c samples of A(x). Throws TrainingError on an
/// empty class.
std::vector<std::vector<double>> estimate_profiles(std::span<const Hypervector> bundles, const EncodedSet& data);

/// argmin_c ||a - P_c||^2, ties to the lowest class index.
std::size_t nearest_profile(std::span<const std::vector<double>> profiles, std::span<const double> activations,
                            InferenceCounters* counters = nullptr);

std::size_t predict(const LogHDModel& model, std::span<const double> encoded, InferenceCounters* counters = nullptr);
std::size_t predict(const LogHDModel& model, const Encoder& encoder, std::span<const double> x);

/// One perceptron-style correction of every bundle toward the code targets
/// of `label`, each followed by renormalization.
void refine_step(std::vector<Hypervector>& bundles, const Codebook& cb, std::span<const double> encoded,
                 std::size_t label, double learning_rate);

/// T epochs of refine_step over a fresh seeded permutation each epoch.
LogHDModel refine(const LogHDModel& model, const EncodedSet& data, const RefinementSpec& spec);

struct LogHDConfig {
    unsigned alphabet_size = 2;
    std::size_t code_length = 0;  // 0 selects min_code_length + redundancy
    std::size_t redundancy = 0;
    double alpha = 1.0;
    double tie_epsilon = 1e-9;
    std::size_t candidate_pool_cap = 4096;
    std::uint64_t codebook_seed = 0;
    RefinementSpec refinement;
};

/// Codebook, bundling, profiling and refinement from a shared prototype set.
LogHDModel train_loghd(const PrototypeModel& protos, const EncodedSet& train, const LogHDConfig& config);

/// Stored-coordinate accounting against the conventional C x D footprint.
struct MemoryFootprint {
    std::size_t vector_count = 0;
    std::size_t vector_coords = 0;    // stored hypervector coordinates
    std::size_t profile_coords = 0;   // stored activation-profile coordinates
    std::size_t baseline_coords = 0;  // C x D
    double budget_fraction = 0.0;     // vector_coords / baseline_coords
    unsigned bits = 32;
    std::size_t total_bytes = 0;      // ceil((vector + profile coords) * bits / 8)
};

MemoryFootprint model_memory(const LogHDModel& model, unsigned bits = 32);
MemoryFootprint model_memory(const PrototypeModel& model, unsigned bits = 32);

}  // namespace loghd
