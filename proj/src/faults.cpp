#include "loghd/faults.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loghd/codebook.hpp"
#include "loghd/errors.hpp"
#include "loghd/rng.hpp"

namespace loghd {

void FaultSpec::validate() const {
    if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
        throw ConfigError("flip probability must lie in [0, 1]");
    }
    if (trials < 1) throw ConfigError("fault trials must be >= 1");
}

QuantizedState inject(const QuantizedState& state, double flip_probability, std::uint64_t seed) {
    if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
        throw ConfigError("flip probability must lie in [0, 1]");
    }
    QuantizedState out = state;
    if (flip_probability == 0.0) return out;
    Rng rng(seed);
    for (std::size_t i = 0; i < out.payload_bits; ++i) {
        if (rng.uniform() < flip_probability) flip_bit(out.payload, i);
    }
    return out;
}

std::vector<double> evaluate_under_faults(const ClassifierModel& shape, const QuantizedState& state,
                                          const EncodedSet& test, const FaultSpec& spec) {
    spec.validate();
    std::vector<double> acc(spec.trials);
    for (std::size_t t = 0; t < spec.trials; ++t) {
        const QuantizedState corrupted = inject(state, spec.flip_probability, spec.seed + t);
        acc[t] = accuracy(dequantized(shape, corrupted), test);
    }
    return acc;
}

BudgetLedger budget_ledger(const QuantizedState& state, std::size_t class_count, std::size_t hyper_dim) {
    BudgetLedger ledger;
    ledger.baseline_coords = class_count * hyper_dim;
    ledger.bits = state.bits;
    ledger.payload_bits = state.payload_bits;
    ledger.payload_bytes = state.payload_bytes();
    if (!state.tensors.empty()) ledger.model_coords = state.tensors.front().stored_coords();
    for (std::size_t i = 1; i < state.tensors.size(); ++i) ledger.profile_coords += state.tensors[i].stored_coords();
    ledger.fraction = ledger.baseline_coords == 0
                          ? 0.0
                          : static_cast<double>(ledger.model_coords) / static_cast<double>(ledger.baseline_coords);
    return ledger;
}

BudgetConfigs matched_budget_configs(std::size_t class_count, std::size_t hyper_dim, unsigned alphabet_size,
                                     double target_fraction) {
    if (!(target_fraction > 0.0 && target_fraction <= 1.0)) throw ConfigError("budget fraction must lie in (0, 1]");
    if (class_count < 1 || hyper_dim < 1) throw ConfigError("budget needs C >= 1 and D >= 1");
    // Absorb representation error in products such as 0.4 * 5.
    constexpr double slack = 1e-9;
    const double classes = static_cast<double>(class_count);
    const double dim = static_cast<double>(hyper_dim);

    BudgetConfigs out;
    out.target = target_fraction;

    const std::size_t n_min = min_code_length(class_count, alphabet_size);
    const auto n_cap = static_cast<std::size_t>(std::floor(target_fraction * classes + slack));
    out.loghd.feasible = n_cap >= n_min;
    if (out.loghd.feasible) {
        out.loghd.code_length = n_cap;
        out.loghd.fraction = static_cast<double>(n_cap) / classes;
    }

    const auto keep = static_cast<std::size_t>(std::floor(target_fraction * dim + slack));
    out.sparsehd.feasible = keep >= 1;
    if (out.sparsehd.feasible) {
        out.sparsehd.sparsity = 1.0 - static_cast<double>(keep) / dim;
        out.sparsehd.fraction = static_cast<double>(keep) / dim;
    }

    for (std::size_t n = n_min; n <= std::min(class_count, n_min + 2); ++n) {
        HybridBudget h;
        h.code_length = n;
        const double allowed = target_fraction * classes * dim / static_cast<double>(n);
        const auto retained = std::min(hyper_dim, static_cast<std::size_t>(std::floor(allowed + slack)));
        h.feasible = retained >= 1;
        if (h.feasible) {
            h.sparsity = 1.0 - static_cast<double>(retained) / dim;
            h.fraction = static_cast<double>(n * retained) / (classes * dim);
        }
        out.hybrid.push_back(h);
    }
    return out;
}

}  // namespace loghd
