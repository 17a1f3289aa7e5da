#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "loghd/classifier.hpp"
#include "loghd/compression.hpp"
#include "loghd/dataset.hpp"

namespace loghd {

struct FaultSpec {
    double flip_probability = 0.0;
    std::uint64_t seed = 0;
    std::size_t trials = 20;

    void validate() const;
};

/// Returns a copy of `state` in which every stored payload bit has flipped
/// independently with probability p. Scales and masks are never touched;
/// pruned coordinates have no bits and so cannot flip.
QuantizedState inject(const QuantizedState& state, double flip_probability, std::uint64_t seed);

/// Trial t injects with seed spec.seed + t, dequantizes, and scores the
/// full test split. Results are indexed by trial.
std::vector<double> evaluate_under_faults(const ClassifierModel& shape, const QuantizedState& state,
                                          const EncodedSet& test, const FaultSpec& spec);

/// Stored-state accounting against the conventional C x D footprint.
struct BudgetLedger {
    std::size_t baseline_coords = 0;  // C x D
    std::size_t model_coords = 0;     // stored hypervector coordinates
    std::size_t profile_coords = 0;   // stored profile coordinates (itemized separately)
    double fraction = 0.0;            // model_coords / baseline_coords
    unsigned bits = 0;
    std::size_t payload_bits = 0;
    std::size_t payload_bytes = 0;
};

/// The first tensor of the state holds the hypervectors; any further
/// tensors count as profile coordinates.
BudgetLedger budget_ledger(const QuantizedState& state, std::size_t class_count, std::size_t hyper_dim);

struct LogHDBudget {
    bool feasible = false;
    std::size_t code_length = 0;
    double fraction = 0.0;
};

struct SparseBudget {
    bool feasible = false;
    double sparsity = 0.0;
    double fraction = 0.0;
};

struct HybridBudget {
    bool feasible = false;
    std::size_t code_length = 0;
    double sparsity = 0.0;
    double fraction = 0.0;
};

struct BudgetConfigs {
    double target = 0.0;
    LogHDBudget loghd;
    SparseBudget sparsehd;
    std::vector<HybridBudget> hybrid;
};

/// Configurations fitting a footprint of at most x * C * D coordinates.
/// LogHD takes the largest n with n/C <= x provided n >= ceil(log_k C);
/// SparseHD the smallest S with round((1-S)D) <= xD; the hybrid grid spans
/// n = nmin .. nmin+2 (capped at C) with the smallest S that fits. Infeasible
/// entries are flagged rather than thrown.
BudgetConfigs matched_budget_configs(std::size_t class_count, std::size_t hyper_dim, unsigned alphabet_size,
                                     double target_fraction);

}  // namespace loghd
