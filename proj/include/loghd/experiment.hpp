#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loghd/classifier.hpp"
#include "loghd/dataset_io.hpp"
#include "loghd/encoder.hpp"
#include "loghd/loghd.hpp"

namespace loghd {

/// Where a plan's data comes from: the built-in blob generator or a
/// train/test CSV pair.
struct DataSource {
    std::optional<BlobSpec> blobs;
    DatasetSpec files;

    std::string name() const { return blobs ? (files.name.empty() ? "blobs" : files.name) : files.name; }
};

/// Experiment description. With `budgets` non-empty every method is sized
/// via matched_budget_configs; otherwise LogHD uses n = nmin + redundancy
/// (or `code_length` when set) and SparseHD/hybrid sweep `sparsities`.
struct ExperimentPlan {
    DataSource data;
    std::vector<Method> methods{Method::conventional, Method::loghd, Method::sparsehd, Method::hybrid};
    std::size_t hyper_dim = 4096;
    Nonlinearity nonlinearity = Nonlinearity::cosine;
    std::vector<unsigned> alphabet_sizes{2, 3};
    std::size_t redundancy = 0;
    std::size_t code_length = 0;
    std::vector<double> sparsities{0.5};
    std::vector<unsigned> precisions{8};
    std::vector<double> flip_probabilities{0.0, 0.1, 0.2, 0.4, 0.6, 0.8};
    std::vector<double> budgets;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    double alpha = 1.0;
    RefinementSpec refinement;

    void validate() const;
};

ExperimentPlan plan_from_json(const std::string& text);
ExperimentPlan load_plan(const std::filesystem::path& path);
std::string plan_to_json(const ExperimentPlan& plan);

struct SweepRow {
    std::string dataset;
    Method method = Method::conventional;
    unsigned k = 0;        // 0 for prototype methods
    std::size_t n = 0;     // stored vector count
    double sparsity = 0.0;
    unsigned bits = 8;
    double p = 0.0;
    double budget_fraction = 0.0;  // from the quantized payload
    std::optional<double> requested_budget;
    std::size_t trial = 0;
    double accuracy = 0.0;
    double clean_accuracy = 0.0;
    std::uint64_t seed = 0;
    bool feasible = true;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Trains the shared encoder/prototypes once, derives every configured
/// model, quantizes, and evaluates each flip probability. All randomness is
/// derived from plan.seed.
SweepResult run_plan(const ExperimentPlan& plan);

/// Variant on already-loaded data (used by tests and the acceptance suite).
SweepResult run_plan(const ExperimentPlan& plan, const LoadedDataset& data);

/// CSV text: header + one row per record, 6 significant digits.
/// Throws ConfigError for an empty result.
std::string format_results(const SweepResult& result);
void emit_results(const SweepResult& result, const std::filesystem::path& path);
SweepResult parse_results(const std::string& csv);

/// Mean and sample standard deviation of per-trial accuracies keyed by
/// (requested budget, method, k, n, S, bits, p), in first-seen order.
struct CellSummary {
    Method method;
    unsigned k;
    std::size_t n;
    double sparsity;
    unsigned bits;
    double p;
    double budget_fraction;
    std::optional<double> requested_budget;
    double clean_accuracy;
    double mean;
    double stddev;
    std::size_t trials;
};
std::vector<CellSummary> summarize(const SweepResult& result);

}  // namespace loghd
