#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace loghd {

using Symbol = std::uint8_t;

struct CodebookSpec {
    std::size_t class_count = 0;
    unsigned alphabet_size = 2;
    std::size_t code_length = 1;
    double alpha = 1.0;                       // capacity exponent
    double tie_epsilon = 1e-9;                // scale of the random tie-break term
    std::size_t candidate_pool_cap = 4096;    // full enumeration up to this many codes
    std::uint64_t seed = 0;

    /// Throws ConfigError if the spec cannot yield C unique codes.
    void validate() const;
};

/// C x n matrix of k-ary symbols, one unique row per class, plus the
/// per-bundle loads accumulated while the rows were chosen.
struct Codebook {
    CodebookSpec spec;
    std::vector<Symbol> symbols;  // row-major, class_count x code_length
    std::vector<double> final_loads;

    std::size_t class_count() const noexcept { return spec.class_count; }
    std::size_t code_length() const noexcept { return spec.code_length; }
    unsigned alphabet_size() const noexcept { return spec.alphabet_size; }

    Symbol at(std::size_t cls, std::size_t bundle) const { return symbols[cls * spec.code_length + bundle]; }
    std::span<const Symbol> row(std::size_t cls) const {
        return {symbols.data() + cls * spec.code_length, spec.code_length};
    }
};

/// g(s) = s / (k - 1). Throws DomainError for s >= k or k < 2.
double symbol_weight(unsigned symbol, unsigned alphabet_size);

/// U(w) = w^alpha.
double capacity(double weight, double alpha);

/// Refinement target t(s) = 2 s / (k - 1) - 1.
double symbol_target(unsigned symbol, unsigned alphabet_size);

/// Smallest n >= 1 with k^n >= C.
std::size_t min_code_length(std::size_t class_count, unsigned alphabet_size);

/// k^n saturated at SIZE_MAX.
std::size_t code_space_size(unsigned alphabet_size, std::size_t code_length);

/// Minimax-load greedy selection. Classes are assigned in ascending label
/// order; each picks the unused candidate minimizing
///   max_j (L_j + U(g(s_j))) + tie_epsilon * xi,   xi ~ Unif[0,1).
/// The pool is the whole code space when it fits in candidate_pool_cap,
/// otherwise a fresh uniform sample of unused codes per class.
Codebook build_codebook(const CodebookSpec& spec);

/// Recomputes L_j = sum_c U(g(B_cj)) from the rows, in class order.
std::vector<double> load_profile(const Codebook& cb);

double max_load(std::span<const double> loads);

}  // namespace loghd
