#include "loghd/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "loghd/errors.hpp"
#include "loghd/rng.hpp"

namespace loghd {

double symbol_weight(unsigned symbol, unsigned alphabet_size) {
    if (alphabet_size < 2) throw DomainError("alphabet size must be >= 2");
    if (symbol >= alphabet_size) {
        throw DomainError("symbol " + std::to_string(symbol) + " outside alphabet of size " +
                          std::to_string(alphabet_size));
    }
    return static_cast<double>(symbol) / static_cast<double>(alphabet_size - 1);
}

double capacity(double weight, double alpha) { return std::pow(weight, alpha); }

double symbol_target(unsigned symbol, unsigned alphabet_size) {
    return 2.0 * symbol_weight(symbol, alphabet_size) - 1.0;
}

std::size_t code_space_size(unsigned alphabet_size, std::size_t code_length) {
    std::size_t size = 1;
    for (std::size_t i = 0; i < code_length; ++i) {
        if (size > std::numeric_limits<std::size_t>::max() / alphabet_size) {
            return std::numeric_limits<std::size_t>::max();
        }
        size *= alphabet_size;
    }
    return size;
}

std::size_t min_code_length(std::size_t class_count, unsigned alphabet_size) {
    if (alphabet_size < 2) throw ConfigError("alphabet size must be >= 2");
    std::size_t n = 1;
    while (code_space_size(alphabet_size, n) < class_count) ++n;
    return n;
}

void CodebookSpec::validate() const {
    if (class_count < 1) throw ConfigError("codebook needs at least one class");
    if (alphabet_size < 2) throw ConfigError("alphabet size must be >= 2");
    if (alphabet_size > 256) throw ConfigError("alphabet size must be <= 256");
    if (code_length < 1) throw ConfigError("code length must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("capacity exponent alpha must be > 0");
    if (!(tie_epsilon > 0.0)) throw ConfigError("tie-break epsilon must be > 0");
    if (candidate_pool_cap < 1) throw ConfigError("candidate pool cap must be >= 1");
    if (code_space_size(alphabet_size, code_length) < class_count) {
        throw ConfigError("infeasible codebook: " + std::to_string(alphabet_size) + "^" +
                          std::to_string(code_length) + " < " + std::to_string(class_count) + " classes");
    }
}

namespace {

using Code = std::vector<Symbol>;

Code decode_index(std::size_t index, unsigned k, std::size_t n) {
    Code code(n);
    for (std::size_t j = n; j-- > 0;) {
        code[j] = static_cast<Symbol>(index % k);
        index /= k;
    }
    return code;
}

double worst_updated_load(const std::vector<double>& loads, const Code& code, const std::vector<double>& cost) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < code.size(); ++j) worst = std::max(worst, loads[j] + cost[code[j]]);
    return worst;
}

// Uniform sample of distinct unused codes.
std::vector<Code> sample_pool(Rng& rng, const CodebookSpec& spec, const std::set<Code>& used) {
    const std::size_t space = code_space_size(spec.alphabet_size, spec.code_length);
    const std::size_t available = space - used.size();
    const std::size_t want = std::min(spec.candidate_pool_cap, available);
    std::set<Code> seen;
    std::vector<Code> pool;
    pool.reserve(want);
    while (pool.size() < want) {
        Code code(spec.code_length);
        for (auto& s : code) s = static_cast<Symbol>(rng.below(spec.alphabet_size));
        if (used.contains(code) || seen.contains(code)) continue;
        seen.insert(code);
        pool.push_back(std::move(code));
    }
    return pool;
}

}  // namespace

Codebook build_codebook(const CodebookSpec& spec) {
    spec.validate();
    const std::size_t n = spec.code_length;
    const unsigned k = spec.alphabet_size;

    std::vector<double> cost(k);
    for (unsigned s = 0; s < k; ++s) cost[s] = capacity(symbol_weight(s, k), spec.alpha);

    Rng rng(spec.seed);
    Codebook cb;
    cb.spec = spec;
    cb.symbols.reserve(spec.class_count * n);
    cb.final_loads.assign(n, 0.0);

    const std::size_t space = code_space_size(k, n);
    const bool full_pool = space <= spec.candidate_pool_cap;

    std::vector<Code> full;
    if (full_pool) {
        full.reserve(space);
        for (std::size_t i = 0; i < space; ++i) full.push_back(decode_index(i, k, n));
    }
    std::set<Code> used;

    for (std::size_t c = 0; c < spec.class_count; ++c) {
        std::vector<Code> sampled;
        const std::vector<Code>& pool = full_pool ? full : (sampled = sample_pool(rng, spec, used));

        std::size_t best = pool.size();
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            // One xi per candidate per step; consumed in pool order for replayability.
            const double xi = rng.uniform();
            if (full_pool && used.contains(pool[i])) continue;
            const double score = worst_updated_load(cb.final_loads, pool[i], cost) + spec.tie_epsilon * xi;
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        if (best == pool.size()) throw InternalError("candidate pool exhausted at class " + std::to_string(c));

        const Code& chosen = pool[best];
        for (std::size_t j = 0; j < n; ++j) cb.final_loads[j] += cost[chosen[j]];
        cb.symbols.insert(cb.symbols.end(), chosen.begin(), chosen.end());
        used.insert(chosen);
    }
    return cb;
}

std::vector<double> load_profile(const Codebook& cb) {
    const std::size_t n = cb.code_length();
    std::vector<double> loads(n, 0.0);
    for (std::size_t c = 0; c < cb.class_count(); ++c) {
        for (std::size_t j = 0; j < n; ++j) {
            loads[j] += capacity(symbol_weight(cb.at(c, j), cb.alphabet_size()), cb.spec.alpha);
        }
    }
    return loads;
}

double max_load(std::span<const double> loads) {
    double m = 0.0;
    for (double l : loads) m = std::max(m, l);
    return m;
}

}  // namespace loghd
