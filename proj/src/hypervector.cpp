#include "loghd/hypervector.hpp"

#include <cmath>
#include <string>

#include "loghd/errors.hpp"

namespace loghd {

namespace {

void check_same_length(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw InputError("hypervector length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
    }
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
    check_same_length(u, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void normalize(std::span<double> v) {
    const double n = norm(v);
    if (n == 0.0) throw DomainError("cannot normalize a zero vector");
    for (double& x : v) x /= n;
}

Hypervector normalized(Hypervector v) {
    normalize(v);
    return v;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    check_same_length(u, v);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw DomainError("cosine similarity of a zero vector");
    const double c = dot(u, v) / (nu * nv);
    return std::fmax(-1.0, std::fmin(1.0, c));
}

double cosine_or_zero(std::span<const double> u, std::span<const double> v) {
    check_same_length(u, v);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double c = dot(u, v) / (nu * nv);
    return std::fmax(-1.0, std::fmin(1.0, c));
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::size_t argmin(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

}  // namespace loghd
