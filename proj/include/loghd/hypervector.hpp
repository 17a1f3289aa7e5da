#pragma once

#include <span>
#include <vector>

namespace loghd {

/// Dense real hypervector. All HDC state (encodings, prototypes, bundles)
/// is stored in this representation.
using Hypervector = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);

/// Scales v to unit l2 norm. Throws DomainError on a zero vector.
void normalize(std::span<double> v);
Hypervector normalized(Hypervector v);

/// Cosine similarity. Throws DomainError if either vector is zero and
/// InputError on a length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Cosine similarity for inference on possibly corrupted stored vectors:
/// a zero-norm operand yields 0 instead of throwing.
double cosine_or_zero(std::span<const double> u, std::span<const double> v);

/// Index of the maximum; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Index of the minimum; ties go to the lowest index.
std::size_t argmin(std::span<const double> values);

}  // namespace loghd
