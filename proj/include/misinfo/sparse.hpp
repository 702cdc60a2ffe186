#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace misinfo {

// Sparse feature vector: (index, value) pairs with strictly increasing
// indices, all values nonzero, all indices < dim.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::uint32_t dim = 0;

  std::size_t nnz() const { return entries.size(); }

  double l2_norm() const;
};

double dot(const SparseVector& a, const SparseVector& b);

// Squared Euclidean distance.
double squared_distance(const SparseVector& a, const SparseVector& b);

// Cosine distance 1 - cos(a, b); defined as 1 when either vector is zero.
double cosine_distance(const SparseVector& a, const SparseVector& b);

}  // namespace misinfo
