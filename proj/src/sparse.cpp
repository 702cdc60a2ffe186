#include "misinfo/sparse.hpp"

#include <cmath>

namespace misinfo {

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * v;
  return std::sqrt(s);
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const auto ai = a.entries[i].first;
    const auto bj = b.entries[j].first;
    if (ai == bj) {
      s += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (ai < bj) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      s += a.entries[i].second * a.entries[i].second;
      ++i;
    } else if (i >= a.entries.size() || b.entries[j].first < a.entries[i].first) {
      s += b.entries[j].second * b.entries[j].second;
      ++j;
    } else {
      const double d = a.entries[i].second - b.entries[j].second;
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

double cosine_distance(const SparseVector& a, const SparseVector& b) {
  const double na = a.l2_norm();
  const double nb = b.l2_norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot(a, b) / (na * nb);
}

}  // namespace misinfo
