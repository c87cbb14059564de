#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cartan {

/// Dense tensor of rank r with every index running over 0..dim-1.
/// Storage is row-major in the index order used at the call site.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank, const T& fill = T())
      : dim_(dim), rank_(rank), data_(count(dim, rank), fill) {}

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  T& flat(std::size_t i) { return data_[i]; }
  const T& flat(std::size_t i) const { return data_[i]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  static std::size_t count(int dim, int rank) {
    std::size_t c = 1;
    for (int i = 0; i < rank; ++i) c *= static_cast<std::size_t>(dim);
    return c;
  }

  template <class... I>
  std::size_t offset(I... idx) const {
    static_assert(sizeof...(I) >= 1);
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<T> data_;
};

using RealTensor = Tensor<double>;

inline double max_abs(const RealTensor& t) {
  double m = 0.0;
  for (double v : t) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const RealTensor& a, const RealTensor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}

}  // namespace cartan
