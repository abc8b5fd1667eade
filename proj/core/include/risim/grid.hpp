#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace risim {

/// Dense row-major M x N grid. Row index m is the RIS row (z direction),
/// column index n the RIS column (y direction).
template <typename T>
class Grid {
public:
  Grid() = default;
  Grid(int rows, int cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0)
      throw std::invalid_argument("Grid dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int m, int n) { return data_[static_cast<std::size_t>(m) * cols_ + n]; }
  const T& operator()(int m, int n) const {
    return data_[static_cast<std::size_t>(m) * cols_ + n];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  template <typename U>
  bool same_shape(const Grid<U>& o) const {
    return rows_ == o.rows() && cols_ == o.cols();
  }
  bool operator==(const Grid& o) const = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

} // namespace risim
