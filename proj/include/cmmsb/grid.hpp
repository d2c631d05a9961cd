#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cmmsb {

// Dense row-major 2-D array.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return v_[r * cols_ + c];
  }

  T& at(std::size_t r, std::size_t c) {
    check(r, c);
    return v_[r * cols_ + c];
  }
  const T& at(std::size_t r, std::size_t c) const {
    check(r, c);
    return v_[r * cols_ + c];
  }

  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  void fill(T x) { v_.assign(v_.size(), x); }

  bool operator==(const Grid&) const = default;

 private:
  void check(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("Grid index");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> v_;
};

}  // namespace cmmsb
