#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stage/error.hpp"

namespace stage {

/// Dense row-major matrix. Rows are observations (raters, respondents),
/// columns are variables (indicators, items).
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_) {
        fail(ErrorKind::InvalidInput, "ragged matrix: row " + std::to_string(r) + " has " +
                                          std::to_string(rows[r].size()) + " columns, expected " +
                                          std::to_string(m.cols_));
      }
      for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix without_column(std::size_t drop) const {
    Matrix out(rows_, cols_ - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::size_t k = 0;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (c != drop) out(r, k++) = (*this)(r, c);
      }
    }
    return out;
  }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = static_cast<U>((*this)(r, c));
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace stage
