#include "daelstm/nn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "daelstm/errors.hpp"

namespace daelstm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_shape(data_.size() == rows_ * cols_, "matrix data length != rows*cols");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require_shape(row.size() == c, "ragged initializer for Matrix");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix Matrix::slice_rows(std::size_t begin, std::size_t end) const {
  require_shape(begin <= end && end <= rows_, "row slice out of range");
  return Matrix(end - begin, cols_,
                std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                                    data_.begin() + static_cast<std::ptrdiff_t>(end * cols_)));
}

void Matrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  require_shape(r.size() == cols_, "appended row has wrong width");
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace daelstm
