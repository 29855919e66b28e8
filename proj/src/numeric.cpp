#include "irbm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irbm {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

void RealMatrix::append_row(std::span<const double> row) {
  if (rows_ == 0 && values_.empty() && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_) throw std::invalid_argument("append_row: shape mismatch");
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

void RealMatrix::truncate_rows(std::size_t rows) {
  if (rows >= rows_) return;
  rows_ = rows;
  values_.resize(rows_ * cols_);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("empty reduction");
  if (xs.size() == 1) return xs[0];
  const double shift = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(shift)) return shift;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - shift);
  return shift + std::log(acc);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double dot(std::span<const double> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (b[i]) acc += a[i];
  return acc;
}

RealVector matvec(const RealMatrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  RealVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), x);
  return out;
}

RealVector matvec(const RealMatrix& m, std::span<const std::uint8_t> x) {
  if (m.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  RealVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), x);
  return out;
}

RealMatrix vec_outer(std::span<const double> a, std::span<const double> b) {
  RealMatrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = a[i] * b[j];
  return out;
}

}  // namespace irbm
