#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace irbm {

using RealVector = std::vector<double>;
using BinaryVector = std::vector<std::uint8_t>;

/// Dense row-major matrix of doubles.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void append_row(std::span<const double> row);
  /// Drops every row at index >= `rows`.
  void truncate_rows(std::size_t rows);

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// ln(1 + e^x) without overflow for any finite x.
double softplus(double x);

double sigmoid(double x);

/// ln sum_i e^{x_i}, shifted by the max. Throws std::invalid_argument on empty input.
double log_sum_exp(std::span<const double> xs);

double dot(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const std::uint8_t> b);

RealVector matvec(const RealMatrix& m, std::span<const double> x);
RealVector matvec(const RealMatrix& m, std::span<const std::uint8_t> x);
RealMatrix vec_outer(std::span<const double> a, std::span<const double> b);

}  // namespace irbm
