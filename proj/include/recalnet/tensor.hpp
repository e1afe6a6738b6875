#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace recalnet {

/// Dense row-major array of 64-bit floats; the single value type of the
/// numeric core. Ops treat tensors as rank-2 unless noted. Zero-width
/// extents are legal (empty data), giving column concatenation a neutral
/// element.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor full(std::size_t rows, std::size_t cols, double value);
  static Tensor identity(std::size_t n);
  static Tensor scalar(double value);  // 1x1
  static Tensor row(std::initializer_list<double> values);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor zeros_like(const Tensor& t);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j);
  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
};

std::string shape_str(const Tensor& t);
bool bitwise_equal(const Tensor& a, const Tensor& b);

}  // namespace recalnet
