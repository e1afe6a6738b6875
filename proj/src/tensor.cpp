#include "recalnet/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace recalnet {

namespace {

std::size_t extent_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  if (extent_product(shape) != data.size()) {
    throw std::invalid_argument("tensor data length does not match shape " + shape_str(*this));
  }
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double value) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, value));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor Tensor::scalar(double value) { return Tensor({1, 1}, {value}); }

Tensor Tensor::row(std::initializer_list<double> values) {
  return Tensor({1, values.size()}, std::vector<double>(values));
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t n_rows = rows.size();
  std::size_t n_cols = n_rows == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n_rows * n_cols);
  for (const auto& r : rows) {
    if (r.size() != n_cols) throw std::invalid_argument("ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n_rows, n_cols}, std::move(data));
}

Tensor Tensor::zeros_like(const Tensor& t) {
  return Tensor(t.shape, std::vector<double>(t.data.size(), 0.0));
}

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw std::logic_error("rows() on tensor of rank " + std::to_string(shape.size()));
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw std::logic_error("cols() on tensor of rank " + std::to_string(shape.size()));
  return shape[1];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return data[i * cols() + j];
}

double& Tensor::at(std::size_t i, std::size_t j) {
  return data[i * cols() + j];
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string shape_str(const Tensor& t) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) out << 'x';
    out << t.shape[i];
  }
  out << ']';
  return out.str();
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) return false;
  if (a.data.size() != b.data.size()) return false;
  return a.data.empty() ||
         std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace recalnet
