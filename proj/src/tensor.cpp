#include "qasumm/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace qasumm {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape");
  }
}

std::size_t Tensor::rows() const { return shape_.empty() ? 0 : shape_[0]; }

std::size_t Tensor::cols() const {
  if (shape_.size() < 2) return 1;
  return data_.size() / shape_[0];
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t n = cols();
  return std::span<double>(data_).subspan(r * n, n);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t n = cols();
  return std::span<const double>(data_).subspan(r * n, n);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor& ParamStore::add(const std::string& name, Tensor value) {
  if (values_.count(name) != 0) {
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  }
  grads_[name] = Tensor(value.shape(), 0.0);
  return values_[name] = std::move(value);
}

Tensor& ParamStore::value(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamStore::grad(const std::string& name) {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::grad(const std::string& name) const {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [name, g] : grads_) g.fill(0.0);
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [name, v] : values_) out.push_back(name);
  return out;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, v] : values_) n += v.size();
  return n;
}

}  // namespace qasumm
