#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qasumm {

using Vec = std::vector<double>;

// Dense row-major tensor of doubles. Rank 1 and 2 are the only ranks the
// model uses, but the shape is kept general for serialization.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;

  void fill(double value);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Named parameters with a matching gradient accumulator per name.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return values_.count(name) != 0; }

  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;

  void zero_grad();
  std::vector<std::string> names() const;
  std::size_t parameter_count() const;

  const std::map<std::string, Tensor>& values() const { return values_; }
  const std::map<std::string, Tensor>& grads() const { return grads_; }

  friend bool operator==(const ParamStore& a, const ParamStore& b) {
    return a.values_ == b.values_;
  }

 private:
  std::map<std::string, Tensor> values_;
  std::map<std::string, Tensor> grads_;
};

}  // namespace qasumm
