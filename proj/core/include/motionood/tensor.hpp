// Copyright 2026 The motionood Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOTIONOOD_TENSOR_HPP_
#define MOTIONOOD_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace motionood {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array of doubles. A rank-0 shape denotes a scalar.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Row-major element access for rank-2 and rank-3 tensors.
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;
  double& at(std::size_t b, std::size_t r, std::size_t c);
  double at(std::size_t b, std::size_t r, std::size_t c) const;

  // Value of a single-element tensor.
  double item() const;

  Tensor reshaped(Shape shape) const;
  void fill(double value);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Bitwise equality of shapes and element representations (distinguishes
// +0.0 from -0.0, treats identical NaN payloads as equal).
bool bit_identical(const Tensor& a, const Tensor& b);

double max_abs_diff(const Tensor& a, const Tensor& b);
double l2_norm(const Tensor& t);

}  // namespace motionood

#endif  // MOTIONOOD_TENSOR_HPP_
