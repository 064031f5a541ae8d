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

#include "motionood/dct.hpp"

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <string>

#include "motionood/error.hpp"

namespace motionood {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

TrajectoryWindow::TrajectoryWindow(Tensor data, std::size_t observed)
    : data_(std::move(data)), observed_(observed) {
  if (data_.rank() != 2) {
    throw ShapeError("trajectory window must be K x (N+T), got " +
                     shape_string(data_.shape()));
  }
  if (observed_ < 1 || observed_ > data_.dim(1)) {
    throw UsageError("trajectory window needs 1 <= N <= N+T");
  }
}

Tensor dct_matrix(std::size_t length) {
  if (length < 1) throw UsageError("dct_matrix: length must be >= 1");
  Tensor g({length, length});
  const double norm = std::sqrt(2.0 / double(length));
  for (std::size_t l = 0; l < length; ++l) {
    const double c = l == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
    for (std::size_t n = 0; n < length; ++n) {
      g.at(l, n) = norm * c *
                   std::cos(std::numbers::pi * double(2 * n + 1) * double(l) /
                            (2.0 * double(length)));
    }
  }
  return g;
}

Tensor dct_forward_matrix(std::size_t length, std::size_t retained) {
  if (retained < 1 || retained > length) {
    throw UsageError("dct: retained count " + std::to_string(retained) +
                     " outside [1, " + std::to_string(length) + "]");
  }
  const Tensor g = dct_matrix(length);
  Tensor f({length, retained});
  for (std::size_t n = 0; n < length; ++n) {
    for (std::size_t l = 0; l < retained; ++l) f.at(n, l) = g.at(l, n);
  }
  return f;
}

Tensor dct_inverse_matrix(std::size_t length, std::size_t retained) {
  if (retained < 1 || retained > length) {
    throw UsageError("idct: retained count " + std::to_string(retained) +
                     " outside [1, " + std::to_string(length) + "]");
  }
  const Tensor g = dct_matrix(length);
  Tensor inv({retained, length});
  for (std::size_t l = 0; l < retained; ++l) {
    for (std::size_t n = 0; n < length; ++n) inv.at(l, n) = g.at(l, n);
  }
  return inv;
}

TrajectoryWindow pad_replicate(const Tensor& observed, std::size_t future) {
  if (observed.rank() != 2) {
    throw ShapeError("pad_replicate: expected K x N, got " +
                     shape_string(observed.shape()));
  }
  const std::size_t k = observed.dim(0), n = observed.dim(1);
  if (n == 0) throw UsageError("pad_replicate: empty observation (N = 0)");
  Tensor out({k, n + future});
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < n; ++c) out.at(r, c) = observed.at(r, c);
    for (std::size_t c = n; c < n + future; ++c) out.at(r, c) = observed.at(r, n - 1);
  }
  return TrajectoryWindow(std::move(out), n);
}

Tensor apply_last_axis(const Tensor& x, const Tensor& m) {
  if (x.rank() < 1 || m.rank() != 2 || x.shape().back() != m.dim(0)) {
    throw ShapeError("apply_last_axis: " + shape_string(x.shape()) + " x " +
                     shape_string(m.shape()));
  }
  Shape out_shape = x.shape();
  out_shape.back() = m.dim(1);
  Tensor out(out_shape);
  const std::size_t rows = x.size() / m.dim(0);
  Eigen::Map<RowMatrix>(out.data(), rows, m.dim(1)).noalias() =
      Eigen::Map<const RowMatrix>(x.data(), rows, m.dim(0)) *
      Eigen::Map<const RowMatrix>(m.data(), m.dim(0), m.dim(1));
  return out;
}

DctCoefficients dct_forward(const Tensor& trajectory, std::size_t retained) {
  if (trajectory.rank() != 2) {
    throw ShapeError("dct_forward: expected K x L, got " +
                     shape_string(trajectory.shape()));
  }
  const std::size_t length = trajectory.dim(1);
  DctCoefficients out;
  out.coeffs = apply_last_axis(trajectory, dct_forward_matrix(length, retained));
  out.length = length;
  return out;
}

DctCoefficients dct_forward(const TrajectoryWindow& window, std::size_t retained) {
  return dct_forward(window.data(), retained);
}

Tensor dct_inverse(const DctCoefficients& coeffs, std::size_t length) {
  if (length < 1) throw UsageError("dct_inverse: output length must be >= 1");
  if (coeffs.coeffs.rank() != 2) {
    throw ShapeError("dct_inverse: expected K x M coefficients");
  }
  return apply_last_axis(coeffs.coeffs,
                         dct_inverse_matrix(length, coeffs.retained()));
}

}  // namespace motionood
