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

#ifndef MOTIONOOD_DCT_HPP_
#define MOTIONOOD_DCT_HPP_

#include <cstddef>

#include "motionood/tensor.hpp"

namespace motionood {

// K x (N+T) trajectory: N observed frames followed by T future frames.
// Rows are joints/parameters, columns are frames.
class TrajectoryWindow {
 public:
  TrajectoryWindow(Tensor data, std::size_t observed);

  std::size_t joints() const { return data_.dim(0); }
  std::size_t observed() const { return observed_; }
  std::size_t future() const { return data_.dim(1) - observed_; }
  std::size_t length() const { return data_.dim(1); }
  const Tensor& data() const { return data_; }

 private:
  Tensor data_;
  std::size_t observed_;
};

// Normalisation applied to the zero-frequency row. Only the orthonormal
// convention (DC row scaled by 1/sqrt(2)) is implemented; the marker is kept
// so serialized coefficients state which convention produced them.
enum class DcNormalization { kOrthonormal };

// K x M coefficients of a length-L transform, lowest frequency first.
struct DctCoefficients {
  Tensor coeffs;
  std::size_t length = 0;
  DcNormalization convention = DcNormalization::kOrthonormal;

  std::size_t joints() const { return coeffs.dim(0); }
  std::size_t retained() const { return coeffs.dim(1); }
};

// Orthonormal DCT-II basis: row l, column n holds
// sqrt(2/L) * c_l * cos(pi * (2n + 1) * l / (2L)), c_0 = 1/sqrt(2), else 1.
Tensor dct_matrix(std::size_t length);

// L x M matrix F with X * F = first M coefficients of each row of X.
Tensor dct_forward_matrix(std::size_t length, std::size_t retained);
// M x L matrix G with C * G = time-domain rows (missing coefficients zero).
Tensor dct_inverse_matrix(std::size_t length, std::size_t retained);

// Extends a K x N observation by repeating its last frame `future` times.
TrajectoryWindow pad_replicate(const Tensor& observed, std::size_t future);

DctCoefficients dct_forward(const TrajectoryWindow& window, std::size_t retained);
DctCoefficients dct_forward(const Tensor& trajectory, std::size_t retained);
Tensor dct_inverse(const DctCoefficients& coeffs, std::size_t length);

// Multiplies the last axis of x ([..., n]) by matrix m ([n, p]).
Tensor apply_last_axis(const Tensor& x, const Tensor& m);

}  // namespace motionood

#endif  // MOTIONOOD_DCT_HPP_
