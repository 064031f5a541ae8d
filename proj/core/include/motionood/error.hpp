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

#ifndef MOTIONOOD_ERROR_HPP_
#define MOTIONOOD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace motionood {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible for the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A forward evaluation produced NaN or Inf, or an argument is out of its
// numeric domain.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Misuse of an API contract (wrong call order, invalid argument).
class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace motionood

#endif  // MOTIONOOD_ERROR_HPP_
