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

#ifndef MOTIONOOD_REPRESENTATION_HPP_
#define MOTIONOOD_REPRESENTATION_HPP_

#include <string>
#include <string_view>

namespace motionood {

enum class Representation { kExpMapAngle, kCartesian3d };

std::string_view representation_name(Representation r);
// Accepts "exp-map-angle" / "angle" and "cartesian-3d" / "3d".
Representation parse_representation(std::string_view text);

}  // namespace motionood

#endif  // MOTIONOOD_REPRESENTATION_HPP_
