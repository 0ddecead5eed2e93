// Copyright 2026 The mdelast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>

namespace mdelast::quad {

struct TriPoint {
  double l0, l1, l2;  // barycentric
  double w;           // weights sum to 1
};

// Symmetric 6-point rule, exact for degree 4.
inline constexpr double kA = 0.44594849091596488632;
inline constexpr double kB = 0.09157621350977074346;
inline constexpr double kWA = 0.22338158967801146570;
inline constexpr double kWB = 0.10995174365532186764;
inline constexpr std::array<TriPoint, 6> kTriangle{{
    {1.0 - 2.0 * kA, kA, kA, kWA},
    {kA, 1.0 - 2.0 * kA, kA, kWA},
    {kA, kA, 1.0 - 2.0 * kA, kWA},
    {1.0 - 2.0 * kB, kB, kB, kWB},
    {kB, 1.0 - 2.0 * kB, kB, kWB},
    {kB, kB, 1.0 - 2.0 * kB, kWB},
}};

struct LinePoint {
  double s;  // in [0, 1]
  double w;  // weights sum to 1
};

// 5-point Gauss-Legendre on [0, 1], exact for degree 9.
inline constexpr double kG1 = 0.53846931010568309104;
inline constexpr double kG2 = 0.90617984593866399280;
inline constexpr double kW0 = 128.0 / 225.0;
inline constexpr double kW1 = 0.47862867049936646804;
inline constexpr double kW2 = 0.23692688505618908751;
inline constexpr std::array<LinePoint, 5> kLine{{
    {0.5 * (1.0 - kG2), 0.5 * kW2},
    {0.5 * (1.0 - kG1), 0.5 * kW1},
    {0.5, 0.5 * kW0},
    {0.5 * (1.0 + kG1), 0.5 * kW1},
    {0.5 * (1.0 + kG2), 0.5 * kW2},
}};

}  // namespace mdelast::quad
