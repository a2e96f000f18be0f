// Copyright 2026 The bincz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <numbers>

// Every 2*pi factor in the project goes through these helpers. Config files
// and pulse files carry linear frequencies; the numerics use rad/s and seconds.
namespace bincz::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double mhz_to_rad_per_s(double mhz) { return mhz * 1e6 * two_pi; }
constexpr double rad_per_s_to_mhz(double w) { return w / (1e6 * two_pi); }
constexpr double ghz_to_rad_per_s(double ghz) { return ghz * 1e9 * two_pi; }
constexpr double rad_per_s_to_ghz(double w) { return w / (1e9 * two_pi); }

constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double s_to_ns(double s) { return s * 1e9; }

}  // namespace bincz::units
