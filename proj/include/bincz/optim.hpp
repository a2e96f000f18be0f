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

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bincz {

enum class Method { plain, momentum, lbfgs };
enum class StopReason { converged, target_reached, max_iters, stalled };

std::string_view to_string(Method m);
std::string_view to_string(StopReason r);
Method parse_method(std::string_view text);

struct OptimOptions {
  Method method = Method::momentum;
  std::size_t max_iters = 500;
  /// First trial step for gradient steps; adapted after every iteration.
  double step = 1.0;
  double momentum = 0.9;
  std::size_t lbfgs_memory = 12;
  double armijo = 1e-4;
  double shrink = 0.5;
  std::size_t max_backtracks = 40;
  /// Stop once an accepted step lowers the objective by less than this.
  double convergence_tol = 1e-12;
  /// Stop once the objective is at or below this value.
  double target = -std::numeric_limits<double>::infinity();
  /// Optional box |x_i| <= bound, enforced by projection after every step.
  std::optional<double> bound;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  /// Objective at the start and after every accepted step (non-increasing).
  std::vector<double> history;
  StopReason reason = StopReason::max_iters;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

/// f(x, grad) returns the objective and writes its gradient.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Projected first-order minimizer with backtracking (Armijo plus strict
/// decrease), so the accepted history never increases.
OptimResult minimize(const Objective& f, Eigen::VectorXd x0, const OptimOptions& options);

}  // namespace bincz
