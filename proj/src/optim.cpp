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

#include "bincz/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace bincz {

using Eigen::VectorXd;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::plain: return "plain";
    case Method::momentum: return "momentum";
    case Method::lbfgs: return "lbfgs";
  }
  return "?";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::target_reached: return "target_reached";
    case StopReason::max_iters: return "max_iters";
    case StopReason::stalled: return "stalled";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "plain") return Method::plain;
  if (text == "momentum") return Method::momentum;
  if (text == "lbfgs") return Method::lbfgs;
  throw std::invalid_argument("unknown optimizer '" + std::string(text) + "'");
}

namespace {

VectorXd project(VectorXd x, const std::optional<double>& bound) {
  if (bound) x = x.cwiseMax(-*bound).cwiseMin(*bound);
  return x;
}

// Zero the components of `d` that would push a variable sitting on the box
// further outward.
void mask_active(VectorXd& d, const VectorXd& x, const std::optional<double>& bound) {
  if (!bound) return;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if ((x(i) >= *bound && d(i) > 0) || (x(i) <= -*bound && d(i) < 0)) d(i) = 0;
  }
}

struct Pair {
  VectorXd s, y;
  double rho;
};

VectorXd lbfgs_direction(const VectorXd& g, const std::deque<Pair>& mem) {
  VectorXd q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  if (!mem.empty()) q *= mem.back().s.dot(mem.back().y) / mem.back().y.squaredNorm();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return -q;
}

}  // namespace

OptimResult minimize(const Objective& f, VectorXd x0, const OptimOptions& opt) {
  if (!(opt.shrink > 0 && opt.shrink < 1)) throw std::invalid_argument("shrink must lie in (0, 1)");
  if (!(opt.step > 0)) throw std::invalid_argument("step must be positive");
  OptimResult res;
  VectorXd x = project(std::move(x0), opt.bound);
  VectorXd g(x.size());
  double fx = f(x, g);
  ++res.evaluations;
  res.history.push_back(fx);

  VectorXd d_prev = VectorXd::Zero(x.size());
  std::deque<Pair> mem;
  double step = opt.step;
  res.reason = StopReason::max_iters;

  if (fx <= opt.target) res.reason = StopReason::target_reached;
  while (res.reason == StopReason::max_iters && res.iterations < opt.max_iters) {
    VectorXd d;
    switch (opt.method) {
      case Method::plain: d = -g; break;
      case Method::momentum: d = -g + opt.momentum * d_prev; break;
      case Method::lbfgs: d = lbfgs_direction(g, mem); break;
    }
    mask_active(d, x, opt.bound);
    if (!(g.dot(d) < 0)) {
      d = -g;
      mask_active(d, x, opt.bound);
      mem.clear();
      d_prev.setZero();
    }
    if (d.squaredNorm() == 0.0) {
      res.reason = StopReason::converged;
      break;
    }

    double t = opt.method == Method::lbfgs && !mem.empty() ? 1.0 : step;
    VectorXd x_new, g_new(x.size());
    double f_new = fx;
    bool accepted = false;
    std::size_t tries = 0;
    for (; tries <= opt.max_backtracks; ++tries) {
      x_new = project(x + t * d, opt.bound);
      f_new = f(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new < fx && f_new <= fx + opt.armijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      t *= opt.shrink;
    }
    if (!accepted) {
      res.reason = StopReason::stalled;
      break;
    }
    ++res.iterations;

    if (opt.method == Method::lbfgs) {
      Pair p{x_new - x, g_new - g, 0.0};
      const double sy = p.s.dot(p.y);
      if (sy > 1e-12 * p.s.norm() * p.y.norm()) {
        p.rho = 1.0 / sy;
        mem.push_back(std::move(p));
        if (mem.size() > opt.lbfgs_memory) mem.pop_front();
      }
    } else {
      // Grow the trial step after a first-try success, otherwise keep the
      // step that worked.
      step = tries == 0 ? t / opt.shrink : t;
    }
    d_prev = (x_new - x) / t;
    const double decrease = fx - f_new;
    x = std::move(x_new);
    g = std::move(g_new);
    fx = f_new;
    res.history.push_back(fx);
    if (fx <= opt.target) {
      res.reason = StopReason::target_reached;
    } else if (decrease < opt.convergence_tol) {
      res.reason = StopReason::converged;
    }
  }
  res.x = std::move(x);
  res.value = fx;
  return res;
}

}  // namespace bincz
