#pragma once

#include <Eigen/Dense>
#include <functional>

#include "wlab/geom.hpp"

namespace wlab {

struct NelderMeadOptions {
  int max_iterations = 400;
  double f_tolerance = 1e-12;   // simplex spread in f (plus 1e-9 relative)
  double x_tolerance = 3e-4;    // simplex diameter relative to step scale
  int restarts = 5;
  std::uint64_t seed = 20240501;
  double restart_spread = 0.35;  // restart jitter relative to the initial steps
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0;
  int iterations = 0;      // across restarts
  bool converged = false;
  int restarts_used = 0;
};

/// Standard reflection/expansion/contraction/shrink simplex descent with
/// parameter-scaled initial simplex and deterministic seeded restarts.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step0,
                             const NelderMeadOptions& opts = {});

}  // namespace wlab
