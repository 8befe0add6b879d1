#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (cubic interpolation,
// Nocedal & Wright Algorithms 3.5/3.6). Minimal by design: the search module
// needs an iterate hook (Zauner projection), a cancellation probe and a
// "polish after target" phase, which off-the-shelf drivers do not all offer.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace sic {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 100000;
  double gradient_tolerance = 1e-12;  // on the Euclidean gradient norm
  double c1 = 1e-4;                   // sufficient decrease
  double c2 = 0.9;                    // curvature
  int max_line_search_evaluations = 40;
  /// Once the value drops below target_value, keep iterating for at most
  /// polish_iterations more steps (stopping earlier when progress ends).
  double target_value = 0.0;
  int polish_iterations = 0;
  /// Declare a stall when the value fails to shrink by a factor
  /// (1 - stall_tolerance) over stall_window iterations; 0 disables.
  int stall_window = 0;
  double stall_tolerance = 1e-9;
  bool record_history = false;
};

enum class LbfgsStatus { target_reached, gradient_converged, max_iterations, line_search_failed, stalled, cancelled };

std::string to_string(LbfgsStatus status);

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  bool reached_target = false;
  std::vector<double> history;  // accepted values, starting with f(x0)
};

/// Returns f(x) and writes the gradient into `grad`.
using ObjectiveFunction = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
/// Maps an accepted iterate in place (e.g. a projection the objective is
/// invariant under, so value and gradient carry over unchanged).
using IterateMap = std::function<void(Eigen::VectorXd& x)>;
using CancelProbe = std::function<bool()>;

LbfgsResult minimize_lbfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const LbfgsOptions& options,
                           const IterateMap& iterate_map = {}, const CancelProbe& cancelled = {});

}  // namespace sic
