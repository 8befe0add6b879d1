#include "sic/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace sic {

std::string to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::target_reached: return "target_reached";
    case LbfgsStatus::gradient_converged: return "gradient_converged";
    case LbfgsStatus::max_iterations: return "max_iterations";
    case LbfgsStatus::line_search_failed: return "line_search_failed";
    case LbfgsStatus::stalled: return "stalled";
    case LbfgsStatus::cancelled: return "cancelled";
  }
  return "unknown";
}

namespace {

struct Trial {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative along p
  Eigen::VectorXd gradient;
};

struct LineSearchOutcome {
  bool ok = false;
  Trial point;
};

// Minimizer of the cubic interpolating values and slopes at a and b,
// clamped into the middle 80% of the bracket; bisection as a fallback.
double cubic_step(const Trial& a, const Trial& b) {
  const double lo = std::min(a.alpha, b.alpha);
  const double hi = std::max(a.alpha, b.alpha);
  const double margin = 0.1 * (hi - lo);
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  double step = 0.5 * (lo + hi);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double candidate = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
      if (std::isfinite(candidate)) step = candidate;
    }
  }
  return std::clamp(step, lo + margin, hi - margin);
}

class LineSearch {
 public:
  LineSearch(const ObjectiveFunction& f, const LbfgsOptions& o, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
             double value0, double slope0, int& evaluations)
      : f_(f), o_(o), x_(x), p_(p), value0_(value0), slope0_(slope0), evaluations_(evaluations) {}

  LineSearchOutcome run(double alpha) {
    Trial previous{0.0, value0_, slope0_, {}};
    for (int i = 0; i < o_.max_line_search_evaluations; ++i) {
      Trial t = evaluate(alpha);
      if (!std::isfinite(t.value)) {
        alpha = 0.5 * (previous.alpha + alpha);
        continue;
      }
      if (t.value > armijo(t.alpha) || (i > 0 && t.value >= previous.value)) return zoom(previous, t);
      if (std::abs(t.slope) <= -o_.c2 * slope0_) return {true, t};
      if (t.slope >= 0.0) return zoom(t, previous);
      previous = t;
      alpha *= 2.0;
    }
    return fallback();
  }

 private:
  double armijo(double alpha) const { return value0_ + o_.c1 * alpha * slope0_; }

  Trial evaluate(double alpha) {
    Trial t;
    t.alpha = alpha;
    Eigen::VectorXd grad;
    t.value = f_(x_ + alpha * p_, grad);
    ++evaluations_;
    t.slope = grad.dot(p_);
    t.gradient = std::move(grad);
    if (std::isfinite(t.value) && t.value < value0_ && (!best_ || t.value < best_->value)) best_ = t;
    return t;
  }

  LineSearchOutcome zoom(Trial lo, Trial hi) {
    for (int i = 0; i < o_.max_line_search_evaluations; ++i) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      Trial t = evaluate(cubic_step(lo, hi));
      if (!std::isfinite(t.value) || t.value > armijo(t.alpha) || t.value >= lo.value) {
        hi = t;
        continue;
      }
      if (std::abs(t.slope) <= -o_.c2 * slope0_) return {true, t};
      if (t.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = t;
    }
    return fallback();
  }

  // Strong Wolfe not met within budget: accept any strict decrease seen.
  LineSearchOutcome fallback() const {
    if (best_) return {true, *best_};
    return {false, {}};
  }

  const ObjectiveFunction& f_;
  const LbfgsOptions& o_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  double value0_, slope0_;
  int& evaluations_;
  std::optional<Trial> best_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const LbfgsOptions& o,
                           const IterateMap& iterate_map, const CancelProbe& cancelled) {
  LbfgsResult r;
  if (iterate_map) iterate_map(x0);
  r.x = std::move(x0);
  r.value = f(r.x, r.gradient);
  r.evaluations = 1;
  if (o.record_history) r.history.push_back(r.value);
  if (!std::isfinite(r.value)) {
    r.status = LbfgsStatus::line_search_failed;
    return r;
  }

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  r.reached_target = r.value < o.target_value;
  int polished = 0;
  double window_start = r.value;
  r.status = LbfgsStatus::max_iterations;
  if (r.reached_target && o.polish_iterations <= 0) {
    r.status = LbfgsStatus::target_reached;
    return r;
  }

  while (r.iterations < o.max_iterations) {
    if (cancelled && cancelled()) {
      r.status = LbfgsStatus::cancelled;
      break;
    }
    const double gnorm = r.gradient.norm();
    // While polishing, only an exactly flat gradient or a failed line search
    // ends the run: degenerate minima (d = 3 families) have tiny gradients
    // long before the overlaps are accurate.
    if (gnorm <= (r.reached_target ? 0.0 : o.gradient_tolerance)) {
      r.status = LbfgsStatus::gradient_converged;
      break;
    }

    // Two-loop recursion for p = -H g.
    Eigen::VectorXd q = r.gradient;
    std::vector<double> coeff(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      coeff[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= coeff[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (coeff[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd p = -q;
    double slope = r.gradient.dot(p);
    if (!(slope < 0.0) || !std::isfinite(slope)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      p = -r.gradient;
      slope = -gnorm * gnorm;
    }

    const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    LineSearch search(f, o, r.x, p, r.value, slope, r.evaluations);
    LineSearchOutcome ls = search.run(alpha0);
    if (!ls.ok) {
      r.status = LbfgsStatus::line_search_failed;
      break;
    }

    Eigen::VectorXd x_new = r.x + ls.point.alpha * p;
    if (iterate_map) iterate_map(x_new);
    Eigen::VectorXd s = x_new - r.x;
    Eigen::VectorXd y = ls.point.gradient - r.gradient;
    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm() && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > o.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    r.x = std::move(x_new);
    r.value = ls.point.value;
    r.gradient = std::move(ls.point.gradient);
    ++r.iterations;
    if (o.record_history) r.history.push_back(r.value);

    if (r.value < o.target_value) {
      r.reached_target = true;
      if (polished++ >= o.polish_iterations) break;
    }
    if (o.stall_window > 0 && r.iterations % o.stall_window == 0) {
      if (!r.reached_target && r.value > (1.0 - o.stall_tolerance) * window_start) {
        r.status = LbfgsStatus::stalled;
        break;
      }
      window_start = r.value;
    }
  }
  if (r.reached_target) r.status = LbfgsStatus::target_reached;
  return r;
}

}  // namespace sic
