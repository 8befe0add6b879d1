#include "sic/search.hpp"

#include "sic/objective.hpp"
#include "sic/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace sic {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Projector schedule shared by search_sic and search_3d.
struct Plan {
  std::optional<ZaunerData<double>> zauner;
  std::vector<int> order;  // eigenspaces to cycle through

  int subspace_for(int restart) const {
    return order.empty() ? -1 : order[static_cast<std::size_t>(restart) % order.size()];
  }
  const Eigen::MatrixXcd* projector(int subspace) const {
    return subspace < 0 ? nullptr : &zauner->projectors[subspace];
  }
};

Plan make_plan(const SearchConfig& config) {
  config.validate();
  Plan plan;
  if (!config.symmetry.is_zauner()) return plan;
  plan.zauner = zauner_unitary<double>(config.dim);
  if (config.symmetry.subspace) {
    const int m = *config.symmetry.subspace;
    if (plan.zauner->subspace_dims[m] == 0)
      throw std::invalid_argument("Zauner eigenspace " + std::to_string(m) + " is empty in dimension " +
                                  std::to_string(config.dim));
    plan.order = {m};
  } else {
    plan.order = zauner_subspace_order(*plan.zauner);
  }
  return plan;
}

Eigen::VectorXd project_coordinates(const Eigen::MatrixXcd& p, const Eigen::VectorXd& x) {
  return to_real(p * to_complex(x));
}

FiducialVector finish_vector(const Eigen::VectorXd& x, const Eigen::MatrixXcd* projector) {
  Eigen::VectorXcd a = to_complex(x);
  if (projector) a = *projector * a;
  return a.normalized();
}

LbfgsOptions lbfgs_options(const SearchConfig& config, bool record_history) {
  LbfgsOptions o;
  o.memory = config.lbfgs_memory;
  o.max_iterations = config.max_iterations;
  o.gradient_tolerance = config.gradient_tolerance;
  o.target_value = config.success_threshold;
  o.polish_iterations = config.polish_iterations;
  o.stall_window = config.stall_window;
  o.record_history = record_history;
  return o;
}

// Runs job(i, cancelled) for i in [0, count) on `workers` threads, handing out
// indices in increasing order. When stop_on_success is set, a job returning
// true stops the hand-out and raises the cancellation flag for running jobs.
// Returns the indices actually attempted.
template <typename Job>
std::vector<int> run_restarts(int count, int workers, bool stop_on_success, Job&& job) {
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::mutex mutex;
  std::vector<int> attempted;
  std::exception_ptr failure;
  const CancelProbe cancelled = [&stop] { return stop.load(std::memory_order_relaxed); };

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const int i = next.fetch_add(1);
      if (i >= count) return;
      {
        std::lock_guard lock(mutex);
        attempted.push_back(i);
      }
      try {
        if (job(i, cancelled) && stop_on_success) stop.store(true);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        stop.store(true);
      }
    }
  };

  const int n = std::max(1, std::min(workers, count));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::sort(attempted.begin(), attempted.end());
  return attempted;
}

// Serializes calls into a user sink, which need not be thread-safe.
struct SafeSink {
  const ProgressSink& sink;
  std::mutex mutex;
  void operator()(const ProgressEvent& e) {
    if (!sink) return;
    std::lock_guard lock(mutex);
    sink(e);
  }
};

}  // namespace

std::string SymmetrySpec::label() const {
  if (kind == Kind::none) return "none";
  return subspace ? "zauner:" + std::to_string(*subspace) : "zauner:auto";
}

void SearchConfig::validate() const {
  require_dimension(dim);
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (!(success_threshold > 0)) throw std::invalid_argument("success_threshold must be positive");
  if (!(gradient_tolerance > 0)) throw std::invalid_argument("gradient_tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (worker_count < 1) throw std::invalid_argument("worker_count must be at least 1");
  if (lbfgs_memory < 1) throw std::invalid_argument("lbfgs_memory must be at least 1");
  if (polish_iterations < 0 || stall_window < 0) throw std::invalid_argument("negative iteration budget");
  if (symmetry.subspace && (*symmetry.subspace < 0 || *symmetry.subspace > 2))
    throw std::invalid_argument("Zauner subspace index must be 0, 1 or 2");
}

FiducialVector haar_random_fiducial(int d, std::uint64_t seed) {
  require_dimension(d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FiducialVector a(d);
  for (int j = 0; j < d; ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    a(j) = {re, im};
  }
  return a / a.norm();
}

std::vector<int> zauner_subspace_order(const ZaunerData<double>& z) {
  std::vector<int> order;
  for (int m = 0; m < 3; ++m)
    if (z.subspace_dims[m] > 0) order.push_back(m);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return z.subspace_dims[x] > z.subspace_dims[y]; });
  return order;
}

MinimizeResult minimize(const SearchConfig& config, const FiducialVector& x0, const Eigen::MatrixXcd* projector,
                        const CancelProbe& cancelled, bool record_history) {
  if (x0.size() != config.dim) throw std::invalid_argument("minimize: start vector has the wrong dimension");
  const ObjectiveFunction objective = [projector](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    ObjectiveValue v = evaluate_frame_error(x, projector, true);
    grad = std::move(v.gradient);
    return v.frame_error;
  };
  IterateMap map;
  if (projector) map = [projector](Eigen::VectorXd& x) { x = project_coordinates(*projector, x); };

  const LbfgsResult r = minimize_lbfgs(objective, to_real(x0), lbfgs_options(config, record_history), map, cancelled);
  MinimizeResult out;
  out.vector = finish_vector(r.x, projector);
  out.frame_error = evaluate_frame_error(to_real(out.vector), nullptr, false).frame_error;
  out.iterations = r.iterations;
  out.converged = out.frame_error < config.success_threshold;
  out.status = r.status;
  out.history = r.history;
  return out;
}

MinimizeResult minimize(const SearchConfig& config, const FiducialVector& x0) {
  const Plan plan = make_plan(config);
  return minimize(config, x0, plan.projector(plan.subspace_for(0)));
}

SearchOutcome search_sic(const SearchConfig& config, const ProgressSink& progress) {
  const auto start = Clock::now();
  const Plan plan = make_plan(config);
  const int d = config.dim;
  const double verify_tolerance = 1e-6 * std::sqrt(static_cast<double>(d));
  SafeSink sink{progress, {}};

  std::vector<RestartRecord> records(config.restarts);
  std::vector<std::optional<SearchHit>> hits(config.restarts);
  std::mutex best_mutex;
  double best_error = std::numeric_limits<double>::infinity();

  const bool first_hit = config.mode == SearchMode::first_hit;
  const std::vector<int> attempted =
      run_restarts(config.restarts, config.worker_count, first_hit, [&](int i, const CancelProbe& cancelled) {
        const auto t0 = Clock::now();
        RestartRecord& rec = records[i];
        rec.index = i;
        rec.seed = config.master_seed + static_cast<std::uint64_t>(i);
        rec.subspace = plan.subspace_for(i);
        sink({ProgressEvent::Kind::restart_started, i, 0.0});

        const MinimizeResult m =
            minimize(config, haar_random_fiducial(d, rec.seed), plan.projector(rec.subspace), cancelled);
        rec.iterations = m.iterations;
        rec.frame_error = m.frame_error;
        rec.status = to_string(m.status);
        rec.converged = m.converged;
        if (m.converged) {
          const VerificationReport v = verify_sic(m.vector, verify_tolerance);
          rec.verified = v.passed;
          if (v.passed) {
            const std::string label = rec.subspace < 0 ? "none" : "zauner:" + std::to_string(rec.subspace);
            hits[i] = SearchHit{m.vector, m.frame_error, v.max_sic_deviation, i, rec.seed, label};
          }
        }
        rec.elapsed_seconds = seconds_since(t0);
        sink({ProgressEvent::Kind::restart_finished, i, m.frame_error});
        if (hits[i]) {
          std::lock_guard lock(best_mutex);
          if (m.frame_error < best_error) {
            best_error = m.frame_error;
            sink({ProgressEvent::Kind::best_improved, i, m.frame_error});
          }
        }
        return hits[i].has_value();
      });

  SearchOutcome out;
  SearchReport& report = out.report;
  report.deterministic = !first_hit;
  for (int i : attempted) {
    report.records.push_back(records[i]);
    if (!hits[i]) continue;
    ++report.hits;
    // Lowest error wins; ties go to the lower index (attempted is sorted).
    if (!report.best || hits[i]->frame_error < report.best->frame_error) report.best = hits[i];
  }
  if (first_hit && report.best) {
    // First-hit reports the earliest finishing success; pick the lowest index
    // among the hits that completed so the choice is at least well defined.
    for (int i : attempted)
      if (hits[i]) {
        report.best = hits[i];
        break;
      }
  }
  report.wall_seconds = seconds_since(start);
  out.solution = report.best;
  return out;
}

Search3dResult search_3d(const SearchConfig& config, const ProgressSink& progress) {
  const Plan plan = make_plan(config);
  const int d = config.dim;
  SafeSink sink{progress, {}};

  struct Slot {
    Search3dRecord record;
    FiducialVector vector;
    int equations = 0;
  };
  std::vector<Slot> slots(config.restarts);
  const bool first_hit = config.mode == SearchMode::first_hit;

  const std::vector<int> attempted =
      run_restarts(config.restarts, config.worker_count, first_hit, [&](int i, const CancelProbe& cancelled) {
        Slot& slot = slots[i];
        slot.record.index = i;
        slot.record.seed = config.master_seed + static_cast<std::uint64_t>(i);
        const Eigen::MatrixXcd* projector = plan.projector(plan.subspace_for(i));
        sink({ProgressEvent::Kind::restart_started, i, 0.0});

        const ObjectiveFunction objective = [projector](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
          RowsResidual r = rows012_residual(x, projector, true);
          grad = std::move(r.gradient);
          return r.value;
        };
        IterateMap map;
        if (projector) map = [projector](Eigen::VectorXd& x) { x = project_coordinates(*projector, x); };
        const LbfgsResult r = minimize_lbfgs(objective, to_real(haar_random_fiducial(d, slot.record.seed)),
                                             lbfgs_options(config, false), map, cancelled);

        slot.vector = finish_vector(r.x, projector);
        const Eigen::VectorXd coords = to_real(slot.vector);
        const RowsResidual rows = rows012_residual(coords);
        slot.equations = rows.equation_count;
        slot.record.rows_residual = rows.value;
        slot.record.frame_error = frame_error(coords).frame_error;
        slot.record.iterations = r.iterations;
        slot.record.converged = rows.value < config.success_threshold;
        sink({ProgressEvent::Kind::restart_finished, i, rows.value});
        return slot.record.converged;
      });

  Search3dResult out;
  const Slot* best = nullptr;
  for (int i : attempted) {
    out.records.push_back(slots[i].record);
    if (!best || slots[i].record.rows_residual < best->record.rows_residual) best = &slots[i];
  }
  if (best) {
    out.vector = best->vector;
    out.rows_residual = best->record.rows_residual;
    out.frame_error = best->record.frame_error;
    out.equation_count = best->equations;
  }
  return out;
}

}  // namespace sic
