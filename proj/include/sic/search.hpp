#pragma once

// Haar-random restarts, the L-BFGS minimization driver and the multi-restart
// orchestrator, optionally restricted to a Zauner eigenspace.

#include "sic/lbfgs.hpp"
#include "sic/overlaps.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sic {

struct SymmetrySpec {
  enum class Kind { none, zauner };
  Kind kind = Kind::none;
  std::optional<int> subspace;  // zauner only; empty means "auto"

  static SymmetrySpec none() { return {}; }
  static SymmetrySpec zauner_auto() { return {Kind::zauner, std::nullopt}; }
  static SymmetrySpec zauner(int m) { return {Kind::zauner, m}; }

  bool is_zauner() const { return kind == Kind::zauner; }
  /// "none", "zauner:auto" or "zauner:<m>".
  std::string label() const;
};

enum class SearchMode { first_hit, exhaustive };

struct SearchConfig {
  int dim = 2;
  SymmetrySpec symmetry;
  int restarts = 1;
  std::uint64_t master_seed = 0;
  double success_threshold = 1e-14;
  int max_iterations = 100000;
  double gradient_tolerance = 1e-12;
  int worker_count = 1;
  SearchMode mode = SearchMode::exhaustive;
  int lbfgs_memory = 10;
  /// Extra iterations after success_threshold is reached. A frame error of
  /// 1e-14 only bounds overlap deviations near 1e-7; polishing brings the
  /// output to the accept tier of the verifier.
  int polish_iterations = 50;
  /// Abandon a restart whose value shrinks by less than a relative 1e-9
  /// over this many iterations (0 disables).
  int stall_window = 1000;

  /// Throws std::invalid_argument on dim < 2, restarts < 1, non-positive
  /// thresholds, worker_count < 1 or an out-of-range subspace.
  void validate() const;
};

struct RestartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  int subspace = -1;  // Zauner eigenspace used, -1 without symmetry
  int iterations = 0;
  double frame_error = 0;
  double elapsed_seconds = 0;
  std::string status;     // LbfgsStatus name, or "skipped" when cancelled before starting
  bool converged = false;  // frame_error below success_threshold
  bool verified = false;   // passed verify_sic at 1e-6 sqrt(d)
};

struct SearchHit {
  FiducialVector vector;  // unit norm, projected when Zauner-restricted
  double frame_error = 0;
  double max_sic_deviation = 0;
  int restart_index = 0;
  std::uint64_t seed = 0;
  std::string symmetry_label;  // "none" or "zauner:<m>"
};

struct SearchReport {
  std::vector<RestartRecord> records;  // one per restart attempted, by index
  std::optional<SearchHit> best;
  double wall_seconds = 0;
  int hits = 0;
  bool deterministic = true;  // false for first-hit mode
};

struct ProgressEvent {
  enum class Kind { restart_started, restart_finished, best_improved };
  Kind kind;
  int restart = 0;
  double frame_error = 0;  // finished / best_improved
};
using ProgressSink = std::function<void(const ProgressEvent&)>;

/// 2d independent N(0,1) reals (std::mt19937_64 seeded with `seed`),
/// normalized: the unitarily invariant measure on the sphere.
FiducialVector haar_random_fiducial(int d, std::uint64_t seed);

/// Zauner eigenspaces in the order auto mode visits them: decreasing
/// dimension, ties by index, empty spaces dropped.
std::vector<int> zauner_subspace_order(const ZaunerData<double>& z);

struct MinimizeResult {
  FiducialVector vector;  // P x / |P x|
  double frame_error = 0;
  int iterations = 0;
  bool converged = false;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  std::vector<double> history;  // accepted values (when requested)
};

/// One L-BFGS run on frame_error from x0. `projector` (may be null) is applied
/// to the iterate after every accepted step.
MinimizeResult minimize(const SearchConfig& config, const FiducialVector& x0, const Eigen::MatrixXcd* projector,
                        const CancelProbe& cancelled = {}, bool record_history = false);

/// Convenience overload resolving the projector from config.symmetry (auto
/// picks the largest eigenspace).
MinimizeResult minimize(const SearchConfig& config, const FiducialVector& x0);

struct SearchOutcome {
  std::optional<SearchHit> solution;
  SearchReport report;
};

/// Multi-restart search. Restart i uses seed master_seed + i and, in
/// zauner(auto) mode, eigenspace order[i % order.size()]. Exhaustive mode runs
/// everything and returns the lowest-error verified hit (ties to the lowest
/// index), independent of worker_count. First-hit mode stops at the first
/// verified hit.
SearchOutcome search_sic(const SearchConfig& config, const ProgressSink& progress = {});

struct Search3dRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double rows_residual = 0;
  double frame_error = 0;
  int iterations = 0;
  bool converged = false;  // rows_residual below success_threshold
};

struct Search3dResult {
  FiducialVector vector;       // from the best restart (lowest rows residual)
  double rows_residual = 0;
  double frame_error = 0;      // full objective, evaluated but never optimized
  int equation_count = 0;
  std::vector<Search3dRecord> records;
};

/// The 3d-conjecture experiment: minimize rows012_residual only (with the
/// configured projector, if any) using the same restart schedule as
/// search_sic; success_threshold applies to the rows residual.
Search3dResult search_3d(const SearchConfig& config, const ProgressSink& progress = {});

}  // namespace sic
