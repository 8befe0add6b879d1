// sic: command-line front end for search, verification, refinement and
// classification of SIC-POVM fiducial vectors.
//
// Exit codes: 0 success, 1 clean no-result, 2 usage error, 3 verification
// failure. Results go to stdout (or -o FILE); progress goes to stderr.

#include "sic/classify.hpp"
#include "sic/refine.hpp"
#include "sic/search.hpp"
#include "sic/store.hpp"
#include "sic/verify.hpp"
#include "sic/whgroup.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

enum Exit { kSuccess = 0, kNoResult = 1, kUsage = 2, kVerificationFailure = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_threads() {
  if (const char* env = std::getenv("SIC_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw UsageError("SIC_THREADS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw sic::StoreError(sic::StoreErrorKind::io, "cannot write '" + output + "'");
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  int dim = 0;
  std::string symmetry;
  std::string subspace = "auto";
  int restarts = -1;
  std::uint64_t seed = 0;
  int threads = 0;
  double tol = 1e-14;
  std::string mode = "first-hit";
  std::string output;
  bool quiet = false;
};

int run_search(const SearchArgs& args) {
  sic::SearchConfig config;
  config.dim = args.dim;
  const std::string symmetry = args.symmetry.empty() ? (args.dim == 2 ? "none" : "zauner") : args.symmetry;
  if (symmetry == "none") {
    if (args.subspace != "auto") throw UsageError("--subspace requires --symmetry zauner");
    config.symmetry = sic::SymmetrySpec::none();
  } else if (args.subspace == "auto") {
    config.symmetry = sic::SymmetrySpec::zauner_auto();
  } else {
    config.symmetry = sic::SymmetrySpec::zauner(std::stoi(args.subspace));
  }
  config.restarts = args.restarts < 0 ? 12 * args.dim : args.restarts;
  config.master_seed = args.seed;
  config.worker_count = args.threads > 0 ? args.threads : default_threads();
  config.success_threshold = args.tol;
  config.mode = args.mode == "exhaustive" ? sic::SearchMode::exhaustive : sic::SearchMode::first_hit;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::mutex log_mutex;
  sic::ProgressSink progress;
  if (!args.quiet)
    progress = [&](const sic::ProgressEvent& e) {
      if (e.kind == sic::ProgressEvent::Kind::restart_started) return;
      std::lock_guard<std::mutex> lock(log_mutex);
      if (e.kind == sic::ProgressEvent::Kind::restart_finished)
        std::cerr << "restart " << e.restart << " finished: frame_error " << sci(e.frame_error) << "\n";
      else
        std::cerr << "restart " << e.restart << " new best: frame_error " << sci(e.frame_error) << "\n";
    };

  sic::SearchOutcome outcome;
  try {
    outcome = sic::search_sic(config, progress);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto& report = outcome.report;
  std::cerr << "search d=" << config.dim << " symmetry=" << config.symmetry.label() << ": " << report.records.size()
            << " restarts attempted, " << report.hits << " hits, " << std::fixed << std::setprecision(2)
            << report.wall_seconds << " s" << std::defaultfloat << "\n";
  if (!outcome.solution) {
    std::cerr << "no SIC fiducial found within " << config.restarts << " restarts\n";
    return kNoResult;
  }
  const auto& hit = *outcome.solution;
  const std::string created_by = std::string(sic::kToolVersion) + " search seed=" + std::to_string(config.master_seed) +
                                 " restart=" + std::to_string(hit.restart_index);
  const auto solution = sic::solution_from_vector(hit.vector, hit.symmetry_label, sic::kDoubleDigits, created_by);
  emit(sic::serialize_solution(solution), args.output);
  std::cerr << "found fiducial at restart " << hit.restart_index << " (" << hit.symmetry_label
            << "), frame_error " << solution.frame_error << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- verify

std::string verification_text(const sic::VerificationReport& r, const sic::SICSolution& s) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "verdict: " << (r.passed ? "PASS" : "FAIL") << "\n";
  out << "d: " << r.dim << "\n";
  out << "symmetry: " << s.symmetry << "\n";
  out << "tolerance: " << r.tolerance << "\n";
  out << "max_sic_deviation: " << r.max_sic_deviation << "\n";
  out << "frame_error: " << r.frame_error << "\n";
  out << "g_deviation: " << r.g_deviation << "\n";
  out << "norm_deviation: " << r.norm_deviation << "\n";
  out << "renormalized: " << (r.renormalized ? "yes" : "no") << "\n";
  for (const auto& c : r.symmetry_checks)
    out << "check " << c.name << ": " << c.magnitude << " (tolerance " << c.tolerance << ", "
        << (c.informational ? "informational" : (c.passed ? "pass" : "fail")) << ")\n";
  return out.str();
}

int run_verify(const std::string& file, double tol, bool json) {
  const auto solution = sic::read_solution(std::filesystem::path(file));
  const auto report = sic::verify_sic(sic::solution_vector(solution), tol);
  if (json)
    std::cout << sic::to_json(report).dump(2) << "\n";
  else
    std::cout << verification_text(report, solution);
  return report.passed ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------- refine

int run_refine(const std::string& file, int digits, const std::string& output) {
  if (digits < 1) throw UsageError("--digits must be at least 1");
  const auto input = sic::read_solution(std::filesystem::path(file));
  const auto start = sic::solution_big_vector(input);
  {
    const auto check = sic::verify_sic(start.to_double(), sic::kAcceptTolerance);
    if (!check.passed) {
      std::cerr << "input fails verification at the accept tier (max deviation " << sci(check.max_sic_deviation)
                << "); refine needs a converged fiducial\n";
      return kVerificationFailure;
    }
  }
  const auto result = sic::refine(start, digits);
  for (std::size_t k = 0; k < result.log10_residual_history.size(); ++k)
    std::cerr << "step " << k << ": log10 residual " << std::fixed << std::setprecision(2)
              << result.log10_residual_history[k] << std::defaultfloat << "\n";
  if (!result.converged) {
    std::cerr << "refinement did not reach " << digits << " digits: " << result.message << "\n";
    return kNoResult;
  }
  const std::string created_by = std::string(sic::kToolVersion) + " refine digits=" + std::to_string(digits);
  const auto refined = sic::solution_from_big(result.solution, input.symmetry, digits, created_by);
  emit(sic::serialize_solution(refined), output);
  std::cerr << "refined to " << digits << " digits in " << result.steps << " steps, frame_error " << refined.frame_error
            << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- classify

int run_classify(const std::vector<std::string>& files, int max_dim, const std::string& catalogue_root, bool json) {
  std::vector<sic::SICSolution> solutions;
  for (const auto& f : files) solutions.push_back(sic::read_solution(std::filesystem::path(f)));
  for (const auto& s : solutions)
    if (s.dim != solutions.front().dim) throw UsageError("classify: all inputs must share one dimension");
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const auto check = sic::verify_sic(sic::solution_vector(solutions[i]), sic::kAcceptTolerance);
    if (!check.passed) {
      std::cerr << files[i] << ": not a SIC fiducial (max deviation " << sci(check.max_sic_deviation) << ")\n";
      return kVerificationFailure;
    }
  }
  sic::ClassifyOptions options;
  options.max_dim = max_dim;
  if (solutions.front().dim > sic::kDefaultClassifyMaxDim && max_dim >= solutions.front().dim)
    std::cerr << "warning: d=" << solutions.front().dim << " exceeds the default cap of " << sic::kDefaultClassifyMaxDim
              << "; enumeration grows like d^3\n";
  std::vector<sic::CatalogueClass> classes;
  try {
    classes = sic::catalogue(solutions, options);
  } catch (const sic::DimensionCapExceeded& e) {
    throw UsageError(e.what());
  }
  if (json) {
    std::cout << sic::to_json(classes).dump(2) << "\n";
  } else {
    std::cout << "d: " << solutions.front().dim << "\n";
    std::cout << "inputs: " << solutions.size() << "\n";
    std::cout << "classes: " << classes.size() << "\n";
    for (const auto& c : classes) {
      std::cout << "class " << c.class_id << ": stabilizer_order " << c.stabilizer_order << ", members";
      for (int m : c.members) std::cout << " " << files[static_cast<std::size_t>(m)];
      std::cout << "\n";
    }
  }
  if (!catalogue_root.empty()) {
    const auto written = sic::write_catalogue(catalogue_root, solutions, classes);
    for (const auto& p : written) std::cerr << "wrote " << p.string() << "\n";
  }
  return kSuccess;
}

// ---------------------------------------------------------------- info

// |SL(2, Z_d)| = d^3 prod_{p | d} (1 - 1/p^2).
long long sl2_order(int d) {
  long long order = static_cast<long long>(d) * d * d;
  int n = d;
  for (int p = 2; p <= n; ++p) {
    if (n % p != 0) continue;
    order = order / (static_cast<long long>(p) * p) * (static_cast<long long>(p) * p - 1);
    while (n % p == 0) n /= p;
  }
  return order;
}

int run_info(int d) {
  if (d < 2) throw UsageError("-d must be at least 2");
  const auto z = sic::zauner_unitary<double>(d);
  const long long sl = sl2_order(d);
  std::cout << std::setprecision(17);
  std::cout << "d: " << d << "\n";
  std::cout << "zauner_subspace_dims: " << z.subspace_dims[0] << " " << z.subspace_dims[1] << " " << z.subspace_dims[2]
            << "\n";
  std::cout << "zauner_eigenvalues: 1 exp(2pi i/3) exp(4pi i/3)\n";
  std::cout << "weyl_heisenberg_order_mod_phases: " << static_cast<long long>(d) * d << "\n";
  std::cout << "sl2_order: " << sl << "\n";
  std::cout << "clifford_order_mod_phases: " << sl * d * d << "\n";
  std::cout << "extended_clifford_order_mod_phases: " << 2 * sl * d * d << "\n";
  std::cout << "sic_size: " << static_cast<long long>(d) * d << "\n";
  std::cout << "target_overlap_1/(d+1): " << 1.0 / (d + 1) << "\n";
  std::cout << "target_frame_sum_2/(d+1): " << 2.0 / (d + 1) << "\n";
  return kSuccess;
}

int run(int argc, char** argv) {
  CLI::App app{"SIC-POVM fiducial toolkit: search, verify, refine, classify"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sic::kToolVersion);

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Search for a SIC fiducial by multi-restart L-BFGS");
  search->add_option("-d,--dim", sa.dim, "Dimension")->required()->check(CLI::Range(2, 1 << 14));
  search->add_option("--symmetry", sa.symmetry, "zauner or none (default: zauner, none for d=2)")
      ->check(CLI::IsMember({"zauner", "none"}));
  search->add_option("--subspace", sa.subspace, "Zauner eigenspace: auto, 0, 1 or 2")
      ->check(CLI::IsMember({"auto", "0", "1", "2"}));
  search->add_option("--restarts", sa.restarts, "Restart budget (default 12*d)");
  search->add_option("--seed", sa.seed, "Master seed; restart i uses seed+i");
  search->add_option("--threads", sa.threads, "Worker threads (overrides SIC_THREADS)")->check(CLI::Range(1, 4096));
  search->add_option("--tol", sa.tol, "Success threshold on the frame error")->check(CLI::PositiveNumber);
  search->add_option("--mode", sa.mode, "first-hit or exhaustive")->check(CLI::IsMember({"first-hit", "exhaustive"}));
  search->add_option("-o,--output", sa.output, "Write the SICFID file here instead of stdout");
  search->add_flag("-q,--quiet", sa.quiet, "No per-restart progress");

  std::string verify_file;
  double verify_tol = sic::kCertifyTolerance;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "Verify a SICFID file");
  verify->add_option("file", verify_file, "SICFID file")->required();
  verify->add_option("--tol", verify_tol, "Tolerance on overlap deviations")->check(CLI::PositiveNumber);
  verify->add_flag("--json", verify_json, "JSON report");

  std::string refine_file, refine_output;
  int refine_digits = 50;
  auto* refine = app.add_subcommand("refine", "Polish a fiducial to high precision");
  refine->add_option("file", refine_file, "SICFID file")->required();
  refine->add_option("--digits", refine_digits, "Target digits")->required();
  refine->add_option("-o,--output", refine_output, "Write the refined SICFID here instead of stdout");

  std::vector<std::string> classify_files;
  int classify_max_dim = sic::kDefaultClassifyMaxDim;
  std::string catalogue_root;
  bool classify_json = false;
  auto* classify = app.add_subcommand("classify", "Partition fiducials into extended-Clifford classes");
  classify->add_option("files", classify_files, "SICFID files of one dimension")->required();
  classify->add_option("--max-dim", classify_max_dim, "Dimension cap")->check(CLI::Range(2, 64));
  classify->add_option("--catalogue", catalogue_root, "Also write catalogue/d<dim>/... under this directory");
  classify->add_flag("--json", classify_json, "JSON report");

  int info_dim = 0;
  auto* info = app.add_subcommand("info", "Zauner subspace dimensions, group orders and target constants");
  info->add_option("-d,--dim", info_dim, "Dimension")->required()->check(CLI::Range(2, 1 << 14));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*search) return run_search(sa);
    if (*verify) return run_verify(verify_file, verify_tol, verify_json);
    if (*refine) return run_refine(refine_file, refine_digits, refine_output);
    if (*classify) return run_classify(classify_files, classify_max_dim, catalogue_root, classify_json);
    if (*info) return run_info(info_dim);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const sic::StoreError& e) {
    std::cerr << "error: " << sic::to_string(e.kind) << ": " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
