#pragma once

// SICFID v1 solution files, catalogue directory layout and JSON run
// summaries.
//
// SICFID v1 (UTF-8, LF line endings):
//   SICFID 1
//   d <int>
//   symmetry <label>
//   digits <int>
//   frame_error <decimal>
//   2d lines: signed fixed-point decimals with exactly <digits> fractional
//             digits, ordered re(a_0), im(a_0), re(a_1), ...
//   optional: created_by <text>
//   optional: stabilizer_order <int>
//
// Amplitudes are kept as the decimal strings read from or written to the
// file, so round trips are lossless at any precision.

#include "sic/classify.hpp"
#include "sic/overlaps.hpp"
#include "sic/refine.hpp"
#include "sic/search.hpp"
#include "sic/verify.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sic {

inline constexpr const char* kToolVersion = "sic 1.0.0";
/// Fractional digits used when writing double-precision vectors.
inline constexpr int kDoubleDigits = 17;

struct SICSolution {
  int dim = 0;
  std::string symmetry = "none";  // "none" or "zauner:<m>"
  int precision_digits = 0;
  std::string frame_error;               // decimal string
  std::vector<std::string> amplitudes;   // 2d signed fixed-point strings
  std::string created_by;                // empty when absent
  std::optional<int> stabilizer_order;

  friend bool operator==(const SICSolution&, const SICSolution&) = default;
};

enum class StoreErrorKind { unexpected_end, malformed_header, amplitude_count, invalid_decimal, io };

struct StoreError : std::runtime_error {
  StoreErrorKind kind;
  StoreError(StoreErrorKind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

std::string to_string(StoreErrorKind kind);

/// The exact file contents for `s`. Throws StoreError(invalid_decimal or
/// amplitude_count) when the fields are inconsistent.
std::string serialize_solution(const SICSolution& s);
SICSolution parse_solution(std::string_view text);

/// Writes through a temporary file in the destination directory and renames
/// it into place. Returns the number of bytes written.
std::size_t write_solution(const SICSolution& s, const std::filesystem::path& destination);
std::size_t write_solution(const SICSolution& s, std::ostream& out);
SICSolution read_solution(const std::filesystem::path& source);
SICSolution read_solution(std::istream& in);

/// Builds a solution from a double vector (normalized first). The frame
/// error is computed by the direct (verifier) path.
SICSolution solution_from_vector(const FiducialVector& a, const std::string& symmetry, int digits = kDoubleDigits,
                                 const std::string& created_by = {});
/// Builds a solution from a refined vector at `digits` fractional digits.
SICSolution solution_from_big(const BigFiducial& a, const std::string& symmetry, int digits,
                              const std::string& created_by = {});

/// Amplitudes as doubles (correctly rounded from the decimal strings).
FiducialVector solution_vector(const SICSolution& s);
/// Amplitudes at the stored precision, parsed without passing through double.
BigFiducial solution_big_vector(const SICSolution& s);

/// Directory-safe form of a symmetry label ("zauner:1" -> "zauner-1").
std::string symmetry_directory(const std::string& symmetry);

/// Writes catalogue/d<dim>/<symmetry>/<class-id>.sicfid per class plus a
/// d<dim>/manifest JSON summary. `solutions` are the inputs the classes
/// index into. Returns the paths of the written solution files.
std::vector<std::filesystem::path> write_catalogue(const std::filesystem::path& root,
                                                   const std::vector<SICSolution>& solutions,
                                                   const std::vector<CatalogueClass>& classes);

/// One-document run summaries.
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const SearchReport& report);
nlohmann::json to_json(const std::vector<CatalogueClass>& classes);
nlohmann::json to_json(const CliffordElement<double>& element);

}  // namespace sic
