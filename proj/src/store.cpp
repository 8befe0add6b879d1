#include "sic/store.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace sic {

namespace {

constexpr std::string_view kMagic = "SICFID 1";

[[noreturn]] void fail(StoreErrorKind kind, const std::string& message) { throw StoreError(kind, message); }

bool is_fixed_decimal(std::string_view s, int digits) {
  if (s.size() < 2 || (s[0] != '+' && s[0] != '-')) return false;
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(1, dot == std::string_view::npos ? std::string_view::npos : dot - 1);
  if (whole.empty()) return false;
  for (char c : whole)
    if (c < '0' || c > '9') return false;
  if (dot == std::string_view::npos) return digits == 0;
  const std::string_view frac = s.substr(dot + 1);
  if (static_cast<int>(frac.size()) != digits || frac.empty()) return false;
  for (char c : frac)
    if (c < '0' || c > '9') return false;
  return true;
}

bool is_decimal(const std::string& s) {
  static const std::regex pattern(R"([+-]?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?)");
  return std::regex_match(s, pattern);
}

bool is_symmetry_label(const std::string& s) {
  return s == "none" || s == "zauner:0" || s == "zauner:1" || s == "zauner:2";
}

int parse_int(const std::string& text, const std::string& field) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) fail(StoreErrorKind::malformed_header, field + " is not an integer: '" + text + "'");
  return value;
}

void validate(const SICSolution& s) {
  if (s.dim < 2) fail(StoreErrorKind::malformed_header, "dimension must be at least 2, got " + std::to_string(s.dim));
  if (!is_symmetry_label(s.symmetry)) fail(StoreErrorKind::malformed_header, "unknown symmetry label '" + s.symmetry + "'");
  if (s.precision_digits < 1) fail(StoreErrorKind::malformed_header, "digits must be positive");
  if (!is_decimal(s.frame_error)) fail(StoreErrorKind::invalid_decimal, "frame_error is not a decimal: '" + s.frame_error + "'");
  const std::size_t expected = 2 * static_cast<std::size_t>(s.dim);
  if (s.amplitudes.size() != expected)
    fail(StoreErrorKind::amplitude_count, "d = " + std::to_string(s.dim) + " requires " + std::to_string(expected) +
                                              " amplitude lines, found " + std::to_string(s.amplitudes.size()));
  for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
    if (!is_fixed_decimal(s.amplitudes[i], s.precision_digits))
      fail(StoreErrorKind::invalid_decimal, "amplitude line " + std::to_string(i + 1) + " is not a signed decimal with " +
                                                std::to_string(s.precision_digits) + " fractional digits: '" +
                                                s.amplitudes[i] + "'");
  if (s.created_by.find('\n') != std::string::npos) fail(StoreErrorKind::malformed_header, "created_by spans lines");
}

std::string shortest(double x) {
  char buffer[64];
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, res.ptr);
}

double to_double(const std::string& s) {
  double value = 0;
  const char* begin = s.data() + (s[0] == '+' ? 1 : 0);
  const auto res = std::from_chars(begin, s.data() + s.size(), value);
  if (res.ec != std::errc()) fail(StoreErrorKind::invalid_decimal, "cannot convert '" + s + "'");
  return value;
}

FiducialVector vector_from_strings(const std::vector<std::string>& amplitudes) {
  FiducialVector a(static_cast<Eigen::Index>(amplitudes.size() / 2));
  for (Eigen::Index j = 0; j < a.size(); ++j)
    a(j) = {to_double(amplitudes[2 * j]), to_double(amplitudes[2 * j + 1])};
  return a;
}

std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::string to_string(StoreErrorKind kind) {
  switch (kind) {
    case StoreErrorKind::unexpected_end: return "unexpected_end";
    case StoreErrorKind::malformed_header: return "malformed_header";
    case StoreErrorKind::amplitude_count: return "amplitude_count";
    case StoreErrorKind::invalid_decimal: return "invalid_decimal";
    case StoreErrorKind::io: return "io";
  }
  return "unknown";
}

std::string serialize_solution(const SICSolution& s) {
  validate(s);
  std::string out;
  out += kMagic;
  out += "\nd " + std::to_string(s.dim);
  out += "\nsymmetry " + s.symmetry;
  out += "\ndigits " + std::to_string(s.precision_digits);
  out += "\nframe_error " + s.frame_error + "\n";
  for (const auto& line : s.amplitudes) out += line + "\n";
  if (!s.created_by.empty()) out += "created_by " + s.created_by + "\n";
  if (s.stabilizer_order) out += "stabilizer_order " + std::to_string(*s.stabilizer_order) + "\n";
  return out;
}

SICSolution parse_solution(std::string_view text) {
  // Every complete file ends in a newline; anything else was cut short.
  if (text.empty() || text.back() != '\n') fail(StoreErrorKind::unexpected_end, "unexpected end of input");
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 5) fail(StoreErrorKind::unexpected_end, "unexpected end of input: header needs 5 lines");
  for (const auto& line : lines)
    if (!line.empty() && line.back() == '\r') fail(StoreErrorKind::malformed_header, "CR line endings are not allowed");

  auto field = [&](std::size_t index, const std::string& key) {
    const std::string& line = lines[index];
    if (line.rfind(key + " ", 0) != 0)
      fail(StoreErrorKind::malformed_header, "line " + std::to_string(index + 1) + ": expected '" + key + " ...', got '" + line + "'");
    return line.substr(key.size() + 1);
  };

  if (lines[0] != kMagic) fail(StoreErrorKind::malformed_header, "line 1: expected 'SICFID 1', got '" + lines[0] + "'");
  SICSolution s;
  s.dim = parse_int(field(1, "d"), "d");
  s.symmetry = field(2, "symmetry");
  s.precision_digits = parse_int(field(3, "digits"), "digits");
  s.frame_error = field(4, "frame_error");
  if (s.dim < 2) fail(StoreErrorKind::malformed_header, "dimension must be at least 2, got " + std::to_string(s.dim));

  std::size_t i = 5;
  while (i < lines.size() && !lines[i].empty() && (lines[i][0] == '+' || lines[i][0] == '-')) s.amplitudes.push_back(lines[i++]);
  if (i < lines.size() && lines[i].rfind("created_by ", 0) == 0) s.created_by = lines[i++].substr(11);
  if (i < lines.size() && lines[i].rfind("stabilizer_order ", 0) == 0)
    s.stabilizer_order = parse_int(lines[i++].substr(17), "stabilizer_order");
  if (i < lines.size()) {
    // A digit-led line in the amplitude block means a missing sign; anything
    // else is structural.
    if (s.amplitudes.size() < 2 * static_cast<std::size_t>(s.dim) && !lines[i].empty() &&
        (std::isdigit(static_cast<unsigned char>(lines[i][0])) || lines[i][0] == '.'))
      fail(StoreErrorKind::invalid_decimal, "line " + std::to_string(i + 1) + ": amplitude without sign: '" + lines[i] + "'");
    fail(StoreErrorKind::malformed_header, "line " + std::to_string(i + 1) + ": unexpected content '" + lines[i] + "'");
  }
  validate(s);
  return s;
}

std::size_t write_solution(const SICSolution& s, std::ostream& out) {
  const std::string text = serialize_solution(s);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(StoreErrorKind::io, "write failed");
  return text.size();
}

std::size_t write_solution(const SICSolution& s, const std::filesystem::path& destination) {
  static std::atomic<unsigned> counter{0};
  const std::string text = serialize_solution(s);
  std::filesystem::path tmp = destination;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(StoreErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      fail(StoreErrorKind::io, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, destination, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(StoreErrorKind::io, "cannot move solution into '" + destination.string() + "'");
  }
  return text.size();
}

SICSolution read_solution(std::istream& in) {
  if (!in) fail(StoreErrorKind::io, "unreadable input stream");
  return parse_solution(read_all(in));
}

SICSolution read_solution(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(StoreErrorKind::io, "cannot open '" + source.string() + "'");
  return parse_solution(read_all(in));
}

SICSolution solution_from_vector(const FiducialVector& input, const std::string& symmetry, int digits,
                                 const std::string& created_by) {
  const FiducialVector a = normalize_fiducial(input);
  SICSolution s;
  s.dim = static_cast<int>(a.size());
  s.symmetry = symmetry;
  s.precision_digits = digits;
  s.created_by = created_by;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    s.amplitudes.push_back(format_fixed(a(j).real(), digits));
    s.amplitudes.push_back(format_fixed(a(j).imag(), digits));
  }
  // Measured on exactly what a reader will reconstruct.
  s.frame_error = shortest(verify_sic(vector_from_strings(s.amplitudes)).frame_error);
  validate(s);
  return s;
}

SICSolution solution_from_big(const BigFiducial& a, const std::string& symmetry, int digits,
                              const std::string& created_by) {
  SICSolution s;
  s.dim = a.dim;
  s.symmetry = symmetry;
  s.precision_digits = digits;
  s.created_by = created_by;
  for (Eigen::Index j = 0; j < a.amplitudes.size(); ++j) {
    s.amplitudes.push_back(format_fixed(a.amplitudes(j).real(), digits));
    s.amplitudes.push_back(format_fixed(a.amplitudes(j).imag(), digits));
  }
  s.frame_error = "0";  // placeholder so the amplitudes can be re-parsed
  s.frame_error = format_scientific(frame_error_big(solution_big_vector(s).amplitudes), 6);
  validate(s);
  return s;
}

FiducialVector solution_vector(const SICSolution& s) {
  validate(s);
  return vector_from_strings(s.amplitudes);
}

BigFiducial solution_big_vector(const SICSolution& s) {
  validate(s);
  BigFiducial out;
  out.dim = s.dim;
  out.working_precision = s.precision_digits + 10;
  out.amplitudes.resize(s.dim);
  for (int j = 0; j < s.dim; ++j)
    out.amplitudes(j) = BigComplex(parse_big_real(s.amplitudes[2 * j], s.precision_digits),
                                   parse_big_real(s.amplitudes[2 * j + 1], s.precision_digits));
  return out;
}

std::string symmetry_directory(const std::string& symmetry) {
  std::string out = symmetry;
  for (char& c : out)
    if (c == ':') c = '-';
  return out;
}

std::vector<std::filesystem::path> write_catalogue(const std::filesystem::path& root,
                                                   const std::vector<SICSolution>& solutions,
                                                   const std::vector<CatalogueClass>& classes) {
  std::vector<std::filesystem::path> written;
  if (solutions.empty()) return written;
  const int d = solutions.front().dim;
  const std::filesystem::path dim_dir = root / ("d" + std::to_string(d));
  nlohmann::json manifest;
  manifest["dim"] = d;
  manifest["classes"] = nlohmann::json::array();
  for (const auto& cls : classes) {
    SICSolution rep = solutions.at(static_cast<std::size_t>(cls.representative_index));
    if (rep.dim != d) throw std::invalid_argument("write_catalogue: mixed dimensions");
    rep.stabilizer_order = cls.stabilizer_order;
    const std::string id = "class-" + std::to_string(cls.class_id);
    const std::filesystem::path dir = dim_dir / symmetry_directory(rep.symmetry);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(StoreErrorKind::io, "cannot create '" + dir.string() + "'");
    const std::filesystem::path file = dir / (id + ".sicfid");
    write_solution(rep, file);
    written.push_back(file);
    manifest["classes"].push_back({{"id", id},
                                   {"file", std::filesystem::relative(file, dim_dir).generic_string()},
                                   {"symmetry", rep.symmetry},
                                   {"members", cls.members},
                                   {"stabilizer_order", cls.stabilizer_order}});
  }
  const std::filesystem::path manifest_path = dim_dir / "manifest";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
  if (!out) fail(StoreErrorKind::io, "cannot write '" + manifest_path.string() + "'");
  return written;
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& c : r.symmetry_checks)
    checks[c.name] = {{"magnitude", std::isfinite(c.magnitude) ? nlohmann::json(c.magnitude) : nlohmann::json(nullptr)},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"informational", c.informational}};
  return {{"dim", r.dim},
          {"max_sic_deviation", r.max_sic_deviation},
          {"frame_error", r.frame_error},
          {"g_deviation", r.g_deviation},
          {"norm_deviation", r.norm_deviation},
          {"renormalized", r.renormalized},
          {"tolerance", r.tolerance},
          {"verdict", r.passed ? "pass" : "fail"},
          {"symmetry_checks", checks}};
}

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records)
    records.push_back({{"index", rec.index},
                       {"seed", rec.seed},
                       {"subspace", rec.subspace},
                       {"iterations", rec.iterations},
                       {"frame_error", rec.frame_error},
                       {"elapsed_seconds", rec.elapsed_seconds},
                       {"status", rec.status},
                       {"converged", rec.converged},
                       {"verified", rec.verified}});
  nlohmann::json out = {{"restarts_attempted", r.records.size()},
                        {"hits", r.hits},
                        {"wall_seconds", r.wall_seconds},
                        {"deterministic", r.deterministic},
                        {"records", records}};
  if (r.best)
    out["best"] = {{"restart", r.best->restart_index},
                   {"seed", r.best->seed},
                   {"frame_error", r.best->frame_error},
                   {"max_sic_deviation", r.best->max_sic_deviation},
                   {"symmetry", r.best->symmetry_label}};
  return out;
}

nlohmann::json to_json(const CliffordElement<double>& e) {
  const auto& f = e.symplectic;
  return {{"symplectic", {{f(0, 0), f(0, 1)}, {f(1, 0), f(1, 1)}}},
          {"translation", {e.translation.l, e.translation.alpha}},
          {"conjugate", e.conjugate}};
}

nlohmann::json to_json(const std::vector<CatalogueClass>& classes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : classes) {
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : c.witnesses) witnesses.push_back(to_json(w));
    out.push_back({{"class_id", c.class_id},
                   {"representative", c.representative_index},
                   {"members", c.members},
                   {"stabilizer_order", c.stabilizer_order},
                   {"witnesses", witnesses}});
  }
  return out;
}

}  // namespace sic
