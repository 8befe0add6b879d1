#pragma once

// Extended-Clifford orbits, equivalence tests and stabilizers of SIC
// fiducials in small dimensions, by brute force over SL(2, Z_d) x {1, conj}.

#include "sic/overlaps.hpp"
#include "sic/whgroup.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace sic {

struct SICSolution;

inline constexpr int kDefaultClassifyMaxDim = 8;

struct ClassifyOptions {
  int max_dim = kDefaultClassifyMaxDim;
  double match_tolerance = 1e-8;  // on the ray distance
};

/// Thrown when d exceeds ClassifyOptions::max_dim.
struct DimensionCapExceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// min over phases of |x - e^{i phi} y|, with phi = arg <y|x> in closed form.
double ray_distance(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y);

/// All F in SL(2, Z_d), entries in [0, d), lexicographic in (a, b, c, e).
std::vector<SymplecticMatrix> special_linear_group(int d);

/// Realizes F with the first integer lift (entries shifted by 0 or d) for
/// which the intertwining system is solvable; even d needs this search.
CliffordElement<double> realize_symplectic(int d, const SymplecticMatrix& f, const DisplacementIndex& translation);

/// Result of matching v against the Weyl-Heisenberg orbit of a fiducial.
struct OrbitMatch {
  bool found = false;
  DisplacementIndex translation;  // v ~ D_translation * fiducial
  double distance = 0;            // ray distance of the best translate
};

OrbitMatch match_weyl_heisenberg(const Eigen::VectorXcd& v, const FiducialVector& fiducial, double tolerance = 1e-8);

struct OrbitRecord {
  int dim = 0;
  std::vector<FiducialVector> representatives;  // one per WH-inequivalent SIC
  std::vector<CliffordElement<double>> trail;   // element producing each representative from the input
  int orbit_size = 0;                           // vectors: representatives * d^2
};

/// Distinct SICs in the extended-Clifford orbit of a verified fiducial.
OrbitRecord clifford_orbit(const FiducialVector& a, const ClassifyOptions& options = {});

struct EquivalenceVerdict {
  bool equivalent = false;
  /// Present iff equivalent: witness.apply(a) equals b up to global phase.
  std::optional<CliffordElement<double>> witness;
};

EquivalenceVerdict equivalent(const FiducialVector& a, const FiducialVector& b, const ClassifyOptions& options = {});

struct StabilizerInfo {
  int order = 0;                                     // elements modulo WH and phases
  std::vector<CliffordElement<double>> elements;     // every stabilizing element
  std::vector<CliffordElement<double>> generators;   // greedy generating set
};

StabilizerInfo stabilizer(const FiducialVector& a, const ClassifyOptions& options = {});

struct CatalogueClass {
  int class_id = 0;
  int representative_index = 0;          // into the input list
  FiducialVector representative;
  std::vector<int> members;              // input indices, ascending
  std::vector<CliffordElement<double>> witnesses;  // witness mapping the representative to each member
  int stabilizer_order = 0;
};

/// Partition into extended-Clifford classes. Each input joins the first
/// existing class whose representative it is equivalent to.
std::vector<CatalogueClass> catalogue(const std::vector<FiducialVector>& solutions, const ClassifyOptions& options = {});
std::vector<CatalogueClass> catalogue(const std::vector<SICSolution>& solutions, const ClassifyOptions& options = {});

}  // namespace sic
