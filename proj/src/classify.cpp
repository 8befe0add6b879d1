#include <algorithm>
#include "sic/classify.hpp"

#include "sic/store.hpp"
#include "sic/verify.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

namespace sic {

namespace {

// (F, c): the element U_F K^c with K entrywise conjugation.
struct GroupKey {
  std::array<long long, 4> f;
  bool conjugate;
  auto operator<=>(const GroupKey&) const = default;
};

GroupKey key_of(const SymplecticMatrix& f, bool conjugate) {
  return {{f(0, 0), f(0, 1), f(1, 0), f(1, 1)}, conjugate};
}

// K U_F K = U_{J F J} with J = diag(1, -1), so
// (F1, c1)(F2, c2) = (F1 J^c1 F2 J^c1, c1 xor c2).
GroupKey multiply(const GroupKey& x, const GroupKey& y, int d) {
  std::array<long long, 4> f2 = y.f;
  if (x.conjugate) {
    f2[1] = -f2[1];
    f2[2] = -f2[2];
  }
  const SymplecticMatrix product = SymplecticMatrix(x.f, d) * SymplecticMatrix(f2, d);
  return key_of(product, x.conjugate != y.conjugate);
}

std::set<GroupKey> closure(const std::vector<GroupKey>& generators, int d) {
  std::set<GroupKey> seen{key_of(SymplecticMatrix::identity(d), false)};
  std::vector<GroupKey> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<GroupKey> next;
    for (const auto& x : frontier)
      for (const auto& g : generators) {
        const GroupKey y = multiply(x, g, d);
        if (seen.insert(y).second) next.push_back(y);
      }
    frontier.swap(next);
  }
  return seen;
}

// Realized unitaries (translation 0) for every F in SL(2, Z_d), cached per d.
const std::vector<CliffordElement<double>>& group_elements(int d) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<CliffordElement<double>>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[d];
  if (!slot) {
    auto elements = std::make_shared<std::vector<CliffordElement<double>>>();
    for (const auto& f : special_linear_group(d)) elements->push_back(realize_symplectic(d, f, {0, 0, d}));
    slot = elements;
  }
  return *slot;
}

// Weyl-Heisenberg orbit of a fiducial, as matrix columns for fast matching.
class WeylHeisenbergOrbit {
 public:
  explicit WeylHeisenbergOrbit(const FiducialVector& fiducial) : d_(static_cast<int>(fiducial.size())) {
    columns_.resize(d_, static_cast<Eigen::Index>(d_) * d_);
    const auto vectors = weyl_heisenberg_orbit(fiducial);
    for (std::size_t i = 0; i < vectors.size(); ++i) columns_.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }

  OrbitMatch match(const Eigen::VectorXcd& v, double tolerance) const {
    const Eigen::VectorXd overlaps = (columns_.adjoint() * v).cwiseAbs();
    Eigen::Index best = 0;
    overlaps.maxCoeff(&best);
    OrbitMatch m;
    m.translation = DisplacementIndex{static_cast<int>(best / d_), static_cast<int>(best % d_), d_};
    m.distance = ray_distance(v, columns_.col(best));
    m.found = m.distance < tolerance;
    return m;
  }

 private:
  int d_;
  Eigen::MatrixXcd columns_;
};

void check_input(const FiducialVector& a, const ClassifyOptions& options) {
  const int d = static_cast<int>(a.size());
  require_dimension(d);
  if (d > options.max_dim)
    throw DimensionCapExceeded("classification capped at d = " + std::to_string(options.max_dim) + ", got d = " +
                               std::to_string(d) + " (cost grows as |SL(2,Z_d)| d^2; raise max_dim to override)");
  const VerificationReport v = verify_sic(a, kAcceptTolerance);
  if (!v.passed)
    throw std::invalid_argument("classify: input is not a verified SIC fiducial (max deviation " +
                                std::to_string(v.max_sic_deviation) + ")");
}

Eigen::VectorXcd apply_untranslated(const CliffordElement<double>& e, bool conjugate, const FiducialVector& a) {
  return conjugate ? Eigen::VectorXcd(e.realized * a.conjugate()) : Eigen::VectorXcd(e.realized * a);
}

CliffordElement<double> with_translation(const CliffordElement<double>& e, bool conjugate,
                                         const DisplacementIndex& translation) {
  CliffordElement<double> out = e;
  out.translation = translation;
  out.conjugate = conjugate;
  out.realized = MonomialOperator::displacement(e.symplectic.d, translation.l, translation.alpha).matrix<double>() *
                 e.realized;
  return out;
}

}  // namespace

double ray_distance(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  const std::complex<double> inner = y.dot(x);  // <y|x>
  const std::complex<double> phase = std::abs(inner) > 0 ? inner / std::abs(inner) : 1.0;
  return (x - phase * y).norm();
}

std::vector<SymplecticMatrix> special_linear_group(int d) {
  require_dimension(d);
  std::vector<SymplecticMatrix> out;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          if (mod(static_cast<long long>(a) * e - static_cast<long long>(b) * c, d) == 1)
            out.emplace_back(std::array<long long, 4>{a, b, c, e}, d);
  // Identity first, so equivalence witnesses prefer a pure translation.
  const auto identity = std::find(out.begin(), out.end(), SymplecticMatrix::identity(d));
  std::rotate(out.begin(), identity, identity + 1);
  return out;
}

CliffordElement<double> realize_symplectic(int d, const SymplecticMatrix& f, const DisplacementIndex& translation) {
  for (int mask = 0; mask < 16; ++mask) {
    std::array<long long, 4> lift;
    for (int i = 0; i < 4; ++i) lift[i] = mod(f.lift[i], d) + ((mask >> i) & 1) * d;
    try {
      return clifford_from_symplectic<double>(d, SymplecticMatrix(lift, d), translation);
    } catch (const std::runtime_error&) {
      // Wrong parity of the lift for even d; try the next one.
    }
  }
  throw std::runtime_error("realize_symplectic: no integer lift realizes the symplectic matrix");
}

OrbitMatch match_weyl_heisenberg(const Eigen::VectorXcd& v, const FiducialVector& fiducial, double tolerance) {
  if (v.size() != fiducial.size()) throw std::invalid_argument("match_weyl_heisenberg: dimension mismatch");
  return WeylHeisenbergOrbit(fiducial).match(v, tolerance);
}

OrbitRecord clifford_orbit(const FiducialVector& input, const ClassifyOptions& options) {
  check_input(input, options);
  const FiducialVector a = normalize_fiducial(input);
  const int d = static_cast<int>(a.size());
  OrbitRecord record;
  record.dim = d;
  std::vector<WeylHeisenbergOrbit> orbits;
  for (bool conjugate : {false, true}) {
    for (const auto& element : group_elements(d)) {
      const Eigen::VectorXcd image = apply_untranslated(element, conjugate, a);
      bool seen = false;
      for (const auto& orbit : orbits)
        if (orbit.match(image, options.match_tolerance).found) {
          seen = true;
          break;
        }
      if (seen) continue;
      record.representatives.push_back(image);
      record.trail.push_back(with_translation(element, conjugate, {0, 0, d}));
      orbits.emplace_back(image);
    }
  }
  record.orbit_size = static_cast<int>(record.representatives.size()) * d * d;
  return record;
}

EquivalenceVerdict equivalent(const FiducialVector& a_in, const FiducialVector& b_in, const ClassifyOptions& options) {
  if (a_in.size() != b_in.size()) throw std::invalid_argument("equivalent: dimension mismatch");
  check_input(a_in, options);
  check_input(b_in, options);
  const FiducialVector a = normalize_fiducial(a_in);
  const FiducialVector b = normalize_fiducial(b_in);
  const int d = static_cast<int>(a.size());
  const WeylHeisenbergOrbit target(b);
  for (bool conjugate : {false, true}) {
    for (const auto& element : group_elements(d)) {
      const OrbitMatch m = target.match(apply_untranslated(element, conjugate, a), options.match_tolerance);
      if (!m.found) continue;
      // image ~ D_u b, so D_{-u} image ~ b.
      return {true, with_translation(element, conjugate, -m.translation)};
    }
  }
  return {false, std::nullopt};
}

StabilizerInfo stabilizer(const FiducialVector& input, const ClassifyOptions& options) {
  check_input(input, options);
  const FiducialVector a = normalize_fiducial(input);
  const int d = static_cast<int>(a.size());
  const WeylHeisenbergOrbit own(a);
  StabilizerInfo info;
  std::vector<GroupKey> keys;
  for (bool conjugate : {false, true}) {
    for (const auto& element : group_elements(d)) {
      const OrbitMatch m = own.match(apply_untranslated(element, conjugate, a), options.match_tolerance);
      if (!m.found) continue;
      info.elements.push_back(with_translation(element, conjugate, -m.translation));
      keys.push_back(key_of(element.symplectic, conjugate));
    }
  }
  info.order = static_cast<int>(info.elements.size());

  std::vector<GroupKey> generator_keys;
  std::set<GroupKey> generated = closure(generator_keys, d);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (generated.count(keys[i])) continue;
    generator_keys.push_back(keys[i]);
    info.generators.push_back(info.elements[i]);
    generated = closure(generator_keys, d);
  }
  return info;
}

std::vector<CatalogueClass> catalogue(const std::vector<FiducialVector>& solutions, const ClassifyOptions& options) {
  std::vector<CatalogueClass> classes;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (i > 0 && solutions[i].size() != solutions[0].size())
      throw std::invalid_argument("catalogue: solutions have different dimensions");
    bool placed = false;
    for (auto& cls : classes) {
      const EquivalenceVerdict v = equivalent(cls.representative, solutions[i], options);
      if (!v.equivalent) continue;
      cls.members.push_back(static_cast<int>(i));
      cls.witnesses.push_back(*v.witness);
      placed = true;
      break;
    }
    if (placed) continue;
    CatalogueClass cls;
    cls.class_id = static_cast<int>(classes.size());
    cls.representative_index = static_cast<int>(i);
    cls.representative = normalize_fiducial(solutions[i]);
    cls.members.push_back(static_cast<int>(i));
    const int d = static_cast<int>(solutions[i].size());
    cls.witnesses.push_back(realize_symplectic(d, SymplecticMatrix::identity(d), {0, 0, d}));
    cls.stabilizer_order = stabilizer(cls.representative, options).order;
    classes.push_back(std::move(cls));
  }
  return classes;
}

std::vector<CatalogueClass> catalogue(const std::vector<SICSolution>& solutions, const ClassifyOptions& options) {
  std::vector<FiducialVector> vectors;
  vectors.reserve(solutions.size());
  for (const auto& s : solutions) vectors.push_back(solution_vector(s));
  return catalogue(vectors, options);
}

}  // namespace sic
