#include "doctest.h"
#include "oracles.hpp"

#include "sic/classify.hpp"
#include "sic/known_fiducials.hpp"
#include "sic/search.hpp"
#include "sic/store.hpp"
#include "sic/verify.hpp"

using namespace sic;
using Eigen::VectorXcd;

namespace {

std::vector<FiducialVector> zauner_hits(int d, int count, std::uint64_t seed) {
  SearchConfig c;
  c.dim = d;
  c.symmetry = SymmetrySpec::zauner_auto();
  c.restarts = 1;
  std::vector<FiducialVector> out;
  for (std::uint64_t s = seed; static_cast<int>(out.size()) < count && s < seed + 20 * count; ++s) {
    c.master_seed = s;
    const auto r = search_sic(c);
    if (r.solution) out.push_back(r.solution->vector);
  }
  REQUIRE(static_cast<int>(out.size()) == count);
  return out;
}

}  // namespace

TEST_CASE("special_linear_group has the right order") {
  const std::map<int, std::size_t> orders = {{2, 6}, {3, 24}, {4, 48}, {5, 120}, {6, 144}, {7, 336}, {8, 384}};
  for (const auto& [d, n] : orders) {
    const auto g = special_linear_group(d);
    CHECK(g.size() == n);
    for (const auto& f : g) CHECK(f.is_symplectic());
  }
}

TEST_CASE("realize_symplectic handles every element, even d included") {
  for (int d = 2; d <= 8; ++d)
    for (const auto& f : special_linear_group(d)) {
      const auto e = realize_symplectic(d, f, DisplacementIndex{0, 0, d});
      CHECK(intertwining_error<double>(e.realized, f) < 1e-10);
    }
}

TEST_CASE("ray distance and WH matching") {
  std::mt19937 rng(3);
  const VectorXcd a = oracle::haar(4, rng);
  CHECK(ray_distance(a, std::polar(1.0, 1.234) * a) < 1e-15);
  CHECK(ray_distance(a, oracle::haar(4, rng)) > 0.1);
  const DisplacementIndex t{2, 3, 4};
  const auto m = match_weyl_heisenberg(displacement(t) * a, a);
  CHECK(m.found);
  CHECK(m.translation == t);
}

TEST_CASE("d = 3 ground truth: Hesse and Norrell orbits (AC7 shape)") {
  const auto hesse = clifford_orbit(hesse_fiducial());
  CHECK(hesse.representatives.size() == 1);
  CHECK(hesse.orbit_size == 9);
  const auto norrell = clifford_orbit(norrell_fiducial());
  CHECK(static_cast<int>(norrell.representatives.size()) == oracle::kNorrellOrbitSics);
  CHECK(norrell.orbit_size == oracle::kNorrellOrbitVectors);
  for (std::size_t i = 0; i < norrell.representatives.size(); ++i) {
    CHECK(verify_sic(norrell.representatives[i]).passed);
    CHECK(ray_distance(norrell.trail[i].apply(norrell_fiducial()), norrell.representatives[i]) < 1e-10);
  }
  CHECK_FALSE(equivalent(hesse_fiducial(), norrell_fiducial()).equivalent);
  CHECK(stabilizer(hesse_fiducial()).order == oracle::kHesseStabilizerOrder);
  CHECK(stabilizer(norrell_fiducial()).order == oracle::kNorrellStabilizerOrder);
  // Stabilizer orders are constant along the orbit.
  for (const auto& rep : norrell.representatives) CHECK(stabilizer(rep).order == oracle::kNorrellStabilizerOrder);
}

TEST_CASE("equivalence witnesses") {
  const FiducialVector q = qubit_fiducial();
  for (int l = 0; l < 2; ++l)
    for (int a = 0; a < 2; ++a) {
      const DisplacementIndex t{l, a, 2};
      const auto v = equivalent(q, displacement(t) * q);
      REQUIRE(v.equivalent);
      REQUIRE(v.witness);
      CHECK(v.witness->symplectic == SymplecticMatrix::identity(2));
      CHECK(v.witness->translation == t);
      CHECK(ray_distance(v.witness->apply(q), displacement(t) * q) < 1e-10);
    }
  const auto c = equivalent(q, q.conjugate());
  REQUIRE(c.equivalent);
  CHECK(ray_distance(c.witness->apply(q), q.conjugate()) < 1e-10);

  const auto hits = zauner_hits(5, 2, 40);
  const auto z = equivalent(hits[0], hits[1]);
  if (z.equivalent) CHECK(ray_distance(z.witness->apply(hits[0]), hits[1]) < 1e-8);
}

TEST_CASE("stabilizers of Zauner solutions contain an order-3 element") {
  for (int d : {4, 5, 7}) {
    const auto hits = zauner_hits(d, 1, 11);
    const auto s = stabilizer(hits[0]);
    CHECK(s.order % 3 == 0);
    bool has_identity = false;
    for (const auto& e : s.elements) {
      CHECK(ray_distance(e.apply(hits[0]), hits[0]) < 1e-8);
      if (!e.conjugate && e.symplectic == SymplecticMatrix::identity(d)) has_identity = true;
    }
    CHECK(has_identity);
    CHECK_FALSE(s.generators.empty());
  }
}

TEST_CASE("catalogue: partitions, duplicates, witnesses and transitivity") {
  const auto hits = zauner_hits(4, 12, 100);
  std::vector<FiducialVector> inputs = hits;
  inputs.push_back(hits[0]);  // duplicate
  const auto classes = catalogue(inputs);
  CHECK(classes.size() >= 1);
  std::vector<int> owner(inputs.size(), -1);
  for (const auto& c : classes) {
    REQUIRE(c.members.size() == c.witnesses.size());
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      owner[c.members[k]] = c.class_id;
      CHECK(ray_distance(c.witnesses[k].apply(c.representative), inputs[c.members[k]]) < 1e-8);
    }
  }
  for (int o : owner) CHECK(o >= 0);
  CHECK(owner.back() == owner.front());
  // Pairwise verdicts must agree with the partition.
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) CHECK(equivalent(inputs[i], inputs[j]).equivalent == (owner[i] == owner[j]));

  const auto mixed = catalogue(std::vector<FiducialVector>{hesse_fiducial(), norrell_fiducial(),
                                                            clifford_orbit(norrell_fiducial()).representatives[2]});
  CHECK(mixed.size() == 2);

  // The SICSolution overload agrees.
  std::vector<SICSolution> stored;
  for (const auto& v : inputs) stored.push_back(solution_from_vector(v, "zauner:0"));
  CHECK(catalogue(stored).size() == classes.size());
}

TEST_CASE("dimension cap and input validation") {
  std::mt19937 rng(1);
  FiducialVector nine = oracle::haar(9, rng);
  CHECK_THROWS_AS(clifford_orbit(nine), DimensionCapExceeded);
  CHECK_THROWS_AS(stabilizer(nine), DimensionCapExceeded);
  ClassifyOptions raised;
  raised.max_dim = 9;
  CHECK_THROWS_AS(clifford_orbit(nine, raised), std::invalid_argument);  // not a SIC
  CHECK_THROWS_AS(equivalent(oracle::flat_vector(3), hesse_fiducial()), std::invalid_argument);
}
