#pragma once

#include <random>
#include <string>
#include <vector>

#include "mgt/cocycle.hpp"
#include "mgt/errors.hpp"
#include "mgt/groupoid.hpp"
#include "mgt/lift.hpp"
#include "mgt/shift.hpp"

namespace mgt::detail {

// the standard lifting instance: Gamma = <a> * <b>, Lambda = <a>
inline GroupPtr free_ab() {
  return Group::free_product(
      {Group::free_group(1, {"a"}), Group::free_group(1, {"b"})});
}

inline AlphabetPtr bin2() { return Alphabet::uniform(2); }

// inner map spec: identity | bijection:<sym,...> | odometer | scramble:<json>
// where the scramble json is {"window": [words over the subgroup], "perm": [...]}
MapPtr inner_by_name(const std::string& spec, const GroupPtr& sub, const AlphabetPtr& alph);

// planted instance for the cohomology solver: a coboundary twist of a
// homomorphism cocycle over a random C2 or C3 action
struct PlantedCocycle {
  ActionCocycle c;
  std::vector<unsigned> rho;  // the planted homomorphism
  std::vector<unsigned> f;    // the planted twist
};
PlantedCocycle planted_cocycle(std::mt19937_64& rng, std::size_t max_points,
                               unsigned max_target);

// a valid cocycle that need not be cohomologous to any homomorphism:
// free values on orbit sections, holonomy-consistent elsewhere
ActionCocycle random_valid_cocycle(std::mt19937_64& rng, std::size_t max_points,
                                   unsigned max_target);

// exhaustive reference solver (twists x homomorphisms)
bool brute_solvable(const ActionCocycle& c);

// random two-partition principal instance for the independence cross check
struct IndepInstance {
  std::vector<unsigned> r0, r1;
};
IndepInstance random_indep_instance(std::mt19937_64& rng, std::size_t max_points);

// runs the cross check on one instance; returns true when the word search and
// the structure-graph criterion agree
bool indep_crossval_one(const IndepInstance& inst);

}  // namespace mgt::detail
