#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgt/groupoid.hpp"
#include "mgt/rational.hpp"

namespace mgt {

// A finite group given by its multiplication table, carrying a bi-invariant
// metric bounded by 1. Without an explicit metric the discrete metric is used.
// The constructor checks the group axioms and, for a custom metric, the metric
// axioms, both translation invariances and the bound, all exhaustively.
class FiniteGroupL {
 public:
  explicit FiniteGroupL(std::vector<std::vector<unsigned>> mult,
                        std::vector<std::vector<Rat>> metric = {});

  std::size_t order() const { return mult_.size(); }
  unsigned mul(unsigned a, unsigned b) const { return mult_[a][b]; }
  unsigned inv(unsigned a) const { return inv_[a]; }
  unsigned id() const { return id_; }
  Rat dist(unsigned a, unsigned b) const;
  bool discrete_metric() const { return metric_.empty(); }

  bool operator==(const FiniteGroupL& o) const;

  static FiniteGroupL cyclic(unsigned n);
  static FiniteGroupL from_group(const GroupPtr& g);

 private:
  std::vector<std::vector<unsigned>> mult_;
  std::vector<unsigned> inv_;
  unsigned id_ = 0;
  std::vector<std::vector<Rat>> metric_;
};

nlohmann::json to_json(const FiniteGroupL& g);
FiniteGroupL finite_group_from_json(const nlohmann::json& j);

// Symmetric group on {0..k-1} with elements numbered by the lexicographic
// order of their one-line notation; composition acts left of the argument,
// (pi tau)(i) = pi(tau(i)).
struct SymGroup {
  FiniteGroupL group;
  std::vector<std::vector<unsigned>> one_line;
  unsigned index_of(const std::vector<unsigned>& perm) const;
};
SymGroup sym_group(unsigned k);

// conjugation-invariant metric on sym_group(3): transpositions at distance 1,
// the two rotations at 2/3
std::vector<std::vector<Rat>> s3_class_metric();

struct GroupAction {
  FiniteGroupL group;
  std::vector<std::vector<unsigned>> act;  // act[g][x]
};
// validates that act is a homomorphism to permutations of the point set
GroupAction make_action(FiniteGroupL group, std::vector<std::vector<unsigned>> act);

struct ActionCocycle {
  GroupAction action;
  FiniteGroupL target;
  std::vector<std::vector<unsigned>> val;  // val[g][x]
};

struct GroupoidCocycle {
  FiniteGroupoid domain;
  FiniteGroupL target;
  std::vector<unsigned> val;  // per morphism
};

struct CocycleReport {
  bool ok = false;
  std::vector<std::string> problems;
};

CocycleReport verify_cocycle(const ActionCocycle& c);
CocycleReport verify_cocycle(const GroupoidCocycle& c);

// c(gamma, x) = rho(gamma) for a homomorphism rho, constant in x
ActionCocycle hom_cocycle(GroupAction action, FiniteGroupL target,
                          const std::vector<unsigned>& rho);

// twists c by f: the result sends (gamma, x) to f(gamma.x) c(gamma, x) f(x)^-1
ActionCocycle coboundary(const std::vector<unsigned>& f, const ActionCocycle& c);
GroupoidCocycle coboundary(const std::vector<unsigned>& f, const GroupoidCocycle& c);

// all homomorphisms from one finite group to another, each given element-wise;
// enumeration runs over images of a greedy generating set
std::vector<std::vector<unsigned>> enumerate_homs(const FiniteGroupL& from,
                                                  const FiniteGroupL& to,
                                                  std::size_t cap = 4000000);

struct SolveResult {
  enum class Verdict { Found, None, Cap };
  Verdict verdict = Verdict::None;
  std::vector<unsigned> rho;  // per group element, when found
  std::vector<unsigned> f;    // per point, when found
  std::size_t nodes = 0;
};

// searches for (rho, f) with c(gamma, x) = f(gamma.x) rho(gamma) f(x)^-1;
// gauge-fixes f along a spanning tree of each orbit, then checks holonomy.
// Exhaustive over homomorphisms and per-orbit seeds, so a None verdict is a
// proof of non-existence; Cap means the node budget ran out first.
SolveResult cohomologous_to_hom_search(const ActionCocycle& c, std::size_t cap = 1000000);

// One choice function per S-class inside each R-class. Index 0 picks the
// least point of the own S-class; higher indices walk the remaining classes
// in order of their least points. Classes are numbered per point, not
// globally, which is what makes the index cocycle below nontrivial.
struct ChoiceSystem {
  std::vector<unsigned> r_class;  // per point
  std::vector<unsigned> s_class;  // per point, refines r_class
  std::size_t index_count = 0;
  std::vector<std::vector<unsigned>> phi;  // phi[i][x]
};

ChoiceSystem choice_functions(const std::vector<unsigned>& r_labels,
                              const std::vector<unsigned>& s_labels);

// the permutation-valued cocycle on the relation groupoid of R:
// sigma(y,x) sends i to j exactly when phi_i(x) and phi_j(y) share an S-class
GroupoidCocycle index_cocycle(const ChoiceSystem& cs);

// integral of the distance between two maps into L
Rat tilde_distance(const FiniteGroupL& L, const std::vector<unsigned>& phi0,
                   const std::vector<unsigned>& phi1, const std::vector<Rat>& mu);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo variant: draw(i) yields the i-th sampled pair of L values.
// Driving the draw by the sample index keeps reruns byte-identical.
McEstimate tilde_distance_mc(const FiniteGroupL& L,
                             const std::function<std::pair<unsigned, unsigned>(std::uint64_t)>& draw,
                             std::size_t samples);

nlohmann::json to_json(const ActionCocycle& c);
ActionCocycle action_cocycle_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroupoidCocycle& c);
GroupoidCocycle groupoid_cocycle_from_json(const nlohmann::json& j);

}  // namespace mgt
