#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mgt/group.hpp"
#include "mgt/rational.hpp"

namespace mgt {

// Finite discrete probability-measure-preserving groupoid given by explicit
// tables.  Objects carry positive rational weights summing to 1; morphisms
// compose partially, right to left: compose(g1, g0) is defined exactly when
// source(g1) == range(g0) and the result runs source(g0) -> range(g1).
//
// The constructor checks shapes and index ranges only.  Semantic axioms
// (units, associativity, inverses, measure invariance) live in validate(),
// which reports violations instead of throwing, so deliberately broken tables
// can be built and inspected.
class FiniteGroupoid {
 public:
  FiniteGroupoid(std::vector<Rat> weights, std::vector<unsigned> source,
                 std::vector<unsigned> range, std::vector<unsigned> unit_of,
                 std::vector<unsigned> inverse_of, std::vector<int> composition);

  std::size_t n_objects() const { return weights_.size(); }
  std::size_t n_morphisms() const { return source_.size(); }
  const Rat& weight(unsigned x) const { return weights_[x]; }
  unsigned source(unsigned m) const { return source_[m]; }
  unsigned range(unsigned m) const { return range_[m]; }
  unsigned unit(unsigned x) const { return unit_of_[x]; }
  unsigned inverse(unsigned m) const { return inverse_[m]; }
  bool is_unit(unsigned m) const { return unit_of_[source_[m]] == m; }
  bool composable(unsigned g1, unsigned g0) const {
    return comp_[static_cast<std::size_t>(g1) * source_.size() + g0] >= 0;
  }
  int compose(unsigned g1, unsigned g0) const {
    return comp_[static_cast<std::size_t>(g1) * source_.size() + g0];
  }
  const std::vector<unsigned>& with_source(unsigned x) const { return by_source_[x]; }
  const std::vector<unsigned>& with_range(unsigned x) const { return by_range_[x]; }

  bool operator==(const FiniteGroupoid& o) const;
  bool operator!=(const FiniteGroupoid& o) const { return !(*this == o); }

  nlohmann::json to_json() const;
  static FiniteGroupoid from_json(const nlohmann::json& j);

  // Units only.
  static FiniteGroupoid unit_groupoid(std::vector<Rat> weights);
  // One morphism j -> i for every ordered pair; id of (i <- j) is i*n + j.
  static FiniteGroupoid full_relation(std::size_t n_points);
  static FiniteGroupoid full_relation(std::vector<Rat> weights);
  // Equivalence relation from class labels: morphisms are the within-class
  // pairs, in lexicographic (target, source) order.
  static FiniteGroupoid from_partition(const std::vector<unsigned>& cls,
                                       std::vector<Rat> weights);
  // Action groupoid of a finite group: morphism (k, x) with k an element
  // index of `group` has id k*n_points + x, source x and range act[k][x].
  // Throws ActionInvalid unless act is a homomorphism to permutations.
  static FiniteGroupoid action_groupoid(const GroupPtr& group,
                                        const std::vector<std::vector<unsigned>>& act,
                                        std::vector<Rat> weights);

 private:
  std::vector<Rat> weights_;
  std::vector<unsigned> source_, range_, unit_of_, inverse_;
  std::vector<int> comp_;
  std::vector<std::vector<unsigned>> by_source_, by_range_;
};

struct GroupoidReport {
  bool ok = true;                     // no axiom or measure violations
  std::vector<std::string> problems;  // deterministic order
  bool pmp = true;                    // weight(range) == weight(source) throughout
  bool principal = false;             // (range, source) is injective
  bool ergodic = false;               // objects form a single orbit class
  std::size_t min_range_fiber = 0;    // aperiodicity scale: every range fiber has >= this many morphisms
};

// Exhaustive axiom check; never throws, lists every violation found.
GroupoidReport validate(const FiniteGroupoid& g);

// A bisection is a morphism set whose source and range maps are both injective.
bool is_bisection(const FiniteGroupoid& g, const std::vector<unsigned>& mors);

struct RestrictResult {
  FiniteGroupoid groupoid;
  std::vector<unsigned> objects;    // new object id -> old object id (ascending)
  std::vector<unsigned> morphisms;  // new morphism id -> old morphism id (ascending)
};

// Reduction to an object subset, weights renormalized by the mass of `objects`.
// Throws EmptyReduction when the subset is empty.
RestrictResult restrict_to(const FiniteGroupoid& g, std::vector<unsigned> objects);

struct DirectSumResult {
  FiniteGroupoid groupoid;
  // Tuple codecs; coordinate 0 is the least significant digit.
  std::vector<std::vector<unsigned>> object_tuple;    // object id -> per-factor object
  std::vector<std::vector<unsigned>> morphism_tuple;  // morphism id -> per-factor morphism
  unsigned encode_object(const std::vector<unsigned>& t) const;
  unsigned encode_morphism(const std::vector<unsigned>& t) const;
  std::vector<std::size_t> object_radix, morphism_radix;
};

// Product groupoid: product objects, product measure, coordinatewise
// composition.  Throws SizeCap when the morphism count would exceed `cap`.
DirectSumResult direct_sum(const std::vector<FiniteGroupoid>& factors,
                           std::size_t cap = 4096);

// Fiber bundle over `base`: one fiber groupoid per base object plus a
// transport isomorphism alpha_g : fiber(source(g)) -> fiber(range(g)) for
// every base morphism, given as object and morphism tables.
struct GroupoidBundle {
  FiniteGroupoid base;
  std::vector<FiniteGroupoid> fibers;
  std::vector<std::vector<unsigned>> alpha_obj;
  std::vector<std::vector<unsigned>> alpha_mor;
};

// Same fiber everywhere, identity transport.
GroupoidBundle constant_bundle(const FiniteGroupoid& base, const FiniteGroupoid& fiber);

// Throws ActionInvalid unless every alpha_g is a measure-preserving
// isomorphism and g -> alpha_g is a functor (units to identity, compatible
// with composition and inverse).
void validate_bundle(const GroupoidBundle& b);

struct SemidirectResult {
  FiniteGroupoid groupoid;
  // morphism id -> (base morphism, fiber(source(base)) morphism)
  std::vector<std::pair<unsigned, unsigned>> morphism_pair;
  // object id -> (base object, fiber object)
  std::vector<std::pair<unsigned, unsigned>> object_pair;
  unsigned encode_morphism(unsigned base_mor, unsigned fiber_mor) const;
  unsigned encode_object(unsigned base_obj, unsigned fiber_obj) const;
  std::vector<std::size_t> mor_offset, obj_offset;
};

// Semidirect product of the bundle: morphisms are pairs (g, h) with h in
// fiber(source(g)); (g1,h1)(g0,h0) = (g1 g0, alpha_{g0}^-1(h1) h0),
// source(g,h) = source(h), range(g,h) = alpha_g(range(h)).
SemidirectResult semidirect(const GroupoidBundle& b, std::size_t cap = 4096);

struct WreathResult {
  SemidirectResult sd;
  GroupoidBundle bundle;
  // per base object x: the morphisms w with range(w) = x and source(w) in the
  // base subset, ascending; these index the fiber coordinates at x
  std::vector<std::vector<unsigned>> w_fiber;
  // codecs for fiber objects/morphisms as direct sums of the lamp groupoid
  std::vector<DirectSumResult> fiber_sum;
};

// Lamp groupoid K spread over the fibered set W = {w : source(w) in base_subset},
// fibered over range, with G acting by left translation: transporting a fiber
// tuple along g sends the coordinate at w to the old coordinate at g^-1 w.
WreathResult wreath_groupoid(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                             const std::vector<unsigned>& base_subset,
                             std::size_t cap = 4096);
// Default fibered set: all of the base groupoid.
WreathResult wreath_groupoid(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                             std::size_t cap = 4096);

struct IndependenceReport {
  bool independent = true;
  bool exhaustive = false;  // search closed before hitting max_len
  // A witness is an alternating product of non-units evaluating to a unit;
  // witness[0] is the rightmost (first applied) factor.
  std::vector<unsigned> witness;
  std::vector<std::size_t> witness_family;
  std::size_t searched_len = 0;
};

// Breadth-first search for an alternating word over the given subgroupoids
// composing to a unit.  Each subgroupoid must be closed under inverse and
// composition (ConfigInvalid otherwise).
IndependenceReport freely_independent(const FiniteGroupoid& g,
                                      const std::vector<std::vector<unsigned>>& subgroupoids,
                                      std::size_t max_len);

// Morphism ids of the within-class pairs of `cls` inside a full relation.
std::vector<unsigned> partition_subgroupoid(const FiniteGroupoid& full, const std::vector<unsigned>& cls);

struct StructureGraph {
  std::size_t n_points = 0, n_r0_classes = 0, n_r1_classes = 0;
  // vertex numbering: points, then r0 classes, then r1 classes
  std::vector<std::pair<unsigned, unsigned>> edges;
};

// Bipartite point/class graph of two equivalence relations given by labels.
StructureGraph structure_graph(const std::vector<unsigned>& r0, const std::vector<unsigned>& r1);
bool acyclic(const StructureGraph& sg);

struct TransportEdge {
  unsigned from, to;
  Rat mass;
};

struct TransportReport {
  Rat weighted_out, weighted_in;
  bool balanced = false;
};

// Mass transport sums: compares sum_x w(x) * out-mass(x) against
// sum_y w(y) * in-mass(y), exactly.
TransportReport mass_transport_check(const std::vector<Rat>& vertex_weight,
                                     const std::vector<TransportEdge>& edges);

struct IsoResult {
  enum class Verdict { Isomorphic, NotIsomorphic, NodeCap } verdict;
  std::vector<unsigned> object_map;
  std::vector<unsigned> morphism_map;
  std::uint64_t nodes = 0;
};

// Backtracking isomorphism search; prunes on object weight, fiber sizes and
// isotropy counts; deterministic, returns the lexicographically least
// isomorphism over (object_map, morphism_map); any found map is re-verified
// exhaustively before being returned.
IsoResult iso_search(const FiniteGroupoid& a, const FiniteGroupoid& b,
                     std::uint64_t node_cap = 10000000);
bool verify_iso(const FiniteGroupoid& a, const FiniteGroupoid& b,
                const std::vector<unsigned>& object_map,
                const std::vector<unsigned>& morphism_map);

struct WreathIso {
  std::vector<unsigned> object_map;    // w1 semidirect object -> w2 semidirect object
  std::vector<unsigned> morphism_map;  // w1 semidirect morphism -> w2 semidirect morphism
  bool bijective = false;
  std::uint64_t checked_pairs = 0;
};

// Assembles Phi(g, h) = (g, phi[g][h]) from per-base-morphism fiber maps
// between two wreath products over the same base and checks the homomorphism
// identity on every composable pair.  Throws NotHomomorphism with a witness
// when the identity fails.
WreathIso wreath_iso_from_fiber_maps(const WreathResult& w1, const WreathResult& w2,
                                     const std::vector<std::vector<unsigned>>& phi);

struct RestrictionClaim {
  bool equivariant = true;
  bool bijective = true;
  std::uint64_t checked = 0;
  std::string witness;  // first failure, empty when clean
};

// Verifies the fiber-regrouping map theta(k)_h = psi(k_{h s_0}, ..., k_{h s_{n-1}})
// between lamp configurations over W = base and over W' = {h : source(h) in d}:
// theta intertwines the translation action of the reduction to d and is a
// bijection exactly when psi is.  The sigma[j] are bisections with range d
// whose sources partition the objects; psi maps little-endian tuples of lamp
// objects to objects of a target groupoid.
RestrictionClaim restriction_claim_iso(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                                       const std::vector<unsigned>& d,
                                       const std::vector<std::vector<unsigned>>& sigma,
                                       const std::vector<unsigned>& psi_obj,
                                       std::size_t psi_target_objects,
                                       std::size_t cap = 1u << 20);

struct GroupoidCosetReps {
  // morphism id -> its alternating word (ids of subgroupoid members,
  // rightmost factor first); representatives are the keys, ascending
  std::vector<unsigned> reps;
  std::vector<std::vector<unsigned>> words;
};

// Representatives of the H-classes when the groupoid splits freely as H * K
// with H containing every unit: all units plus every normal-form word whose
// rightmost syllable lies in K.  Throws NotFreelyIndependent when the
// splitting hypothesis fails, SizeCap when words keep growing past max_len.
GroupoidCosetReps groupoid_coset_reps(const FiniteGroupoid& g,
                                      const std::vector<unsigned>& sub_h,
                                      const std::vector<unsigned>& sub_k,
                                      std::size_t max_len = 64);

// Exact symmetric difference g . (source(g) reps)  vs  (range(g) reps),
// as a sorted morphism id list.
std::vector<unsigned> coset_rep_defect(const FiniteGroupoid& g, const GroupoidCosetReps& reps,
                                       unsigned mor);

}  // namespace mgt
