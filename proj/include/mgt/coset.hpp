#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mgt/group.hpp"

namespace mgt {

// Coset representative system for a subgroup L of G: a set S of representatives
// of the left cosets gL with e in S, the retraction rep(g) in gL, and the
// cocycle coc(g, a) = rep(g a)^-1 g rep(a) in L.
//
// Two flavors:
//  * free factor: G a free product, L the subgroup generated by a subset of the
//    factors; S = {e} union {words whose last syllable lies outside L}.
//  * finite index: caller supplies representative words and the permutation
//    action of each generator of G on the coset space (an explicit coset
//    table); no coset enumeration is attempted.
class CosetSchema {
 public:
  const GroupPtr& group() const { return group_; }       // G
  const GroupPtr& subgroup() const { return sub_; }      // L as its own spec

  Element rep(const Element& g) const;                   // sigma(g), idempotent
  bool in_subgroup(const Element& g) const;
  bool in_reps(const Element& g) const;                  // g in S
  // coc(g, a) = rep(g a)^-1 g rep(a); always verified to land in L.
  Element cocycle(const Element& g, const Element& a) const;

  // L as a subgroup of G vs the standalone subgroup spec.
  Element embed(const Element& sub_elem) const;          // L-spec -> G
  Element project(const Element& g_in_L) const;          // G (member of L) -> L-spec

  // (g S symmetric-difference S) intersected with Ball(radius) of G.
  std::vector<Element> coset_defect(const Element& g, unsigned radius) const;
  // Exact finite set S \ delta S.
  std::vector<Element> reps_minus_translate(const Element& delta) const;

  static CosetSchema free_factor(GroupPtr product, std::vector<unsigned> factor_subset);

  // reps[0] must be the identity; gen_action[i] is the permutation of coset
  // indices induced by left multiplication by generator i of G.
  static CosetSchema finite_index(GroupPtr g, GroupPtr sub, std::vector<Element> reps,
                                  std::vector<std::vector<unsigned>> gen_action,
                                  std::function<Element(const Element&)> embed_fn,
                                  std::function<Element(const Element&)> project_fn);

  // The subgroup nZ of Z = free(1), with S = {e, t, ..., t^(n-1)}.
  static CosetSchema cyclic_index(GroupPtr z, unsigned n);

  bool is_free_factor() const { return finite_reps_.empty(); }
  const std::vector<Element>& finite_reps() const { return finite_reps_; }

 private:
  CosetSchema() = default;

  GroupPtr group_, sub_;
  // free-factor flavor
  std::vector<char> in_subset_;          // per factor of G
  std::vector<unsigned> sub_of_factor_;  // G factor index -> L factor index (or position)
  // finite-index flavor
  std::vector<Element> finite_reps_;
  std::vector<std::vector<unsigned>> gen_action_, gen_action_inv_;
  std::function<Element(const Element&)> embed_fn_, project_fn_;

  unsigned trace_coset(const Element& g) const;
};

}  // namespace mgt
