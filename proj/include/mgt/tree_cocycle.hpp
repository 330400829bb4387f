#pragma once

#include <map>
#include <vector>

#include "mgt/cocycle.hpp"
#include "mgt/group.hpp"

namespace mgt {

// A group motion of a tree: a group element in the Cayley flavor, an index
// into the acting group's table in the explicit flavor.
struct TreeMotion {
  Element elem;
  unsigned idx = 0;
};

// A tree with a distinguished base vertex, split edge set E+ / E-, and a group
// acting by automorphisms that preserve E+. The Cayley flavor truncates the
// Cayley tree of a free group at a given depth (the action by left translation
// is then partial); the explicit flavor takes a finite tree and a finite group
// of vertex permutations.
class TreeAction {
 public:
  enum class Kind { Cayley, Explicit };

  // grp must be free on its generators: a free group, or a free product of
  // free groups
  static TreeAction cayley(const GroupPtr& grp, unsigned depth, std::size_t cap = 1000000);
  // parent describes the undirected tree (one root with parent -1 or itself);
  // E+ consists of the child-to-parent pairs as given
  static TreeAction explicit_tree(std::vector<int> parent, FiniteGroupL group,
                                  std::vector<std::vector<unsigned>> act, unsigned base);

  Kind kind() const { return kind_; }
  std::size_t n_vertices() const { return n_; }
  std::size_t n_edges() const { return tail_.size(); }
  unsigned base_vertex() const { return base_; }
  unsigned edge_tail(unsigned e) const;
  unsigned edge_head(unsigned e) const;
  int edge_index(unsigned tail, unsigned head) const;  // -1 if absent

  TreeMotion motion(const Element& g) const;
  TreeMotion motion(unsigned group_element) const;
  TreeMotion motion_product(const TreeMotion& a, const TreeMotion& b) const;
  TreeMotion motion_inverse(const TreeMotion& a) const;
  // image of a vertex, or -1 beyond the truncation
  int apply(const TreeMotion& m, unsigned v) const;

  const std::vector<Element>& cayley_vertices() const;
  const FiniteGroupL& acting_group() const;

  // consecutive vertices from the base to the target
  std::vector<unsigned> geodesic_from_base(unsigned target) const;

 private:
  TreeAction() = default;

  Kind kind_ = Kind::Explicit;
  std::size_t n_ = 0;
  unsigned base_ = 0;
  std::vector<unsigned> tail_, head_;
  std::map<std::pair<unsigned, unsigned>, unsigned> edge_id_;
  std::vector<int> parent_from_base_;  // rooted at the base vertex

  // Cayley flavor
  GroupPtr grp_;
  std::vector<Element> verts_;
  std::map<std::string, unsigned> vert_index_;

  // explicit flavor
  std::vector<FiniteGroupL> fin_grp_;  // empty or one entry
  std::vector<std::vector<unsigned>> act_;
};

// product of the labels along the geodesic from the base to g^-1 . base,
// last edge first, with labels read against orientation inverted
unsigned tree_cocycle(const TreeAction& ta, const FiniteGroupL& L,
                      const std::vector<unsigned>& labels, const TreeMotion& g);

// checks c(ab, x) = c(a, b.x) c(b, x) for the listed pairs (a, b), where
// (b.x)(e) = x(b^-1 e); problems name pair positions in the input
CocycleReport verify_tree_cocycle_pairs(
    const TreeAction& ta, const FiniteGroupL& L, const std::vector<unsigned>& labels,
    const std::vector<std::pair<TreeMotion, TreeMotion>>& pairs);

// same check over every ordered pair from the list
CocycleReport verify_tree_cocycle(const TreeAction& ta, const FiniteGroupL& L,
                                  const std::vector<unsigned>& labels,
                                  const std::vector<TreeMotion>& motions);

struct FlipResult {
  Rat observed;
  Rat expected;
};

// flips one {l0, l1}-valued label and reports the distance moved by the
// cocycle value against the distance of the two labels
FlipResult edge_flip_sensitivity(const TreeAction& ta, const FiniteGroupL& L,
                                 const std::vector<unsigned>& labels, const TreeMotion& g,
                                 unsigned edge, unsigned l0, unsigned l1, bool strict = true);

}  // namespace mgt
