#include "mgt/tree_cocycle.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <set>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[256];
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

bool free_on_generators(const GroupPtr& g) {
  if (g->kind() == GroupKind::Free) return true;
  if (g->kind() != GroupKind::FreeProduct) return false;
  for (const auto& f : g->factors())
    if (f->kind() != GroupKind::Free) return false;
  return true;
}

}  // namespace

TreeAction TreeAction::cayley(const GroupPtr& grp, unsigned depth, std::size_t cap) {
  if (!grp) throw ConfigInvalid("null group");
  if (!free_on_generators(grp))
    throw ConfigInvalid("the Cayley graph is a tree only for groups free on their generators");
  TreeAction ta;
  ta.kind_ = Kind::Cayley;
  ta.grp_ = grp;
  const auto with_len = grp->ball_with_length(depth, cap);
  ta.n_ = with_len.size();
  ta.verts_.reserve(ta.n_);
  std::vector<unsigned> dist(ta.n_);
  for (std::size_t i = 0; i < ta.n_; ++i) {
    ta.verts_.push_back(with_len[i].first);
    dist[i] = with_len[i].second;
    ta.vert_index_[with_len[i].first.bytes()] = (unsigned)i;
  }
  ta.base_ = ta.vert_index_.at(grp->identity().bytes());

  const auto& gens = grp->generators();
  for (unsigned v = 0; v < ta.n_; ++v)
    for (const auto& s : gens) {
      const auto it = ta.vert_index_.find((ta.verts_[v] * s).bytes());
      if (it == ta.vert_index_.end()) continue;
      ta.edge_id_[{v, it->second}] = (unsigned)ta.tail_.size();
      ta.tail_.push_back(v);
      ta.head_.push_back(it->second);
    }

  ta.parent_from_base_.assign(ta.n_, -1);
  for (unsigned v = 0; v < ta.n_; ++v) {
    if (v == ta.base_) continue;
    for (const auto& s : gens)
      for (int sign : {1, -1}) {
        const auto it = ta.vert_index_.find((ta.verts_[v] * s.pow(sign)).bytes());
        if (it != ta.vert_index_.end() && dist[it->second] + 1 == dist[v]) {
          ta.parent_from_base_[v] = (int)it->second;
          goto next_vertex;
        }
      }
  next_vertex:;
    if (ta.parent_from_base_[v] < 0) throw ComputeError("ball is not connected");
  }
  return ta;
}

TreeAction TreeAction::explicit_tree(std::vector<int> parent, FiniteGroupL group,
                                     std::vector<std::vector<unsigned>> act, unsigned base) {
  const std::size_t n = parent.size();
  if (n == 0) throw ConfigInvalid("empty tree");
  if (base >= n) throw ConfigInvalid("base vertex out of range");
  std::size_t roots = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (parent[v] == -1 || parent[v] == (int)v) {
      ++roots;
      parent[v] = -1;
      continue;
    }
    if (parent[v] < 0 || parent[v] >= (int)n) throw ConfigInvalid("parent index out of range");
  }
  if (roots != 1) throw ConfigInvalid("the parent array must have exactly one root");
  // connectivity: n-1 parent edges and one root force a tree when every chain
  // terminates
  {
    std::vector<unsigned> depth(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t hops = 0;
      int at = (int)v;
      while (parent[at] >= 0) {
        at = parent[at];
        if (++hops > n) throw ConfigInvalid("parent chain has a cycle");
      }
    }
  }

  TreeAction ta;
  ta.kind_ = Kind::Explicit;
  ta.n_ = n;
  ta.base_ = base;
  for (unsigned v = 0; v < n; ++v) {
    if (parent[v] < 0) continue;
    ta.edge_id_[{v, (unsigned)parent[v]}] = (unsigned)ta.tail_.size();
    ta.tail_.push_back(v);
    ta.head_.push_back((unsigned)parent[v]);
  }

  // verify automorphisms (incidence and orientation preserved) before storing
  {
    GroupAction checked = make_action(std::move(group), std::move(act));
    for (std::size_t g = 0; g < checked.group.order(); ++g)
      for (std::size_t e = 0; e < ta.tail_.size(); ++e) {
        const unsigned t = checked.act[g][ta.tail_[e]];
        const unsigned h = checked.act[g][ta.head_[e]];
        if (!ta.edge_id_.count({t, h}))
          throw ActionInvalid(fmt("element %zu does not preserve edge orientation (%zu)", g, e));
      }
    ta.fin_grp_.push_back(std::move(checked.group));
    ta.act_ = std::move(checked.act);
  }
  if (ta.act_[0].size() != n) throw ActionInvalid("action table size mismatch");

  // re-root at the base for geodesics
  ta.parent_from_base_.assign(n, -1);
  std::vector<bool> seen(n, false);
  seen[base] = true;
  std::vector<unsigned> work{base};
  for (std::size_t at = 0; at < work.size(); ++at) {
    const unsigned v = work[at];
    std::vector<unsigned> nbrs;
    if (parent[v] >= 0) nbrs.push_back((unsigned)parent[v]);
    for (unsigned u = 0; u < n; ++u)
      if (parent[u] == (int)v) nbrs.push_back(u);
    for (unsigned u : nbrs) {
      if (seen[u]) continue;
      seen[u] = true;
      ta.parent_from_base_[u] = (int)v;
      work.push_back(u);
    }
  }
  if (work.size() != n) throw ConfigInvalid("the parent array does not describe a connected tree");
  return ta;
}

unsigned TreeAction::edge_tail(unsigned e) const {
  if (e >= tail_.size()) throw ConfigInvalid("edge id out of range");
  return tail_[e];
}

unsigned TreeAction::edge_head(unsigned e) const {
  if (e >= head_.size()) throw ConfigInvalid("edge id out of range");
  return head_[e];
}

int TreeAction::edge_index(unsigned tail, unsigned head) const {
  const auto it = edge_id_.find({tail, head});
  return it == edge_id_.end() ? -1 : (int)it->second;
}

TreeMotion TreeAction::motion(const Element& g) const {
  if (kind_ != Kind::Cayley) throw ConfigInvalid("group elements move Cayley trees only");
  if (!g.group() || !g.group()->same_as(*grp_)) throw MixedGroups("motion from a different group");
  return TreeMotion{g, 0};
}

TreeMotion TreeAction::motion(unsigned group_element) const {
  if (kind_ != Kind::Explicit) throw ConfigInvalid("indexed motions move explicit trees only");
  if (group_element >= fin_grp_[0].order()) throw ConfigInvalid("group element out of range");
  return TreeMotion{Element(), group_element};
}

TreeMotion TreeAction::motion_product(const TreeMotion& a, const TreeMotion& b) const {
  if (kind_ == Kind::Cayley) return TreeMotion{a.elem * b.elem, 0};
  return TreeMotion{Element(), fin_grp_[0].mul(a.idx, b.idx)};
}

TreeMotion TreeAction::motion_inverse(const TreeMotion& a) const {
  if (kind_ == Kind::Cayley) return TreeMotion{a.elem.inverse(), 0};
  return TreeMotion{Element(), fin_grp_[0].inv(a.idx)};
}

int TreeAction::apply(const TreeMotion& m, unsigned v) const {
  if (v >= n_) throw ConfigInvalid("vertex out of range");
  if (kind_ == Kind::Cayley) {
    const auto it = vert_index_.find((m.elem * verts_[v]).bytes());
    return it == vert_index_.end() ? -1 : (int)it->second;
  }
  return (int)act_[m.idx][v];
}

const std::vector<Element>& TreeAction::cayley_vertices() const {
  if (kind_ != Kind::Cayley) throw ConfigInvalid("not a Cayley tree");
  return verts_;
}

const FiniteGroupL& TreeAction::acting_group() const {
  if (kind_ != Kind::Explicit) throw ConfigInvalid("not an explicit tree");
  return fin_grp_[0];
}

std::vector<unsigned> TreeAction::geodesic_from_base(unsigned target) const {
  if (target >= n_) throw ConfigInvalid("vertex out of range");
  std::vector<unsigned> path{target};
  int at = (int)target;
  while (at != (int)base_) {
    at = parent_from_base_[at];
    if (at < 0) throw ComputeError("broken parent chain");
    path.push_back((unsigned)at);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

void check_labels(const TreeAction& ta, const FiniteGroupL& L,
                  const std::vector<unsigned>& labels) {
  if (labels.size() != ta.n_edges()) throw ConfigInvalid("one label per positive edge required");
  for (unsigned l : labels)
    if (l >= L.order()) throw ConfigInvalid("label out of range");
}

// product along the geodesic, last edge first; unknown labels (-1) throw
unsigned geodesic_product(const TreeAction& ta, const FiniteGroupL& L,
                          const std::vector<int>& labels, unsigned target) {
  const auto path = ta.geodesic_from_base(target);
  unsigned acc = L.id();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const unsigned u = path[i], w = path[i + 1];
    int e = ta.edge_index(u, w);
    unsigned factor;
    if (e >= 0) {
      if (labels[e] < 0) throw TruncationExceeded("label shifted from outside the truncation");
      factor = (unsigned)labels[e];
    } else {
      e = ta.edge_index(w, u);
      if (e < 0) throw ComputeError("geodesic step is not an edge");
      if (labels[e] < 0) throw TruncationExceeded("label shifted from outside the truncation");
      factor = L.inv((unsigned)labels[e]);
    }
    acc = L.mul(factor, acc);
  }
  return acc;
}

std::vector<int> as_known(const std::vector<unsigned>& labels) {
  return std::vector<int>(labels.begin(), labels.end());
}

// labels of the shifted labeling (b.x)(e) = x(b^-1 e); -1 where the preimage
// leaves the truncation
std::vector<int> shifted_labels(const TreeAction& ta, const std::vector<unsigned>& labels,
                                const TreeMotion& b) {
  const TreeMotion bi = ta.motion_inverse(b);
  std::vector<int> out(ta.n_edges(), -1);
  for (unsigned e = 0; e < ta.n_edges(); ++e) {
    const int t = ta.apply(bi, ta.edge_tail(e));
    const int h = ta.apply(bi, ta.edge_head(e));
    if (t < 0 || h < 0) continue;
    const int pre = ta.edge_index((unsigned)t, (unsigned)h);
    if (pre < 0) throw ComputeError("the action does not preserve positive edges");
    out[e] = (int)labels[pre];
  }
  return out;
}

unsigned target_vertex(const TreeAction& ta, const TreeMotion& g) {
  const int target = ta.apply(ta.motion_inverse(g), ta.base_vertex());
  if (target < 0) throw TruncationExceeded("the motion leaves the truncated tree");
  return (unsigned)target;
}

}  // namespace

unsigned tree_cocycle(const TreeAction& ta, const FiniteGroupL& L,
                      const std::vector<unsigned>& labels, const TreeMotion& g) {
  check_labels(ta, L, labels);
  return geodesic_product(ta, L, as_known(labels), target_vertex(ta, g));
}

CocycleReport verify_tree_cocycle_pairs(
    const TreeAction& ta, const FiniteGroupL& L, const std::vector<unsigned>& labels,
    const std::vector<std::pair<TreeMotion, TreeMotion>>& pairs) {
  check_labels(ta, L, labels);
  CocycleReport rep;
  const auto known = as_known(labels);
  // the shift and the right-hand value depend on b alone, so cache them
  const auto key_of = [&ta](const TreeMotion& m) {
    return ta.kind() == TreeAction::Kind::Cayley ? m.elem.bytes() : std::to_string(m.idx);
  };
  struct BData {
    std::vector<int> shifted;
    unsigned right;
  };
  std::map<std::string, BData> cache;
  for (std::size_t at = 0; at < pairs.size(); ++at) {
    const TreeMotion& a = pairs[at].first;
    const TreeMotion& b = pairs[at].second;
    auto it = cache.find(key_of(b));
    if (it == cache.end()) {
      BData data{shifted_labels(ta, labels, b),
                 geodesic_product(ta, L, known, target_vertex(ta, b))};
      it = cache.emplace(key_of(b), std::move(data)).first;
    }
    const unsigned whole =
        geodesic_product(ta, L, known, target_vertex(ta, ta.motion_product(a, b)));
    const unsigned left = geodesic_product(ta, L, it->second.shifted, target_vertex(ta, a));
    if (whole != L.mul(left, it->second.right))
      rep.problems.push_back(fmt("identity fails (%zu)", at));
  }
  rep.ok = rep.problems.empty();
  return rep;
}

CocycleReport verify_tree_cocycle(const TreeAction& ta, const FiniteGroupL& L,
                                  const std::vector<unsigned>& labels,
                                  const std::vector<TreeMotion>& motions) {
  std::vector<std::pair<TreeMotion, TreeMotion>> pairs;
  pairs.reserve(motions.size() * motions.size());
  for (const auto& a : motions)
    for (const auto& b : motions) pairs.emplace_back(a, b);
  auto rep = verify_tree_cocycle_pairs(ta, L, labels, pairs);
  // translate pair positions back to the two list positions
  for (auto& p : rep.problems) {
    const std::size_t at = std::stoul(p.substr(p.find('(') + 1));
    p = fmt("identity fails (%zu, %zu)", at / motions.size(), at % motions.size());
  }
  return rep;
}

FlipResult edge_flip_sensitivity(const TreeAction& ta, const FiniteGroupL& L,
                                 const std::vector<unsigned>& labels, const TreeMotion& g,
                                 unsigned edge, unsigned l0, unsigned l1, bool strict) {
  check_labels(ta, L, labels);
  if (edge >= ta.n_edges()) throw ConfigInvalid("edge id out of range");
  if (l0 >= L.order() || l1 >= L.order()) throw ConfigInvalid("label out of range");
  for (unsigned l : labels)
    if (l != l0 && l != l1) throw ConfigInvalid("labels must take values in the given pair");

  const unsigned target = target_vertex(ta, g);
  const auto path = ta.geodesic_from_base(target);
  bool on_path = false;
  for (std::size_t i = 0; i + 1 < path.size() && !on_path; ++i) {
    const int fwd = ta.edge_index(path[i], path[i + 1]);
    const int bwd = ta.edge_index(path[i + 1], path[i]);
    if ((fwd >= 0 && (unsigned)fwd == edge) || (bwd >= 0 && (unsigned)bwd == edge)) on_path = true;
  }
  FlipResult out{Rat(0), L.dist(l0, l1)};
  if (!on_path) {
    if (strict) throw EdgeNotOnGeodesic("the flipped edge misses the geodesic");
    return out;
  }
  auto flipped = labels;
  flipped[edge] = labels[edge] == l0 ? l1 : l0;
  const unsigned before = geodesic_product(ta, L, as_known(labels), target);
  const unsigned after = geodesic_product(ta, L, as_known(flipped), target);
  out.observed = L.dist(after, before);
  if (labels[edge] != flipped[edge] && out.observed != out.expected)
    throw ComputeError("flip sensitivity disagrees with the label distance");
  return out;
}

}  // namespace mgt
