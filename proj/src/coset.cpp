#include "mgt/coset.hpp"

#include <algorithm>

namespace mgt {

CosetSchema CosetSchema::free_factor(GroupPtr product, std::vector<unsigned> subset) {
  if (!product || product->kind() != GroupKind::FreeProduct)
    throw ConfigInvalid("free factor schema needs a free product group");
  const auto& factors = product->factors();
  std::vector<char> in_subset(factors.size(), 0);
  for (unsigned k : subset) {
    if (k >= factors.size()) throw ConfigInvalid("factor index out of range");
    in_subset[k] = 1;
  }
  std::sort(subset.begin(), subset.end());
  if (subset.empty() || std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw ConfigInvalid("factor subset must be nonempty without repeats");
  if (subset.size() == factors.size())
    throw ConfigInvalid("factor subset must be proper");

  CosetSchema s;
  s.group_ = product;
  s.in_subset_ = std::move(in_subset);
  s.sub_of_factor_.assign(factors.size(), 0);
  if (subset.size() == 1) {
    s.sub_ = factors[subset[0]];
  } else {
    std::vector<GroupPtr> sub_factors;
    for (unsigned i = 0; i < subset.size(); ++i) {
      s.sub_of_factor_[subset[i]] = i;
      sub_factors.push_back(factors[subset[i]]);
    }
    s.sub_ = Group::free_product(sub_factors);
  }
  return s;
}

Element CosetSchema::rep(const Element& g) const {
  if (!g.group()->same_as(*group_)) throw MixedGroups("element not in the schema group");
  if (is_free_factor()) {
    const auto& syl = g.prod()->syl;
    std::size_t keep = syl.size();
    while (keep > 0 && in_subset_[syl[keep - 1].factor]) --keep;
    ProdData kept;
    kept.syl.assign(syl.begin(), syl.begin() + keep);
    Element out = group_->identity();
    for (const auto& s : kept.syl) out = out * group_->product_syllable(s.factor, s.e);
    return out;
  }
  return finite_reps_[trace_coset(g)];
}

bool CosetSchema::in_subgroup(const Element& g) const {
  if (!g.group()->same_as(*group_)) throw MixedGroups("element not in the schema group");
  if (is_free_factor()) {
    for (const auto& s : g.prod()->syl)
      if (!in_subset_[s.factor]) return false;
    return true;
  }
  return trace_coset(g) == 0;
}

bool CosetSchema::in_reps(const Element& g) const { return rep(g) == g; }

Element CosetSchema::cocycle(const Element& g, const Element& a) const {
  Element r = rep(g * a).inverse() * g * rep(a);
  if (!in_subgroup(r))
    throw SubgroupViolation("coset cocycle value escaped the subgroup");
  return r;
}

Element CosetSchema::embed(const Element& x) const {
  if (!x.group()->same_as(*sub_)) throw MixedGroups("element not in the subgroup spec");
  if (is_free_factor()) {
    // L-spec factor/syllable indices -> G factor indices
    std::vector<unsigned> sub_to_g;
    for (unsigned f = 0; f < in_subset_.size(); ++f)
      if (in_subset_[f]) sub_to_g.push_back(f);
    Element out = group_->identity();
    if (sub_to_g.size() == 1) {
      return group_->product_syllable(sub_to_g[0], x);
    }
    for (const auto& s : x.prod()->syl)
      out = out * group_->product_syllable(sub_to_g[s.factor], s.e);
    return out;
  }
  return embed_fn_(x);
}

Element CosetSchema::project(const Element& g) const {
  if (!in_subgroup(g)) throw SubgroupViolation("projecting an element outside the subgroup");
  if (is_free_factor()) {
    std::vector<unsigned> sub_to_g;
    for (unsigned f = 0; f < in_subset_.size(); ++f)
      if (in_subset_[f]) sub_to_g.push_back(f);
    if (sub_to_g.size() == 1) {
      const auto& syl = g.prod()->syl;
      if (syl.empty()) return sub_->identity();
      return syl[0].e;  // a member of the single factor has one syllable
    }
    Element out = sub_->identity();
    for (const auto& s : g.prod()->syl)
      out = out * sub_->product_syllable(sub_of_factor_[s.factor], s.e);
    return out;
  }
  return project_fn_(g);
}

std::vector<Element> CosetSchema::coset_defect(const Element& g, unsigned radius) const {
  if (!g.group()->same_as(*group_)) throw MixedGroups("element not in the schema group");
  Element gi = g.inverse();
  std::vector<Element> out;
  for (const auto& x : group_->ball(radius)) {
    bool in_s = in_reps(x);
    bool in_gs = in_reps(gi * x);
    if (in_s != in_gs) out.push_back(x);
  }
  sort_unique(out);
  return out;
}

std::vector<Element> CosetSchema::reps_minus_translate(const Element& delta) const {
  if (!delta.group()->same_as(*group_)) throw MixedGroups("element not in the schema group");
  Element di = delta.inverse();
  std::vector<Element> out;
  if (is_free_factor()) {
    // Members of S \ delta S are shorter than |delta| + 2: the last syllable
    // of a longer reduced word survives left multiplication by delta^-1, so
    // membership in S is unchanged.
    unsigned radius = static_cast<unsigned>(delta.word_length()) + 2;
    for (const auto& x : group_->ball(radius))
      if (in_reps(x) && !in_reps(di * x)) out.push_back(x);
  } else {
    for (const auto& s : finite_reps_)
      if (!in_reps(di * s)) out.push_back(s);
  }
  sort_unique(out);
  return out;
}

unsigned CosetSchema::trace_coset(const Element& g) const {
  // fold the generator word from the right: (g1 g2 ... gk) L evaluated as
  // g1 . (g2 . (... . (gk . [L])))
  auto word = g.generator_word();
  unsigned c = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    auto [gen, exp] = *it;
    const auto& fwd = gen_action_[gen];
    const auto& bwd = gen_action_inv_[gen];
    long long n = exp;
    // permutation power along this point's cycle
    if (n > 0)
      for (long long i = 0; i < n; ++i) c = fwd[c];
    else
      for (long long i = 0; i < -n; ++i) c = bwd[c];
  }
  return c;
}

CosetSchema CosetSchema::finite_index(GroupPtr g, GroupPtr sub, std::vector<Element> reps,
                                      std::vector<std::vector<unsigned>> gen_action,
                                      std::function<Element(const Element&)> embed_fn,
                                      std::function<Element(const Element&)> project_fn) {
  if (!g || !sub) throw ConfigInvalid("null group in finite index schema");
  if (reps.empty()) throw ConfigInvalid("finite index schema needs representatives");
  if (!reps[0].is_identity())
    throw ConfigInvalid("first representative must be the identity");
  if (gen_action.size() != g->generators().size())
    throw ConfigInvalid("coset table must cover every generator");
  const std::size_t m = reps.size();
  for (const auto& p : gen_action) {
    if (p.size() != m) throw ConfigInvalid("coset table row length mismatch");
    std::vector<char> hit(m, 0);
    for (unsigned v : p) {
      if (v >= m || hit[v]) throw ConfigInvalid("coset table row is not a permutation");
      hit[v] = 1;
    }
  }
  CosetSchema s;
  s.group_ = std::move(g);
  s.sub_ = std::move(sub);
  s.finite_reps_ = std::move(reps);
  s.gen_action_ = std::move(gen_action);
  s.gen_action_inv_.resize(s.gen_action_.size());
  for (std::size_t i = 0; i < s.gen_action_.size(); ++i) {
    s.gen_action_inv_[i].resize(m);
    for (unsigned c = 0; c < m; ++c) s.gen_action_inv_[i][s.gen_action_[i][c]] = c;
  }
  s.embed_fn_ = std::move(embed_fn);
  s.project_fn_ = std::move(project_fn);
  for (std::size_t i = 0; i < m; ++i) {
    if (!s.finite_reps_[i].group()->same_as(*s.group_))
      throw MixedGroups("representative not in the schema group");
    if (s.trace_coset(s.finite_reps_[i]) != i)
      throw ConfigInvalid("representative " + std::to_string(i) +
                          " does not trace to its own coset");
  }
  return s;
}

CosetSchema CosetSchema::cyclic_index(GroupPtr z, unsigned n) {
  if (!z || z->kind() != GroupKind::Free || z->free_rank() != 1)
    throw ConfigInvalid("cyclic index schema expects the free group of rank 1");
  if (n < 2) throw ConfigInvalid("index must be at least 2");
  GroupPtr sub = Group::free_group(1, {z->generator_labels()[0]});
  std::vector<Element> reps;
  Element t = z->generators()[0];
  for (unsigned i = 0; i < n; ++i) reps.push_back(t.pow(i));
  std::vector<std::vector<unsigned>> act(1);
  act[0].resize(n);
  for (unsigned i = 0; i < n; ++i) act[0][i] = (i + 1) % n;
  GroupPtr zg = z;
  auto embed = [zg, n](const Element& x) {
    const auto& syl = x.free_data()->syl;
    long long k = syl.empty() ? 0 : syl[0].exp;
    return zg->generators()[0].pow(k * static_cast<long long>(n));
  };
  GroupPtr subg = sub;
  auto project = [subg, n](const Element& gx) {
    const auto& syl = gx.free_data()->syl;
    long long k = syl.empty() ? 0 : syl[0].exp;
    if (k % static_cast<long long>(n) != 0)
      throw SubgroupViolation("power not divisible by the index");
    return subg->generators()[0].pow(k / static_cast<long long>(n));
  };
  return finite_index(z, sub, std::move(reps), std::move(act), embed, project);
}

}  // namespace mgt
