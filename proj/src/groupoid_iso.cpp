#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "mgt/errors.hpp"
#include "mgt/groupoid.hpp"

namespace mgt {

namespace {

void need_valid(const FiniteGroupoid& g, const char* who) {
  const GroupoidReport rep = validate(g);
  if (!rep.ok)
    throw ConfigInvalid(std::string(who) + ": groupoid fails validation: " + rep.problems.front());
}

struct ObjectSig {
  Rat weight;
  std::size_t range_fiber, source_fiber, isotropy;
  bool operator==(const ObjectSig& o) const {
    return weight == o.weight && range_fiber == o.range_fiber && source_fiber == o.source_fiber &&
           isotropy == o.isotropy;
  }
  bool operator<(const ObjectSig& o) const {
    if (weight != o.weight) return weight < o.weight;
    if (range_fiber != o.range_fiber) return range_fiber < o.range_fiber;
    if (source_fiber != o.source_fiber) return source_fiber < o.source_fiber;
    return isotropy < o.isotropy;
  }
};

std::vector<ObjectSig> object_sigs(const FiniteGroupoid& g) {
  std::vector<ObjectSig> sigs;
  sigs.reserve(g.n_objects());
  for (unsigned x = 0; x < g.n_objects(); ++x) {
    std::size_t iso = 0;
    for (unsigned m : g.with_source(x))
      if (g.range(m) == x) ++iso;
    sigs.push_back({g.weight(x), g.with_range(x).size(), g.with_source(x).size(), iso});
  }
  return sigs;
}

}  // namespace

bool verify_iso(const FiniteGroupoid& a, const FiniteGroupoid& b,
                const std::vector<unsigned>& object_map, const std::vector<unsigned>& morphism_map) {
  if (a.n_objects() != b.n_objects() || a.n_morphisms() != b.n_morphisms()) return false;
  if (object_map.size() != a.n_objects() || morphism_map.size() != a.n_morphisms()) return false;
  std::vector<bool> seen_o(b.n_objects(), false), seen_m(b.n_morphisms(), false);
  for (unsigned y : object_map) {
    if (y >= b.n_objects() || seen_o[y]) return false;
    seen_o[y] = true;
  }
  for (unsigned y : morphism_map) {
    if (y >= b.n_morphisms() || seen_m[y]) return false;
    seen_m[y] = true;
  }
  for (unsigned x = 0; x < a.n_objects(); ++x) {
    if (b.weight(object_map[x]) != a.weight(x)) return false;
    if (morphism_map[a.unit(x)] != b.unit(object_map[x])) return false;
  }
  for (unsigned m = 0; m < a.n_morphisms(); ++m) {
    if (b.source(morphism_map[m]) != object_map[a.source(m)]) return false;
    if (b.range(morphism_map[m]) != object_map[a.range(m)]) return false;
    if (morphism_map[a.inverse(m)] != b.inverse(morphism_map[m])) return false;
  }
  for (unsigned g1 = 0; g1 < a.n_morphisms(); ++g1)
    for (unsigned g0 = 0; g0 < a.n_morphisms(); ++g0) {
      const int c = a.compose(g1, g0);
      const int c2 = b.compose(morphism_map[g1], morphism_map[g0]);
      if ((c >= 0) != (c2 >= 0)) return false;
      if (c >= 0 && morphism_map[static_cast<unsigned>(c)] != static_cast<unsigned>(c2))
        return false;
    }
  return true;
}

IsoResult iso_search(const FiniteGroupoid& a, const FiniteGroupoid& b, std::uint64_t node_cap) {
  need_valid(a, "iso_search");
  need_valid(b, "iso_search");
  IsoResult res{IsoResult::Verdict::NotIsomorphic, {}, {}, 0};
  if (a.n_objects() != b.n_objects() || a.n_morphisms() != b.n_morphisms()) return res;
  const std::size_t n_obj = a.n_objects();
  const std::size_t n_mor = a.n_morphisms();

  const auto siga = object_sigs(a);
  const auto sigb = object_sigs(b);
  {
    auto sa = siga;
    auto sb = sigb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (!(sa == sb)) return res;
  }

  // object candidates by matching signature, ascending
  std::vector<std::vector<unsigned>> obj_cand(n_obj);
  for (unsigned x = 0; x < n_obj; ++x)
    for (unsigned y = 0; y < n_obj; ++y)
      if (siga[x] == sigb[y]) obj_cand[x].push_back(y);

  // b morphisms keyed by (source, range)
  std::map<std::pair<unsigned, unsigned>, std::vector<unsigned>> b_by_ends;
  for (unsigned m = 0; m < n_mor; ++m)
    b_by_ends[{b.source(m), b.range(m)}].push_back(m);

  // triples of a indexed by their composite, for completing the incremental
  // composition check at the moment the last participant gets assigned
  std::vector<std::vector<std::pair<unsigned, unsigned>>> by_composite(n_mor);
  for (unsigned g1 = 0; g1 < n_mor; ++g1)
    for (unsigned g0 = 0; g0 < n_mor; ++g0) {
      const int c = a.compose(g1, g0);
      if (c >= 0 && static_cast<unsigned>(c) > g1 && static_cast<unsigned>(c) > g0)
        by_composite[static_cast<unsigned>(c)].emplace_back(g1, g0);
    }

  std::vector<unsigned> obj_map(n_obj, 0), mor_map(n_mor, 0);
  std::vector<bool> used_o(n_obj, false), used_m(n_mor, false);
  bool capped = false;

  auto mor_consistent = [&](unsigned m, unsigned my) {
    if (b.source(my) != obj_map[a.source(m)] || b.range(my) != obj_map[a.range(m)]) return false;
    if (a.is_unit(m) != b.is_unit(my)) return false;
    const unsigned mi = a.inverse(m);
    if (mi < m && mor_map[mi] != b.inverse(my)) return false;
    if (mi == m && b.inverse(my) != my) return false;
    for (unsigned j = 0; j <= m; ++j) {
      const unsigned jy = j == m ? my : mor_map[j];
      const int c = a.compose(m, j);
      if (c >= 0 && static_cast<unsigned>(c) <= m) {
        const unsigned cy = static_cast<unsigned>(c) == m ? my : mor_map[c];
        if (b.compose(my, jy) != static_cast<int>(cy)) return false;
      }
      if (j < m) {
        const int c2 = a.compose(j, m);
        if (c2 >= 0 && static_cast<unsigned>(c2) <= m) {
          const unsigned cy = static_cast<unsigned>(c2) == m ? my : mor_map[c2];
          if (b.compose(jy, my) != static_cast<int>(cy)) return false;
        }
      }
    }
    for (const auto& [g1, g0] : by_composite[m])
      if (g1 < m && g0 < m && b.compose(mor_map[g1], mor_map[g0]) != static_cast<int>(my))
        return false;
    return true;
  };

  auto search_mor = [&](auto&& self, unsigned m) -> bool {
    if (m == n_mor) return true;
    const auto key = std::make_pair(obj_map[a.source(m)], obj_map[a.range(m)]);
    const auto it = b_by_ends.find(key);
    if (it == b_by_ends.end()) return false;
    for (unsigned my : it->second) {
      if (used_m[my]) continue;
      if (++res.nodes > node_cap) {
        capped = true;
        return false;
      }
      if (!mor_consistent(m, my)) continue;
      mor_map[m] = my;
      used_m[my] = true;
      if (self(self, m + 1)) return true;
      used_m[my] = false;
      if (capped) return false;
    }
    return false;
  };

  auto search_obj = [&](auto&& self, unsigned x) -> bool {
    if (x == n_obj) return search_mor(search_mor, 0);
    for (unsigned y : obj_cand[x]) {
      if (used_o[y]) continue;
      if (++res.nodes > node_cap) {
        capped = true;
        return false;
      }
      obj_map[x] = y;
      used_o[y] = true;
      if (self(self, x + 1)) return true;
      used_o[y] = false;
      if (capped) return false;
    }
    return false;
  };

  if (search_obj(search_obj, 0)) {
    if (!verify_iso(a, b, obj_map, mor_map))
      throw ComputeError("iso_search produced a map that fails verification");
    res.verdict = IsoResult::Verdict::Isomorphic;
    res.object_map = std::move(obj_map);
    res.morphism_map = std::move(mor_map);
    return res;
  }
  res.verdict = capped ? IsoResult::Verdict::NodeCap : IsoResult::Verdict::NotIsomorphic;
  return res;
}

WreathIso wreath_iso_from_fiber_maps(const WreathResult& w1, const WreathResult& w2,
                                     const std::vector<std::vector<unsigned>>& phi) {
  const FiniteGroupoid& base = w1.bundle.base;
  if (w2.bundle.base != base)
    throw ConfigInvalid("fiber maps need wreath products over the same base");
  if (phi.size() != base.n_morphisms())
    throw ConfigInvalid("one fiber map per base morphism");
  for (unsigned g = 0; g < base.n_morphisms(); ++g) {
    const auto& from = w1.bundle.fibers[base.source(g)];
    const auto& to = w2.bundle.fibers[base.source(g)];
    if (phi[g].size() != from.n_morphisms())
      throw ConfigInvalid("fiber map size must match the source fiber");
    for (unsigned v : phi[g])
      if (v >= to.n_morphisms()) throw ConfigInvalid("fiber map value out of range");
  }

  const auto& sd1 = w1.sd;
  const auto& sd2 = w2.sd;
  auto pair_str = [&](unsigned id) {
    std::ostringstream os;
    const auto [g, h] = sd1.morphism_pair[id];
    os << "(" << g << "," << h << ")";
    return os.str();
  };

  WreathIso out;
  const std::size_t n1 = sd1.groupoid.n_morphisms();
  out.morphism_map.resize(n1);
  for (unsigned id = 0; id < n1; ++id) {
    const auto [g, h] = sd1.morphism_pair[id];
    out.morphism_map[id] = sd2.encode_morphism(g, phi[g][h]);
  }
  // object map comes from the images of units; a non-unit image there is
  // already a homomorphism failure
  out.object_map.resize(sd1.groupoid.n_objects());
  for (unsigned ob = 0; ob < sd1.groupoid.n_objects(); ++ob) {
    const unsigned u1 = sd1.groupoid.unit(ob);
    const unsigned u2 = out.morphism_map[u1];
    if (!sd2.groupoid.is_unit(u2))
      throw NotHomomorphism("fiber maps send the unit " + pair_str(u1) + " to a non-unit");
    out.object_map[ob] = sd2.groupoid.source(u2);
  }
  for (unsigned id = 0; id < n1; ++id) {
    const unsigned im = out.morphism_map[id];
    if (sd2.groupoid.source(im) != out.object_map[sd1.groupoid.source(id)] ||
        sd2.groupoid.range(im) != out.object_map[sd1.groupoid.range(id)])
      throw NotHomomorphism("fiber maps break endpoints at " + pair_str(id));
  }
  for (unsigned i1 = 0; i1 < n1; ++i1)
    for (unsigned i0 = 0; i0 < n1; ++i0) {
      const int c = sd1.groupoid.compose(i1, i0);
      if (c < 0) continue;
      ++out.checked_pairs;
      const int c2 = sd2.groupoid.compose(out.morphism_map[i1], out.morphism_map[i0]);
      if (c2 < 0 || out.morphism_map[static_cast<unsigned>(c)] != static_cast<unsigned>(c2))
        throw NotHomomorphism("fiber maps are not multiplicative at " + pair_str(i1) + "*" +
                              pair_str(i0));
    }

  std::set<unsigned> image_m(out.morphism_map.begin(), out.morphism_map.end());
  std::set<unsigned> image_o(out.object_map.begin(), out.object_map.end());
  out.bijective = image_m.size() == n1 && n1 == sd2.groupoid.n_morphisms() &&
                  image_o.size() == sd1.groupoid.n_objects() &&
                  sd1.groupoid.n_objects() == sd2.groupoid.n_objects();
  return out;
}

RestrictionClaim restriction_claim_iso(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                                       const std::vector<unsigned>& d,
                                       const std::vector<std::vector<unsigned>>& sigma,
                                       const std::vector<unsigned>& psi_obj,
                                       std::size_t psi_target_objects, std::size_t cap) {
  need_valid(lamp, "restriction_claim_iso lamp");
  need_valid(base, "restriction_claim_iso base");
  const std::size_t n = sigma.size();
  if (n == 0) throw BadPartition("need at least one bisection");
  std::vector<unsigned> dd = d;
  std::sort(dd.begin(), dd.end());
  dd.erase(std::unique(dd.begin(), dd.end()), dd.end());
  if (dd.empty()) throw BadPartition("d must be nonempty");
  std::vector<bool> in_d(base.n_objects(), false);
  Rat mass(0);
  for (unsigned x : dd) {
    if (x >= base.n_objects()) throw BadPartition("d contains an unknown object");
    in_d[x] = true;
    mass += base.weight(x);
  }
  if (mass != Rat(1, static_cast<long long>(n)))
    throw BadPartition("d must carry mass 1/n, got " + rat_str(mass));

  // sigma[j]: bisection with range exactly d; sources partition the objects
  std::vector<std::vector<int>> sig_at(n, std::vector<int>(base.n_objects(), -1));
  std::vector<int> part(base.n_objects(), -1);
  for (std::size_t j = 0; j < n; ++j) {
    if (!is_bisection(base, sigma[j])) throw BadBisection("sigma[" + std::to_string(j) + "]");
    std::set<unsigned> rng;
    for (unsigned m : sigma[j]) {
      rng.insert(base.range(m));
      if (sig_at[j][base.range(m)] >= 0) throw BadBisection("duplicate range");
      sig_at[j][base.range(m)] = static_cast<int>(m);
      const unsigned s = base.source(m);
      if (part[s] >= 0)
        throw BadPartition("object " + std::to_string(s) + " covered twice by the sources");
      part[s] = static_cast<int>(j);
    }
    if (rng != std::set<unsigned>(dd.begin(), dd.end()))
      throw BadBisection("sigma[" + std::to_string(j) + "] must have range d");
  }
  for (unsigned x = 0; x < base.n_objects(); ++x)
    if (part[x] < 0)
      throw BadPartition("object " + std::to_string(x) + " missed by the sources");

  const std::size_t nk = lamp.n_objects();
  std::size_t psi_size = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (psi_size > cap / nk) throw SizeCap("psi domain too large");
    psi_size *= nk;
  }
  if (psi_obj.size() != psi_size) throw ConfigInvalid("psi must cover every lamp tuple");
  for (unsigned v : psi_obj)
    if (v >= psi_target_objects) throw ConfigInvalid("psi value out of range");

  RestrictionClaim claim;
  // fibered coordinates at x in d: W_x = all morphisms into x, and the coarser
  // W'_x = those whose source also lies in d
  std::vector<std::vector<unsigned>> wx(base.n_objects()), wpx(base.n_objects());
  std::vector<int> pos_w(base.n_morphisms(), -1), pos_wp(base.n_morphisms(), -1);
  for (unsigned x : dd) {
    wx[x] = base.with_range(x);
    for (unsigned m : wx[x])
      if (in_d[base.source(m)]) wpx[x].push_back(m);
    for (std::size_t p = 0; p < wx[x].size(); ++p) pos_w[wx[x][p]] = static_cast<int>(p);
    for (std::size_t p = 0; p < wpx[x].size(); ++p) pos_wp[wpx[x][p]] = static_cast<int>(p);
  }

  auto pow_check = [&](std::size_t b_, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
      if (b_ != 0 && r > cap / b_) throw SizeCap("lamp tuple space too large");
      r *= b_;
    }
    return r;
  };

  // theta per object of d: domain code (lamp objects over W_x, little-endian
  // in list position) -> output code (psi values over W'_x, little-endian)
  std::vector<std::vector<std::uint64_t>> theta(base.n_objects());
  std::vector<std::size_t> dom_size(base.n_objects(), 0);
  for (unsigned x : dd) {
    const std::size_t dom = pow_check(nk, wx[x].size());
    dom_size[x] = dom;
    theta[x].resize(dom);
    std::vector<unsigned> digits(wx[x].size());
    std::vector<unsigned> tup(n);
    for (std::size_t code = 0; code < dom; ++code) {
      std::size_t rest = code;
      for (std::size_t p = 0; p < wx[x].size(); ++p) {
        digits[p] = static_cast<unsigned>(rest % nk);
        rest /= nk;
      }
      std::uint64_t out_code = 0;
      for (std::size_t q = wpx[x].size(); q-- > 0;) {
        const unsigned h = wpx[x][q];
        for (std::size_t j = 0; j < n; ++j) {
          const int sj = sig_at[j][base.source(h)];
          const int w = base.compose(h, static_cast<unsigned>(sj));
          if (w < 0 || pos_w[w] < 0) throw ComputeError("sigma composition left the fiber");
          tup[j] = digits[pos_w[w]];
        }
        std::size_t t_code = 0;
        for (std::size_t j = n; j-- > 0;) t_code = t_code * nk + tup[j];
        out_code = out_code * psi_target_objects + psi_obj[t_code];
      }
      theta[x][code] = out_code;
    }
  }

  // equivariance over the reduction to d
  for (unsigned g = 0; g < base.n_morphisms() && claim.witness.empty(); ++g) {
    const unsigned xs = base.source(g), xr = base.range(g);
    if (!in_d[xs] || !in_d[xr]) continue;
    const unsigned gi = base.inverse(g);
    // digit shuffles induced by w -> g^-1 w on both coordinate systems
    std::vector<std::size_t> from_w(wx[xr].size()), from_wp(wpx[xr].size());
    for (std::size_t p = 0; p < wx[xr].size(); ++p) {
      const int w = base.compose(gi, wx[xr][p]);
      from_w[p] = static_cast<std::size_t>(pos_w[w]);
    }
    for (std::size_t q = 0; q < wpx[xr].size(); ++q) {
      const int h = base.compose(gi, wpx[xr][q]);
      from_wp[q] = static_cast<std::size_t>(pos_wp[h]);
    }
    std::vector<unsigned> digits(wx[xs].size());
    for (std::size_t code = 0; code < dom_size[xs] && claim.witness.empty(); ++code) {
      std::size_t rest = code;
      for (std::size_t p = 0; p < wx[xs].size(); ++p) {
        digits[p] = static_cast<unsigned>(rest % nk);
        rest /= nk;
      }
      std::size_t moved = 0;
      for (std::size_t p = wx[xr].size(); p-- > 0;) moved = moved * nk + digits[from_w[p]];
      const std::uint64_t lhs = theta[xr][moved];
      // transport theta(k) along g
      std::uint64_t rhs = 0;
      std::uint64_t tk = theta[xs][code];
      std::vector<unsigned> tdig(wpx[xs].size());
      for (std::size_t q = 0; q < wpx[xs].size(); ++q) {
        tdig[q] = static_cast<unsigned>(tk % psi_target_objects);
        tk /= psi_target_objects;
      }
      for (std::size_t q = wpx[xr].size(); q-- > 0;) rhs = rhs * psi_target_objects + tdig[from_wp[q]];
      ++claim.checked;
      if (lhs != rhs) {
        claim.equivariant = false;
        std::ostringstream os;
        os << "theta(g.k) != g.theta(k) at base morphism " << g << ", tuple " << code;
        claim.witness = os.str();
      }
    }
  }

  for (unsigned x : dd) {
    std::set<std::uint64_t> seen(theta[x].begin(), theta[x].end());
    const std::size_t codomain = pow_check(psi_target_objects, wpx[x].size());
    if (seen.size() != theta[x].size() || theta[x].size() != codomain) {
      claim.bijective = false;
      if (claim.witness.empty())
        claim.witness = "theta not bijective over object " + std::to_string(x);
    }
  }
  return claim;
}

GroupoidCosetReps groupoid_coset_reps(const FiniteGroupoid& g, const std::vector<unsigned>& sub_h,
                                      const std::vector<unsigned>& sub_k, std::size_t max_len) {
  need_valid(g, "groupoid_coset_reps");
  const std::size_t n_mor = g.n_morphisms();
  for (unsigned x = 0; x < g.n_objects(); ++x)
    if (std::find(sub_h.begin(), sub_h.end(), g.unit(x)) == sub_h.end())
      throw ConfigInvalid("the first factor must contain every unit");

  const IndependenceReport indep = freely_independent(g, {sub_h, sub_k}, 2 * n_mor + 2);
  if (!indep.independent) {
    std::ostringstream os;
    os << "alternating word of length " << indep.witness.size() << " composes to a unit";
    throw NotFreelyIndependent(os.str());
  }

  // normal forms with rightmost syllable in K, breadth-first by word length;
  // values repeat only if freeness fails, which was ruled out above
  struct Entry {
    std::vector<unsigned> word;  // rightmost factor first
    bool last_h;                 // factor of the leftmost syllable
  };
  std::map<unsigned, Entry> found;
  for (unsigned x = 0; x < g.n_objects(); ++x) found[g.unit(x)] = {{}, false};
  std::vector<unsigned> frontier;
  for (unsigned k : sub_k) {
    if (g.is_unit(k)) continue;
    if (!found.count(k)) {
      found[k] = {{k}, false};
      frontier.push_back(k);
    }
  }
  std::size_t len = 1;
  while (!frontier.empty()) {
    std::vector<unsigned> next;
    for (unsigned v : frontier) {
      const Entry& e = found.at(v);
      const bool extend_h = !e.last_h;
      const auto& pool = extend_h ? sub_h : sub_k;
      for (unsigned s : pool) {
        if (g.is_unit(s)) continue;
        const int c = g.compose(s, v);
        if (c < 0) continue;
        const unsigned nv = static_cast<unsigned>(c);
        auto it = found.find(nv);
        if (it != found.end()) continue;
        Entry ne = e;
        ne.word.push_back(s);
        ne.last_h = extend_h;
        found[nv] = std::move(ne);
        next.push_back(nv);
      }
    }
    if (!next.empty() && len + 1 > max_len)
      throw SizeCap("coset representative words exceed the length cap");
    frontier = std::move(next);
    ++len;
  }

  // every morphism must factor as (representative)(element of H)
  for (unsigned m = 0; m < n_mor; ++m) {
    bool covered = false;
    for (unsigned h : sub_h) {
      const int c = g.compose(m, g.inverse(h));
      if (c >= 0 && found.count(static_cast<unsigned>(c))) {
        covered = true;
        break;
      }
    }
    if (!covered) throw NotFreelyIndependent("the factors do not generate the groupoid");
  }

  GroupoidCosetReps out;
  for (const auto& [rep, entry] : found) {
    out.reps.push_back(rep);
    out.words.push_back(entry.word);
  }
  return out;
}

std::vector<unsigned> coset_rep_defect(const FiniteGroupoid& g, const GroupoidCosetReps& reps,
                                       unsigned mor) {
  if (mor >= g.n_morphisms()) throw ConfigInvalid("morphism id out of range");
  std::set<unsigned> in_reps(reps.reps.begin(), reps.reps.end());
  std::set<unsigned> moved, target;
  for (unsigned s : reps.reps) {
    if (g.range(s) == g.source(mor)) {
      const int c = g.compose(mor, s);
      moved.insert(static_cast<unsigned>(c));
    }
    if (g.range(s) == g.range(mor)) target.insert(s);
  }
  std::vector<unsigned> out;
  std::set_symmetric_difference(moved.begin(), moved.end(), target.begin(), target.end(),
                                std::back_inserter(out));
  return out;
}

}  // namespace mgt
