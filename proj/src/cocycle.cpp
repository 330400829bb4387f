#include "mgt/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "mgt/errors.hpp"
#include "mgt/group.hpp"

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

nlohmann::json rat_to_json(const Rat& r) {
  return nlohmann::json{{"num", r.numerator()}, {"den", r.denominator()}};
}

Rat rat_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw ConfigInvalid("malformed rational");
  return Rat(j.at("num").get<long long>(), j.at("den").get<long long>());
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteGroupL

FiniteGroupL::FiniteGroupL(std::vector<std::vector<unsigned>> mult,
                           std::vector<std::vector<Rat>> metric)
    : mult_(std::move(mult)), metric_(std::move(metric)) {
  const std::size_t n = mult_.size();
  if (n == 0) throw ConfigInvalid("empty multiplication table");
  for (const auto& row : mult_) {
    if (row.size() != n) throw ConfigInvalid("multiplication table is not square");
    for (unsigned v : row)
      if (v >= n) throw ConfigInvalid("multiplication table entry out of range");
  }
  bool have_id = false;
  for (unsigned e = 0; e < n && !have_id; ++e) {
    bool ok = true;
    for (unsigned x = 0; x < n; ++x)
      if (mult_[e][x] != x || mult_[x][e] != x) {
        ok = false;
        break;
      }
    if (ok) {
      id_ = e;
      have_id = true;
    }
  }
  if (!have_id) throw ConfigInvalid("multiplication table has no identity");
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b)
      for (unsigned c = 0; c < n; ++c)
        if (mult_[mult_[a][b]][c] != mult_[a][mult_[b][c]])
          throw ConfigInvalid(fmt("multiplication is not associative at (%u, %u, %u)", a, b, c));
  inv_.assign(n, 0);
  for (unsigned a = 0; a < n; ++a) {
    bool found = false;
    for (unsigned b = 0; b < n; ++b)
      if (mult_[a][b] == id_ && mult_[b][a] == id_) {
        inv_[a] = b;
        found = true;
        break;
      }
    if (!found) throw ConfigInvalid(fmt("element %u has no inverse", a));
  }

  if (metric_.empty()) return;
  if (metric_.size() != n) throw ConfigInvalid("metric table size mismatch");
  for (const auto& row : metric_)
    if (row.size() != n) throw ConfigInvalid("metric table is not square");
  for (unsigned x = 0; x < n; ++x)
    for (unsigned y = 0; y < n; ++y) {
      const Rat& d = metric_[x][y];
      if (x == y && d != Rat(0)) throw ConfigInvalid("metric is nonzero on the diagonal");
      if (x != y && d <= Rat(0)) throw ConfigInvalid("metric must be positive off the diagonal");
      if (d > Rat(1)) throw ConfigInvalid("metric must be bounded by 1");
      if (d != metric_[y][x]) throw ConfigInvalid("metric is not symmetric");
    }
  for (unsigned x = 0; x < n; ++x)
    for (unsigned y = 0; y < n; ++y)
      for (unsigned z = 0; z < n; ++z)
        if (metric_[x][z] > metric_[x][y] + metric_[y][z])
          throw ConfigInvalid(fmt("triangle inequality fails at (%u, %u, %u)", x, y, z));
  for (unsigned g = 0; g < n; ++g)
    for (unsigned x = 0; x < n; ++x)
      for (unsigned y = 0; y < n; ++y) {
        if (metric_[mult_[g][x]][mult_[g][y]] != metric_[x][y])
          throw ConfigInvalid(fmt("metric is not left invariant at (%u, %u, %u)", g, x, y));
        if (metric_[mult_[x][g]][mult_[y][g]] != metric_[x][y])
          throw ConfigInvalid(fmt("metric is not right invariant at (%u, %u, %u)", g, x, y));
      }
}

Rat FiniteGroupL::dist(unsigned a, unsigned b) const {
  if (a >= order() || b >= order()) throw ConfigInvalid("group element out of range");
  if (metric_.empty()) return a == b ? Rat(0) : Rat(1);
  return metric_[a][b];
}

bool FiniteGroupL::operator==(const FiniteGroupL& o) const {
  return mult_ == o.mult_ && metric_ == o.metric_;
}

FiniteGroupL FiniteGroupL::cyclic(unsigned n) {
  if (n == 0) throw ConfigInvalid("cyclic group order must be positive");
  std::vector<std::vector<unsigned>> mult(n, std::vector<unsigned>(n));
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) mult[a][b] = (a + b) % n;
  return FiniteGroupL(std::move(mult));
}

FiniteGroupL FiniteGroupL::from_group(const GroupPtr& g) {
  if (!g) throw ConfigInvalid("null group");
  if (!g->is_finite()) throw ConfigInvalid("only finite groups can be tabulated");
  const auto& elems = g->elements();
  const std::size_t n = elems.size();
  std::vector<std::vector<unsigned>> mult(n, std::vector<unsigned>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      mult[a][b] = (unsigned)g->element_index(elems[a] * elems[b]);
  return FiniteGroupL(std::move(mult));
}

nlohmann::json to_json(const FiniteGroupL& g) {
  nlohmann::json j;
  j["mult"] = nlohmann::json::array();
  for (std::size_t a = 0; a < g.order(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < g.order(); ++b) row.push_back(g.mul((unsigned)a, (unsigned)b));
    j["mult"].push_back(std::move(row));
  }
  if (!g.discrete_metric()) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t a = 0; a < g.order(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t b = 0; b < g.order(); ++b)
        row.push_back(rat_to_json(g.dist((unsigned)a, (unsigned)b)));
      m.push_back(std::move(row));
    }
    j["metric"] = std::move(m);
  }
  return j;
}

FiniteGroupL finite_group_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mult")) throw ConfigInvalid("malformed group json");
  std::vector<std::vector<unsigned>> mult;
  try {
    mult = j.at("mult").get<std::vector<std::vector<unsigned>>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigInvalid("malformed group json");
  }
  std::vector<std::vector<Rat>> metric;
  if (j.contains("metric")) {
    if (!j.at("metric").is_array()) throw ConfigInvalid("malformed group json");
    for (const auto& row : j.at("metric")) {
      metric.emplace_back();
      for (const auto& cell : row) metric.back().push_back(rat_from_json(cell));
    }
  }
  return FiniteGroupL(std::move(mult), std::move(metric));
}

// ---------------------------------------------------------------------------
// Symmetric groups

unsigned SymGroup::index_of(const std::vector<unsigned>& perm) const {
  const auto it = std::lower_bound(one_line.begin(), one_line.end(), perm);
  if (it == one_line.end() || *it != perm) throw ConfigInvalid("not a permutation of the index set");
  return (unsigned)(it - one_line.begin());
}

SymGroup sym_group(unsigned k) {
  if (k == 0) throw ConfigInvalid("index set must be nonempty");
  if (k > 6) throw SizeCap("symmetric group too large to tabulate");
  std::vector<unsigned> base(k);
  std::iota(base.begin(), base.end(), 0u);
  std::vector<std::vector<unsigned>> perms;
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  const std::size_t n = perms.size();
  std::vector<std::vector<unsigned>> mult(n, std::vector<unsigned>(n));
  const auto rank = [&perms](const std::vector<unsigned>& p) {
    return (unsigned)(std::lower_bound(perms.begin(), perms.end(), p) - perms.begin());
  };
  std::vector<unsigned> prod(k);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      for (unsigned i = 0; i < k; ++i) prod[i] = perms[a][perms[b][i]];
      mult[a][b] = rank(prod);
    }
  return SymGroup{FiniteGroupL(std::move(mult)), std::move(perms)};
}

std::vector<std::vector<Rat>> s3_class_metric() {
  const auto s3 = sym_group(3);
  // distance to the identity by cycle type
  const auto norm = [&s3](unsigned g) {
    const auto& p = s3.one_line[g];
    unsigned moved = 0;
    for (unsigned i = 0; i < 3; ++i)
      if (p[i] != i) ++moved;
    if (moved == 0) return Rat(0);
    return moved == 2 ? Rat(1) : Rat(2, 3);
  };
  const std::size_t n = s3.group.order();
  std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n));
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) d[a][b] = norm(s3.group.mul(s3.group.inv(a), b));
  return d;
}

// ---------------------------------------------------------------------------
// Actions and cocycles

GroupAction make_action(FiniteGroupL group, std::vector<std::vector<unsigned>> act) {
  const std::size_t order = group.order();
  if (act.size() != order) throw ActionInvalid("one permutation per group element required");
  if (act[0].empty()) throw ActionInvalid("empty point set");
  const std::size_t npts = act[0].size();
  for (const auto& row : act) {
    if (row.size() != npts) throw ActionInvalid("ragged action table");
    std::vector<bool> seen(npts, false);
    for (unsigned v : row) {
      if (v >= npts || seen[v]) throw ActionInvalid("action row is not a permutation");
      seen[v] = true;
    }
  }
  for (std::size_t x = 0; x < npts; ++x)
    if (act[group.id()][x] != x) throw ActionInvalid("identity must act trivially");
  for (unsigned g1 = 0; g1 < order; ++g1)
    for (unsigned g0 = 0; g0 < order; ++g0)
      for (std::size_t x = 0; x < npts; ++x)
        if (act[group.mul(g1, g0)][x] != act[g1][act[g0][x]])
          throw ActionInvalid(fmt("action is not a homomorphism at (%u, %u, %zu)", g1, g0, x));
  return GroupAction{std::move(group), std::move(act)};
}

namespace {

void check_action_cocycle_shape(const ActionCocycle& c) {
  const std::size_t order = c.action.group.order();
  const std::size_t npts = c.action.act.empty() ? 0 : c.action.act[0].size();
  if (c.val.size() != order) throw ConfigInvalid("one value row per group element required");
  for (const auto& row : c.val) {
    if (row.size() != npts) throw ConfigInvalid("one value per point required");
    for (unsigned v : row)
      if (v >= c.target.order()) throw ConfigInvalid("cocycle value out of range");
  }
}

}  // namespace

CocycleReport verify_cocycle(const ActionCocycle& c) {
  check_action_cocycle_shape(c);
  CocycleReport rep;
  const std::size_t order = c.action.group.order();
  const std::size_t npts = c.action.act[0].size();
  for (unsigned g1 = 0; g1 < order; ++g1)
    for (unsigned g0 = 0; g0 < order; ++g0)
      for (std::size_t x = 0; x < npts; ++x) {
        const unsigned lhs = c.val[c.action.group.mul(g1, g0)][x];
        const unsigned rhs = c.target.mul(c.val[g1][c.action.act[g0][x]], c.val[g0][x]);
        if (lhs != rhs) rep.problems.push_back(fmt("identity fails (%u, %u, %zu)", g1, g0, x));
      }
  rep.ok = rep.problems.empty();
  return rep;
}

CocycleReport verify_cocycle(const GroupoidCocycle& c) {
  {
    const auto grep = validate(c.domain);
    if (!grep.ok)
      throw ConfigInvalid("cocycle domain fails validation: " + grep.problems.front());
  }
  if (c.val.size() != c.domain.n_morphisms())
    throw ConfigInvalid("one value per morphism required");
  for (unsigned v : c.val)
    if (v >= c.target.order()) throw ConfigInvalid("cocycle value out of range");
  CocycleReport rep;
  const std::size_t n = c.domain.n_morphisms();
  for (unsigned g1 = 0; g1 < n; ++g1)
    for (unsigned g0 = 0; g0 < n; ++g0) {
      const int comp = c.domain.compose(g1, g0);
      if (comp < 0) continue;
      if (c.val[comp] != c.target.mul(c.val[g1], c.val[g0]))
        rep.problems.push_back(fmt("identity fails (%u, %u)", g1, g0));
    }
  rep.ok = rep.problems.empty();
  return rep;
}

ActionCocycle hom_cocycle(GroupAction action, FiniteGroupL target,
                          const std::vector<unsigned>& rho) {
  const std::size_t order = action.group.order();
  if (rho.size() != order) throw ConfigInvalid("one image per group element required");
  for (unsigned v : rho)
    if (v >= target.order()) throw ConfigInvalid("image out of range");
  for (unsigned a = 0; a < order; ++a)
    for (unsigned b = 0; b < order; ++b)
      if (rho[action.group.mul(a, b)] != target.mul(rho[a], rho[b]))
        throw NotHomomorphism(fmt("rho breaks multiplication at (%u, %u)", a, b));
  const std::size_t npts = action.act[0].size();
  std::vector<std::vector<unsigned>> val(order);
  for (unsigned g = 0; g < order; ++g) val[g].assign(npts, rho[g]);
  return ActionCocycle{std::move(action), std::move(target), std::move(val)};
}

ActionCocycle coboundary(const std::vector<unsigned>& f, const ActionCocycle& c) {
  check_action_cocycle_shape(c);
  const std::size_t npts = c.action.act[0].size();
  if (f.size() != npts) throw ConfigInvalid("one twist value per point required");
  for (unsigned v : f)
    if (v >= c.target.order()) throw ConfigInvalid("twist value out of range");
  ActionCocycle out = c;
  const auto& t = c.target;
  for (unsigned g = 0; g < c.action.group.order(); ++g)
    for (std::size_t x = 0; x < npts; ++x)
      out.val[g][x] =
          t.mul(t.mul(f[c.action.act[g][x]], c.val[g][x]), t.inv(f[x]));
  return out;
}

GroupoidCocycle coboundary(const std::vector<unsigned>& f, const GroupoidCocycle& c) {
  if (f.size() != c.domain.n_objects()) throw ConfigInvalid("one twist value per object required");
  for (unsigned v : f)
    if (v >= c.target.order()) throw ConfigInvalid("twist value out of range");
  if (c.val.size() != c.domain.n_morphisms())
    throw ConfigInvalid("one value per morphism required");
  GroupoidCocycle out = c;
  const auto& t = c.target;
  for (unsigned m = 0; m < c.domain.n_morphisms(); ++m)
    out.val[m] = t.mul(t.mul(f[c.domain.range(m)], c.val[m]), t.inv(f[c.domain.source(m)]));
  return out;
}

// ---------------------------------------------------------------------------
// Cohomology search

namespace {

struct HomEnum {
  std::vector<unsigned> gens;                         // greedy generating set
  std::vector<std::pair<unsigned, unsigned>> expr;    // element -> (parent, gen slot)
  std::vector<unsigned> discovery;                    // elements in build order
};

HomEnum generating_data(const FiniteGroupL& g) {
  const std::size_t n = g.order();
  HomEnum he;
  std::vector<bool> in_closure(n, false);
  const auto close = [&] {
    std::vector<bool> seen(n, false);
    seen[g.id()] = true;
    std::vector<unsigned> work{g.id()};
    for (std::size_t at = 0; at < work.size(); ++at)
      for (unsigned s : he.gens) {
        const unsigned p = g.mul(work[at], s);
        if (!seen[p]) {
          seen[p] = true;
          work.push_back(p);
        }
      }
    in_closure = std::move(seen);
  };
  close();
  for (unsigned cand = 0; cand < n; ++cand) {
    if (in_closure[cand]) continue;
    he.gens.push_back(cand);
    close();
  }
  // rebuild once, recording how each element is reached
  he.expr.assign(n, {0, 0});
  std::vector<bool> seen(n, false);
  seen[g.id()] = true;
  he.discovery.clear();
  std::vector<unsigned> work{g.id()};
  for (std::size_t at = 0; at < work.size(); ++at)
    for (unsigned slot = 0; slot < he.gens.size(); ++slot) {
      const unsigned p = g.mul(work[at], he.gens[slot]);
      if (!seen[p]) {
        seen[p] = true;
        he.expr[p] = {work[at], slot};
        he.discovery.push_back(p);
        work.push_back(p);
      }
    }
  return he;
}

// builds the element-wise map from generator images; empty result on failure
std::vector<unsigned> hom_from_images(const FiniteGroupL& from, const FiniteGroupL& to,
                                      const HomEnum& he, const std::vector<unsigned>& img) {
  std::vector<unsigned> rho(from.order(), to.id());
  for (unsigned p : he.discovery) {
    const auto [parent, slot] = he.expr[p];
    rho[p] = to.mul(rho[parent], img[slot]);
  }
  for (unsigned a = 0; a < from.order(); ++a)
    for (unsigned b = 0; b < from.order(); ++b)
      if (rho[from.mul(a, b)] != to.mul(rho[a], rho[b])) return {};
  return rho;
}

}  // namespace

std::vector<std::vector<unsigned>> enumerate_homs(const FiniteGroupL& from,
                                                  const FiniteGroupL& to, std::size_t cap) {
  const HomEnum he = generating_data(from);
  const std::size_t k = he.gens.size();
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> img(k, 0);
  std::size_t tried = 0;
  while (true) {
    if (++tried > cap) throw SizeCap("homomorphism enumeration exceeds the cap");
    auto rho = hom_from_images(from, to, he, img);
    if (!rho.empty()) out.push_back(std::move(rho));
    std::size_t pos = 0;
    while (pos < k && ++img[pos] == to.order()) {
      img[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  return out;
}

SolveResult cohomologous_to_hom_search(const ActionCocycle& c, std::size_t cap) {
  SolveResult res;
  // a twisted homomorphism always satisfies the identity, so a non-cocycle
  // admits no solution at all
  if (!verify_cocycle(c).ok) {
    res.verdict = SolveResult::Verdict::None;
    return res;
  }
  const auto& G = c.action.group;
  const auto& L = c.target;
  const std::size_t npts = c.action.act[0].size();

  // orbits and a breadth-first spanning tree from the least point of each
  std::vector<int> tree_parent(npts, -1), tree_gamma(npts, -1);
  std::vector<unsigned> orbit_of(npts, 0);
  std::vector<std::vector<unsigned>> orbits;
  {
    std::vector<bool> seen(npts, false);
    for (std::size_t root = 0; root < npts; ++root) {
      if (seen[root]) continue;
      std::vector<unsigned> members{(unsigned)root};
      seen[root] = true;
      for (std::size_t at = 0; at < members.size(); ++at)
        for (unsigned g = 0; g < G.order(); ++g) {
          const unsigned y = c.action.act[g][members[at]];
          if (!seen[y]) {
            seen[y] = true;
            tree_parent[y] = (int)members[at];
            tree_gamma[y] = (int)g;
            members.push_back(y);
          }
        }
      for (unsigned m : members) orbit_of[m] = (unsigned)orbits.size();
      orbits.push_back(std::move(members));
    }
  }

  const HomEnum he = generating_data(G);
  const std::size_t k = he.gens.size();
  std::vector<unsigned> img(k, 0);
  std::vector<unsigned> f(npts, L.id());
  while (true) {
    if (++res.nodes > cap) {
      res.verdict = SolveResult::Verdict::Cap;
      return res;
    }
    const auto rho = hom_from_images(G, L, he, img);
    if (!rho.empty()) {
      bool all_orbits = true;
      for (const auto& orbit : orbits) {
        bool seeded = false;
        for (unsigned seed = 0; seed < L.order() && !seeded; ++seed) {
          if (++res.nodes > cap) {
            res.verdict = SolveResult::Verdict::Cap;
            return res;
          }
          f[orbit[0]] = seed;
          for (std::size_t at = 1; at < orbit.size(); ++at) {
            const unsigned y = orbit[at];
            const unsigned x = (unsigned)tree_parent[y];
            const unsigned g = (unsigned)tree_gamma[y];
            f[y] = L.mul(L.mul(c.val[g][x], f[x]), L.inv(rho[g]));
          }
          seeded = true;
          for (unsigned g = 0; g < G.order() && seeded; ++g)
            for (unsigned x : orbit)
              if (c.val[g][x] != L.mul(L.mul(f[c.action.act[g][x]], rho[g]), L.inv(f[x]))) {
                seeded = false;
                break;
              }
        }
        if (!seeded) {
          all_orbits = false;
          break;
        }
      }
      if (all_orbits) {
        res.verdict = SolveResult::Verdict::Found;
        res.rho = rho;
        res.f = f;
        return res;
      }
    }
    std::size_t pos = 0;
    while (pos < k && ++img[pos] == L.order()) {
      img[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  res.verdict = SolveResult::Verdict::None;
  return res;
}

// ---------------------------------------------------------------------------
// Choice functions and the index cocycle

ChoiceSystem choice_functions(const std::vector<unsigned>& r_labels,
                              const std::vector<unsigned>& s_labels) {
  const std::size_t n = r_labels.size();
  if (n == 0 || s_labels.size() != n) throw ConfigInvalid("label arrays must match and be nonempty");
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (s_labels[x] == s_labels[y] && r_labels[x] != r_labels[y])
        throw ConfigInvalid("S must refine R");

  // per R-class: the S-classes inside, each represented by its least point
  std::map<unsigned, std::vector<unsigned>> class_reps;  // r label -> sorted least points
  {
    std::map<unsigned, unsigned> least;  // s label -> least point
    for (std::size_t x = 0; x < n; ++x) {
      auto it = least.find(s_labels[x]);
      if (it == least.end())
        least[s_labels[x]] = (unsigned)x;
      else if (x < it->second)
        it->second = (unsigned)x;
    }
    for (const auto& [s, rep] : least) {
      (void)s;
      class_reps[r_labels[rep]].push_back(rep);
    }
    for (auto& [r, reps] : class_reps) {
      (void)r;
      std::sort(reps.begin(), reps.end());
    }
  }
  std::size_t count = 0;
  bool first = true;
  for (const auto& [r, reps] : class_reps) {
    (void)r;
    if (first) {
      count = reps.size();
      first = false;
    } else if (reps.size() != count) {
      throw IndexMismatch("S-class counts differ across R-classes");
    }
  }

  ChoiceSystem cs;
  cs.r_class = r_labels;
  cs.s_class = s_labels;
  cs.index_count = count;
  cs.phi.assign(count, std::vector<unsigned>(n, 0));
  for (std::size_t x = 0; x < n; ++x) {
    const auto& reps = class_reps.at(r_labels[x]);
    // own S-class first, the rest in order of their least points
    std::vector<unsigned> ordered;
    for (unsigned rep : reps)
      if (s_labels[rep] == s_labels[x]) ordered.push_back(rep);
    for (unsigned rep : reps)
      if (s_labels[rep] != s_labels[x]) ordered.push_back(rep);
    for (std::size_t i = 0; i < count; ++i) cs.phi[i][x] = ordered[i];
  }
  return cs;
}

GroupoidCocycle index_cocycle(const ChoiceSystem& cs) {
  const std::size_t n = cs.r_class.size();
  if (n == 0 || cs.s_class.size() != n) throw ConfigInvalid("malformed choice system");
  if (cs.index_count == 0 || cs.phi.size() != cs.index_count)
    throw ConfigInvalid("malformed choice system");
  for (const auto& row : cs.phi) {
    if (row.size() != n) throw ConfigInvalid("malformed choice system");
    for (unsigned p : row)
      if (p >= n) throw ConfigInvalid("choice function value out of range");
  }
  for (std::size_t x = 0; x < n; ++x) {
    std::set<unsigned> hit;
    for (std::size_t i = 0; i < cs.index_count; ++i) {
      const unsigned p = cs.phi[i][x];
      if (cs.r_class[p] != cs.r_class[x])
        throw ConfigInvalid("choice function leaves the R-class");
      hit.insert(cs.s_class[p]);
    }
    std::set<unsigned> classes;
    for (std::size_t y = 0; y < n; ++y)
      if (cs.r_class[y] == cs.r_class[x]) classes.insert(cs.s_class[y]);
    if (hit != classes)
      throw ConfigInvalid("choice functions must meet each S-class exactly once");
  }

  std::vector<Rat> weights(n, Rat(1, (long long)n));
  FiniteGroupoid domain = FiniteGroupoid::from_partition(cs.r_class, weights);
  const SymGroup sym = sym_group((unsigned)cs.index_count);
  GroupoidCocycle out{domain, sym.group, {}};
  out.val.reserve(domain.n_morphisms());
  std::vector<unsigned> perm(cs.index_count);
  for (unsigned m = 0; m < domain.n_morphisms(); ++m) {
    const unsigned y = domain.range(m), x = domain.source(m);
    for (std::size_t i = 0; i < cs.index_count; ++i) {
      const unsigned cls = cs.s_class[cs.phi[i][x]];
      int j = -1;
      for (std::size_t cand = 0; cand < cs.index_count; ++cand)
        if (cs.s_class[cs.phi[cand][y]] == cls) {
          j = (int)cand;
          break;
        }
      if (j < 0) throw ComputeError("index cocycle lookup failed");
      perm[i] = (unsigned)j;
    }
    out.val.push_back(sym.index_of(perm));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distances

Rat tilde_distance(const FiniteGroupL& L, const std::vector<unsigned>& phi0,
                   const std::vector<unsigned>& phi1, const std::vector<Rat>& mu) {
  const std::size_t n = mu.size();
  if (n == 0 || phi0.size() != n || phi1.size() != n)
    throw ConfigInvalid("maps and measure must share a domain");
  Rat total(0);
  for (const Rat& w : mu) {
    if (w < Rat(0)) throw ConfigInvalid("measure must be nonnegative");
    total += w;
  }
  if (total != Rat(1)) throw ConfigInvalid("measure must have total mass 1");
  Rat sum(0);
  for (std::size_t x = 0; x < n; ++x) sum += mu[x] * L.dist(phi0[x], phi1[x]);
  return sum;
}

McEstimate tilde_distance_mc(
    const FiniteGroupL& L,
    const std::function<std::pair<unsigned, unsigned>(std::uint64_t)>& draw,
    std::size_t samples) {
  if (samples == 0) throw ConfigInvalid("at least one sample required");
  std::vector<double> vals;
  vals.reserve(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [a, b] = draw(i);
    vals.push_back(to_double(L.dist(a, b)));
  }
  McEstimate est;
  est.samples = samples;
  double sum = 0.0;
  for (double v : vals) sum += v;
  est.value = sum / (double)samples;
  if (samples > 1) {
    double sq = 0.0;
    for (double v : vals) sq += (v - est.value) * (v - est.value);
    est.std_error = std::sqrt(sq / ((double)samples * ((double)samples - 1.0)));
  }
  return est;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const ActionCocycle& c) {
  nlohmann::json j;
  j["group"] = to_json(c.action.group);
  j["act"] = c.action.act;
  j["target"] = to_json(c.target);
  j["val"] = c.val;
  return j;
}

ActionCocycle action_cocycle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("group") || !j.contains("act") || !j.contains("target") ||
      !j.contains("val"))
    throw ConfigInvalid("malformed cocycle json");
  try {
    auto action = make_action(finite_group_from_json(j.at("group")),
                              j.at("act").get<std::vector<std::vector<unsigned>>>());
    ActionCocycle c{std::move(action), finite_group_from_json(j.at("target")),
                    j.at("val").get<std::vector<std::vector<unsigned>>>()};
    check_action_cocycle_shape(c);
    return c;
  } catch (const nlohmann::json::exception&) {
    throw ConfigInvalid("malformed cocycle json");
  }
}

nlohmann::json to_json(const GroupoidCocycle& c) {
  nlohmann::json j;
  j["domain"] = c.domain.to_json();
  j["target"] = to_json(c.target);
  j["val"] = c.val;
  return j;
}

GroupoidCocycle groupoid_cocycle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("target") || !j.contains("val"))
    throw ConfigInvalid("malformed cocycle json");
  try {
    GroupoidCocycle c{FiniteGroupoid::from_json(j.at("domain")),
                      finite_group_from_json(j.at("target")),
                      j.at("val").get<std::vector<unsigned>>()};
    if (c.val.size() != c.domain.n_morphisms())
      throw ConfigInvalid("one value per morphism required");
    for (unsigned v : c.val)
      if (v >= c.target.order()) throw ConfigInvalid("cocycle value out of range");
    return c;
  } catch (const nlohmann::json::exception&) {
    throw ConfigInvalid("malformed cocycle json");
  }
}

}  // namespace mgt
