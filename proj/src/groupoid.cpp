#include "mgt/groupoid.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

std::string fmt(const char* what, std::initializer_list<long long> xs) {
  std::ostringstream os;
  os << what;
  const char* sep = " (";
  for (long long x : xs) {
    os << sep << x;
    sep = ", ";
  }
  if (xs.size() > 0) os << ")";
  return os.str();
}

struct UnionFind {
  std::vector<unsigned> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  unsigned find(unsigned a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  // returns false when a and b were already connected
  bool unite(unsigned a, unsigned b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

FiniteGroupoid::FiniteGroupoid(std::vector<Rat> weights, std::vector<unsigned> source,
                               std::vector<unsigned> range, std::vector<unsigned> unit_of,
                               std::vector<unsigned> inverse_of, std::vector<int> composition)
    : weights_(std::move(weights)),
      source_(std::move(source)),
      range_(std::move(range)),
      unit_of_(std::move(unit_of)),
      inverse_(std::move(inverse_of)),
      comp_(std::move(composition)) {
  const std::size_t n_obj = weights_.size();
  const std::size_t n_mor = source_.size();
  if (n_obj == 0) throw ConfigInvalid("groupoid needs at least one object");
  if (range_.size() != n_mor || inverse_.size() != n_mor)
    throw ConfigInvalid("groupoid table sizes disagree");
  if (unit_of_.size() != n_obj) throw ConfigInvalid("unit table must cover every object");
  if (comp_.size() != n_mor * n_mor) throw ConfigInvalid("composition table must be n_morphisms^2");
  for (const Rat& w : weights_)
    if (w <= Rat(0)) throw ConfigInvalid("object weights must be positive");
  if (std::accumulate(weights_.begin(), weights_.end(), Rat(0)) != Rat(1))
    throw ConfigInvalid("object weights must sum to 1");
  for (std::size_t m = 0; m < n_mor; ++m)
    if (source_[m] >= n_obj || range_[m] >= n_obj || inverse_[m] >= n_mor)
      throw ConfigInvalid("morphism table index out of range");
  for (unsigned u : unit_of_)
    if (u >= n_mor) throw ConfigInvalid("unit id out of range");
  for (int c : comp_)
    if (c < -1 || c >= static_cast<int>(n_mor))
      throw ConfigInvalid("composition entry out of range");
  by_source_.assign(n_obj, {});
  by_range_.assign(n_obj, {});
  for (unsigned m = 0; m < n_mor; ++m) {
    by_source_[source_[m]].push_back(m);
    by_range_[range_[m]].push_back(m);
  }
}

bool FiniteGroupoid::operator==(const FiniteGroupoid& o) const {
  return weights_ == o.weights_ && source_ == o.source_ && range_ == o.range_ &&
         unit_of_ == o.unit_of_ && inverse_ == o.inverse_ && comp_ == o.comp_;
}

nlohmann::json FiniteGroupoid::to_json() const {
  nlohmann::json objs = nlohmann::json::array();
  for (std::size_t x = 0; x < n_objects(); ++x)
    objs.push_back({{"id", x},
                    {"weight", {{"num", weights_[x].numerator()}, {"den", weights_[x].denominator()}}}});
  nlohmann::json mors = nlohmann::json::array();
  for (std::size_t m = 0; m < n_morphisms(); ++m)
    mors.push_back({{"id", m}, {"src", source_[m]}, {"rng", range_[m]}});
  nlohmann::json comp = nlohmann::json::array();
  for (std::size_t g1 = 0; g1 < n_morphisms(); ++g1)
    for (std::size_t g0 = 0; g0 < n_morphisms(); ++g0) {
      int c = comp_[g1 * n_morphisms() + g0];
      if (c >= 0) comp.push_back({g1, g0, c});
    }
  return {{"objects", objs},
          {"morphisms", mors},
          {"units", unit_of_},
          {"inverse", inverse_},
          {"composition", comp}};
}

FiniteGroupoid FiniteGroupoid::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigInvalid("groupoid json must be an object");
  for (const char* key : {"objects", "morphisms", "units", "inverse", "composition"})
    if (!j.contains(key)) throw ConfigInvalid(std::string("groupoid json missing '") + key + "'");
  const auto& objs = j.at("objects");
  const auto& mors = j.at("morphisms");
  if (!objs.is_array() || !mors.is_array()) throw ConfigInvalid("objects/morphisms must be arrays");
  std::vector<Rat> weights(objs.size(), Rat(0));
  for (const auto& o : objs) {
    std::size_t id = o.at("id").get<std::size_t>();
    if (id >= weights.size()) throw ConfigInvalid("object ids must be 0..n-1");
    weights[id] = Rat(o.at("weight").at("num").get<long long>(),
                      o.at("weight").at("den").get<long long>());
  }
  std::vector<unsigned> src(mors.size()), rng(mors.size());
  for (const auto& m : mors) {
    std::size_t id = m.at("id").get<std::size_t>();
    if (id >= src.size()) throw ConfigInvalid("morphism ids must be 0..n-1");
    src[id] = m.at("src").get<unsigned>();
    rng[id] = m.at("rng").get<unsigned>();
  }
  std::vector<unsigned> units = j.at("units").get<std::vector<unsigned>>();
  std::vector<unsigned> inv = j.at("inverse").get<std::vector<unsigned>>();
  std::vector<int> comp(mors.size() * mors.size(), -1);
  for (const auto& t : j.at("composition")) {
    if (!t.is_array() || t.size() != 3) throw ConfigInvalid("composition entries are [g1, g0, g]");
    std::size_t g1 = t[0].get<std::size_t>(), g0 = t[1].get<std::size_t>();
    if (g1 >= mors.size() || g0 >= mors.size())
      throw ConfigInvalid("composition index out of range");
    comp[g1 * mors.size() + g0] = t[2].get<int>();
  }
  return FiniteGroupoid(std::move(weights), std::move(src), std::move(rng), std::move(units),
                        std::move(inv), std::move(comp));
}

FiniteGroupoid FiniteGroupoid::unit_groupoid(std::vector<Rat> weights) {
  const std::size_t n = weights.size();
  std::vector<unsigned> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<int> comp(n * n, -1);
  for (std::size_t x = 0; x < n; ++x) comp[x * n + x] = static_cast<int>(x);
  return FiniteGroupoid(std::move(weights), idx, idx, idx, idx, std::move(comp));
}

FiniteGroupoid FiniteGroupoid::full_relation(std::size_t n_points) {
  if (n_points == 0) throw ConfigInvalid("full relation needs points");
  return full_relation(std::vector<Rat>(n_points, Rat(1, static_cast<long long>(n_points))));
}

FiniteGroupoid FiniteGroupoid::full_relation(std::vector<Rat> weights) {
  const std::size_t n = weights.size();
  const std::size_t n_mor = n * n;
  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(n), inv(n_mor);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      const unsigned id = i * static_cast<unsigned>(n) + j;
      src[id] = j;
      rng[id] = i;
      inv[id] = j * static_cast<unsigned>(n) + i;
    }
  for (unsigned x = 0; x < n; ++x) unit_of[x] = x * static_cast<unsigned>(n) + x;
  std::vector<int> comp(n_mor * n_mor, -1);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      for (unsigned k = 0; k < n; ++k) {
        const unsigned g1 = i * static_cast<unsigned>(n) + j;
        const unsigned g0 = j * static_cast<unsigned>(n) + k;
        comp[static_cast<std::size_t>(g1) * n_mor + g0] = static_cast<int>(i * n + k);
      }
  return FiniteGroupoid(std::move(weights), std::move(src), std::move(rng), std::move(unit_of),
                        std::move(inv), std::move(comp));
}

FiniteGroupoid FiniteGroupoid::from_partition(const std::vector<unsigned>& cls,
                                              std::vector<Rat> weights) {
  const std::size_t n = weights.size();
  if (cls.size() != n) throw ConfigInvalid("one class label per point");
  std::vector<std::pair<unsigned, unsigned>> pairs;  // (target, source)
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      if (cls[i] == cls[j]) pairs.emplace_back(i, j);
  const std::size_t n_mor = pairs.size();
  std::vector<int> id_of(n * n, -1);
  for (std::size_t m = 0; m < n_mor; ++m)
    id_of[pairs[m].first * n + pairs[m].second] = static_cast<int>(m);
  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(n), inv(n_mor);
  for (std::size_t m = 0; m < n_mor; ++m) {
    rng[m] = pairs[m].first;
    src[m] = pairs[m].second;
    inv[m] = static_cast<unsigned>(id_of[pairs[m].second * n + pairs[m].first]);
  }
  for (unsigned x = 0; x < n; ++x) unit_of[x] = static_cast<unsigned>(id_of[x * n + x]);
  std::vector<int> comp(n_mor * n_mor, -1);
  for (std::size_t g1 = 0; g1 < n_mor; ++g1)
    for (std::size_t g0 = 0; g0 < n_mor; ++g0)
      if (pairs[g1].second == pairs[g0].first)
        comp[g1 * n_mor + g0] = id_of[pairs[g1].first * n + pairs[g0].second];
  return FiniteGroupoid(std::move(weights), std::move(src), std::move(rng), std::move(unit_of),
                        std::move(inv), std::move(comp));
}

FiniteGroupoid FiniteGroupoid::action_groupoid(const GroupPtr& group,
                                               const std::vector<std::vector<unsigned>>& act,
                                               std::vector<Rat> weights) {
  if (!group || !group->is_finite()) throw ConfigInvalid("action groupoid needs a finite group");
  const auto elems = group->elements();
  const std::size_t ng = elems.size();
  const std::size_t n = weights.size();
  if (act.size() != ng) throw ActionInvalid("one permutation per group element");
  for (const auto& p : act) {
    if (p.size() != n) throw ActionInvalid("permutation size must match the point count");
    std::vector<bool> seen(n, false);
    for (unsigned v : p) {
      if (v >= n || seen[v]) throw ActionInvalid("action entries must be permutations");
      seen[v] = true;
    }
  }
  const std::size_t eidx = group->element_index(group->identity());
  for (std::size_t x = 0; x < n; ++x)
    if (act[eidx][x] != x) throw ActionInvalid("identity must act trivially");
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < ng; ++j) {
      const std::size_t k = group->element_index(elems[i] * elems[j]);
      for (std::size_t x = 0; x < n; ++x)
        if (act[k][x] != act[i][act[j][x]])
          throw ActionInvalid("action is not a homomorphism");
    }
  const std::size_t n_mor = ng * n;
  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(n), inv(n_mor);
  for (std::size_t k = 0; k < ng; ++k)
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t id = k * n + x;
      src[id] = static_cast<unsigned>(x);
      rng[id] = act[k][x];
      const std::size_t ki = group->element_index(elems[k].inverse());
      inv[id] = static_cast<unsigned>(ki * n + act[k][x]);
    }
  for (std::size_t x = 0; x < n; ++x) unit_of[x] = static_cast<unsigned>(eidx * n + x);
  std::vector<int> comp(n_mor * n_mor, -1);
  for (std::size_t k1 = 0; k1 < ng; ++k1)
    for (std::size_t k0 = 0; k0 < ng; ++k0) {
      const std::size_t kp = group->element_index(elems[k1] * elems[k0]);
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t g0 = k0 * n + x;
        const std::size_t g1 = k1 * n + act[k0][x];
        comp[g1 * n_mor + g0] = static_cast<int>(kp * n + x);
      }
    }
  return FiniteGroupoid(std::move(weights), std::move(src), std::move(rng), std::move(unit_of),
                        std::move(inv), std::move(comp));
}

GroupoidReport validate(const FiniteGroupoid& g) {
  GroupoidReport rep;
  const std::size_t n_mor = g.n_morphisms();
  const std::size_t n_obj = g.n_objects();
  auto flag = [&](std::string s) {
    rep.ok = false;
    rep.problems.push_back(std::move(s));
  };

  for (unsigned x = 0; x < n_obj; ++x) {
    const unsigned u = g.unit(x);
    if (g.source(u) != x || g.range(u) != x)
      flag(fmt("unit has wrong endpoints", {x, g.source(u), g.range(u)}));
  }
  for (unsigned m = 0; m < n_mor; ++m) {
    const unsigned us = g.unit(g.source(m)), ur = g.unit(g.range(m));
    if (g.compose(m, us) != static_cast<int>(m)) flag(fmt("right unit law fails", {m}));
    if (g.compose(ur, m) != static_cast<int>(m)) flag(fmt("left unit law fails", {m}));
  }
  for (unsigned g1 = 0; g1 < n_mor; ++g1)
    for (unsigned g0 = 0; g0 < n_mor; ++g0) {
      const bool should = g.source(g1) == g.range(g0);
      const int c = g.compose(g1, g0);
      if (should != (c >= 0)) {
        flag(fmt("composition defined on the wrong pairs", {g1, g0}));
        continue;
      }
      if (c >= 0) {
        if (g.source(static_cast<unsigned>(c)) != g.source(g0) ||
            g.range(static_cast<unsigned>(c)) != g.range(g1))
          flag(fmt("composite has wrong endpoints", {g1, g0, c}));
      }
    }
  // associativity over composable triples
  for (unsigned g0 = 0; g0 < n_mor; ++g0)
    for (unsigned g1 : g.with_source(g.range(g0)))
      for (unsigned g2 : g.with_source(g.range(g1))) {
        const int a = g.compose(g2, g1);
        const int b = g.compose(g1, g0);
        if (a < 0 || b < 0) continue;  // reported above
        const int lhs = g.compose(static_cast<unsigned>(a), g0);
        const int rhs = g.compose(g2, static_cast<unsigned>(b));
        if (lhs != rhs) flag(fmt("associativity fails", {g2, g1, g0}));
      }
  for (unsigned m = 0; m < n_mor; ++m) {
    const unsigned i = g.inverse(m);
    if (g.inverse(i) != m) flag(fmt("inverse is not an involution", {m}));
    if (g.source(i) != g.range(m) || g.range(i) != g.source(m))
      flag(fmt("inverse has wrong endpoints", {m}));
    if (g.compose(i, m) != static_cast<int>(g.unit(g.source(m))))
      flag(fmt("inverse law fails on the source side", {m}));
    if (g.compose(m, i) != static_cast<int>(g.unit(g.range(m))))
      flag(fmt("inverse law fails on the range side", {m}));
  }
  for (unsigned m = 0; m < n_mor; ++m)
    if (g.weight(g.range(m)) != g.weight(g.source(m))) {
      rep.pmp = false;
      flag(fmt("weight not preserved along morphism", {m}));
    }

  std::set<std::pair<unsigned, unsigned>> rs;
  rep.principal = true;
  for (unsigned m = 0; m < n_mor; ++m)
    if (!rs.insert({g.range(m), g.source(m)}).second) rep.principal = false;

  UnionFind uf(n_obj);
  std::size_t classes = n_obj;
  for (unsigned m = 0; m < n_mor; ++m)
    if (uf.unite(g.range(m), g.source(m))) --classes;
  rep.ergodic = classes == 1;

  rep.min_range_fiber = n_mor;
  for (unsigned x = 0; x < n_obj; ++x)
    rep.min_range_fiber = std::min(rep.min_range_fiber, g.with_range(x).size());
  return rep;
}

bool is_bisection(const FiniteGroupoid& g, const std::vector<unsigned>& mors) {
  std::set<unsigned> src, rng;
  for (unsigned m : mors) {
    if (m >= g.n_morphisms()) throw ConfigInvalid("bisection morphism id out of range");
    if (!src.insert(g.source(m)).second) return false;
    if (!rng.insert(g.range(m)).second) return false;
  }
  return true;
}

namespace {

void require_valid(const FiniteGroupoid& g, const char* who) {
  const GroupoidReport rep = validate(g);
  if (!rep.ok)
    throw ConfigInvalid(std::string(who) + ": input groupoid fails validation: " + rep.problems.front());
}

}  // namespace

RestrictResult restrict_to(const FiniteGroupoid& g, std::vector<unsigned> objects) {
  require_valid(g, "restrict");
  std::sort(objects.begin(), objects.end());
  objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
  if (objects.empty()) throw EmptyReduction("restriction to an empty object set");
  for (unsigned x : objects)
    if (x >= g.n_objects()) throw ConfigInvalid("restriction object id out of range");
  std::vector<int> new_obj(g.n_objects(), -1);
  Rat mass(0);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    new_obj[objects[i]] = static_cast<int>(i);
    mass += g.weight(objects[i]);
  }
  std::vector<Rat> weights;
  weights.reserve(objects.size());
  for (unsigned x : objects) weights.push_back(g.weight(x) / mass);

  std::vector<unsigned> keep;
  std::vector<int> new_mor(g.n_morphisms(), -1);
  for (unsigned m = 0; m < g.n_morphisms(); ++m)
    if (new_obj[g.source(m)] >= 0 && new_obj[g.range(m)] >= 0) {
      new_mor[m] = static_cast<int>(keep.size());
      keep.push_back(m);
    }
  const std::size_t n_mor = keep.size();
  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(objects.size()), inv(n_mor);
  for (std::size_t m = 0; m < n_mor; ++m) {
    src[m] = static_cast<unsigned>(new_obj[g.source(keep[m])]);
    rng[m] = static_cast<unsigned>(new_obj[g.range(keep[m])]);
    inv[m] = static_cast<unsigned>(new_mor[g.inverse(keep[m])]);
  }
  for (std::size_t i = 0; i < objects.size(); ++i)
    unit_of[i] = static_cast<unsigned>(new_mor[g.unit(objects[i])]);
  std::vector<int> comp(n_mor * n_mor, -1);
  for (std::size_t g1 = 0; g1 < n_mor; ++g1)
    for (std::size_t g0 = 0; g0 < n_mor; ++g0) {
      const int c = g.compose(keep[g1], keep[g0]);
      if (c >= 0) comp[g1 * n_mor + g0] = new_mor[c];
    }
  return {FiniteGroupoid(std::move(weights), std::move(src), std::move(rng), std::move(unit_of),
                         std::move(inv), std::move(comp)),
          std::move(objects), std::move(keep)};
}

unsigned DirectSumResult::encode_object(const std::vector<unsigned>& t) const {
  std::size_t code = 0;
  for (std::size_t k = t.size(); k-- > 0;) code = code * object_radix[k] + t[k];
  return static_cast<unsigned>(code);
}

unsigned DirectSumResult::encode_morphism(const std::vector<unsigned>& t) const {
  std::size_t code = 0;
  for (std::size_t k = t.size(); k-- > 0;) code = code * morphism_radix[k] + t[k];
  return static_cast<unsigned>(code);
}

DirectSumResult direct_sum(const std::vector<FiniteGroupoid>& factors, std::size_t cap) {
  if (factors.empty()) throw ConfigInvalid("direct sum needs at least one factor");
  for (const auto& f : factors) require_valid(f, "direct_sum");
  std::size_t n_obj = 1, n_mor = 1;
  DirectSumResult out{FiniteGroupoid::unit_groupoid({Rat(1)}), {}, {}, {}, {}};
  for (const auto& f : factors) {
    if (n_mor > cap / std::max<std::size_t>(f.n_morphisms(), 1))
      throw SizeCap("direct sum exceeds the morphism cap");
    n_obj *= f.n_objects();
    n_mor *= f.n_morphisms();
    out.object_radix.push_back(f.n_objects());
    out.morphism_radix.push_back(f.n_morphisms());
  }
  const std::size_t k = factors.size();
  out.object_tuple.assign(n_obj, std::vector<unsigned>(k, 0));
  for (std::size_t id = 0; id < n_obj; ++id) {
    std::size_t rest = id;
    for (std::size_t p = 0; p < k; ++p) {
      out.object_tuple[id][p] = static_cast<unsigned>(rest % out.object_radix[p]);
      rest /= out.object_radix[p];
    }
  }
  out.morphism_tuple.assign(n_mor, std::vector<unsigned>(k, 0));
  for (std::size_t id = 0; id < n_mor; ++id) {
    std::size_t rest = id;
    for (std::size_t p = 0; p < k; ++p) {
      out.morphism_tuple[id][p] = static_cast<unsigned>(rest % out.morphism_radix[p]);
      rest /= out.morphism_radix[p];
    }
  }
  std::vector<Rat> weights(n_obj, Rat(1));
  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(n_obj), inv(n_mor);
  std::vector<unsigned> tup(k);
  for (std::size_t id = 0; id < n_obj; ++id) {
    for (std::size_t p = 0; p < k; ++p) weights[id] *= factors[p].weight(out.object_tuple[id][p]);
    for (std::size_t p = 0; p < k; ++p) tup[p] = factors[p].unit(out.object_tuple[id][p]);
    unit_of[id] = out.encode_morphism(tup);
  }
  for (std::size_t id = 0; id < n_mor; ++id) {
    for (std::size_t p = 0; p < k; ++p) tup[p] = factors[p].source(out.morphism_tuple[id][p]);
    src[id] = out.encode_object(tup);
    for (std::size_t p = 0; p < k; ++p) tup[p] = factors[p].range(out.morphism_tuple[id][p]);
    rng[id] = out.encode_object(tup);
    for (std::size_t p = 0; p < k; ++p) tup[p] = factors[p].inverse(out.morphism_tuple[id][p]);
    inv[id] = out.encode_morphism(tup);
  }
  std::vector<int> comp(n_mor * n_mor, -1);
  for (std::size_t g1 = 0; g1 < n_mor; ++g1)
    for (std::size_t g0 = 0; g0 < n_mor; ++g0) {
      bool ok = true;
      for (std::size_t p = 0; p < k && ok; ++p) {
        const int c = factors[p].compose(out.morphism_tuple[g1][p], out.morphism_tuple[g0][p]);
        if (c < 0)
          ok = false;
        else
          tup[p] = static_cast<unsigned>(c);
      }
      if (ok) comp[g1 * n_mor + g0] = static_cast<int>(out.encode_morphism(tup));
    }
  out.groupoid = FiniteGroupoid(std::move(weights), std::move(src), std::move(rng),
                                std::move(unit_of), std::move(inv), std::move(comp));
  return out;
}

GroupoidBundle constant_bundle(const FiniteGroupoid& base, const FiniteGroupoid& fiber) {
  GroupoidBundle b{base, std::vector<FiniteGroupoid>(base.n_objects(), fiber), {}, {}};
  std::vector<unsigned> obj_id(fiber.n_objects()), mor_id(fiber.n_morphisms());
  std::iota(obj_id.begin(), obj_id.end(), 0u);
  std::iota(mor_id.begin(), mor_id.end(), 0u);
  b.alpha_obj.assign(base.n_morphisms(), obj_id);
  b.alpha_mor.assign(base.n_morphisms(), mor_id);
  return b;
}

void validate_bundle(const GroupoidBundle& b) {
  require_valid(b.base, "bundle base");
  if (b.fibers.size() != b.base.n_objects()) throw ActionInvalid("one fiber per base object");
  for (const auto& f : b.fibers) {
    const GroupoidReport rep = validate(f);
    if (!rep.ok) throw ActionInvalid("bundle fiber fails validation: " + rep.problems.front());
  }
  if (b.alpha_obj.size() != b.base.n_morphisms() || b.alpha_mor.size() != b.base.n_morphisms())
    throw ActionInvalid("one transport per base morphism");
  const auto& base = b.base;
  for (unsigned m = 0; m < base.n_morphisms(); ++m) {
    const auto& from = b.fibers[base.source(m)];
    const auto& to = b.fibers[base.range(m)];
    const auto& ao = b.alpha_obj[m];
    const auto& am = b.alpha_mor[m];
    if (ao.size() != from.n_objects() || am.size() != from.n_morphisms())
      throw ActionInvalid("transport tables must cover the source fiber");
    std::vector<bool> seen_o(to.n_objects(), false), seen_m(to.n_morphisms(), false);
    for (unsigned v : ao) {
      if (v >= to.n_objects() || seen_o[v]) throw ActionInvalid("transport is not an object bijection");
      seen_o[v] = true;
    }
    for (unsigned v : am) {
      if (v >= to.n_morphisms() || seen_m[v])
        throw ActionInvalid("transport is not a morphism bijection");
      seen_m[v] = true;
    }
    if (std::count(seen_o.begin(), seen_o.end(), true) != static_cast<long>(to.n_objects()) ||
        std::count(seen_m.begin(), seen_m.end(), true) != static_cast<long>(to.n_morphisms()))
      throw ActionInvalid("transport must be onto (fiber sizes differ)");
    for (unsigned u = 0; u < from.n_objects(); ++u) {
      if (to.weight(ao[u]) != from.weight(u))
        throw ActionInvalid("transport does not preserve fiber weights");
      if (am[from.unit(u)] != to.unit(ao[u])) throw ActionInvalid("transport breaks units");
    }
    for (unsigned h = 0; h < from.n_morphisms(); ++h) {
      if (to.source(am[h]) != ao[from.source(h)] || to.range(am[h]) != ao[from.range(h)])
        throw ActionInvalid("transport breaks endpoints");
      if (am[from.inverse(h)] != to.inverse(am[h])) throw ActionInvalid("transport breaks inverses");
    }
    for (unsigned h1 = 0; h1 < from.n_morphisms(); ++h1)
      for (unsigned h0 = 0; h0 < from.n_morphisms(); ++h0) {
        const int c = from.compose(h1, h0);
        const int c2 = to.compose(am[h1], am[h0]);
        if ((c >= 0) != (c2 >= 0)) throw ActionInvalid("transport breaks composability");
        if (c >= 0 && am[static_cast<unsigned>(c)] != static_cast<unsigned>(c2))
          throw ActionInvalid("transport breaks composition");
      }
  }
  // functoriality: units to identity, compatibility with composition/inverse
  for (unsigned x = 0; x < base.n_objects(); ++x) {
    const unsigned u = base.unit(x);
    for (unsigned v = 0; v < b.fibers[x].n_objects(); ++v)
      if (b.alpha_obj[u][v] != v) throw ActionInvalid("unit transport must be the identity");
    for (unsigned h = 0; h < b.fibers[x].n_morphisms(); ++h)
      if (b.alpha_mor[u][h] != h) throw ActionInvalid("unit transport must be the identity");
  }
  for (unsigned g1 = 0; g1 < base.n_morphisms(); ++g1)
    for (unsigned g0 = 0; g0 < base.n_morphisms(); ++g0) {
      const int c = base.compose(g1, g0);
      if (c < 0) continue;
      const auto& from = b.fibers[base.source(g0)];
      for (unsigned v = 0; v < from.n_objects(); ++v)
        if (b.alpha_obj[static_cast<unsigned>(c)][v] != b.alpha_obj[g1][b.alpha_obj[g0][v]])
          throw ActionInvalid("transport is not functorial on objects");
      for (unsigned h = 0; h < from.n_morphisms(); ++h)
        if (b.alpha_mor[static_cast<unsigned>(c)][h] != b.alpha_mor[g1][b.alpha_mor[g0][h]])
          throw ActionInvalid("transport is not functorial on morphisms");
    }
  for (unsigned m = 0; m < base.n_morphisms(); ++m) {
    const unsigned mi = base.inverse(m);
    const auto& from = b.fibers[base.source(m)];
    for (unsigned v = 0; v < from.n_objects(); ++v)
      if (b.alpha_obj[mi][b.alpha_obj[m][v]] != v)
        throw ActionInvalid("inverse transport must invert the transport");
    for (unsigned h = 0; h < from.n_morphisms(); ++h)
      if (b.alpha_mor[mi][b.alpha_mor[m][h]] != h)
        throw ActionInvalid("inverse transport must invert the transport");
  }
}

unsigned SemidirectResult::encode_morphism(unsigned base_mor, unsigned fiber_mor) const {
  return static_cast<unsigned>(mor_offset[base_mor] + fiber_mor);
}

unsigned SemidirectResult::encode_object(unsigned base_obj, unsigned fiber_obj) const {
  return static_cast<unsigned>(obj_offset[base_obj] + fiber_obj);
}

SemidirectResult semidirect(const GroupoidBundle& b, std::size_t cap) {
  validate_bundle(b);
  const auto& base = b.base;
  SemidirectResult out{FiniteGroupoid::unit_groupoid({Rat(1)}), {}, {}, {}, {}};
  out.obj_offset.assign(base.n_objects() + 1, 0);
  for (std::size_t x = 0; x < base.n_objects(); ++x)
    out.obj_offset[x + 1] = out.obj_offset[x] + b.fibers[x].n_objects();
  out.mor_offset.assign(base.n_morphisms() + 1, 0);
  for (std::size_t m = 0; m < base.n_morphisms(); ++m) {
    out.mor_offset[m + 1] = out.mor_offset[m] + b.fibers[base.source(m)].n_morphisms();
    if (out.mor_offset[m + 1] > cap) throw SizeCap("semidirect product exceeds the morphism cap");
  }
  const std::size_t n_obj = out.obj_offset.back();
  const std::size_t n_mor = out.mor_offset.back();
  out.object_pair.reserve(n_obj);
  for (unsigned x = 0; x < base.n_objects(); ++x)
    for (unsigned u = 0; u < b.fibers[x].n_objects(); ++u) out.object_pair.emplace_back(x, u);
  out.morphism_pair.reserve(n_mor);
  for (unsigned m = 0; m < base.n_morphisms(); ++m)
    for (unsigned h = 0; h < b.fibers[base.source(m)].n_morphisms(); ++h)
      out.morphism_pair.emplace_back(m, h);

  std::vector<Rat> weights;
  weights.reserve(n_obj);
  for (const auto& [x, u] : out.object_pair) weights.push_back(base.weight(x) * b.fibers[x].weight(u));

  std::vector<unsigned> src(n_mor), rng(n_mor), unit_of(n_obj), inv(n_mor);
  for (std::size_t id = 0; id < n_mor; ++id) {
    const auto [g, h] = out.morphism_pair[id];
    const auto& fib = b.fibers[base.source(g)];
    src[id] = out.encode_object(base.source(g), fib.source(h));
    rng[id] = out.encode_object(base.range(g), b.alpha_obj[g][fib.range(h)]);
    inv[id] = out.encode_morphism(base.inverse(g), b.alpha_mor[g][fib.inverse(h)]);
  }
  for (std::size_t id = 0; id < n_obj; ++id) {
    const auto [x, u] = out.object_pair[id];
    unit_of[id] = out.encode_morphism(base.unit(x), b.fibers[x].unit(u));
  }
  std::vector<int> comp(n_mor * n_mor, -1);
  for (std::size_t i1 = 0; i1 < n_mor; ++i1) {
    const auto [g1, h1] = out.morphism_pair[i1];
    for (std::size_t i0 = 0; i0 < n_mor; ++i0) {
      const auto [g0, h0] = out.morphism_pair[i0];
      const int gc = base.compose(g1, g0);
      if (gc < 0) continue;
      const auto& fib0 = b.fibers[base.source(g0)];
      // pull h1 back along g0, then compose in fiber(source(g0))
      const unsigned h1_back = b.alpha_mor[base.inverse(g0)][h1];
      const int hc = fib0.compose(h1_back, h0);
      if (hc < 0) continue;
      comp[i1 * n_mor + i0] =
          static_cast<int>(out.encode_morphism(static_cast<unsigned>(gc), static_cast<unsigned>(hc)));
    }
  }
  out.groupoid = FiniteGroupoid(std::move(weights), std::move(src), std::move(rng),
                                std::move(unit_of), std::move(inv), std::move(comp));
  return out;
}

WreathResult wreath_groupoid(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                             const std::vector<unsigned>& base_subset, std::size_t cap) {
  require_valid(lamp, "wreath lamp");
  require_valid(base, "wreath base");
  std::vector<bool> in_d(base.n_objects(), false);
  for (unsigned x : base_subset) {
    if (x >= base.n_objects()) throw ConfigInvalid("wreath subset object id out of range");
    in_d[x] = true;
  }
  if (base_subset.empty()) throw EmptyReduction("wreath over an empty fibered set");

  WreathResult out{SemidirectResult{FiniteGroupoid::unit_groupoid({Rat(1)}), {}, {}, {}, {}},
                   GroupoidBundle{base, {}, {}, {}},
                   {},
                   {}};
  out.w_fiber.assign(base.n_objects(), {});
  for (unsigned w = 0; w < base.n_morphisms(); ++w)
    if (in_d[base.source(w)]) out.w_fiber[base.range(w)].push_back(w);
  // ids ascend already; position of w inside its fiber
  std::vector<int> pos(base.n_morphisms(), -1);
  for (unsigned x = 0; x < base.n_objects(); ++x)
    for (std::size_t p = 0; p < out.w_fiber[x].size(); ++p) pos[out.w_fiber[x][p]] = static_cast<int>(p);

  for (unsigned x = 0; x < base.n_objects(); ++x) {
    std::vector<FiniteGroupoid> copies(out.w_fiber[x].size(), lamp);
    if (copies.empty())
      out.fiber_sum.push_back(direct_sum({FiniteGroupoid::unit_groupoid({Rat(1)})}, cap));
    else
      out.fiber_sum.push_back(direct_sum(copies, cap));
    out.bundle.fibers.push_back(out.fiber_sum.back().groupoid);
  }

  out.bundle.alpha_obj.assign(base.n_morphisms(), {});
  out.bundle.alpha_mor.assign(base.n_morphisms(), {});
  for (unsigned g = 0; g < base.n_morphisms(); ++g) {
    const unsigned xs = base.source(g), xr = base.range(g);
    const auto& from = out.fiber_sum[xs];
    const auto& to = out.fiber_sum[xr];
    const std::size_t nw = out.w_fiber[xs].size();
    if (nw != out.w_fiber[xr].size())
      throw ComputeError("left translation must preserve fiber sizes");
    // coordinate shuffle: the tuple entry at w' moves to g w'
    std::vector<std::size_t> dest(nw);
    for (std::size_t p = 0; p < nw; ++p) {
      const int gw = base.compose(g, out.w_fiber[xs][p]);
      if (gw < 0 || pos[gw] < 0) throw ComputeError("left translation left the fibered set");
      dest[p] = static_cast<std::size_t>(pos[gw]);
    }
    auto shuffle = [&](const std::vector<std::vector<unsigned>>& tuples,
                       auto encode) {
      std::vector<unsigned> table(tuples.size());
      std::vector<unsigned> t(std::max<std::size_t>(nw, 1), 0);
      for (std::size_t code = 0; code < tuples.size(); ++code) {
        for (std::size_t p = 0; p < nw; ++p) t[dest[p]] = tuples[code][p];
        table[code] = encode(t);
      }
      return table;
    };
    if (nw == 0) {
      out.bundle.alpha_obj[g] = {0};
      out.bundle.alpha_mor[g] = {0};
    } else {
      out.bundle.alpha_obj[g] =
          shuffle(from.object_tuple, [&](const std::vector<unsigned>& t) { return to.encode_object(t); });
      out.bundle.alpha_mor[g] = shuffle(
          from.morphism_tuple, [&](const std::vector<unsigned>& t) { return to.encode_morphism(t); });
    }
  }
  out.sd = semidirect(out.bundle, cap);
  return out;
}

WreathResult wreath_groupoid(const FiniteGroupoid& lamp, const FiniteGroupoid& base,
                             std::size_t cap) {
  std::vector<unsigned> all(base.n_objects());
  std::iota(all.begin(), all.end(), 0u);
  return wreath_groupoid(lamp, base, all, cap);
}

IndependenceReport freely_independent(const FiniteGroupoid& g,
                                      const std::vector<std::vector<unsigned>>& subgroupoids,
                                      std::size_t max_len) {
  require_valid(g, "freely_independent");
  if (subgroupoids.size() < 2) throw ConfigInvalid("need at least two subgroupoids");
  const std::size_t n_mor = g.n_morphisms();
  for (const auto& sub : subgroupoids) {
    std::vector<bool> in(n_mor, false);
    for (unsigned m : sub) {
      if (m >= n_mor) throw ConfigInvalid("subgroupoid morphism id out of range");
      in[m] = true;
    }
    for (unsigned m : sub) {
      if (!in[g.inverse(m)]) throw ConfigInvalid("subgroupoid not closed under inverse");
      for (unsigned m2 : sub) {
        const int c = g.compose(m, m2);
        if (c >= 0 && !in[static_cast<unsigned>(c)])
          throw ConfigInvalid("subgroupoid not closed under composition");
      }
    }
  }

  IndependenceReport rep;
  const std::size_t nf = subgroupoids.size();
  // state = value * nf + last family; parent chain for witness reconstruction
  struct Move {
    long long parent;  // -1 at roots
    unsigned step;     // morphism appended on the left
  };
  std::vector<long long> state_of(n_mor * nf, -1);
  std::vector<Move> moves;
  std::vector<std::size_t> frontier;

  auto push = [&](unsigned value, std::size_t fam, long long parent, unsigned step) {
    const std::size_t key = static_cast<std::size_t>(value) * nf + fam;
    if (state_of[key] >= 0) return;
    state_of[key] = static_cast<long long>(moves.size());
    moves.push_back({parent, step});
    frontier.push_back(key);
  };

  for (std::size_t fam = 0; fam < nf && rep.witness.empty(); ++fam)
    for (unsigned m : subgroupoids[fam]) {
      if (g.is_unit(m)) continue;
      push(m, fam, -1, m);
    }

  std::size_t len = 1;
  while (!frontier.empty() && len < max_len && rep.witness.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t key : frontier) {
      const unsigned value = static_cast<unsigned>(key / nf);
      const std::size_t fam = key % nf;
      const long long self = state_of[key];
      for (std::size_t f2 = 0; f2 < nf; ++f2) {
        if (f2 == fam) continue;
        for (unsigned h : subgroupoids[f2]) {
          if (g.is_unit(h)) continue;
          const int c = g.compose(h, value);
          if (c < 0) continue;
          const unsigned v2 = static_cast<unsigned>(c);
          if (g.is_unit(v2)) {
            // walk the chain back; steps come out leftmost first
            std::vector<unsigned> w{h};
            for (long long at = self; at >= 0; at = moves[at].parent) w.push_back(moves[at].step);
            std::reverse(w.begin(), w.end());
            rep.witness = std::move(w);
            rep.independent = false;
            break;
          }
          const std::size_t k2 = static_cast<std::size_t>(v2) * nf + f2;
          if (state_of[k2] < 0) {
            state_of[k2] = static_cast<long long>(moves.size());
            moves.push_back({self, h});
            next.push_back(k2);
          }
        }
        if (!rep.witness.empty()) break;
      }
      if (!rep.witness.empty()) break;
    }
    frontier = std::move(next);
    ++len;
  }
  rep.searched_len = std::min(len, max_len);
  rep.exhaustive = rep.independent && frontier.empty();

  // recover an alternating family assignment for the witness word by
  // backtracking over memberships
  if (!rep.independent) {
    const std::size_t wl = rep.witness.size();
    std::vector<std::vector<bool>> member(subgroupoids.size(), std::vector<bool>(n_mor, false));
    for (std::size_t f = 0; f < subgroupoids.size(); ++f)
      for (unsigned m : subgroupoids[f]) member[f][m] = true;
    std::vector<std::size_t> fams(wl, 0);
    std::vector<std::size_t> choice(wl, 0);
    std::size_t i = 0;
    while (i < wl) {
      bool placed = false;
      for (std::size_t f = choice[i]; f < subgroupoids.size(); ++f) {
        if (!member[f][rep.witness[i]]) continue;
        if (i > 0 && fams[i - 1] == f) continue;
        fams[i] = f;
        choice[i] = f + 1;
        placed = true;
        break;
      }
      if (placed) {
        ++i;
        if (i < wl) choice[i] = 0;
      } else {
        if (i == 0) break;  // should not happen, witness came from the search
        choice[i] = 0;
        --i;
      }
    }
    rep.witness_family = std::move(fams);
  }
  return rep;
}

std::vector<unsigned> partition_subgroupoid(const FiniteGroupoid& full,
                                            const std::vector<unsigned>& cls) {
  if (cls.size() * cls.size() != full.n_morphisms())
    throw ConfigInvalid("partition_subgroupoid expects a full relation");
  std::vector<unsigned> out;
  const unsigned n = static_cast<unsigned>(cls.size());
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      if (cls[i] == cls[j]) out.push_back(i * n + j);
  return out;
}

StructureGraph structure_graph(const std::vector<unsigned>& r0, const std::vector<unsigned>& r1) {
  if (r0.size() != r1.size() || r0.empty())
    throw ConfigInvalid("structure graph needs matching nonempty label vectors");
  const unsigned n = static_cast<unsigned>(r0.size());
  auto compress = [](const std::vector<unsigned>& labels) {
    std::map<unsigned, unsigned> seen;
    std::vector<unsigned> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, fresh] = seen.insert({labels[i], static_cast<unsigned>(seen.size())});
      (void)fresh;
      out[i] = it->second;
    }
    return std::pair<std::vector<unsigned>, std::size_t>(out, seen.size());
  };
  auto [c0, k0] = compress(r0);
  auto [c1, k1] = compress(r1);
  StructureGraph sg;
  sg.n_points = n;
  sg.n_r0_classes = k0;
  sg.n_r1_classes = k1;
  for (unsigned x = 0; x < n; ++x) {
    sg.edges.emplace_back(x, n + c0[x]);
    sg.edges.emplace_back(x, static_cast<unsigned>(n + k0) + c1[x]);
  }
  return sg;
}

bool acyclic(const StructureGraph& sg) {
  UnionFind uf(sg.n_points + sg.n_r0_classes + sg.n_r1_classes);
  for (const auto& [a, b] : sg.edges)
    if (!uf.unite(a, b)) return false;
  return true;
}

TransportReport mass_transport_check(const std::vector<Rat>& vertex_weight,
                                     const std::vector<TransportEdge>& edges) {
  TransportReport rep{Rat(0), Rat(0), false};
  for (const auto& e : edges) {
    if (e.from >= vertex_weight.size() || e.to >= vertex_weight.size())
      throw ConfigInvalid("transport edge endpoint out of range");
    rep.weighted_out += vertex_weight[e.from] * e.mass;
    rep.weighted_in += vertex_weight[e.to] * e.mass;
  }
  rep.balanced = rep.weighted_out == rep.weighted_in;
  return rep;
}

}  // namespace mgt
