#include <chrono>
#include <cmath>

#include "mgt/hashmix.hpp"
#include "mgt/parallel.hpp"
#include "mgt/report.hpp"
#include "mgt/tree_cocycle.hpp"
#include "report_detail.hpp"

namespace mgt {

using nlohmann::json;

namespace {

struct Ctx {
  bool mutate = false;
};

ExperimentConfig cfg(const std::string& kind, std::uint64_t seed, unsigned radius,
                     std::uint64_t samples, json params) {
  ExperimentConfig c;
  c.kind = kind;
  c.seed = seed;
  c.radius = radius;
  c.samples = samples;
  c.params = std::move(params);
  return c;
}

// gamma = s a^k with s not ending in a power of a
std::pair<Element, long long> split_tail(const GroupPtr& g, const Element& x) {
  const auto w = x.generator_word();
  if (w.empty() || w.back().first != 0) return {x, 0};
  Element s = g->identity();
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    s = s * g->generators()[w[i].first].pow(w[i].second);
  return {s, w.back().second};
}

// the adding machine, written against the coordinate oracle directly
unsigned ref_odometer(const std::function<unsigned(long long)>& x, long long k) {
  if (k < 0) return x(k);
  for (long long j = 0; j <= k; ++j)
    if (x(j) == 0) return j == k ? 1u : x(k);
  return 0;
}

// 1. the lifted map against the closed formula, coordinate by coordinate
CriterionResult c_lift_direct(const Ctx&) {
  auto g = detail::free_ab();
  auto sch = CosetSchema::free_factor(g, {0});
  auto alph = detail::bin2();
  const auto sub = sch.subgroup();

  struct Inner {
    std::string name;
    MapPtr map;
  };
  const std::vector<unsigned> bij = {1, 0};
  const std::vector<unsigned> scramble_perm = {0, 2, 1, 3};
  const std::vector<Inner> inners = {
      {"identity", detail::inner_by_name("identity", sub, alph)},
      {"bijection", detail::inner_by_name("bijection:1,0", sub, alph)},
      {"odometer", detail::inner_by_name("odometer", sub, alph)},
      {"scramble",
       detail::inner_by_name("scramble:{\"window\":[\"e\",\"a\"],\"perm\":[0,2,1,3]}", sub,
                             alph)},
  };

  const auto ball = g->ball(5);
  std::uint64_t checked = 0, mismatches = 0;
  json first_bad;
  for (const auto& inner : inners) {
    auto lifted = lift(sch, inner.map);
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto y = Configuration::seeded_iid(g, alph, seed_split(9001, s));
      auto reader = y.reader();
      for (const auto& gamma : ball) {
        const auto [pre, k] = split_tail(g, gamma);
        const auto fiber = [&](long long j) {
          return y.eval(pre * g->generators()[0].pow(j));
        };
        unsigned want = 0;
        if (inner.name == "identity") {
          want = fiber(k);
        } else if (inner.name == "bijection") {
          want = bij[fiber(k)];
        } else if (inner.name == "odometer") {
          want = ref_odometer(fiber, k);
        } else {
          // window {e, a}: pattern bit 0 at e, bit 1 at a, permuted
          if (k == 0 || k == 1) {
            const unsigned pat = fiber(0) + 2u * fiber(1);
            want = (scramble_perm[pat] >> (unsigned)k) & 1u;
          } else {
            want = fiber(k);
          }
        }
        ++checked;
        if (lifted->eval(gamma, reader) != want) {
          ++mismatches;
          if (first_bad.is_null())
            first_bad = json{{"inner", inner.name}, {"seed", s}, {"at", gamma.word()}};
        }
      }
    }
  }
  json details{{"inners", 4},     {"seeds", 100},           {"coordinates", ball.size()},
               {"checked", checked}, {"mismatches", mismatches}};
  if (!first_bad.is_null()) details["first_mismatch"] = first_bad;
  return {"lift-direct-formula", mismatches == 0, 0.0, std::move(details)};
}

// 2. transported defect sets equal the brute disagreement sets
CriterionResult c_defect_transport(const Ctx&) {
  const std::vector<std::string> deltas = {"a", "a^-1", "b", "b^-1", "a*b", "b*a^-1"};
  json per_delta = json::array();
  bool all = true;
  for (const auto& d : deltas) {
    auto rep = run(cfg("lift-verify", 1204, 6, 0,
                       json{{"inner", "odometer"}, {"delta", d}, {"seeds", 100}}));
    all = all && rep.pass;
    per_delta.push_back(json{{"delta", d}, {"all_match", rep.pass}});
  }
  return {"odometer-defect-transport", all, 0.0, json{{"deltas", per_delta}}};
}

// 3. coset defect sets of the free factor schema
CriterionResult c_coset_defect(const Ctx& ctx) {
  auto g = detail::free_ab();
  auto sch = CosetSchema::free_factor(g, {0});
  bool ok = true;
  json bad = json::array();
  for (int j = 1; j <= 5; ++j) {
    for (const std::string base : {"a^", "a^-"}) {
      const Element lam = g->parse_word(base + std::to_string(j));
      auto defect = sch.coset_defect(lam, 6);
      std::vector<Element> want = {g->identity(), lam};
      if (ctx.mutate) want.pop_back();  // planted fault: drop the translate itself
      std::sort(want.begin(), want.end());
      if (defect != want) {
        ok = false;
        bad.push_back(json{{"element", lam.word()}, {"got", defect.size()}});
      }
    }
  }
  for (int j = 1; j <= 5; ++j) {
    for (const std::string base : {"b^", "b^-"}) {
      const Element h = g->parse_word(base + std::to_string(j));
      for (unsigned r = 0; r <= 6; ++r) {
        if (!sch.coset_defect(h, r).empty()) {
          ok = false;
          bad.push_back(json{{"element", h.word()}, {"radius", r}});
        }
      }
    }
  }
  json details{{"factor_elements", 10}, {"other_factor_elements", 10}, {"witnesses", bad}};
  return {"coset-defect-sets", ok, 0.0, std::move(details)};
}

// 4. inverse round trip plus measure preservation through cylinders
CriterionResult c_bijectivity(const Ctx&) {
  auto g = detail::free_ab();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), detail::bin2()));
  auto inv = lifted->inverse();
  const auto ball = g->ball(5);
  std::uint64_t mismatches = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto y = Configuration::seeded_iid(g, detail::bin2(), seed_split(77, s));
    auto back = Configuration::mapped(inv, Configuration::mapped(lifted, y));
    for (const auto& gamma : ball)
      if (back.eval(gamma) != y.eval(gamma)) ++mismatches;
  }

  json windows = json::array();
  bool cyl_ok = true;
  for (const auto& w : std::vector<std::vector<std::string>>{
           {"e"}, {"e", "a"}, {"e", "a", "b"}}) {
    auto rep = run(cfg("cylinder", 2024, 0, 200000,
                       json{{"inner", "odometer"}, {"window", w}}));
    cyl_ok = cyl_ok && rep.pass;
    windows.push_back(json{{"window", w}, {"all_within", rep.pass}});
  }
  json details{{"roundtrip_seeds", 100},
               {"roundtrip_mismatches", mismatches},
               {"cylinders", windows}};
  return {"bijectivity-measure", mismatches == 0 && cyl_ok, 0.0, std::move(details)};
}

std::vector<Rat> uniform_weights(std::size_t n) {
  return std::vector<Rat>(n, Rat(1, (long long)n));
}

FiniteGroupoid swap_action_groupoid() {
  return FiniteGroupoid::action_groupoid(Group::cyclic(2), {{0, 1}, {1, 0}},
                                         uniform_weights(2));
}

// the lamplighter group C2 wr C2 acting on lamp-config x position triples
FiniteGroupoid lamplighter_action_groupoid() {
  auto lampg = Group::cyclic(2, "u");
  auto topg = Group::cyclic(2, "t");
  auto w = Group::wreath(lampg, topg);
  const auto tops = topg->elements();
  const Element te = topg->identity();
  const Element ts = tops[0] == te ? tops[1] : tops[0];
  const auto elems = w->elements();
  std::vector<std::vector<unsigned>> act(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto* wd = elems[i].wreath_data();
    const bool shift = !wd->top.is_identity();
    act[i].resize(8);
    for (unsigned p = 0; p < 8; ++p) {
      const unsigned x = p & 1u;
      const unsigned fe = (p >> 1) & 1u;
      const unsigned fs = (p >> 2) & 1u;
      const unsigned nx = shift ? 1u - x : x;
      unsigned ne = shift ? fs : fe;
      unsigned ns = shift ? fe : fs;
      if (!elems[i].lamp_value(te).is_identity()) ne ^= 1u;
      if (!elems[i].lamp_value(ts).is_identity()) ns ^= 1u;
      act[i][p] = nx + 2 * ne + 4 * ns;
    }
  }
  return FiniteGroupoid::action_groupoid(w, act, uniform_weights(8));
}

// 5. groupoid constructions, wreath sizes, and the lamplighter isomorphism
CriterionResult c_groupoid_engine(const Ctx&) {
  json steps = json::array();
  bool ok = true;
  const auto note = [&](const std::string& name, bool good) {
    steps.push_back(json{{"step", name}, {"ok", good}});
    ok = ok && good;
  };

  const auto full2 = FiniteGroupoid::full_relation(2);
  note("validate-full", validate(FiniteGroupoid::full_relation(3)).ok);
  note("validate-partition",
       validate(FiniteGroupoid::from_partition({0, 0, 1}, uniform_weights(3))).ok);
  note("validate-action", validate(swap_action_groupoid()).ok);
  note("validate-sum", validate(direct_sum({full2, full2}).groupoid).ok);
  note("validate-semidirect", validate(semidirect(constant_bundle(full2, full2)).groupoid).ok);

  const auto w = wreath_groupoid(full2, full2);
  note("validate-wreath", validate(w.sd.groupoid).ok);
  note("wreath-morphisms-64", w.sd.groupoid.n_morphisms() == 64);
  note("wreath-units-8", w.sd.groupoid.n_objects() == 8);

  const auto sw = wreath_groupoid(swap_action_groupoid(), swap_action_groupoid());
  const auto lamp = lamplighter_action_groupoid();
  auto iso = iso_search(lamp, sw.sd.groupoid);
  note("lamplighter-iso-found", iso.verdict == IsoResult::Verdict::Isomorphic);
  if (iso.verdict == IsoResult::Verdict::Isomorphic)
    note("lamplighter-iso-verifies",
         verify_iso(lamp, sw.sd.groupoid, iso.object_map, iso.morphism_map));

  bool hom_ok = true;
  std::uint64_t hom_pairs = 0;
  try {
    std::vector<std::vector<unsigned>> phi(full2.n_morphisms());
    for (unsigned gmor = 0; gmor < full2.n_morphisms(); ++gmor) {
      const auto& fiber = w.bundle.fibers[full2.source(gmor)];
      phi[gmor].resize(fiber.n_morphisms());
      for (unsigned h = 0; h < fiber.n_morphisms(); ++h) phi[gmor][h] = h;
    }
    auto wi = wreath_iso_from_fiber_maps(w, w, phi);
    hom_ok = wi.bijective;
    hom_pairs = wi.checked_pairs;
  } catch (const NotHomomorphism&) {
    hom_ok = false;
  }
  note("wreath-hom-identity", hom_ok);
  steps.push_back(json{{"step", "wreath-hom-pairs"}, {"pairs", hom_pairs}});

  return {"groupoid-engine", ok, 0.0, json{{"steps", steps}}};
}

// 6. word search agrees with graph acyclicity on random instances
CriterionResult c_independence(const Ctx&) {
  auto rep = run(cfg("indep-crossval", 640313, 0, 0,
                     json{{"instances", 500}, {"max_points", 7}}));
  return {"independence-acyclicity", rep.pass, 0.0, rep.payload};
}

// 7. the index cocycle on the four point and quotient instances
CriterionResult c_index_cocycle(const Ctx&) {
  bool ok = true;
  json details;

  const auto cs = choice_functions({0, 0, 0, 0}, {0, 0, 1, 1});
  const auto sigma = index_cocycle(cs);
  ok = ok && verify_cocycle(sigma).ok;
  const auto s2 = sym_group(2);
  const unsigned swap = s2.index_of({1, 0});
  for (unsigned y = 0; y < 4 && ok; ++y)
    for (unsigned x = 0; x < 4 && ok; ++x) {
      const bool crosses = (y >= 2) != (x >= 2);
      ok = sigma.val[y * 4 + x] == (crosses ? swap : 0);
    }
  details["four_point_ok"] = ok;

  // C4 over its index two subgroup: sigma(gamma.x, x) is the right regular
  // image of the coset of gamma
  const auto qcs = choice_functions({0, 0, 0, 0}, {0, 1, 0, 1});
  const auto qsigma = index_cocycle(qcs);
  bool qok = verify_cocycle(qsigma).ok;
  for (unsigned gamma = 0; gamma < 4 && qok; ++gamma)
    for (unsigned x = 0; x < 4 && qok; ++x) {
      const unsigned yy = (x + gamma) % 4;
      qok = qsigma.val[yy * 4 + x] == (gamma % 2 ? swap : 0);
    }
  details["quotient_ok"] = qok;
  details["morphisms_checked"] = 32;
  return {"index-cocycle", ok && qok, 0.0, std::move(details)};
}

// 8. tree cocycle identity and flip sensitivity on the depth five tree
CriterionResult c_tree_cocycle(const Ctx&) {
  auto rep = run(cfg("tree-cocycle", 52801, 0, 0,
                     json{{"depth", 5},
                          {"total_length", 4},
                          {"labelings", 50},
                          {"flip_labelings", 5}}));
  return {"tree-cocycle", rep.pass, 0.0, rep.payload};
}

// 9. planted twisted homomorphisms are recovered; verdicts match brute force
CriterionResult c_cohomology_solver(const Ctx&) {
  auto rep = run(cfg("cocycle-solve", 90210, 0, 0,
                     json{{"instances", 200}, {"max_points", 6}, {"max_target", 6}}));
  return {"cohomology-solver", rep.pass, 0.0, rep.payload};
}

// 10. entropy closed form and the empirical estimate
CriterionResult c_entropy(const Ctx&) {
  auto rep = run(cfg("entropy", 6022, 0, 1000000, json::object()));
  return {"entropy", rep.pass, 0.0, rep.payload};
}

using CriterionFn = CriterionResult (*)(const Ctx&);

const std::vector<std::pair<std::string, CriterionFn>>& core_criteria() {
  static const std::vector<std::pair<std::string, CriterionFn>> fns = {
      {"lift-direct-formula", c_lift_direct},
      {"odometer-defect-transport", c_defect_transport},
      {"coset-defect-sets", c_coset_defect},
      {"bijectivity-measure", c_bijectivity},
      {"groupoid-engine", c_groupoid_engine},
      {"independence-acyclicity", c_independence},
      {"index-cocycle", c_index_cocycle},
      {"tree-cocycle", c_tree_cocycle},
      {"cohomology-solver", c_cohomology_solver},
      {"entropy", c_entropy},
  };
  return fns;
}

bool selected(const std::string& name, const std::string& filter) {
  return filter.empty() || name.find(filter) != std::string::npos;
}

std::vector<CriterionResult> run_core(const std::string& filter, const Ctx& ctx) {
  std::vector<CriterionResult> out;
  for (const auto& [name, fn] : core_criteria()) {
    if (!selected(name, filter)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fn(ctx);
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

json core_json(const std::vector<CriterionResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs)
    arr.push_back(json{{"name", r.name}, {"pass", r.pass}, {"details", r.details}});
  return arr;
}

}  // namespace

json to_json(const AcceptanceReport& r) {
  json arr = json::array();
  for (const auto& c : r.criteria)
    arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
  return json{{"criteria", arr}, {"all_pass", r.all_pass}};
}

AcceptanceReport acceptance(const AcceptanceOptions& opt) {
  Ctx ctx{opt.mutate};
  AcceptanceReport rep;
  rep.criteria = run_core(opt.filter, ctx);

  if (selected("determinism", opt.filter)) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string base = opt.filter.empty()
                                 ? core_json(rep.criteria).dump()
                                 : core_json(run_core("", ctx)).dump();
    set_thread_count(1);
    const std::string one = core_json(run_core("", ctx)).dump();
    set_thread_count(8);
    const std::string eight = core_json(run_core("", ctx)).dump();
    set_thread_count(0);
    const bool same = base == one && one == eight;
    CriterionResult det{"determinism", same, 0.0,
                        json{{"payload_bytes", base.size()},
                             {"identical_across_reruns", base == one},
                             {"identical_across_threads", one == eight}}};
    det.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.criteria.push_back(std::move(det));
  }

  rep.all_pass = !rep.criteria.empty();
  for (const auto& c : rep.criteria) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace mgt
