#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mgt/cocycle.hpp"
#include "mgt/errors.hpp"
#include "mgt/group.hpp"

using namespace mgt;

namespace {

std::vector<std::vector<unsigned>> mult_table(const FiniteGroupL& g) {
  std::vector<std::vector<unsigned>> t(g.order(), std::vector<unsigned>(g.order()));
  for (unsigned a = 0; a < g.order(); ++a)
    for (unsigned b = 0; b < g.order(); ++b) t[a][b] = g.mul(a, b);
  return t;
}

GroupAction swap_action_c2() {
  return make_action(FiniteGroupL::cyclic(2), {{0, 1}, {1, 0}});
}

GroupAction trivial_action_c2(std::size_t npts) {
  std::vector<unsigned> idperm(npts);
  for (std::size_t i = 0; i < npts; ++i) idperm[i] = (unsigned)i;
  return make_action(FiniteGroupL::cyclic(2), {idperm, idperm});
}

// checks c(g,x) = f(g.x) rho(g) f(x)^-1 everywhere
bool solves(const ActionCocycle& c, const std::vector<unsigned>& rho,
            const std::vector<unsigned>& f) {
  const auto& L = c.target;
  for (unsigned g = 0; g < c.action.group.order(); ++g)
    for (std::size_t x = 0; x < c.action.act[0].size(); ++x)
      if (c.val[g][x] != L.mul(L.mul(f[c.action.act[g][x]], rho[g]), L.inv(f[x])))
        return false;
  return true;
}

// reference solver: every twist f against every homomorphism
bool brute_force_solvable(const ActionCocycle& c) {
  const std::size_t npts = c.action.act[0].size();
  const auto homs = enumerate_homs(c.action.group, c.target);
  std::vector<unsigned> f(npts, 0);
  while (true) {
    for (const auto& rho : homs)
      if (solves(c, rho, f)) return true;
    std::size_t pos = 0;
    while (pos < npts && ++f[pos] == c.target.order()) {
      f[pos] = 0;
      ++pos;
    }
    if (pos == npts) return false;
  }
}

}  // namespace

TEST_CASE("group tables are validated exhaustively") {
  const auto c3 = FiniteGroupL::cyclic(3);
  CHECK(c3.order() == 3);
  CHECK(c3.id() == 0);
  CHECK(c3.mul(1, 2) == 0);
  CHECK(c3.inv(1) == 2);
  CHECK(c3.dist(1, 1) == Rat(0));
  CHECK(c3.dist(0, 2) == Rat(1));

  CHECK_THROWS_AS(FiniteGroupL({{0, 0}, {0, 0}}), ConfigInvalid);  // no identity
  CHECK_THROWS_AS(FiniteGroupL({{0, 1}, {1, 1}}), ConfigInvalid);  // 1 lacks an inverse
  // break one entry of C4: associativity fails
  auto bad = mult_table(FiniteGroupL::cyclic(4));
  bad[2][2] = 1;
  CHECK_THROWS_AS(FiniteGroupL(std::move(bad)), ConfigInvalid);
  CHECK_THROWS_AS(FiniteGroupL({}), ConfigInvalid);
  CHECK_THROWS_AS(FiniteGroupL({{0, 1}, {7, 0}}), ConfigInvalid);
}

TEST_CASE("custom metrics are validated exhaustively") {
  const auto c2 = mult_table(FiniteGroupL::cyclic(2));
  CHECK_NOTHROW(FiniteGroupL(c2, {{Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(0)}}));
  CHECK_THROWS_AS(FiniteGroupL(c2, {{Rat(0), Rat(0)}, {Rat(0), Rat(0)}}), ConfigInvalid);
  CHECK_THROWS_AS(FiniteGroupL(c2, {{Rat(0), Rat(2)}, {Rat(2), Rat(0)}}), ConfigInvalid);
  CHECK_THROWS_AS(FiniteGroupL(c2, {{Rat(0), Rat(1)}, {Rat(1, 2), Rat(0)}}), ConfigInvalid);

  const auto c3 = mult_table(FiniteGroupL::cyclic(3));
  const auto metric3 = [](Rat d01, Rat d02, Rat d12) {
    return std::vector<std::vector<Rat>>{
        {Rat(0), d01, d02}, {d01, Rat(0), d12}, {d02, d12, Rat(0)}};
  };
  // triangle broken
  CHECK_THROWS_AS(FiniteGroupL(c3, metric3(Rat(1, 8), Rat(1, 8), Rat(1))), ConfigInvalid);
  // triangle fine but not translation invariant
  CHECK_THROWS_AS(FiniteGroupL(c3, metric3(Rat(1, 2), Rat(1, 2), Rat(1))), ConfigInvalid);
  // invariant class metric
  CHECK_NOTHROW(FiniteGroupL(c3, metric3(Rat(1, 2), Rat(1, 2), Rat(1, 2))));
}

TEST_CASE("symmetric group realization") {
  const auto s3 = sym_group(3);
  CHECK(s3.group.order() == 6);
  CHECK(s3.one_line[0] == std::vector<unsigned>{0, 1, 2});
  CHECK(s3.group.id() == 0);
  // pi = (0 1), tau = (1 2): pi tau maps 0->1, 1->2, 2->0
  const unsigned pi = s3.index_of({1, 0, 2});
  const unsigned tau = s3.index_of({0, 2, 1});
  CHECK(s3.one_line[s3.group.mul(pi, tau)] == std::vector<unsigned>{1, 2, 0});
  CHECK(s3.group.mul(pi, pi) == 0);
  CHECK_THROWS_AS(s3.index_of({0, 0, 1}), ConfigInvalid);
  CHECK_THROWS_AS(sym_group(0), ConfigInvalid);
  CHECK_THROWS_AS(sym_group(7), SizeCap);

  // the class metric is accepted by the exhaustive bi-invariance check
  const auto with_metric = FiniteGroupL(mult_table(s3.group), s3_class_metric());
  CHECK(with_metric.dist(0, pi) == Rat(1));
  CHECK(with_metric.dist(0, s3.index_of({1, 2, 0})) == Rat(2, 3));
}

TEST_CASE("finite groups can be tabulated from the group algebra") {
  const auto c4 = FiniteGroupL::from_group(Group::cyclic(4));
  CHECK(c4.order() == 4);
  for (unsigned a = 0; a < 4; ++a)
    for (unsigned b = 0; b < 4; ++b) CHECK(c4.mul(a, b) == c4.mul(b, a));
  CHECK_THROWS_AS(FiniteGroupL::from_group(Group::free_group(1)), ConfigInvalid);
}

TEST_CASE("actions are validated") {
  CHECK_NOTHROW(swap_action_c2());
  CHECK_THROWS_AS(make_action(FiniteGroupL::cyclic(2), {{0, 1}}), ActionInvalid);
  CHECK_THROWS_AS(make_action(FiniteGroupL::cyclic(2), {{0, 0}, {1, 1}}), ActionInvalid);
  CHECK_THROWS_AS(make_action(FiniteGroupL::cyclic(2), {{1, 0}, {0, 1}}), ActionInvalid);
  // C4 acting through its quotient is fine, scrambling the rows is not
  CHECK_NOTHROW(make_action(FiniteGroupL::cyclic(4), {{0, 1}, {1, 0}, {0, 1}, {1, 0}}));
  CHECK_THROWS_AS(make_action(FiniteGroupL::cyclic(4), {{0, 1}, {1, 0}, {1, 0}, {0, 1}}),
                  ActionInvalid);
}

TEST_CASE("cocycle identity verification") {
  const auto action = swap_action_c2();
  // constant identity passes
  ActionCocycle triv{action, FiniteGroupL::cyclic(2), {{0, 0}, {0, 0}}};
  CHECK(verify_cocycle(triv).ok);
  // a homomorphism viewed as a cocycle passes
  const auto hom = hom_cocycle(action, FiniteGroupL::cyclic(2), {0, 1});
  CHECK(verify_cocycle(hom).ok);
  // a lopsided table fails with an explicit witness
  ActionCocycle bad{action, FiniteGroupL::cyclic(2), {{0, 0}, {1, 0}}};
  const auto rep = verify_cocycle(bad);
  CHECK(!rep.ok);
  CHECK(std::find(rep.problems.begin(), rep.problems.end(), "identity fails (1, 1, 0)") !=
        rep.problems.end());
  // shape errors throw instead of reporting
  ActionCocycle torn{action, FiniteGroupL::cyclic(2), {{0, 0}}};
  CHECK_THROWS_AS(verify_cocycle(torn), ConfigInvalid);
  CHECK_THROWS_AS(hom_cocycle(action, FiniteGroupL::cyclic(2), {1, 0}), NotHomomorphism);
}

TEST_CASE("groupoid cocycles are functors to the target") {
  const auto g = FiniteGroupoid::full_relation(2);
  // value a on the two crossings, e on units: (0<-1)(1<-0) = unit needs a*a = e
  GroupoidCocycle c{g, FiniteGroupL::cyclic(2), {0, 1, 1, 0}};
  CHECK(verify_cocycle(c).ok);
  GroupoidCocycle bad{g, FiniteGroupL::cyclic(3), {0, 1, 1, 0}};
  const auto rep = verify_cocycle(bad);
  CHECK(!rep.ok);
  CHECK(!rep.problems.empty());
  GroupoidCocycle torn{g, FiniteGroupL::cyclic(2), {0, 1}};
  CHECK_THROWS_AS(verify_cocycle(torn), ConfigInvalid);
}

TEST_CASE("coboundary formula") {
  const auto action = swap_action_c2();
  const auto s3 = sym_group(3);
  const unsigned t = s3.index_of({1, 0, 2});
  const unsigned r = s3.index_of({1, 2, 0});
  ActionCocycle c{action, s3.group, {{0, r}, {t, s3.group.mul(r, t)}}};

  // f constant identity changes nothing
  CHECK(coboundary({0, 0}, c).val == c.val);
  // f constant l conjugates
  const auto conj = coboundary({r, r}, c);
  for (unsigned g = 0; g < 2; ++g)
    for (unsigned x = 0; x < 2; ++x)
      CHECK(conj.val[g][x] == s3.group.mul(s3.group.mul(r, c.val[g][x]), s3.group.inv(r)));
  // applying a twist and its pointwise inverse round-trips
  const std::vector<unsigned> f{t, r};
  const std::vector<unsigned> fi{s3.group.inv(t), s3.group.inv(r)};
  CHECK(coboundary(f, coboundary(fi, c)).val == c.val);
  // twisting preserves the cocycle identity
  const auto hom = hom_cocycle(action, s3.group, {0, t});
  REQUIRE(verify_cocycle(hom).ok);
  CHECK(verify_cocycle(coboundary(f, hom)).ok);

  CHECK_THROWS_AS(coboundary({0}, c), ConfigInvalid);
  CHECK_THROWS_AS(coboundary({0, 99}, c), ConfigInvalid);
}

TEST_CASE("groupoid coboundary formula") {
  const auto g = FiniteGroupoid::full_relation(2);
  GroupoidCocycle c{g, FiniteGroupL::cyclic(4), {0, 1, 3, 0}};
  REQUIRE(verify_cocycle(c).ok);
  const auto twisted = coboundary({1, 3}, c);
  CHECK(verify_cocycle(twisted).ok);
  // crossing (0<-1): f(0) + c + (-f(1)) = 1 + 1 - 3 = 3 mod 4
  CHECK(twisted.val[1] == 3);
  const auto back = coboundary({3, 1}, twisted);
  CHECK(back.val == c.val);
}

TEST_CASE("homomorphism enumeration") {
  const auto c2 = FiniteGroupL::cyclic(2);
  const auto c3 = FiniteGroupL::cyclic(3);
  const auto c4 = FiniteGroupL::cyclic(4);
  CHECK(enumerate_homs(c2, c3).size() == 1);  // only the trivial one
  CHECK(enumerate_homs(c2, c2).size() == 2);
  CHECK(enumerate_homs(c4, c2).size() == 2);
  CHECK(enumerate_homs(c2, c4).size() == 2);  // images 0 and 2
  const auto s3 = sym_group(3);
  CHECK(enumerate_homs(c2, s3.group).size() == 4);  // identity plus three transpositions
  CHECK_THROWS_AS(enumerate_homs(c4, c4, 2), SizeCap);
}

TEST_CASE("solver recovers planted twisted homomorphisms") {
  const auto s3 = sym_group(3);
  const auto action = swap_action_c2();
  const unsigned t = s3.index_of({1, 0, 2});
  const unsigned r = s3.index_of({1, 2, 0});
  const auto planted = coboundary({r, t}, hom_cocycle(action, s3.group, {0, t}));
  REQUIRE(verify_cocycle(planted).ok);
  const auto res = cohomologous_to_hom_search(planted);
  REQUIRE(res.verdict == SolveResult::Verdict::Found);
  CHECK(solves(planted, res.rho, res.f));

  // a homomorphism solves for itself
  const auto hom = hom_cocycle(action, s3.group, {0, t});
  const auto res2 = cohomologous_to_hom_search(hom);
  REQUIRE(res2.verdict == SolveResult::Verdict::Found);
  CHECK(solves(hom, res2.rho, res2.f));
}

TEST_CASE("solver proves the two fixed point obstruction") {
  // trivial action, value e over one point and a over the other: any twisted
  // homomorphism is constant across fixed points, so no solution exists
  const auto action = trivial_action_c2(2);
  ActionCocycle c{action, FiniteGroupL::cyclic(2), {{0, 0}, {0, 1}}};
  REQUIRE(verify_cocycle(c).ok);
  CHECK(cohomologous_to_hom_search(c).verdict == SolveResult::Verdict::None);
  CHECK(!brute_force_solvable(c));

  // the budget verdict
  CHECK(cohomologous_to_hom_search(c, 1).verdict == SolveResult::Verdict::Cap);
}

TEST_CASE("solver agrees with brute force on random small instances") {
  std::mt19937_64 rng(471202u);
  int found = 0, none = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t npts = 2 + rng() % 4;  // up to 5 points
    const unsigned lorder = 2 + (unsigned)(rng() % 2);
    const auto L = FiniteGroupL::cyclic(lorder);
    // random involution as the generator's permutation
    std::vector<unsigned> perm(npts);
    for (std::size_t i = 0; i < npts; ++i) perm[i] = (unsigned)i;
    {
      std::vector<unsigned> pts(npts);
      for (std::size_t i = 0; i < npts; ++i) pts[i] = (unsigned)i;
      std::shuffle(pts.begin(), pts.end(), rng);
      for (std::size_t i = 0; i + 1 < npts; i += 2)
        if (rng() % 2) std::swap(perm[pts[i]], perm[pts[i + 1]]);
    }
    std::vector<unsigned> idperm(npts);
    for (std::size_t i = 0; i < npts; ++i) idperm[i] = (unsigned)i;
    const auto action = make_action(FiniteGroupL::cyclic(2), {idperm, perm});
    // a valid cocycle: free values on half of each 2-cycle, involutions on
    // fixed points
    ActionCocycle c{action, L, {std::vector<unsigned>(npts, 0), std::vector<unsigned>(npts, 0)}};
    for (std::size_t x = 0; x < npts; ++x) {
      if (perm[x] == x) {
        c.val[1][x] = lorder == 2 ? (unsigned)(rng() % 2) : 0;
      } else if (x < perm[x]) {
        const unsigned v = (unsigned)(rng() % lorder);
        c.val[1][x] = v;
        c.val[1][perm[x]] = L.inv(v);
      }
    }
    REQUIRE(verify_cocycle(c).ok);
    const auto res = cohomologous_to_hom_search(c);
    REQUIRE(res.verdict != SolveResult::Verdict::Cap);
    const bool solvable = brute_force_solvable(c);
    CHECK((res.verdict == SolveResult::Verdict::Found) == solvable);
    if (res.verdict == SolveResult::Verdict::Found) {
      CHECK(solves(c, res.rho, res.f));
      ++found;
    } else {
      ++none;
    }
  }
  // the sample must exercise both verdicts
  CHECK(found > 0);
  CHECK(none > 0);
}

TEST_CASE("choice functions order the own class first") {
  const auto cs = choice_functions({0, 0, 0, 0}, {0, 0, 1, 1});
  CHECK(cs.index_count == 2);
  // phi_0 picks the least point of the own class, phi_1 of the other
  CHECK(cs.phi[0] == std::vector<unsigned>{0, 0, 2, 2});
  CHECK(cs.phi[1] == std::vector<unsigned>{2, 2, 0, 0});

  CHECK_THROWS_AS(choice_functions({0, 0, 1, 1}, {0, 1, 2, 2}), IndexMismatch);
  CHECK_THROWS_AS(choice_functions({0, 1}, {0, 0}), ConfigInvalid);
  CHECK_THROWS_AS(choice_functions({}, {}), ConfigInvalid);
}

TEST_CASE("index cocycle on the four point example") {
  const auto cs = choice_functions({0, 0, 0, 0}, {0, 0, 1, 1});
  const auto sigma = index_cocycle(cs);
  CHECK(verify_cocycle(sigma).ok);
  const auto s2 = sym_group(2);
  const unsigned swap = s2.index_of({1, 0});
  // crossing the S-classes transposes the indices, staying inside does not
  CHECK(sigma.val[2 * 4 + 0] == swap);
  CHECK(sigma.val[1 * 4 + 0] == 0);
  CHECK(sigma.val[3 * 4 + 2] == 0);
  CHECK(sigma.val[0 * 4 + 3] == swap);
  // diagonal morphisms are units
  for (unsigned x = 0; x < 4; ++x) CHECK(sigma.val[x * 4 + x] == 0);
}

TEST_CASE("single subclass gives the constant index cocycle") {
  const auto cs = choice_functions({0, 0, 1}, {0, 0, 1});
  CHECK(cs.index_count == 1);
  const auto sigma = index_cocycle(cs);
  CHECK(verify_cocycle(sigma).ok);
  for (unsigned v : sigma.val) CHECK(v == 0);
}

TEST_CASE("index cocycle reproduces the quotient translation") {
  // C4 translating itself, subclasses by parity: crossing by an odd element
  // swaps the two indices, even elements keep them
  const auto cs = choice_functions({0, 0, 0, 0}, {0, 1, 0, 1});
  const auto sigma = index_cocycle(cs);
  CHECK(verify_cocycle(sigma).ok);
  const auto s2 = sym_group(2);
  for (unsigned gamma = 0; gamma < 4; ++gamma)
    for (unsigned x = 0; x < 4; ++x) {
      const unsigned y = (x + gamma) % 4;
      const std::vector<unsigned> expect =
          gamma % 2 == 0 ? std::vector<unsigned>{0, 1} : std::vector<unsigned>{1, 0};
      CHECK(sigma.val[y * 4 + x] == s2.index_of(expect));
    }
}

TEST_CASE("index cocycle moves by a coboundary under a change of choices") {
  const auto cs = choice_functions({0, 0, 0, 0}, {0, 0, 1, 1});
  const auto sigma = index_cocycle(cs);

  // flip the class order at odd points only
  ChoiceSystem mixed = cs;
  for (unsigned x : {1u, 3u}) std::swap(mixed.phi[0][x], mixed.phi[1][x]);
  const auto sigma2 = index_cocycle(mixed);
  CHECK(verify_cocycle(sigma2).ok);

  // the comparison permutation h(x)(i) = j when phi_i(x) and phi'_j(x) share
  // an S-class is the explicit coboundary witness
  const auto s2 = sym_group(2);
  std::vector<unsigned> h(4);
  for (unsigned x = 0; x < 4; ++x) {
    std::vector<unsigned> perm(2);
    for (unsigned i = 0; i < 2; ++i)
      for (unsigned j = 0; j < 2; ++j)
        if (cs.s_class[cs.phi[i][x]] == mixed.s_class[mixed.phi[j][x]]) perm[i] = j;
    h[x] = s2.index_of(perm);
  }
  CHECK(coboundary(h, sigma).val == sigma2.val);

  // a global class order loses the cocycle entirely
  ChoiceSystem flat = cs;
  for (unsigned x = 0; x < 4; ++x) {
    flat.phi[0][x] = 0;
    flat.phi[1][x] = 2;
  }
  const auto sigma3 = index_cocycle(flat);
  for (unsigned v : sigma3.val) CHECK(v == 0);

  // malformed systems are rejected
  ChoiceSystem broken = cs;
  broken.phi[1][0] = 0;  // misses the second class at point 0
  CHECK_THROWS_AS(index_cocycle(broken), ConfigInvalid);
}

TEST_CASE("integrated distance between maps") {
  const auto L = FiniteGroupL::cyclic(2);
  const std::vector<Rat> mu(4, Rat(1, 4));
  CHECK(tilde_distance(L, {0, 1, 0, 1}, {0, 1, 0, 1}, mu) == Rat(0));
  CHECK(tilde_distance(L, {0, 1, 0, 1}, {0, 0, 0, 0}, mu) == Rat(1, 2));

  // pointwise triangle inequality integrates
  const auto s3m = FiniteGroupL(mult_table(sym_group(3).group), s3_class_metric());
  std::mt19937_64 rng(88001u);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<unsigned> a(4), b(4), c(4);
    for (unsigned i = 0; i < 4; ++i) {
      a[i] = (unsigned)(rng() % 6);
      b[i] = (unsigned)(rng() % 6);
      c[i] = (unsigned)(rng() % 6);
    }
    CHECK(tilde_distance(s3m, a, c, mu) <=
          tilde_distance(s3m, a, b, mu) + tilde_distance(s3m, b, c, mu));
  }

  CHECK_THROWS_AS(tilde_distance(L, {0}, {0, 1}, mu), ConfigInvalid);
  CHECK_THROWS_AS(tilde_distance(L, {0, 0}, {0, 0}, {Rat(1, 2), Rat(1, 4)}), ConfigInvalid);
}

TEST_CASE("sampled distance reports a standard error") {
  const auto L = FiniteGroupL::cyclic(2);
  const auto same = tilde_distance_mc(L, [](std::uint64_t) { return std::pair<unsigned, unsigned>{1, 1}; }, 64);
  CHECK(same.value == 0.0);
  CHECK(same.std_error == 0.0);

  const auto draw = [](std::uint64_t i) {
    return std::pair<unsigned, unsigned>{0, i % 2 == 0 ? 1u : 0u};
  };
  const auto est = tilde_distance_mc(L, draw, 100);
  CHECK(est.value == doctest::Approx(0.5));
  CHECK(est.std_error == doctest::Approx(0.5 / std::sqrt(99.0)));
  // index-driven draws make reruns identical
  const auto again = tilde_distance_mc(L, draw, 100);
  CHECK(again.value == est.value);
  CHECK(again.std_error == est.std_error);
  CHECK_THROWS_AS(tilde_distance_mc(L, draw, 0), ConfigInvalid);
}

TEST_CASE("cocycle json round trips") {
  const auto s3 = sym_group(3);
  const auto withm = FiniteGroupL(mult_table(s3.group), s3_class_metric());
  const auto gj = to_json(withm);
  CHECK(finite_group_from_json(gj) == withm);
  const auto plain = FiniteGroupL::cyclic(3);
  CHECK(finite_group_from_json(to_json(plain)) == plain);
  CHECK_THROWS_AS(finite_group_from_json(nlohmann::json::array()), ConfigInvalid);

  const auto action = swap_action_c2();
  const auto hom = hom_cocycle(action, FiniteGroupL::cyclic(2), {0, 1});
  const auto back = action_cocycle_from_json(to_json(hom));
  CHECK(back.val == hom.val);
  CHECK(back.action.act == hom.action.act);

  const auto cs = choice_functions({0, 0, 0, 0}, {0, 0, 1, 1});
  const auto sigma = index_cocycle(cs);
  const auto sback = groupoid_cocycle_from_json(to_json(sigma));
  CHECK(sback.val == sigma.val);
  CHECK(sback.domain == sigma.domain);
  auto busted = to_json(sigma);
  busted["val"].push_back(0);
  CHECK_THROWS_AS(groupoid_cocycle_from_json(busted), ConfigInvalid);
}
