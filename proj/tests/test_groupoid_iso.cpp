#include <algorithm>
#include <set>

#include "doctest.h"

#include "mgt/errors.hpp"
#include "mgt/group.hpp"
#include "mgt/groupoid.hpp"

using namespace mgt;

namespace {

std::vector<Rat> uniform(std::size_t n) { return std::vector<Rat>(n, Rat(1, (long long)n)); }

FiniteGroupoid swap_action() {
  auto c2 = Group::cyclic(2);
  const std::size_t e = c2->element_index(c2->identity());
  std::vector<std::vector<unsigned>> act(2);
  act[e] = {0, 1};
  act[1 - e] = {1, 0};
  return FiniteGroupoid::action_groupoid(c2, act, uniform(2));
}

// the lamplighter group C2 wr C2 acting on {0,1} x {0,1}^{C2}, points
// coded as x + 2*f_e + 4*f_s
FiniteGroupoid lamplighter_action() {
  auto lampg = Group::cyclic(2, "u");
  auto topg = Group::cyclic(2, "t");
  auto w = Group::wreath(lampg, topg);
  const auto tops = topg->elements();
  const Element te = topg->identity();
  const Element ts = tops[0] == te ? tops[1] : tops[0];
  const auto elems = w->elements();
  REQUIRE(elems.size() == 8);
  std::vector<std::vector<unsigned>> act(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto* wd = elems[i].wreath_data();
    REQUIRE(wd != nullptr);
    const bool shift = !wd->top.is_identity();
    act[i].resize(8);
    for (unsigned p = 0; p < 8; ++p) {
      const unsigned x = p & 1u;
      const unsigned fe = (p >> 1) & 1u;
      const unsigned fs = (p >> 2) & 1u;
      const unsigned nx = shift ? 1u - x : x;
      // (b t).f at position c reads f at t^-1 c, then adds b_c
      unsigned ne = shift ? fs : fe;
      unsigned ns = shift ? fe : fs;
      if (!elems[i].lamp_value(te).is_identity()) ne ^= 1u;
      if (!elems[i].lamp_value(ts).is_identity()) ns ^= 1u;
      act[i][p] = nx + 2 * ne + 4 * ns;
    }
  }
  return FiniteGroupoid::action_groupoid(w, act, uniform(8));
}

}  // namespace

TEST_CASE("iso search finds the identity first") {
  const auto g = FiniteGroupoid::full_relation(3);
  const auto res = iso_search(g, g);
  REQUIRE(res.verdict == IsoResult::Verdict::Isomorphic);
  for (unsigned x = 0; x < 3; ++x) CHECK(res.object_map[x] == x);
  for (unsigned m = 0; m < 9; ++m) CHECK(res.morphism_map[m] == m);
  CHECK(verify_iso(g, g, res.object_map, res.morphism_map));
}

TEST_CASE("iso search matches weights lexicographically") {
  const auto a =
      FiniteGroupoid::from_partition({0, 0, 1}, {Rat(1, 4), Rat(1, 4), Rat(1, 2)});
  const auto b =
      FiniteGroupoid::from_partition({0, 1, 1}, {Rat(1, 2), Rat(1, 4), Rat(1, 4)});
  const auto res = iso_search(a, b);
  REQUIRE(res.verdict == IsoResult::Verdict::Isomorphic);
  CHECK(res.object_map == std::vector<unsigned>{1, 2, 0});
  CHECK(verify_iso(a, b, res.object_map, res.morphism_map));
}

TEST_CASE("iso search distinguishes non-isomorphic groupoids") {
  const auto a =
      FiniteGroupoid::from_partition({0, 0, 1}, {Rat(1, 4), Rat(1, 4), Rat(1, 2)});
  const auto b = FiniteGroupoid::from_partition({0, 0, 1}, uniform(3));
  CHECK(iso_search(a, b).verdict == IsoResult::Verdict::NotIsomorphic);

  // same counts, but one has isotropy: C2 acting on 4 points by (01) vs by (01)(23)
  auto c2 = Group::cyclic(2);
  const std::size_t e = c2->element_index(c2->identity());
  std::vector<std::vector<unsigned>> fix(2), part(2);
  fix[e] = {0, 1, 2, 3};
  fix[1 - e] = {1, 0, 2, 3};
  part[e] = {0, 1, 2, 3};
  part[1 - e] = {1, 0, 3, 2};
  const auto with_isotropy = FiniteGroupoid::action_groupoid(c2, fix, uniform(4));
  const auto principal = FiniteGroupoid::action_groupoid(c2, part, uniform(4));
  CHECK(with_isotropy.n_morphisms() == principal.n_morphisms());
  CHECK(iso_search(with_isotropy, principal).verdict == IsoResult::Verdict::NotIsomorphic);
  // and the principal one is exactly the orbit relation
  const auto res = iso_search(principal, FiniteGroupoid::from_partition({0, 0, 1, 1}, uniform(4)));
  CHECK(res.verdict == IsoResult::Verdict::Isomorphic);
}

TEST_CASE("iso search respects the node budget") {
  const auto g = FiniteGroupoid::full_relation(5);
  const auto res = iso_search(g, g, 10);
  CHECK(res.verdict == IsoResult::Verdict::NodeCap);
  CHECK(res.nodes >= 10);
}

TEST_CASE("wreath of swap actions is the lamplighter action") {
  const auto base = swap_action();
  const auto w = wreath_groupoid(base, base);
  REQUIRE(w.sd.groupoid.n_morphisms() == 64);
  REQUIRE(w.sd.groupoid.n_objects() == 8);
  REQUIRE(validate(w.sd.groupoid).ok);

  const auto ll = lamplighter_action();
  REQUIRE(ll.n_morphisms() == 64);
  REQUIRE(validate(ll).ok);

  const auto res = iso_search(w.sd.groupoid, ll);
  REQUIRE(res.verdict == IsoResult::Verdict::Isomorphic);
  CHECK(verify_iso(w.sd.groupoid, ll, res.object_map, res.morphism_map));
}

TEST_CASE("fiber maps assemble into wreath isomorphisms") {
  const auto f2 = FiniteGroupoid::full_relation(2);
  const auto w = wreath_groupoid(f2, f2);
  const unsigned nb = f2.n_morphisms();

  // identity on every fiber
  std::vector<std::vector<unsigned>> phi(nb);
  for (unsigned g = 0; g < nb; ++g) {
    const auto& fib = w.fiber_sum[f2.source(g)].groupoid;
    phi[g].resize(fib.n_morphisms());
    for (unsigned h = 0; h < fib.n_morphisms(); ++h) phi[g][h] = h;
  }
  auto iso = wreath_iso_from_fiber_maps(w, w, phi);
  CHECK(iso.bijective);
  CHECK(iso.checked_pairs > 0);
  for (unsigned m = 0; m < w.sd.groupoid.n_morphisms(); ++m) CHECK(iso.morphism_map[m] == m);

  // relabel the lamp by the point swap of the full relation, coordinatewise:
  // on each factor (i<-j) becomes (pi(i)<-pi(j)) with pi = (0 1)
  const auto relabel_one = [&](unsigned m) {
    const unsigned i = f2.range(m), j = f2.source(m);
    return (1u - i) * 2u + (1u - j);
  };
  for (unsigned g = 0; g < nb; ++g) {
    const auto& sum = w.fiber_sum[f2.source(g)];
    for (unsigned h = 0; h < sum.groupoid.n_morphisms(); ++h) {
      auto t = sum.morphism_tuple[h];
      for (auto& c : t) c = relabel_one(c);
      phi[g][h] = sum.encode_morphism(t);
    }
  }
  iso = wreath_iso_from_fiber_maps(w, w, phi);
  CHECK(iso.bijective);
  CHECK(verify_iso(w.sd.groupoid, w.sd.groupoid, iso.object_map, iso.morphism_map));

  // breaking one fiber map is caught with a witness
  std::swap(phi[0][1], phi[0][2]);
  CHECK_THROWS_AS(wreath_iso_from_fiber_maps(w, w, phi), NotHomomorphism);

  // shape errors
  phi.pop_back();
  CHECK_THROWS_AS(wreath_iso_from_fiber_maps(w, w, phi), ConfigInvalid);
  const auto other = wreath_groupoid(f2, swap_action());
  CHECK_THROWS_AS(wreath_iso_from_fiber_maps(w, other, phi), ConfigInvalid);
}

TEST_CASE("restriction claim on the two point relation") {
  const auto g2 = FiniteGroupoid::full_relation(2);
  const auto lamp = FiniteGroupoid::unit_groupoid(uniform(2));
  // two bisections landing on object 0: the unit and (0<-1)
  const std::vector<std::vector<unsigned>> sigma{{0}, {1}};
  std::vector<unsigned> psi{0, 1, 2, 3};
  const auto claim = restriction_claim_iso(lamp, g2, {0}, sigma, psi, 4);
  CHECK(claim.equivariant);
  CHECK(claim.bijective);
  CHECK(claim.checked > 0);

  // a constant pairing map is still equivariant here but not bijective
  const auto flat = restriction_claim_iso(lamp, g2, {0}, sigma, {0, 0, 0, 0}, 4);
  CHECK(!flat.bijective);
}

TEST_CASE("restriction claim with a nontrivial restricted base") {
  const auto g4 = FiniteGroupoid::full_relation(4);
  const auto lamp = FiniteGroupoid::unit_groupoid(uniform(2));
  // index two: d = {0,1}, partner points {2,3} reached by sigma_1
  const std::vector<std::vector<unsigned>> sigma{
      {g4.unit(0), g4.unit(1)}, {0 * 4 + 2, 1 * 4 + 3}};
  const auto claim = restriction_claim_iso(lamp, g4, {0, 1}, sigma, {0, 1, 2, 3}, 4);
  CHECK(claim.equivariant);
  CHECK(claim.bijective);
}

TEST_CASE("restriction claim input contracts") {
  const auto g2 = FiniteGroupoid::full_relation(2);
  const auto lamp = FiniteGroupoid::unit_groupoid(uniform(2));
  const std::vector<std::vector<unsigned>> sigma{{0}, {1}};
  // wrong index: one bisection for a mass-1/2 domain
  CHECK_THROWS_AS(restriction_claim_iso(lamp, g2, {0}, {{0}}, {0, 1}, 2), BadPartition);
  // sources overlap: both bisections start at object 0
  CHECK_THROWS_AS(restriction_claim_iso(lamp, g2, {0}, {{0}, {0}}, {0, 1, 2, 3}, 4),
                  BadPartition);
  // range outside d
  CHECK_THROWS_AS(restriction_claim_iso(lamp, g2, {0}, {{0}, {3}}, {0, 1, 2, 3}, 4),
                  BadBisection);
  // not a bisection at all: both sections of sigma_1 land on object 0
  const auto g4 = FiniteGroupoid::full_relation(4);
  CHECK_THROWS_AS(restriction_claim_iso(lamp, g4, {0, 1},
                                        {{g4.unit(0), g4.unit(1)}, {0 * 4 + 2, 0 * 4 + 3}},
                                        {0, 1, 2, 3}, 4),
                  BadBisection);
  // psi must land inside the declared target
  CHECK_THROWS_AS(restriction_claim_iso(lamp, g2, {0}, sigma, {0, 9, 2, 3}, 4), ConfigInvalid);
}

TEST_CASE("restricting a wreath to a one point base leaves the fiber") {
  const auto f2 = FiniteGroupoid::full_relation(2);
  const auto lamp = FiniteGroupoid::unit_groupoid(uniform(2));
  const auto w = wreath_groupoid(lamp, f2);
  // objects over base point 0 come first in the semidirect numbering
  std::vector<unsigned> over0;
  for (unsigned x = 0; x < w.sd.groupoid.n_objects(); ++x)
    if (w.sd.object_pair[x].first == 0) over0.push_back(x);
  REQUIRE(over0.size() == 4);
  const auto r = restrict_to(w.sd.groupoid, over0);
  CHECK(r.groupoid == FiniteGroupoid::unit_groupoid(uniform(4)));
}
