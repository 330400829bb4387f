#include <functional>
#include <random>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/lift.hpp"

using namespace mgt;

namespace {

GroupPtr zz() {
  return Group::free_product({Group::free_group(1, {"a"}), Group::free_group(1, {"b"})});
}
AlphabetPtr bin2() { return Alphabet::uniform(2); }

// Test-local reference path: split gamma = s * a^k with s ending in a
// b-syllable (or empty), by direct syllable surgery.
std::pair<Element, long long> split_tail(const GroupPtr& g, const Element& x) {
  const auto* d = x.prod();
  if (d->syl.empty()) return {g->identity(), 0};
  const auto& last = d->syl.back();
  if (last.factor != 0) return {x, 0};
  long long k = last.e.free_data()->syl[0].exp;
  Element prefix = g->identity();
  for (std::size_t i = 0; i + 1 < d->syl.size(); ++i)
    prefix = prefix * g->product_syllable(d->syl[i].factor, d->syl[i].e);
  return {prefix, k};
}

// Test-local adding machine on a coordinate reader, no library code.
unsigned ref_odometer(const std::function<unsigned(long long)>& x, long long k) {
  if (k < 0) return x(k);
  for (long long j = 0; j <= k; ++j)
    if (x(j) == 0) return j == k ? 1u : x(k);
  return 0;
}

}  // namespace

TEST_CASE("lifted odometer matches the direct formula") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto odo = odometer_map(sch.subgroup(), bin2());
  auto lifted = lift(sch, odo);
  CHECK(lifted->group()->same_as(*g));
  auto a = g->parse_word("a");
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto y = Configuration::seeded_iid(g, bin2(), seed);
    auto img = Configuration::mapped(lifted, y);
    for (const auto& gamma : g->ball(4)) {
      auto [s, k] = split_tail(g, gamma);
      auto fiber = [&](long long j) { return y.eval(s * a.pow(j)); };
      CHECK(img.eval(gamma) == ref_odometer(fiber, k));
    }
  }
}

TEST_CASE("lifting the identity changes nothing") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, identity_map(sch.subgroup(), bin2()));
  auto y = Configuration::seeded_iid(g, bin2(), 2);
  auto img = Configuration::mapped(lifted, y);
  for (const auto& gamma : g->ball(4)) CHECK(img.eval(gamma) == y.eval(gamma));
  CHECK(lifted->always_equivariant());
  CHECK(lifted->defect(g->parse_word("a*b"), y.reader()).empty());
}

TEST_CASE("lifted inverse undoes the lifted map") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), bin2()));
  auto inv = lifted->inverse();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto y = Configuration::seeded_iid(g, bin2(), seed);
    auto back = Configuration::mapped(inv, Configuration::mapped(lifted, y));
    for (const auto& gamma : g->ball(4)) CHECK(back.eval(gamma) == y.eval(gamma));
  }
}

TEST_CASE("transported defect equals the observed disagreement set") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), bin2()));
  REQUIRE(lifted->exact_defect_supported());
  std::vector<Element> deltas = {g->parse_word("a"),   g->parse_word("a^-1"),
                                 g->parse_word("b"),   g->parse_word("a*b"),
                                 g->parse_word("b*a^-1")};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto y = Configuration::seeded_iid(g, bin2(), seed);
    for (const auto& delta : deltas) {
      auto predicted = lifted->defect(delta, y.reader());
      auto lhs = Configuration::mapped(lifted, y.shift(delta));
      auto rhs = Configuration::mapped(lifted, y).shift(delta);
      std::vector<Element> brute;
      for (const auto& c : g->ball(5))
        if (lhs.eval(c) != rhs.eval(c)) brute.push_back(c);
      sort_unique(brute);
      std::vector<Element> pred_in_ball;
      for (const auto& p : predicted)
        if (p.word_length() <= 5) pred_in_ball.push_back(p);
      CHECK(pred_in_ball == brute);
    }
  }
}

TEST_CASE("defect under subgroup translations is confined to the subgroup") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), bin2()));
  auto y = Configuration::seeded_iid(g, bin2(), 6);
  auto d = lifted->defect(g->parse_word("a^2"), y.reader());
  CHECK(!d.empty());
  for (const auto& c : d) CHECK(sch.in_subgroup(c));
  // translations from the complementary factor are defect-free
  CHECK(lifted->defect(g->parse_word("b^2"), y.reader()).empty());
}

TEST_CASE("equivariance report") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), bin2()));
  auto y = Configuration::seeded_iid(g, bin2(), 9);
  auto rep = verify_cofinite_equivariance(lifted, g->parse_word("a"), y, 6);
  CHECK(rep.checked == g->ball(6).size());
  CHECK(rep.has_predicted);
  CHECK(rep.match);
  CHECK(!rep.disagreements.empty());
  CHECK(!rep.by_coset.empty());
  // every reported coset holds its own disagreements
  for (const auto& [s, coords] : rep.by_coset)
    for (const auto& c : coords) CHECK(sch.rep(c) == s);
}

TEST_CASE("tower of lifts along nested subgroups") {
  auto g = zz();
  auto s0 = CosetSchema::free_factor(g, {0});
  auto s1 = CosetSchema::cyclic_index(s0.subgroup(), 2);
  auto odo = odometer_map(s1.subgroup(), bin2());
  auto tower = tower_lift({s1, s0}, odo);
  CHECK(tower->group()->same_as(*g));
  CHECK(tower->exact_defect_supported());

  // reference: apply the adding machine along even powers of a in each coset
  auto a = g->parse_word("a");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto y = Configuration::seeded_iid(g, bin2(), seed);
    auto img = Configuration::mapped(tower, y);
    for (const auto& gamma : g->ball(4)) {
      auto [s, k] = split_tail(g, gamma);
      long long parity = ((k % 2) + 2) % 2;
      auto fiber = [&](long long j) { return y.eval(s * a.pow(2 * j + parity)); };
      CHECK(img.eval(gamma) == ref_odometer(fiber, (k - parity) / 2));
    }
  }

  // the transported defect stays exact through both layers
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto y = Configuration::seeded_iid(g, bin2(), seed);
    for (const auto& delta : {g->parse_word("a"), g->parse_word("b*a")}) {
      auto predicted = tower->defect(delta, y.reader());
      auto lhs = Configuration::mapped(tower, y.shift(delta));
      auto rhs = Configuration::mapped(tower, y).shift(delta);
      std::vector<Element> brute;
      for (const auto& c : g->ball(5))
        if (lhs.eval(c) != rhs.eval(c)) brute.push_back(c);
      sort_unique(brute);
      std::vector<Element> pred_in_ball;
      for (const auto& p : predicted)
        if (p.word_length() <= 5) pred_in_ball.push_back(p);
      CHECK(pred_in_ball == brute);
    }
  }
}

TEST_CASE("lift validation") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto wrong = odometer_map(Group::free_group(1, {"t"}), bin2());
  CHECK_THROWS_AS(lift(sch, wrong), GroupMismatch);
  auto odo = odometer_map(sch.subgroup(), bin2());
  CHECK_THROWS_AS(tower_lift({}, odo), ConfigInvalid);
  CHECK_THROWS_AS(tower_lift({CosetSchema::cyclic_index(Group::free_group(1, {"t"}), 2)},
                             odo),
                  ChainMismatch);
}

TEST_CASE("lifted coordinatewise maps stay transparent in compositions") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lodo = lift(sch, odometer_map(sch.subgroup(), bin2()));
  auto lflip = lift(sch, coordinatewise_bijection(sch.subgroup(), bin2(), bin2(), {1, 0}));
  CHECK(lflip->coordinatewise());
  CHECK(lflip->always_equivariant());
  auto chain = compose({lflip, lodo});
  CHECK(chain->exact_defect_supported());
  auto y = Configuration::seeded_iid(g, bin2(), 4);
  auto delta = g->parse_word("a");
  CHECK(chain->defect(delta, y.reader()) == lodo->defect(delta, y.reader()));
}

TEST_CASE("wrong alphabet or group is rejected at the boundary") {
  auto g = zz();
  auto sch = CosetSchema::free_factor(g, {0});
  auto lifted = lift(sch, odometer_map(sch.subgroup(), bin2()));
  auto tri = Alphabet::uniform(3);
  auto y3 = Configuration::seeded_iid(g, tri, 0);
  CHECK_THROWS_AS(Configuration::mapped(lifted, y3), ConfigInvalid);
  auto other = Group::free_group(2);
  auto yo = Configuration::seeded_iid(other, bin2(), 0);
  CHECK_THROWS_AS(predicted_defect(*lifted, other->parse_word("a"), yo), MixedGroups);
}
