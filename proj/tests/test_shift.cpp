#include <cmath>
#include <random>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/finitary.hpp"
#include "mgt/parallel.hpp"
#include "mgt/shift.hpp"

using namespace mgt;

namespace {

AlphabetPtr bin2() { return Alphabet::uniform(2); }

AlphabetPtr bin2_with_swap() {
  auto c2 = Group::cyclic(2, "u");
  return bin2()->with_lamp_action(c2, {{0, 1}, {1, 0}});
}

}  // namespace

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet::uniform(1), ConfigInvalid);
  CHECK_THROWS_AS(Alphabet::weighted({"x", "y"}, {Rat(1, 3), Rat(1, 3)}), ConfigInvalid);
  CHECK_THROWS_AS(Alphabet::weighted({"x", "x"}, {Rat(1, 2), Rat(1, 2)}), ConfigInvalid);
  auto a = Alphabet::weighted({"x", "y", "z"}, {Rat(1, 2), Rat(1, 3), Rat(1, 6)});
  CHECK(a->size() == 3);
}

TEST_CASE("sampling cut points are exact") {
  auto a = Alphabet::weighted({"x", "y"}, {Rat(1, 3), Rat(2, 3)});
  // floor(2^64 / 3)
  const std::uint64_t cut = 6148914691236517205ull;
  CHECK(a->sample(0) == 0);
  CHECK(a->sample(cut - 1) == 0);
  CHECK(a->sample(cut) == 1);
  CHECK(a->sample(~0ull) == 1);
  auto u2 = bin2();
  CHECK(u2->sample((1ull << 63) - 1) == 0);
  CHECK(u2->sample(1ull << 63) == 1);
}

TEST_CASE("lamp actions must be free homomorphisms") {
  auto c2 = Group::cyclic(2, "u");
  CHECK_THROWS_AS(bin2()->with_lamp_action(c2, {{0, 1}, {0, 1}}), ActionInvalid);
  CHECK_THROWS_AS(bin2()->with_lamp_action(c2, {{1, 0}, {0, 1}}), ActionInvalid);
  auto a = bin2_with_swap();
  auto u = c2->cyclic_element(1);
  CHECK(a->act(u, 0) == 1);
  CHECK(a->act(c2->identity(), 0) == 0);
  CHECK(a->lamp_witness(0, 1).value() == u);
  CHECK(a->lamp_witness(1, 1).value().is_identity());
  // order 4 rotation on a 2-symbol alphabet cannot act freely
  auto c4 = Group::cyclic(4, "r");
  CHECK_THROWS_AS(bin2()->with_lamp_action(c4, {{0, 1}, {1, 0}, {0, 1}, {1, 0}}),
                  ActionInvalid);
}

TEST_CASE("seeded configurations are deterministic and seed-sensitive") {
  auto f2 = Group::free_group(2);
  auto y = Configuration::seeded_iid(f2, bin2(), 42);
  auto y2 = Configuration::seeded_iid(f2, bin2(), 42);
  auto z = Configuration::seeded_iid(f2, bin2(), 43);
  bool differs = false;
  for (const auto& g : f2->ball(3)) {
    CHECK(y.eval(g) == y2.eval(g));
    differs = differs || (y.eval(g) != z.eval(g));
  }
  CHECK(differs);
  CHECK(y == y2);
  CHECK(!(y == z));
}

TEST_CASE("shift acts on the left") {
  auto f2 = Group::free_group(2);
  auto y = Configuration::seeded_iid(f2, bin2(), 1);
  auto d = f2->parse_word("a*b^-1");
  auto sy = y.shift(d);
  for (const auto& g : f2->ball(3)) CHECK(sy.eval(g) == y.eval(d.inverse() * g));
  // composing shifts multiplies on the left
  auto h = f2->parse_word("b^2");
  CHECK(sy.shift(h) == y.shift(h * d));
  CHECK(y.shift(d).shift(d.inverse()) == y);
}

TEST_CASE("patch normalization") {
  auto f2 = Group::free_group(2);
  auto y = Configuration::seeded_iid(f2, bin2(), 9);
  auto c = f2->parse_word("a");
  // writing the value already present is a no-op
  CHECK(y.patched({{c, y.eval(c)}}) == y);
  auto flipped = y.patched({{c, 1 - y.eval(c)}});
  CHECK(flipped.eval(c) == 1 - y.eval(c));
  CHECK(!(flipped == y));
  // writing it back erases the patch
  CHECK(flipped.patched({{c, y.eval(c)}}) == y);
  // patches ride along with shifts
  auto d = f2->parse_word("b");
  auto moved = flipped.shift(d);
  CHECK(moved.eval(d * c) == flipped.eval(c));
  CHECK(moved == y.shift(d).patched({{d * c, flipped.eval(c)}}));
}

TEST_CASE("lamp moves flip exactly their support") {
  auto f2 = Group::free_group(2);
  auto alpha = bin2_with_swap();
  auto c2 = alpha->lamp_group();
  auto y = Configuration::seeded_iid(f2, alpha, 3);
  auto ds = Group::direct_sum(c2, f2);
  auto u = c2->cyclic_element(1);
  auto p1 = f2->parse_word("a");
  auto p2 = f2->parse_word("b^-1*a");
  auto b = ds->sum_element({{p1, u}, {p2, u}});
  auto z = y.lamp(b);
  for (const auto& g : f2->ball(3)) {
    if (g == p1 || g == p2)
      CHECK(z.eval(g) == 1 - y.eval(g));
    else
      CHECK(z.eval(g) == y.eval(g));
  }
  // involutive move
  CHECK(z.lamp(b) == y);
}

TEST_CASE("wreath moves satisfy the lamplighter relation") {
  auto f2 = Group::free_group(2);
  auto alpha = bin2_with_swap();
  auto c2 = alpha->lamp_group();
  auto wr = Group::wreath(c2, f2);
  auto y = Configuration::seeded_iid(f2, alpha, 17);

  std::mt19937_64 rng(23);
  auto gens = wr->generators();
  std::vector<Element> moves;
  for (const auto& g : gens) {
    moves.push_back(g);
    moves.push_back(g.inverse());
  }
  auto rand_w = [&] {
    Element acc = wr->identity();
    for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i)
      acc = acc * moves[rng() % moves.size()];
    return acc;
  };
  for (int it = 0; it < 40; ++it) {
    Element w1 = rand_w(), w2 = rand_w();
    // group action: (w1 w2).y == w1.(w2.y)
    auto lhs = y.wreath_act(w1 * w2);
    auto rhs = y.wreath_act(w2).wreath_act(w1);
    for (const auto& g : f2->ball(2)) CHECK(lhs.eval(g) == rhs.eval(g));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("cofinite diff is exact for comparable backends") {
  auto f2 = Group::free_group(2);
  auto alpha = bin2_with_swap();
  auto y = Configuration::seeded_iid(f2, alpha, 5);
  auto c1 = f2->parse_word("a");
  auto c2e = f2->parse_word("b*a^-1");
  auto z = y.patched({{c1, 1 - y.eval(c1)}, {c2e, 1 - y.eval(c2e)}});
  auto d = cofinite_diff(y, z, 0, true);
  CHECK(d.exact);
  REQUIRE(d.entries.size() == 2);
  for (const auto& e : d.entries) {
    CHECK(e.sym0 == 1 - e.sym1);
    REQUIRE(e.lamp_witness.has_value());
    CHECK(!e.lamp_witness->is_identity());
  }
  // same seed, same net translation, one side built by a detour
  auto t = f2->parse_word("a^2");
  auto w1 = y.shift(t);
  auto w2 = y.shift(f2->parse_word("a")).shift(f2->parse_word("a"));
  auto dd = cofinite_diff(w1, w2, 0, true);
  CHECK(dd.exact);
  CHECK(dd.entries.empty());
}

TEST_CASE("cofinite diff falls back to a radius sweep") {
  auto f2 = Group::free_group(2);
  auto y = Configuration::seeded_iid(f2, bin2(), 5);
  auto z = Configuration::seeded_iid(f2, bin2(), 6);
  CHECK_THROWS_AS(cofinite_diff(y, z, 2, true), IncomparableBackends);
  auto d = cofinite_diff(y, z, 2, false);
  CHECK(!d.exact);
  bool some = !d.entries.empty();
  CHECK(some);  // 2^-17 chance of a false alarm, fixed seeds
  // incomparable also when the net translations differ
  auto s1 = y.shift(f2->parse_word("a"));
  CHECK_THROWS_AS(cofinite_diff(y, s1, 2, true), IncomparableBackends);
}

TEST_CASE("entropy formulas") {
  CHECK(shannon_entropy(*bin2()) == std::log(2.0));
  auto a = Alphabet::weighted({"x", "y", "z", "w"},
                              {Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)});
  CHECK(shannon_entropy(*a) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(empirical_entropy({500, 500}) == std::log(2.0));
  CHECK(empirical_entropy({1000, 0}) == 0.0);
  CHECK_THROWS_AS(empirical_entropy({0, 0}), ConfigInvalid);
}

TEST_CASE("cylinder frequencies of an iid source") {
  auto z = Group::free_group(1, {"t"});
  auto t = z->parse_word("t");
  std::vector<Element> window = {z->identity(), t};
  auto rep = cylinder_frequency(nullptr, z, bin2(), window, 20000, 77);
  CHECK(rep.samples_ok == 20000);
  CHECK(rep.samples_skipped == 0);
  REQUIRE(rep.counts.size() == 4);
  std::uint64_t total = 0;
  for (auto c : rep.counts) total += c;
  CHECK(total == 20000);
  for (int p = 0; p < 4; ++p) {
    CHECK(rep.expected[p] == Rat(1, 4));
    double freq = static_cast<double>(rep.counts[p]) / 20000.0;
    CHECK(std::abs(freq - 0.25) < 0.02);
  }
}

TEST_CASE("cylinder counts do not depend on the worker count") {
  auto z = Group::free_group(1, {"t"});
  std::vector<Element> window = {z->identity(), z->parse_word("t^2")};
  set_thread_count(1);
  auto r1 = cylinder_frequency(nullptr, z, bin2(), window, 10000, 5);
  set_thread_count(8);
  auto r8 = cylinder_frequency(nullptr, z, bin2(), window, 10000, 5);
  set_thread_count(0);
  CHECK(r1.counts == r8.counts);
  CHECK(r1.samples_skipped == r8.samples_skipped);
}
