#include <random>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/finitary.hpp"
#include "mgt/shift.hpp"

using namespace mgt;

namespace {

GroupPtr zgrp() { return Group::free_group(1, {"a"}); }
AlphabetPtr bin2() { return Alphabet::uniform(2); }

// Configuration holding the binary expansion of n at positions 0..len-1 over
// a constant-zero background, so the whole point encodes the integer n.
Configuration int_config(const GroupPtr& z, std::uint64_t n, int len) {
  auto y = Configuration::constant(z, bin2(), 0);
  std::vector<std::pair<Element, unsigned>> patch;
  auto a = z->parse_word("a");
  for (int k = 0; k < len; ++k)
    patch.push_back({a.pow(k), static_cast<unsigned>((n >> k) & 1)});
  return y.patched(patch);
}

std::uint64_t read_int(const Configuration& y, int len) {
  std::uint64_t n = 0;
  auto a = y.group()->parse_word("a");
  for (int k = 0; k < len; ++k)
    n |= static_cast<std::uint64_t>(y.eval(a.pow(k))) << k;
  return n;
}

}  // namespace

TEST_CASE("odometer adds one") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  for (std::uint64_t n = 0; n < 300; ++n) {
    auto y = int_config(z, n, 12);
    auto img = Configuration::mapped(odo, y);
    CHECK(read_int(img, 12) == n + 1);
  }
  // negative coordinates pass through untouched
  auto y = Configuration::seeded_iid(z, bin2(), 4);
  auto img = Configuration::mapped(odo, y);
  auto a = z->parse_word("a");
  for (int k = -6; k < 0; ++k) CHECK(img.eval(a.pow(k)) == y.eval(a.pow(k)));
}

TEST_CASE("odometer inverse subtracts one") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  auto dec = odo->inverse();
  for (std::uint64_t n = 1; n < 300; ++n) {
    auto y = int_config(z, n, 12);
    auto img = Configuration::mapped(dec, y);
    CHECK(read_int(img, 12) == n - 1);
  }
  // round trips on random points
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto y = Configuration::seeded_iid(z, bin2(), seed);
    auto back = Configuration::mapped(dec, Configuration::mapped(odo, y));
    auto a = z->parse_word("a");
    for (int k = -8; k <= 40; ++k) CHECK(back.eval(a.pow(k)) == y.eval(a.pow(k)));
  }
}

TEST_CASE("odometer refuses unbounded carries") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  auto ones = Configuration::constant(z, bin2(), 1);
  auto img = Configuration::mapped(odo, ones);
  auto a = z->parse_word("a");
  // small coordinates are fine: the scan stops at the coordinate itself
  CHECK(img.eval(z->identity()) == 0);
  CHECK(img.eval(a.pow(10)) == 0);
  CHECK_THROWS_AS(img.eval(a.pow(80)), NonFinitaryAtPoint);
  CHECK_THROWS_AS(odo->defect(a, ones.reader()), NonFinitaryAtPoint);
  // a tighter cap trips earlier
  auto odo8 = odometer_map(z, bin2(), 8);
  auto img8 = Configuration::mapped(odo8, ones);
  CHECK_THROWS_AS(img8.eval(a.pow(20)), NonFinitaryAtPoint);
}

TEST_CASE("odometer defect matches a brute-force scan") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  auto a = z->parse_word("a");
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto y = Configuration::seeded_iid(z, bin2(), seed);
    for (int t : {1, -1, 2, -3, 5}) {
      auto delta = a.pow(t);
      auto predicted = odo->defect(delta, y.reader());
      // brute force over a generous window
      std::vector<Element> brute;
      auto shifted = y.shift(delta);
      auto lhs = Configuration::mapped(odo, shifted);
      auto rhs = Configuration::mapped(odo, y).shift(delta);
      for (int k = -75; k <= 75; ++k) {
        auto c = a.pow(k);
        if (lhs.eval(c) != rhs.eval(c)) brute.push_back(c);
      }
      sort_unique(brute);
      CHECK(predicted == brute);
    }
  }
}

TEST_CASE("coordinatewise bijections") {
  auto z = zgrp();
  auto flip = coordinatewise_bijection(z, bin2(), bin2(), {1, 0});
  auto y = Configuration::seeded_iid(z, bin2(), 8);
  auto img = Configuration::mapped(flip, y);
  for (const auto& g : z->ball(5)) CHECK(img.eval(g) == 1 - y.eval(g));
  CHECK(flip->defect(z->parse_word("a^3"), y.reader()).empty());
  CHECK(flip->always_equivariant());
  CHECK(flip->coordinatewise());
  // mismatched weights are rejected
  auto skew = Alphabet::weighted({"p", "q"}, {Rat(1, 3), Rat(2, 3)});
  CHECK_THROWS_AS(coordinatewise_bijection(z, skew, skew, {1, 0}), NotMeasurePreserving);
}

TEST_CASE("block scramble permutes window patterns") {
  auto z = zgrp();
  auto a = z->parse_word("a");
  std::vector<Element> window = {z->identity(), a};
  // swap the two mixed patterns 01 and 10, keep 00 and 11
  auto scr = block_scramble_map(z, bin2(), window, {0, 2, 1, 3});
  auto y0 = Configuration::constant(z, bin2(), 0).patched({{a, 1}});  // e:0 a:1
  auto img = Configuration::mapped(scr, y0);
  CHECK(img.eval(z->identity()) == 1);
  CHECK(img.eval(a) == 0);
  CHECK(img.eval(a.pow(2)) == 0);   // untouched off the window
  CHECK(img.eval(a.pow(-1)) == 0);
  // involution here, so inverse equals itself pointwise
  auto back = Configuration::mapped(scr->inverse(), img);
  for (int k = -3; k <= 4; ++k) CHECK(back.eval(a.pow(k)) == y0.eval(a.pow(k)));
  // a non-measure-preserving pattern table is rejected
  CHECK_THROWS_AS(block_scramble_map(
                      z, Alphabet::weighted({"p", "q"}, {Rat(1, 3), Rat(2, 3)}),
                      window, {1, 0, 2, 3}),
                  NotMeasurePreserving);
}

TEST_CASE("block scramble defect is exact") {
  auto z = zgrp();
  auto a = z->parse_word("a");
  std::vector<Element> window = {z->identity(), a};
  auto scr = block_scramble_map(z, bin2(), window, {3, 1, 2, 0});  // swap 00 and 11
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto y = Configuration::seeded_iid(z, bin2(), seed);
    for (int t : {1, -1, 2, 4}) {
      auto delta = a.pow(t);
      auto predicted = scr->defect(delta, y.reader());
      std::vector<Element> brute;
      auto lhs = Configuration::mapped(scr, y.shift(delta));
      auto rhs = Configuration::mapped(scr, y).shift(delta);
      for (int k = -8; k <= 8; ++k) {
        auto c = a.pow(k);
        if (lhs.eval(c) != rhs.eval(c)) brute.push_back(c);
      }
      sort_unique(brute);
      CHECK(predicted == brute);
    }
  }
}

TEST_CASE("composition routes evaluation right to left") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  auto flip = coordinatewise_bijection(z, bin2(), bin2(), {1, 0});
  auto chain = compose({flip, odo});  // flip after add-one
  auto y = int_config(z, 11, 10);
  auto img = Configuration::mapped(chain, y);
  CHECK((read_int(img, 10) ^ ((1u << 10) - 1)) == 12);
  // inverse: subtract one after flip
  auto back = Configuration::mapped(chain->inverse(), img);
  for (int k = 0; k < 10; ++k)
    CHECK(back.eval(z->parse_word("a").pow(k)) == y.eval(z->parse_word("a").pow(k)));
}

TEST_CASE("composite defect transports through transparent members") {
  auto z = zgrp();
  auto a = z->parse_word("a");
  auto odo = odometer_map(z, bin2());
  auto flip = coordinatewise_bijection(z, bin2(), bin2(), {1, 0});
  auto outer = compose({flip, odo});
  auto inner = compose({odo, flip});
  CHECK(outer->exact_defect_supported());
  CHECK(inner->exact_defect_supported());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto y = Configuration::seeded_iid(z, bin2(), seed);
    auto delta = a.pow(2);
    CHECK(outer->defect(delta, y.reader()) == odo->defect(delta, y.reader()));
    // inner flip changes the configuration the core sees
    auto flipped = Configuration::mapped(flip, y);
    CHECK(inner->defect(delta, y.reader()) == odo->defect(delta, flipped.reader()));
  }
  // two defect-carrying members cannot be routed
  auto both = compose({odo, odo});
  CHECK(!both->exact_defect_supported());
  auto y = Configuration::seeded_iid(z, bin2(), 3);
  CHECK_THROWS_AS(both->defect(a, y.reader()), DefectUnsupported);
}

TEST_CASE("chain validation") {
  auto z = zgrp();
  auto f2 = Group::free_group(2);
  auto odo = odometer_map(z, bin2());
  auto id2 = identity_map(f2, bin2());
  CHECK_THROWS_AS(compose({odo, id2}), GroupMismatch);
  auto tri = Alphabet::uniform(3);
  auto id3 = identity_map(z, tri);
  CHECK_THROWS_AS(compose({odo, id3}), ChainMismatch);
  CHECK_THROWS_AS(compose({}), ConfigInvalid);
}

TEST_CASE("mapped configurations feed sampling") {
  auto z = zgrp();
  auto odo = odometer_map(z, bin2());
  std::vector<Element> window = {z->identity()};
  auto rep = cylinder_frequency(odo, z, bin2(), window, 4000, 123);
  CHECK(rep.samples_ok == 4000);
  // the image of a fair coin under the odometer is still a fair coin
  double f0 = static_cast<double>(rep.counts[0]) / 4000.0;
  CHECK(std::abs(f0 - 0.5) < 0.03);
}
