#include <cstdint>
#include <random>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/group.hpp"

using namespace mgt;

namespace {

long long z_exp(const Element& g) {
  const auto* d = g.free_data();
  return d->syl.empty() ? 0 : d->syl[0].exp;
}

// Standalone model of C2 wr C64 on bitmasks: positions live mod 64, so
// products of short words in C2 wr Z match it exactly.
struct WZ {
  std::uint64_t mask = 0;
  unsigned t = 0;
  static std::uint64_t rot(std::uint64_t m, unsigned r) {
    r %= 64;
    return r ? (m << r) | (m >> (64 - r)) : m;
  }
  WZ mul(const WZ& o) const { return {mask ^ rot(o.mask, t), (t + o.t) % 64}; }
  WZ inv() const {
    unsigned ti = (64 - t) % 64;
    return {rot(mask, ti), ti};
  }
  bool operator==(const WZ& o) const { return mask == o.mask && t == o.t; }
};

WZ enc(const Element& w) {
  WZ o;
  const auto* d = w.wreath_data();
  for (const auto& [pos, val] : d->lamp.entries) {
    long long k = z_exp(pos);
    o.mask |= 1ull << (((k % 64) + 64) % 64);
  }
  long long t = z_exp(d->top);
  o.t = static_cast<unsigned>(((t % 64) + 64) % 64);
  return o;
}

// Multiplication table of S3 built from scratch on permutations of {0,1,2},
// identity first.
std::vector<std::vector<int>> s3_table() {
  std::vector<std::array<int, 3>> perms = {
      {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
  auto index_of = [&](const std::array<int, 3>& p) {
    for (std::size_t i = 0; i < perms.size(); ++i)
      if (perms[i] == p) return static_cast<int>(i);
    return -1;
  };
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      std::array<int, 3> c;
      for (int x = 0; x < 3; ++x) c[x] = perms[i][perms[j][x]];
      t[i][j] = index_of(c);
    }
  return t;
}

}  // namespace

TEST_CASE("free group normal forms") {
  auto f2 = Group::free_group(2);
  CHECK(f2->parse_word("a*a^-1").is_identity());
  CHECK(f2->parse_word("a^2*b*b^-1*a") == f2->parse_word("a^3"));
  CHECK(f2->parse_word("a^2*b^-1*a").word() == "a^2*b^-1*a");
  CHECK(f2->parse_word("e").is_identity());
  auto g = f2->parse_word("a*b^-2*a^-1");
  CHECK(g.inverse() == f2->parse_word("a*b^2*a^-1"));
  CHECK((g * g.inverse()).is_identity());
  CHECK(g.word_length() == 4);
  CHECK(f2->parse_word("b").pow(-3) == f2->parse_word("b^-3"));
}

TEST_CASE("free group ball sizes") {
  auto f2 = Group::free_group(2);
  CHECK(f2->ball(0).size() == 1);
  CHECK(f2->ball(1).size() == 5);
  CHECK(f2->ball(2).size() == 17);
  CHECK(f2->ball(3).size() == 53);
  auto bl = f2->ball_with_length(2);
  int by_len[3] = {0, 0, 0};
  for (const auto& [g, l] : bl) ++by_len[l];
  CHECK(by_len[0] == 1);
  CHECK(by_len[1] == 4);
  CHECK(by_len[2] == 12);
  CHECK_THROWS_AS(f2->ball(30, 5000), BallTooLarge);
}

TEST_CASE("cyclic groups") {
  auto c5 = Group::cyclic(5);
  auto g = c5->cyclic_element(2);
  CHECK(g.pow(5).is_identity());
  CHECK((g * g * g * g * g).is_identity());
  CHECK(c5->cyclic_element(4).word_length() == 1);  // g^-1 is shorter
  CHECK(c5->cyclic_element(-1) == c5->cyclic_element(4));
  CHECK(c5->order() == 5);
  CHECK(c5->elements().size() == 5);
}

TEST_CASE("finite table groups validate") {
  auto s3 = Group::finite_table(s3_table());
  CHECK(s3->order() == 6);
  CHECK(s3->ball(1).size() == 6);  // every non-identity element is a generator
  auto elems = s3->elements();
  for (const auto& a : elems)
    for (const auto& b : elems)
      for (const auto& c : elems) CHECK((a * b) * c == a * (b * c));
  for (const auto& a : elems) CHECK((a * a.inverse()).is_identity());

  auto bad = s3_table();
  bad[3][4] = 3;  // breaks the latin-square property
  CHECK_THROWS_AS(Group::finite_table(bad), ConfigInvalid);
}

TEST_CASE("free products flatten") {
  auto a = Group::free_group(1, {"a"});
  auto b = Group::free_group(1, {"b"});
  auto c = Group::cyclic(2, "c");
  auto flat = Group::free_product({a, b, c});
  auto nested = Group::free_product({a, Group::free_product({b, c})});
  CHECK(flat->same_as(*nested));
  CHECK(flat->factors().size() == 3);

  auto g = flat->parse_word("a^2*b^-1*c*a");
  CHECK(g.word_length() == 5);
  CHECK((g * g.inverse()).is_identity());
  // c has order two inside the product
  CHECK(flat->parse_word("c*c").is_identity());
  CHECK(flat->parse_word("a*c*c*a") == flat->parse_word("a^2"));
}

TEST_CASE("free product normal form is canonical") {
  auto p = Group::free_product({Group::free_group(1, {"a"}), Group::free_group(1, {"b"})});
  std::mt19937_64 rng(7);
  auto gens = p->generators();
  std::vector<Element> moves;
  for (const auto& g : gens) {
    moves.push_back(g);
    moves.push_back(g.inverse());
  }
  for (int it = 0; it < 200; ++it) {
    // same element assembled in two bracketings
    std::vector<Element> w;
    int len = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < len; ++i) w.push_back(moves[rng() % moves.size()]);
    Element left = p->identity();
    for (const auto& x : w) left = left * x;
    Element right = p->identity();
    for (auto it2 = w.rbegin(); it2 != w.rend(); ++it2) right = *it2 * right;
    CHECK(left == right);
    CHECK(left.bytes() == right.bytes());
  }
}

TEST_CASE("direct sums") {
  auto c2 = Group::cyclic(2, "u");
  auto z = Group::free_group(1, {"t"});
  auto ds = Group::direct_sum(c2, z);
  auto u = c2->cyclic_element(1);
  auto pos0 = z->identity();
  auto pos1 = z->parse_word("t");
  auto x = ds->sum_element({{pos0, u}});
  auto y = ds->sum_element({{pos1, u}});
  CHECK((x * x).is_identity());
  CHECK(x * y == y * x);
  CHECK((x * y).lamp_support().size() == 2);
  CHECK(x.lamp_value(pos0) == u);
  CHECK(x.lamp_value(pos1).is_identity());
  CHECK_THROWS_AS(ds->sum_element({{pos0, pos1}}), MixedGroups);
}

TEST_CASE("wreath product against the bitmask model") {
  auto c2 = Group::cyclic(2, "u");
  auto z = Group::free_group(1, {"t"});
  auto w = Group::wreath(c2, z);
  auto gens = w->generators();
  REQUIRE(gens.size() == 2);
  std::vector<Element> moves;
  for (const auto& g : gens) {
    moves.push_back(g);
    moves.push_back(g.inverse());
  }
  std::mt19937_64 rng(11);
  auto rand_word = [&] {
    Element acc = w->identity();
    int len = static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i) acc = acc * moves[rng() % moves.size()];
    return acc;
  };
  for (int it = 0; it < 300; ++it) {
    Element w1 = rand_word(), w2 = rand_word();
    CHECK(enc(w1 * w2) == enc(w1).mul(enc(w2)));
    CHECK(enc(w1.inverse()) == enc(w1).inv());
    CHECK((w1 * w1.inverse()).is_identity());
  }
}

TEST_CASE("wreath of finite groups is finite") {
  auto c2 = Group::cyclic(2, "u");
  auto c3 = Group::cyclic(3, "r");
  auto w = Group::wreath(c2, c3);
  CHECK(w->is_finite());
  CHECK(w->order() == 24);  // 2^3 * 3
  CHECK(w->elements().size() == 24);
  auto elems = w->elements();
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    const auto& a = elems[rng() % elems.size()];
    const auto& b = elems[rng() % elems.size()];
    const auto& c = elems[rng() % elems.size()];
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("mixed group operations are rejected") {
  auto f2 = Group::free_group(2);
  auto z = Group::free_group(1);
  CHECK_THROWS_AS(f2->parse_word("a") * z->parse_word("a"), MixedGroups);
  // same spec built twice is fine
  auto f2b = Group::free_group(2);
  CHECK(f2->parse_word("a*b") == f2b->parse_word("a*b"));
}

TEST_CASE("group json roundtrip") {
  std::vector<GroupPtr> groups = {
      Group::cyclic(4, "r"),
      Group::free_group(2),
      Group::finite_table(s3_table()),
      Group::free_product({Group::free_group(1, {"a"}), Group::free_group(1, {"b"})}),
      Group::direct_sum(Group::cyclic(2, "u"), Group::free_group(1, {"t"})),
      Group::wreath(Group::cyclic(2, "u"), Group::free_group(1, {"t"})),
  };
  for (const auto& g : groups) {
    auto back = Group::from_json_text(g->to_json_text());
    CHECK(back->same_as(*g));
  }
}

TEST_CASE("parse errors") {
  auto f2 = Group::free_group(2);
  CHECK_THROWS_AS(f2->parse_word("a^"), ConfigInvalid);
  CHECK_THROWS_AS(f2->parse_word("q"), ConfigInvalid);
  CHECK_THROWS_AS(Group::cyclic(0), ConfigInvalid);
  CHECK_THROWS_AS(Group::free_group(0), ConfigInvalid);
}
