#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mgt/group.hpp"
#include "mgt/rational.hpp"

namespace mgt {

class FinitaryMap;
class Alphabet;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Finite symbol alphabet with exact rational weights and an optional lamp
// action: a finite group acting freely on the symbols, used for diff
// witnesses and lamp moves.
class Alphabet {
 public:
  static AlphabetPtr uniform(unsigned m);
  static AlphabetPtr weighted(std::vector<std::string> symbols, std::vector<Rat> weights);
  // perms[i] is the symbol permutation of element i of `lamp` (element order
  // as enumerated by lamp->elements()). Must be a homomorphism acting freely.
  AlphabetPtr with_lamp_action(GroupPtr lamp,
                               std::vector<std::vector<unsigned>> perms) const;

  unsigned size() const { return static_cast<unsigned>(weights_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<Rat>& weights() const { return weights_; }
  const std::string& fingerprint() const { return fingerprint_; }
  bool same_as(const Alphabet& o) const { return fingerprint_ == o.fingerprint_; }

  bool has_lamp() const { return static_cast<bool>(lamp_group_); }
  const GroupPtr& lamp_group() const;
  unsigned act(const Element& lamp_elem, unsigned sym) const;
  // Unique lamp element sending `from` to `to`, if any (unique by freeness).
  std::optional<Element> lamp_witness(unsigned from, unsigned to) const;

  // Symbol for a uniform 64-bit hash value, by fixed-point inverse cdf with
  // exact rational cut points. No floating point on this path.
  unsigned sample(std::uint64_t h) const;

 private:
  Alphabet() = default;
  void seal();
  std::vector<std::string> symbols_;
  std::vector<Rat> weights_;
  GroupPtr lamp_group_;
  std::vector<std::vector<unsigned>> lamp_perms_;
  std::vector<std::uint64_t> cuts_;  // size m-1; last bucket catches the rest
  std::string fingerprint_;
};

struct DiffEntry {
  Element coord;
  unsigned sym0, sym1;
  std::optional<Element> lamp_witness;
};

struct DiffSet {
  std::vector<DiffEntry> entries;  // sorted by coordinate bytes
  bool exact = false;
  std::vector<Element> coords() const {
    std::vector<Element> out;
    for (const auto& e : entries) out.push_back(e.coord);
    return out;
  }
};

// Lazily evaluated point of the full shift A^G. Immutable; shifting or
// patching returns a new value sharing structure with the old one.
class Configuration {
 public:
  static Configuration constant(GroupPtr g, AlphabetPtr a, unsigned sym);
  static Configuration seeded_iid(GroupPtr g, AlphabetPtr a, std::uint64_t seed);
  static Configuration mapped(std::shared_ptr<const FinitaryMap> map,
                              const Configuration& source);
  // This configuration as background, finitely many coordinates overridden.
  // Overrides equal to the background value are dropped.
  Configuration patched(const std::vector<std::pair<Element, unsigned>>& patch) const;

  const GroupPtr& group() const { return group_; }
  const AlphabetPtr& alphabet() const { return alphabet_; }
  unsigned eval(const Element& coord) const;
  std::function<unsigned(const Element&)> reader() const;

  // (delta.y)(g) = y(delta^-1 g)
  Configuration shift(const Element& delta) const;
  // b.y for b in the restricted direct sum of the lamp group over G;
  // changes exactly the coordinates in the support of b.
  Configuration lamp(const Element& b) const;
  // w = (b, t) in the wreath product of the lamp group and G: lamp(b) after shift(t).
  Configuration wreath_act(const Element& w) const;

  // Structural equality: equal backends up to patch normalization.
  bool operator==(const Configuration& o) const;
  bool operator!=(const Configuration& o) const { return !(*this == o); }

  friend DiffSet cofinite_diff(const Configuration& y0, const Configuration& y1,
                               unsigned radius, bool require_exact);

 private:
  struct Node;
  friend struct FlattenAccess;
  Configuration(GroupPtr g, AlphabetPtr a, std::shared_ptr<const Node> n)
      : group_(std::move(g)), alphabet_(std::move(a)), node_(std::move(n)) {}
  GroupPtr group_;
  AlphabetPtr alphabet_;
  std::shared_ptr<const Node> node_;
};

DiffSet cofinite_diff(const Configuration& y0, const Configuration& y1, unsigned radius,
                      bool require_exact = false);

// Entropy of the weight vector, in nats: sum of w * ln(1/w).
double shannon_entropy(const Alphabet& a);
// Plug-in entropy of observed counts.
double empirical_entropy(const std::vector<std::uint64_t>& counts);

struct CylinderReport {
  std::vector<std::string> window;       // coordinate words
  std::uint64_t samples_ok = 0, samples_skipped = 0;
  std::vector<std::uint64_t> counts;     // pattern index: window[0] least significant
  std::vector<Rat> expected;             // product weights
  unsigned alphabet_size = 0;
};

// Sampling-based pattern frequencies of phi(iid) over a finite window.
// map may be null (frequencies of the iid source itself). Sample k draws the
// configuration seeded with seed_split(seed, k); aggregation is independent
// of the worker count.
CylinderReport cylinder_frequency(std::shared_ptr<const FinitaryMap> map, GroupPtr group,
                                  AlphabetPtr source_alphabet,
                                  const std::vector<Element>& window,
                                  std::uint64_t n_samples, std::uint64_t seed);

}  // namespace mgt
