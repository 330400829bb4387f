#include "mgt/finitary.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mgt/errors.hpp"

namespace mgt {

FinitaryMap::FinitaryMap(GroupPtr g, AlphabetPtr src, AlphabetPtr tgt, unsigned wcap)
    : group_(std::move(g)), src_(std::move(src)), tgt_(std::move(tgt)), wcap_(wcap) {
  if (!group_ || !src_ || !tgt_) throw ConfigInvalid("null group or alphabet");
  if (wcap_ == 0) throw ConfigInvalid("window cap must be positive");
}

std::vector<Element> FinitaryMap::defect(const Element&, const CoordFn&) const {
  throw DefectUnsupported("exact defect is not available for this map");
}

struct BudgetedReader::State {
  CoordFn fn;
  unsigned cap;
  std::string desc;
  std::set<std::string> seen;
};

BudgetedReader::BudgetedReader(CoordFn fn, unsigned cap, std::string at_desc)
    : state_(std::make_shared<State>()) {
  state_->fn = std::move(fn);
  state_->cap = cap;
  state_->desc = std::move(at_desc);
}

unsigned BudgetedReader::operator()(const Element& g) const {
  auto& st = *state_;
  if (!st.seen.count(g.bytes())) {
    if (st.seen.size() >= st.cap)
      throw NonFinitaryAtPoint("window cap " + std::to_string(st.cap) +
                               " exhausted evaluating at " + st.desc);
    st.seen.insert(g.bytes());
  }
  return st.fn(g);
}

CoordFn BudgetedReader::as_fn() const {
  BudgetedReader self = *this;
  return [self](const Element& g) { return self(g); };
}

namespace {

class IdentityMap final : public FinitaryMap {
 public:
  IdentityMap(GroupPtr g, AlphabetPtr a) : FinitaryMap(std::move(g), a, a, 1) {}
  unsigned eval(const Element& at, const CoordFn& input) const override {
    return input(at);
  }
  MapPtr inverse() const override { return shared_from_this(); }
  std::vector<Element> defect(const Element&, const CoordFn&) const override {
    return {};
  }
  bool exact_defect_supported() const override { return true; }
  bool always_equivariant() const override { return true; }
  bool coordinatewise() const override { return true; }
  MeasureCertificate measure_certificate() const override {
    return {MeasureCertificate::Kind::CoordinatewiseBijection, "identity"};
  }
};

class BijectionMap final : public FinitaryMap {
 public:
  BijectionMap(GroupPtr g, AlphabetPtr src, AlphabetPtr tgt, std::vector<unsigned> bij)
      : FinitaryMap(std::move(g), std::move(src), std::move(tgt), 1),
        bij_(std::move(bij)) {
    unsigned m = src_->size();
    if (tgt_->size() != m) throw ConfigInvalid("alphabet sizes differ");
    if (bij_.size() != m) throw ConfigInvalid("bijection table has wrong size");
    std::vector<bool> hit(m, false);
    for (unsigned s : bij_) {
      if (s >= m || hit[s]) throw ConfigInvalid("bijection table is not a bijection");
      hit[s] = true;
    }
    for (unsigned s = 0; s < m; ++s)
      if (src_->weights()[s] != tgt_->weights()[bij_[s]])
        throw NotMeasurePreserving("symbol weights are not matched by the bijection");
  }
  unsigned eval(const Element& at, const CoordFn& input) const override {
    return bij_[input(at)];
  }
  MapPtr inverse() const override {
    std::vector<unsigned> inv(bij_.size());
    for (unsigned s = 0; s < bij_.size(); ++s) inv[bij_[s]] = s;
    return std::make_shared<BijectionMap>(group_, tgt_, src_, std::move(inv));
  }
  std::vector<Element> defect(const Element&, const CoordFn&) const override {
    return {};
  }
  bool exact_defect_supported() const override { return true; }
  bool always_equivariant() const override { return true; }
  bool coordinatewise() const override { return true; }
  MeasureCertificate measure_certificate() const override {
    return {MeasureCertificate::Kind::CoordinatewiseBijection,
            "weights matched symbol by symbol"};
  }

 private:
  std::vector<unsigned> bij_;
};

// Adding machine on binary sequences indexed by the integers, in the
// direction of increasing exponent: output bit k of x+1 depends on bits
// 0..k of x, so every coordinate is finitary, with a window that grows with
// the carry run. Past the window cap the evaluation refuses.
class OdometerMap final : public FinitaryMap {
 public:
  OdometerMap(GroupPtr z, AlphabetPtr binary, unsigned wcap, bool decrement)
      : FinitaryMap(std::move(z), binary, binary, wcap), decrement_(decrement) {
    if (group_->kind() != GroupKind::Free || group_->free_rank() != 1)
      throw ConfigInvalid("odometer needs the free group of rank 1");
    if (src_->size() != 2 || src_->weights()[0] != Rat(1, 2))
      throw ConfigInvalid("odometer needs the uniform binary alphabet");
  }

  Element coord(long long j) const {
    if (j == 0) return group_->identity();
    return group_->free_syllables({{0, j}});
  }
  static long long exponent(const Element& g) {
    const auto* d = g.free_data();
    if (d->syl.empty()) return 0;
    return d->syl[0].exp;
  }

  unsigned eval(const Element& at, const CoordFn& input) const override {
    if (!at.group()->same_as(*group_)) throw MixedGroups("coordinate from a different group");
    BudgetedReader rd(input, wcap_, at.word());
    long long k = exponent(at);
    if (k < 0) return rd(at);
    unsigned match = decrement_ ? 1 : 0;  // symbol the carry scan stops at
    for (long long j = 0; j <= k; ++j) {
      if (rd(coord(j)) == match) {
        if (j == k) return 1 - match;
        return rd(at);
      }
    }
    return match;
  }

  MapPtr inverse() const override {
    return std::make_shared<OdometerMap>(group_, src_, wcap_, !decrement_);
  }

  // First j >= 0 whose bit equals the carry-stopping symbol, reading x at
  // offset `off`. Gives up past the window cap.
  long long carry_run(const CoordFn& input, long long off) const {
    unsigned match = decrement_ ? 1 : 0;
    for (long long j = 0; j < static_cast<long long>(wcap_); ++j)
      if (input(coord(j + off)) == match) return j;
    throw NonFinitaryAtPoint("carry run exceeds window cap " + std::to_string(wcap_));
  }

  std::vector<Element> defect(const Element& delta, const CoordFn& input) const override {
    if (!delta.group()->same_as(*group_)) throw MixedGroups("translation from a different group");
    long long t = exponent(delta);
    if (t == 0) return {};
    unsigned match = decrement_ ? 1 : 0;
    long long j0 = carry_run(input, 0);    // carry run of x
    long long j0s = carry_run(input, -t);  // carry run of delta.x, since (delta.x)_j = x_{j-t}
    auto x = [&](long long j) { return input(coord(j)); };
    // phi(delta.x)_k from the carry run of delta.x
    auto lhs = [&](long long k) -> unsigned {
      if (k < 0) return x(k - t);
      if (k < j0s) return match;
      if (k == j0s) return 1 - match;
      return x(k - t);
    };
    // (delta.phi(x))_k = phi(x)_{k-t}
    auto rhs = [&](long long k) -> unsigned {
      long long j = k - t;
      if (j < 0) return x(j);
      if (j < j0) return match;
      if (j == j0) return 1 - match;
      return x(j);
    };
    std::vector<Element> out;
    long long lo = std::min<long long>(0, t);
    long long hi = std::max(j0s, j0 + t);
    for (long long k = lo; k <= hi; ++k)
      if (lhs(k) != rhs(k)) out.push_back(coord(k));
    sort_unique(out);
    return out;
  }
  bool exact_defect_supported() const override { return true; }
  MeasureCertificate measure_certificate() const override {
    return {MeasureCertificate::Kind::None,
            "bijection with finitary inverse; uniform product measure is invariant"};
  }

 private:
  bool decrement_;
};

class BlockScrambleMap final : public FinitaryMap {
 public:
  BlockScrambleMap(GroupPtr g, AlphabetPtr a, std::vector<Element> window,
                   std::vector<unsigned> perm)
      : FinitaryMap(std::move(g), a, a,
                    static_cast<unsigned>(std::max<std::size_t>(window.size(), 1))),
        window_(std::move(window)),
        perm_(std::move(perm)) {
    if (window_.empty()) throw ConfigInvalid("empty scramble window");
    for (const auto& w : window_)
      if (!w.group()->same_as(*group_)) throw MixedGroups("window coordinate mismatch");
    std::size_t before = window_.size();
    sort_unique(window_);
    if (window_.size() != before) throw ConfigInvalid("repeated window coordinate");
    unsigned m = src_->size();
    std::uint64_t patterns = 1;
    for (std::size_t i = 0; i < window_.size(); ++i) {
      patterns *= m;
      if (patterns > (1u << 22)) throw SizeCap("scramble window too large");
    }
    if (perm_.size() != patterns) throw ConfigInvalid("pattern permutation has wrong size");
    std::vector<bool> hit(patterns, false);
    for (unsigned p : perm_) {
      if (p >= patterns || hit[p]) throw ConfigInvalid("pattern table is not a permutation");
      hit[p] = true;
    }
    for (std::uint64_t p = 0; p < patterns; ++p)
      if (pattern_weight(p) != pattern_weight(perm_[p]))
        throw NotMeasurePreserving("pattern permutation does not preserve product weights");
  }

  Rat pattern_weight(std::uint64_t p) const {
    Rat w(1);
    unsigned m = src_->size();
    for (std::size_t i = 0; i < window_.size(); ++i) {
      w *= src_->weights()[p % m];
      p /= m;
    }
    return w;
  }

  unsigned eval(const Element& at, const CoordFn& input) const override {
    if (!at.group()->same_as(*group_)) throw MixedGroups("coordinate from a different group");
    auto it = std::lower_bound(window_.begin(), window_.end(), at);
    if (it == window_.end() || *it != at) return input(at);
    std::size_t pos = static_cast<std::size_t>(it - window_.begin());
    unsigned m = src_->size();
    std::uint64_t idx = 0, mul = 1;
    for (const auto& w : window_) {
      idx += mul * input(w);
      mul *= m;
    }
    std::uint64_t out = perm_[idx];
    for (std::size_t i = 0; i < pos; ++i) out /= m;
    return static_cast<unsigned>(out % m);
  }

  MapPtr inverse() const override {
    std::vector<unsigned> inv(perm_.size());
    for (unsigned p = 0; p < perm_.size(); ++p) inv[perm_[p]] = p;
    return std::make_shared<BlockScrambleMap>(group_, src_, window_, std::move(inv));
  }

  std::vector<Element> defect(const Element& delta, const CoordFn& input) const override {
    if (!delta.group()->same_as(*group_)) throw MixedGroups("translation from a different group");
    // Both sides agree off the union of the window and its translate.
    std::vector<Element> coords = window_;
    for (const auto& w : window_) coords.push_back(delta * w);
    sort_unique(coords);
    Element dinv = delta.inverse();
    CoordFn shifted = [&](const Element& g) { return input(dinv * g); };
    std::vector<Element> out;
    for (const auto& c : coords) {
      unsigned a = eval(c, shifted);
      unsigned b = eval(dinv * c, input);
      if (a != b) out.push_back(c);
    }
    return out;
  }
  bool exact_defect_supported() const override { return true; }
  MeasureCertificate measure_certificate() const override {
    return {MeasureCertificate::Kind::BlockPermutation,
            "pattern permutation preserves product weights"};
  }

 private:
  std::vector<Element> window_;  // sorted canonically
  std::vector<unsigned> perm_;
};

CoordFn memoized(CoordFn fn) {
  auto cache = std::make_shared<std::map<std::string, unsigned>>();
  return [fn = std::move(fn), cache](const Element& g) {
    auto it = cache->find(g.bytes());
    if (it != cache->end()) return it->second;
    unsigned v = fn(g);
    cache->emplace(g.bytes(), v);
    return v;
  };
}

class CompositeMap final : public FinitaryMap {
 public:
  explicit CompositeMap(std::vector<MapPtr> chain)
      : FinitaryMap(chain_group(chain), chain.back()->source_alphabet(),
                    chain.front()->target_alphabet(), chain_cap(chain)),
        chain_(std::move(chain)) {
    for (std::size_t i = 0; i + 1 < chain_.size(); ++i)
      if (!chain_[i]->source_alphabet()->same_as(*chain_[i + 1]->target_alphabet()))
        throw ChainMismatch("member " + std::to_string(i) +
                            " does not consume the output of member " + std::to_string(i + 1));
  }

  static GroupPtr chain_group(const std::vector<MapPtr>& chain) {
    if (chain.empty()) throw ConfigInvalid("empty composition");
    for (const auto& m : chain) {
      if (!m) throw ConfigInvalid("null map in composition");
      if (!m->group()->same_as(*chain.front()->group()))
        throw GroupMismatch("composition members act over different groups");
    }
    return chain.front()->group();
  }
  static unsigned chain_cap(const std::vector<MapPtr>& chain) {
    std::uint64_t cap = 1;
    for (const auto& m : chain) {
      cap *= m->window_cap();
      if (cap > (1u << 30)) return 1u << 30;
    }
    return static_cast<unsigned>(cap);
  }

  // Reader seen by member i: members below it applied to the input.
  CoordFn view(std::size_t i, const CoordFn& input) const {
    CoordFn fn = memoized(input);
    for (std::size_t j = chain_.size(); j-- > i + 1;) {
      MapPtr m = chain_[j];
      CoordFn prev = fn;
      fn = memoized([m, prev](const Element& g) { return m->eval(g, prev); });
    }
    return fn;
  }

  unsigned eval(const Element& at, const CoordFn& input) const override {
    return chain_.front()->eval(at, view(0, input));
  }

  MapPtr inverse() const override {
    std::vector<MapPtr> inv;
    for (std::size_t i = chain_.size(); i-- > 0;) inv.push_back(chain_[i]->inverse());
    return std::make_shared<CompositeMap>(std::move(inv));
  }

  static bool transparent(const MapPtr& m) {
    return m->coordinatewise() && m->always_equivariant();
  }

  std::vector<Element> defect(const Element& delta, const CoordFn& input) const override {
    std::size_t core = chain_.size();
    for (std::size_t i = 0; i < chain_.size(); ++i) {
      if (transparent(chain_[i])) continue;
      if (core != chain_.size())
        throw DefectUnsupported("composition has more than one defect-carrying member");
      core = i;
    }
    if (core == chain_.size()) return {};
    // Symbol bijections neither move nor mask a disagreement, so the defect
    // of the whole chain is the core's defect seen through the inner members.
    return chain_[core]->defect(delta, view(core, input));
  }
  bool exact_defect_supported() const override {
    std::size_t cores = 0;
    bool ok = true;
    for (const auto& m : chain_)
      if (!transparent(m)) {
        ++cores;
        ok = ok && m->exact_defect_supported();
      }
    return cores == 0 || (cores == 1 && ok);
  }
  bool always_equivariant() const override {
    for (const auto& m : chain_)
      if (!m->always_equivariant()) return false;
    return true;
  }
  bool coordinatewise() const override {
    for (const auto& m : chain_)
      if (!m->coordinatewise()) return false;
    return true;
  }
  MeasureCertificate measure_certificate() const override {
    for (const auto& m : chain_)
      if (m->measure_certificate().kind == MeasureCertificate::Kind::None)
        return {MeasureCertificate::Kind::None, "member without certificate"};
    return {MeasureCertificate::Kind::BlockPermutation, "composition of certified members"};
  }

 private:
  std::vector<MapPtr> chain_;
};

}  // namespace

MapPtr identity_map(GroupPtr g, AlphabetPtr a) {
  return std::make_shared<IdentityMap>(std::move(g), std::move(a));
}

MapPtr coordinatewise_bijection(GroupPtr g, AlphabetPtr src, AlphabetPtr tgt,
                                std::vector<unsigned> bij) {
  return std::make_shared<BijectionMap>(std::move(g), std::move(src), std::move(tgt),
                                        std::move(bij));
}

MapPtr odometer_map(GroupPtr z, AlphabetPtr binary, unsigned window_cap) {
  return std::make_shared<OdometerMap>(std::move(z), std::move(binary), window_cap, false);
}

MapPtr block_scramble_map(GroupPtr g, AlphabetPtr a, std::vector<Element> window,
                          std::vector<unsigned> pattern_perm) {
  return std::make_shared<BlockScrambleMap>(std::move(g), std::move(a), std::move(window),
                                            std::move(pattern_perm));
}

MapPtr compose(std::vector<MapPtr> chain) {
  if (chain.empty()) throw ConfigInvalid("empty composition");
  if (chain.size() == 1) return chain.front();
  return std::make_shared<CompositeMap>(std::move(chain));
}

}  // namespace mgt
