#include "mgt/shift.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mgt/errors.hpp"
#include "mgt/finitary.hpp"
#include "mgt/hashmix.hpp"
#include "mgt/parallel.hpp"

namespace mgt {

namespace {

void check_weights(const std::vector<Rat>& w) {
  if (w.size() < 2) throw ConfigInvalid("alphabet needs at least two symbols");
  Rat total(0);
  for (const auto& x : w) {
    if (x <= Rat(0)) throw ConfigInvalid("alphabet weights must be positive");
    total += x;
  }
  if (total != Rat(1)) throw ConfigInvalid("alphabet weights must sum to 1");
}

}  // namespace

AlphabetPtr Alphabet::uniform(unsigned m) {
  if (m < 2) throw ConfigInvalid("alphabet needs at least two symbols");
  std::vector<std::string> syms;
  std::vector<Rat> w;
  for (unsigned i = 0; i < m; ++i) {
    syms.push_back(std::to_string(i));
    w.push_back(Rat(1, static_cast<long long>(m)));
  }
  return weighted(std::move(syms), std::move(w));
}

AlphabetPtr Alphabet::weighted(std::vector<std::string> symbols, std::vector<Rat> weights) {
  if (symbols.size() != weights.size())
    throw ConfigInvalid("alphabet symbol/weight count mismatch");
  check_weights(weights);
  std::set<std::string> seen(symbols.begin(), symbols.end());
  if (seen.size() != symbols.size()) throw ConfigInvalid("duplicate alphabet symbol");
  auto a = std::shared_ptr<Alphabet>(new Alphabet());
  a->symbols_ = std::move(symbols);
  a->weights_ = std::move(weights);
  a->seal();
  return a;
}

AlphabetPtr Alphabet::with_lamp_action(GroupPtr lamp,
                                       std::vector<std::vector<unsigned>> perms) const {
  if (!lamp || !lamp->is_finite()) throw ConfigInvalid("lamp group must be finite");
  auto elems = lamp->elements();
  if (perms.size() != elems.size())
    throw ConfigInvalid("lamp action needs one permutation per group element");
  unsigned m = size();
  for (const auto& p : perms) {
    if (p.size() != m) throw ActionInvalid("lamp permutation has wrong size");
    std::vector<bool> hit(m, false);
    for (unsigned s : p) {
      if (s >= m || hit[s]) throw ActionInvalid("lamp permutation is not a bijection");
      hit[s] = true;
    }
  }
  std::size_t id_idx = lamp->element_index(lamp->identity());
  for (unsigned s = 0; s < m; ++s)
    if (perms[id_idx][s] != s) throw ActionInvalid("lamp identity must act trivially");
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (std::size_t j = 0; j < elems.size(); ++j) {
      std::size_t k = lamp->element_index(elems[i] * elems[j]);
      for (unsigned s = 0; s < m; ++s)
        if (perms[k][s] != perms[i][perms[j][s]])
          throw ActionInvalid("lamp action is not a homomorphism");
    }
    if (i != id_idx)
      for (unsigned s = 0; s < m; ++s)
        if (perms[i][s] == s) throw ActionInvalid("lamp action must be free");
  }
  auto a = std::shared_ptr<Alphabet>(new Alphabet());
  a->symbols_ = symbols_;
  a->weights_ = weights_;
  a->lamp_group_ = std::move(lamp);
  a->lamp_perms_ = std::move(perms);
  a->seal();
  return a;
}

void Alphabet::seal() {
  // Exact cut points: cut[i] = floor(2^64 * sum of the first i+1 weights).
  cuts_.clear();
  Rat cum(0);
  for (std::size_t i = 0; i + 1 < weights_.size(); ++i) {
    cum += weights_[i];
    unsigned __int128 num = static_cast<unsigned __int128>(cum.numerator()) << 64;
    cuts_.push_back(static_cast<std::uint64_t>(num / cum.denominator()));
  }
  std::string fp = "A[";
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    fp += std::to_string(symbols_[i].size());
    fp += ':';
    fp += symbols_[i];
    fp += '=';
    fp += rat_str(weights_[i]);
    fp += ';';
  }
  if (lamp_group_) {
    fp += "L:";
    fp += lamp_group_->fingerprint();
    for (const auto& p : lamp_perms_) {
      fp += '(';
      for (unsigned s : p) {
        fp += std::to_string(s);
        fp += ',';
      }
      fp += ')';
    }
  }
  fp += ']';
  fingerprint_ = std::move(fp);
}

const GroupPtr& Alphabet::lamp_group() const {
  if (!lamp_group_) throw NoLampAction("alphabet has no lamp action");
  return lamp_group_;
}

unsigned Alphabet::act(const Element& lamp_elem, unsigned sym) const {
  if (!lamp_group_) throw NoLampAction("alphabet has no lamp action");
  if (!lamp_elem.group()->same_as(*lamp_group_))
    throw MixedGroups("lamp element from a different group");
  if (sym >= size()) throw ConfigInvalid("symbol out of range");
  return lamp_perms_[lamp_group_->element_index(lamp_elem)][sym];
}

std::optional<Element> Alphabet::lamp_witness(unsigned from, unsigned to) const {
  if (!lamp_group_) throw NoLampAction("alphabet has no lamp action");
  if (from >= size() || to >= size()) throw ConfigInvalid("symbol out of range");
  auto elems = lamp_group_->elements();
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (lamp_perms_[i][from] == to) return elems[i];
  return std::nullopt;
}

unsigned Alphabet::sample(std::uint64_t h) const {
  auto it = std::upper_bound(cuts_.begin(), cuts_.end(), h);
  return static_cast<unsigned>(it - cuts_.begin());
}

// Backends. Translated wraps only seeded or mapped roots; shifting a patched
// value pushes the shift into the background and re-keys the patch, so the
// flattened form below is always (root, net translation, patch).
struct Configuration::Node {
  enum class Kind { Constant, Seeded, Translated, Patched, Mapped } kind;
  unsigned sym = 0;
  std::uint64_t seed = 0;
  std::optional<Element> delta;
  std::shared_ptr<const Node> base;
  std::map<std::string, std::pair<Element, unsigned>> patch;
  std::shared_ptr<const FinitaryMap> map;
  std::shared_ptr<const Configuration> source;
};

Configuration Configuration::constant(GroupPtr g, AlphabetPtr a, unsigned sym) {
  if (!g || !a) throw ConfigInvalid("null group or alphabet");
  if (sym >= a->size()) throw ConfigInvalid("symbol out of range");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->sym = sym;
  return Configuration(std::move(g), std::move(a), std::move(n));
}

Configuration Configuration::seeded_iid(GroupPtr g, AlphabetPtr a, std::uint64_t seed) {
  if (!g || !a) throw ConfigInvalid("null group or alphabet");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Seeded;
  n->seed = seed;
  return Configuration(std::move(g), std::move(a), std::move(n));
}

Configuration Configuration::mapped(std::shared_ptr<const FinitaryMap> map,
                                    const Configuration& source) {
  if (!map) throw ConfigInvalid("null map");
  if (!map->group()->same_as(*source.group()))
    throw MixedGroups("map and source configuration have different groups");
  if (!map->source_alphabet()->same_as(*source.alphabet()))
    throw ConfigInvalid("map source alphabet does not match configuration");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Mapped;
  n->map = map;
  n->source = std::make_shared<Configuration>(source);
  return Configuration(source.group(), map->target_alphabet(), std::move(n));
}

Configuration Configuration::patched(
    const std::vector<std::pair<Element, unsigned>>& patch) const {
  Configuration base = *this;
  std::map<std::string, std::pair<Element, unsigned>> merged;
  if (node_->kind == Node::Kind::Patched) {
    base = Configuration(group_, alphabet_, node_->base);
    merged = node_->patch;
  }
  for (const auto& [coord, sym] : patch) {
    if (!coord.group()->same_as(*group_))
      throw MixedGroups("patch coordinate from a different group");
    if (sym >= alphabet_->size()) throw ConfigInvalid("patch symbol out of range");
    if (base.eval(coord) == sym)
      merged.erase(coord.bytes());
    else
      merged[coord.bytes()] = {coord, sym};
  }
  if (merged.empty()) return base;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Patched;
  n->base = base.node_;
  n->patch = std::move(merged);
  return Configuration(group_, alphabet_, std::move(n));
}

unsigned Configuration::eval(const Element& coord) const {
  if (!coord.group()->same_as(*group_))
    throw MixedGroups("coordinate from a different group");
  const Node* n = node_.get();
  Element g = coord;
  while (true) {
    switch (n->kind) {
      case Node::Kind::Constant:
        return n->sym;
      case Node::Kind::Seeded:
        return alphabet_->sample(coord_hash(n->seed, g.bytes()));
      case Node::Kind::Translated:
        g = n->delta->inverse() * g;
        n = n->base.get();
        break;
      case Node::Kind::Patched: {
        auto it = n->patch.find(g.bytes());
        if (it != n->patch.end()) return it->second.second;
        n = n->base.get();
        break;
      }
      case Node::Kind::Mapped:
        return n->map->eval(g, n->source->reader());
    }
  }
}

std::function<unsigned(const Element&)> Configuration::reader() const {
  Configuration self = *this;
  return [self](const Element& g) { return self.eval(g); };
}

Configuration Configuration::shift(const Element& delta) const {
  if (!delta.group()->same_as(*group_)) throw MixedGroups("shift by a foreign element");
  if (delta.is_identity()) return *this;
  switch (node_->kind) {
    case Node::Kind::Constant:
      return *this;
    case Node::Kind::Patched: {
      Configuration base(group_, alphabet_, node_->base);
      Configuration shifted = base.shift(delta);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Patched;
      n->base = shifted.node_;
      for (const auto& [k, v] : node_->patch) {
        Element c = delta * v.first;
        n->patch[c.bytes()] = {c, v.second};
      }
      return Configuration(group_, alphabet_, std::move(n));
    }
    case Node::Kind::Translated: {
      Element d = delta * *node_->delta;
      if (d.is_identity()) return Configuration(group_, alphabet_, node_->base);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Translated;
      n->delta = d;
      n->base = node_->base;
      return Configuration(group_, alphabet_, std::move(n));
    }
    default: {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Translated;
      n->delta = delta;
      n->base = node_;
      return Configuration(group_, alphabet_, std::move(n));
    }
  }
}

Configuration Configuration::lamp(const Element& b) const {
  const GroupPtr& lampg = alphabet_->lamp_group();
  auto bg = b.group();
  if (bg->kind() != GroupKind::DirectSum || !bg->base()->same_as(*lampg) ||
      !bg->index_group()->same_as(*group_))
    throw MixedGroups("lamp move must come from the direct sum of the lamp group over the base group");
  const auto* data = b.sum();
  std::vector<std::pair<Element, unsigned>> patch;
  for (const auto& [pos, val] : data->entries)
    patch.push_back({pos, alphabet_->act(val, eval(pos))});
  return patched(patch);
}

Configuration Configuration::wreath_act(const Element& w) const {
  auto wg = w.group();
  if (wg->kind() != GroupKind::Wreath) throw MixedGroups("wreath move expected");
  const GroupPtr& lampg = alphabet_->lamp_group();
  if (!wg->base()->same_as(*lampg) || !wg->top()->same_as(*group_))
    throw MixedGroups("wreath move does not match the lamp group and base group");
  const auto* data = w.wreath_data();
  Configuration shifted = shift(data->top);
  std::vector<std::pair<Element, unsigned>> patch;
  for (const auto& [pos, val] : data->lamp.entries)
    patch.push_back({pos, alphabet_->act(val, shifted.eval(pos))});
  return shifted.patched(patch);
}

struct FlattenAccess {
  struct Flat {
    const Configuration::Node* root;
    std::optional<Element> trans;  // empty means identity
    std::map<std::string, std::pair<Element, unsigned>> patch;
  };

  static Flat flatten(const Configuration::Node* n) {
    using K = Configuration::Node::Kind;
    switch (n->kind) {
      case K::Translated: {
        Flat f = flatten(n->base.get());
        const Element& d = *n->delta;
        std::map<std::string, std::pair<Element, unsigned>> moved;
        for (const auto& [k, v] : f.patch) {
          Element c = d * v.first;
          moved[c.bytes()] = {c, v.second};
        }
        f.patch = std::move(moved);
        f.trans = f.trans ? d * *f.trans : d;
        if (f.trans->is_identity()) f.trans.reset();
        return f;
      }
      case K::Patched: {
        Flat f = flatten(n->base.get());
        for (const auto& [k, v] : n->patch) f.patch[k] = v;
        return f;
      }
      default:
        return Flat{n, std::nullopt, {}};
    }
  }

  static bool roots_comparable(const Flat& a, const Flat& b) {
    using K = Configuration::Node::Kind;
    if (a.root == b.root) return true;
    if (a.root->kind != b.root->kind) return false;
    switch (a.root->kind) {
      case K::Constant:
        return a.root->sym == b.root->sym;
      case K::Seeded:
        return a.root->seed == b.root->seed;
      default:
        return false;  // distinct mapped roots are never known equal
    }
  }

  static bool trans_equal(const Flat& a, const Flat& b) {
    if (!a.trans && !b.trans) return true;
    if (a.trans && b.trans) return *a.trans == *b.trans;
    return false;
  }

  static const std::shared_ptr<const Configuration::Node>& node(const Configuration& c) {
    return c.node_;
  }
};

bool Configuration::operator==(const Configuration& o) const {
  if (!group_->same_as(*o.group_)) throw MixedGroups("comparing configurations over different groups");
  if (!alphabet_->same_as(*o.alphabet_)) return false;
  FlattenAccess::Flat a = FlattenAccess::flatten(node_.get());
  FlattenAccess::Flat b = FlattenAccess::flatten(o.node_.get());
  if (!FlattenAccess::roots_comparable(a, b) || !FlattenAccess::trans_equal(a, b))
    return false;
  if (a.patch.size() != b.patch.size()) return false;
  for (auto ita = a.patch.begin(), itb = b.patch.begin(); ita != a.patch.end();
       ++ita, ++itb) {
    if (ita->first != itb->first || ita->second.second != itb->second.second) return false;
  }
  return true;
}

DiffSet cofinite_diff(const Configuration& y0, const Configuration& y1, unsigned radius,
                      bool require_exact) {
  if (!y0.group()->same_as(*y1.group()))
    throw MixedGroups("configurations over different groups");
  if (!y0.alphabet()->same_as(*y1.alphabet()))
    throw ConfigInvalid("configurations over different alphabets");
  const auto& alpha = *y0.alphabet();
  DiffSet out;
  auto add = [&](const Element& c, unsigned s0, unsigned s1) {
    DiffEntry e{c, s0, s1, std::nullopt};
    if (alpha.has_lamp()) e.lamp_witness = alpha.lamp_witness(s0, s1);
    out.entries.push_back(std::move(e));
  };
  FlattenAccess::Flat a = FlattenAccess::flatten(FlattenAccess::node(y0).get());
  FlattenAccess::Flat b = FlattenAccess::flatten(FlattenAccess::node(y1).get());
  if (FlattenAccess::roots_comparable(a, b) && FlattenAccess::trans_equal(a, b)) {
    std::set<std::string> keys;
    std::map<std::string, Element> coords;
    for (const auto& [k, v] : a.patch) keys.insert(k), coords.emplace(k, v.first);
    for (const auto& [k, v] : b.patch) keys.insert(k), coords.emplace(k, v.first);
    for (const auto& k : keys) {
      const Element& c = coords.at(k);
      unsigned s0 = y0.eval(c), s1 = y1.eval(c);
      if (s0 != s1) add(c, s0, s1);
    }
    out.exact = true;
    return out;
  }
  if (require_exact)
    throw IncomparableBackends("cannot certify a cofinite difference for these backends");
  for (const Element& g : y0.group()->ball(radius)) {
    unsigned s0 = y0.eval(g), s1 = y1.eval(g);
    if (s0 != s1) add(g, s0, s1);
  }
  out.exact = false;
  return out;
}

double shannon_entropy(const Alphabet& a) {
  double h = 0.0;
  for (const auto& w : a.weights()) {
    Rat inv(w.denominator(), w.numerator());
    h += to_double(w) * std::log(to_double(inv));
  }
  return h;
}

double empirical_entropy(const std::vector<std::uint64_t>& counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw ConfigInvalid("no observations");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(n);
    h += p * std::log(static_cast<double>(n) / static_cast<double>(c));
  }
  return h;
}

CylinderReport cylinder_frequency(std::shared_ptr<const FinitaryMap> map, GroupPtr group,
                                  AlphabetPtr source_alphabet,
                                  const std::vector<Element>& window,
                                  std::uint64_t n_samples, std::uint64_t seed) {
  if (!group || !source_alphabet) throw ConfigInvalid("null group or alphabet");
  if (window.empty()) throw ConfigInvalid("empty window");
  if (map) {
    if (!map->group()->same_as(*group)) throw MixedGroups("map group mismatch");
    if (!map->source_alphabet()->same_as(*source_alphabet))
      throw ConfigInvalid("map source alphabet mismatch");
  }
  std::vector<Element> win = window;
  for (const auto& w : win)
    if (!w.group()->same_as(*group)) throw MixedGroups("window coordinate mismatch");
  sort_unique(win);
  if (win.size() != window.size()) throw ConfigInvalid("repeated window coordinate");
  AlphabetPtr tgt = map ? map->target_alphabet() : source_alphabet;
  unsigned m = tgt->size();
  std::uint64_t patterns = 1;
  for (std::size_t i = 0; i < win.size(); ++i) {
    patterns *= m;
    if (patterns > (1u << 24)) throw SizeCap("cylinder window too large");
  }

  const std::uint64_t chunk = 4096;
  std::uint64_t n_chunks = (n_samples + chunk - 1) / chunk;
  std::vector<std::vector<std::uint64_t>> chunk_counts(n_chunks);
  std::vector<std::uint64_t> chunk_skipped(n_chunks, 0);
  parallel_chunks(n_samples, chunk, [&](std::uint64_t ci, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> local(patterns, 0);
    std::uint64_t skipped = 0;
    for (std::uint64_t k = lo; k < hi; ++k) {
      Configuration y = Configuration::seeded_iid(group, source_alphabet, seed_split(seed, k));
      std::uint64_t idx = 0, mul = 1;
      bool ok = true;
      CoordFn in = y.reader();
      for (const auto& w : win) {
        unsigned s;
        try {
          s = map ? map->eval(w, in) : y.eval(w);
        } catch (const NonFinitaryAtPoint&) {
          ok = false;
          break;
        }
        idx += mul * s;
        mul *= m;
      }
      if (ok)
        ++local[idx];
      else
        ++skipped;
    }
    chunk_counts[ci] = std::move(local);
    chunk_skipped[ci] = skipped;
  });

  CylinderReport rep;
  rep.alphabet_size = m;
  for (const auto& w : win) rep.window.push_back(w.word());
  rep.counts.assign(patterns, 0);
  for (std::uint64_t ci = 0; ci < n_chunks; ++ci) {
    rep.samples_skipped += chunk_skipped[ci];
    for (std::uint64_t p = 0; p < patterns; ++p) rep.counts[p] += chunk_counts[ci][p];
  }
  rep.samples_ok = n_samples - rep.samples_skipped;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    Rat w(1);
    std::uint64_t x = p;
    for (std::size_t i = 0; i < win.size(); ++i) {
      w *= tgt->weights()[x % m];
      x /= m;
    }
    rep.expected.push_back(w);
  }
  return rep;
}

}  // namespace mgt
