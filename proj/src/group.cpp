#include "mgt/group.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mgt {

struct ElementFactory {
  static Element make(GroupPtr g, std::shared_ptr<const void> d, std::string b) {
    return Element(std::move(g), std::move(d), std::move(b));
  }
};

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_i64(std::string& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

void append_block(std::string& out, const std::string& b) {
  append_u32(out, static_cast<std::uint32_t>(b.size()));
  out += b;
}

template <typename T>
std::shared_ptr<const void> erase(T&& t) {
  return std::shared_ptr<const void>(std::make_shared<T>(std::forward<T>(t)));
}

}  // namespace

// ---------------------------------------------------------------------------
// construction of normal forms

static std::string encode_fin(const FinData& d) {
  std::string b;
  append_u32(b, d.idx);
  return b;
}

static std::string encode_cyc(const CycData& d) {
  std::string b;
  append_u32(b, d.r);
  return b;
}

static std::string encode_free(const FreeData& d) {
  std::string b;
  append_u32(b, static_cast<std::uint32_t>(d.syl.size()));
  for (const auto& s : d.syl) {
    append_u32(b, s.gen);
    append_i64(b, s.exp);
  }
  return b;
}

static std::string encode_prod(const ProdData& d) {
  std::string b;
  append_u32(b, static_cast<std::uint32_t>(d.syl.size()));
  for (const auto& s : d.syl) {
    append_u32(b, s.factor);
    append_block(b, s.e.bytes());
  }
  return b;
}

static std::string encode_sum(const SumData& d) {
  std::string b;
  append_u32(b, static_cast<std::uint32_t>(d.entries.size()));
  for (const auto& [pos, val] : d.entries) {
    append_block(b, pos.bytes());
    append_block(b, val.bytes());
  }
  return b;
}

static std::string encode_wreath(const WreathData& d) {
  std::string b = encode_sum(d.lamp);
  append_block(b, d.top.bytes());
  return b;
}

static Element make_fin(const GroupPtr& g, unsigned idx) {
  FinData d{idx};
  std::string b = encode_fin(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

static Element make_cyc(const GroupPtr& g, unsigned r) {
  CycData d{r};
  std::string b = encode_cyc(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

static Element make_free(const GroupPtr& g, FreeData d) {
  std::string b = encode_free(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

static Element make_prod(const GroupPtr& g, ProdData d) {
  std::string b = encode_prod(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

static Element make_sum(const GroupPtr& g, SumData d) {
  std::string b = encode_sum(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

static Element make_wreath(const GroupPtr& g, WreathData d) {
  std::string b = encode_wreath(d);
  return ElementFactory::make(g, erase(std::move(d)), std::move(b));
}

// ---------------------------------------------------------------------------
// Group factories

static void check_labels_unique(const std::vector<std::string>& labels) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigInvalid("empty generator label");
    if (!seen.insert(l).second) throw ConfigInvalid("duplicate generator label: " + l);
  }
}

GroupPtr Group::finite_table(std::vector<std::vector<int>> table,
                             std::vector<std::string> labels) {
  const std::size_t n = table.size();
  if (n == 0) throw ConfigInvalid("finite table group needs at least one element");
  for (const auto& row : table) {
    if (row.size() != n) throw ConfigInvalid("multiplication table is not square");
    for (int v : row)
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw ConfigInvalid("table entry out of range");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (table[0][i] != static_cast<int>(i) || table[i][0] != static_cast<int>(i))
      throw ConfigInvalid("element 0 of a finite table group must be the identity");
  std::vector<int> inv(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (table[i][j] == 0 && table[j][i] == 0) inv[i] = static_cast<int>(j);
    if (inv[i] < 0) throw ConfigInvalid("finite table group lacks an inverse");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (table[table[i][j]][k] != table[i][table[j][k]])
          throw ConfigInvalid("finite table group is not associative");
  if (labels.empty()) {
    labels.push_back("e");
    for (std::size_t i = 1; i < n; ++i) labels.push_back("x" + std::to_string(i));
  }
  if (labels.size() != n) throw ConfigInvalid("finite table label count mismatch");
  check_labels_unique(labels);

  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::FiniteTable;
  g->n_ = static_cast<unsigned>(n);
  g->table_ = std::move(table);
  g->table_inv_ = std::move(inv);
  g->labels_ = std::move(labels);
  g->seal();
  return g;
}

GroupPtr Group::cyclic(unsigned n, std::string label) {
  if (n == 0) throw ConfigInvalid("cyclic group order must be positive");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Cyclic;
  g->n_ = n;
  g->labels_ = {std::move(label)};
  g->seal();
  return g;
}

GroupPtr Group::free_group(unsigned rank, std::vector<std::string> labels) {
  if (rank == 0) throw ConfigInvalid("free group rank must be positive");
  if (labels.empty()) {
    const char* def[] = {"a", "b", "c", "d"};
    for (unsigned i = 0; i < rank; ++i)
      labels.push_back(i < 4 ? def[i] : "g" + std::to_string(i));
  }
  if (labels.size() != rank) throw ConfigInvalid("free group label count mismatch");
  check_labels_unique(labels);
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Free;
  g->n_ = rank;
  g->labels_ = std::move(labels);
  g->seal();
  return g;
}

GroupPtr Group::free_product(std::vector<GroupPtr> factors) {
  std::vector<GroupPtr> flat;
  for (auto& f : factors) {
    if (!f) throw ConfigInvalid("null free product factor");
    if (f->kind() == GroupKind::FreeProduct)
      flat.insert(flat.end(), f->factors().begin(), f->factors().end());
    else
      flat.push_back(f);
  }
  if (flat.size() < 2) throw ConfigInvalid("free product needs at least two factors");
  for (const auto& f : flat) {
    if (f->kind() == GroupKind::DirectSum || f->kind() == GroupKind::Wreath)
      throw ConfigInvalid("unsupported free product factor kind");
    if (f->is_finite() && f->order() == 1)
      throw ConfigInvalid("trivial free product factor");
  }
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::FreeProduct;
  g->factors_ = std::move(flat);
  g->seal();
  return g;
}

GroupPtr Group::direct_sum(GroupPtr base, GroupPtr index) {
  if (!base || !index) throw ConfigInvalid("null direct sum component");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::DirectSum;
  g->base_ = std::move(base);
  g->index_ = std::move(index);
  g->seal();
  return g;
}

GroupPtr Group::wreath(GroupPtr base, GroupPtr top) {
  if (!base || !top) throw ConfigInvalid("null wreath component");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Wreath;
  g->base_ = std::move(base);
  g->index_ = std::move(top);
  g->seal();
  return g;
}

void Group::seal() {
  std::ostringstream fp;
  switch (kind_) {
    case GroupKind::FiniteTable: {
      fp << "T" << n_ << "[";
      for (const auto& row : table_)
        for (int v : row) fp << v << ",";
      fp << "]";
      for (const auto& l : labels_) fp << l << ";";
      break;
    }
    case GroupKind::Cyclic:
      fp << "C" << n_ << "[" << labels_[0] << "]";
      break;
    case GroupKind::Free: {
      fp << "F" << n_ << "[";
      for (const auto& l : labels_) fp << l << ";";
      fp << "]";
      break;
    }
    case GroupKind::FreeProduct: {
      fp << "P(";
      for (const auto& f : factors_) fp << f->fingerprint() << "|";
      fp << ")";
      break;
    }
    case GroupKind::DirectSum:
      fp << "S(" << base_->fingerprint() << "," << index_->fingerprint() << ")";
      break;
    case GroupKind::Wreath:
      fp << "W(" << base_->fingerprint() << "," << index_->fingerprint() << ")";
      break;
  }
  fingerprint_ = fp.str();

  auto self = shared_from_this();
  gens_.clear();
  gen_labels_.clear();
  switch (kind_) {
    case GroupKind::FiniteTable:
      for (unsigned i = 1; i < n_; ++i) {
        gens_.push_back(make_fin(self, i));
        gen_labels_.push_back(labels_[i]);
      }
      break;
    case GroupKind::Cyclic:
      if (n_ > 1) {
        gens_.push_back(make_cyc(self, 1));
        gen_labels_.push_back(labels_[0]);
      }
      break;
    case GroupKind::Free:
      for (unsigned i = 0; i < n_; ++i) {
        gens_.push_back(make_free(self, FreeData{{FreeSyllable{i, 1}}}));
        gen_labels_.push_back(labels_[i]);
      }
      break;
    case GroupKind::FreeProduct: {
      for (unsigned fi = 0; fi < factors_.size(); ++fi) {
        const auto& f = factors_[fi];
        const auto& fg = f->generators();
        const auto& fl = f->generator_labels();
        for (std::size_t j = 0; j < fg.size(); ++j) {
          gens_.push_back(make_prod(self, ProdData{{ProdSyllable{fi, fg[j]}}}));
          gen_labels_.push_back(fl[j]);
        }
      }
      check_labels_unique(gen_labels_);
      break;
    }
    case GroupKind::DirectSum: {
      if (index_->is_finite()) {
        for (const auto& pos : index_->elements())
          for (const auto& bg : base_->generators()) {
            gens_.push_back(sum_element({{pos, bg}}));
            gen_labels_.push_back(bg.word() + "@" + pos.word());
          }
      }
      break;
    }
    case GroupKind::Wreath: {
      Element e_top = index_->identity();
      for (std::size_t j = 0; j < base_->generators().size(); ++j) {
        gens_.push_back(wreath_element({{e_top, base_->generators()[j]}}, e_top));
        gen_labels_.push_back(base_->generator_labels()[j]);
      }
      for (std::size_t j = 0; j < index_->generators().size(); ++j) {
        gens_.push_back(wreath_element({}, index_->generators()[j]));
        gen_labels_.push_back(index_->generator_labels()[j]);
      }
      check_labels_unique(gen_labels_);
      break;
    }
  }
}

std::string Group::describe() const {
  switch (kind_) {
    case GroupKind::FiniteTable:
      return "finite group of order " + std::to_string(n_);
    case GroupKind::Cyclic:
      return "cyclic group of order " + std::to_string(n_);
    case GroupKind::Free:
      return "free group of rank " + std::to_string(n_);
    case GroupKind::FreeProduct: {
      std::string s = "free product of " + std::to_string(factors_.size()) + " factors";
      return s;
    }
    case GroupKind::DirectSum:
      return "restricted direct sum";
    case GroupKind::Wreath:
      return "restricted wreath product";
  }
  return "";
}

Element Group::identity() const {
  auto self = shared_from_this();
  switch (kind_) {
    case GroupKind::FiniteTable:
      return make_fin(self, 0);
    case GroupKind::Cyclic:
      return make_cyc(self, 0);
    case GroupKind::Free:
      return make_free(self, FreeData{});
    case GroupKind::FreeProduct:
      return make_prod(self, ProdData{});
    case GroupKind::DirectSum:
      return make_sum(self, SumData{});
    case GroupKind::Wreath:
      return make_wreath(self, WreathData{SumData{}, index_->identity()});
  }
  throw ComputeError("unreachable");
}

const std::vector<Element>& Group::generators() const {
  if (gens_.empty() && !(is_finite() && order() == 1))
    throw ComputeError("group has no declared finite generating set");
  return gens_;
}

const std::vector<std::string>& Group::generator_labels() const { return gen_labels_; }

bool Group::is_finite() const {
  switch (kind_) {
    case GroupKind::FiniteTable:
    case GroupKind::Cyclic:
      return true;
    case GroupKind::Free:
    case GroupKind::FreeProduct:
      return false;
    case GroupKind::DirectSum:
    case GroupKind::Wreath:
      return base_->is_finite() && index_->is_finite();
  }
  return false;
}

std::size_t Group::order() const {
  switch (kind_) {
    case GroupKind::FiniteTable:
    case GroupKind::Cyclic:
      return n_;
    case GroupKind::DirectSum: {
      if (!is_finite()) throw ComputeError("infinite group has no order");
      std::size_t r = 1;
      for (std::size_t i = 0; i < index_->order(); ++i) r *= base_->order();
      return r;
    }
    case GroupKind::Wreath: {
      if (!is_finite()) throw ComputeError("infinite group has no order");
      std::size_t r = index_->order();
      for (std::size_t i = 0; i < index_->order(); ++i) r *= base_->order();
      return r;
    }
    default:
      throw ComputeError("infinite group has no order");
  }
}

const std::vector<Element>& Group::elements() const {
  if (!is_finite()) throw ComputeError("cannot enumerate an infinite group");
  if (order() > 2000000) throw SizeCap("finite group too large to enumerate");
  if (all_elements_) return *all_elements_;
  auto self = shared_from_this();
  auto out = std::make_shared<std::vector<Element>>();
  switch (kind_) {
    case GroupKind::FiniteTable:
      for (unsigned i = 0; i < n_; ++i) out->push_back(make_fin(self, i));
      break;
    case GroupKind::Cyclic:
      for (unsigned i = 0; i < n_; ++i) out->push_back(make_cyc(self, i));
      break;
    case GroupKind::DirectSum:
    case GroupKind::Wreath: {
      const auto& positions = index_->elements();
      const auto& vals = base_->elements();
      std::vector<std::size_t> pick(positions.size(), 0);
      std::vector<SumData> lamps;
      for (;;) {
        SumData d;
        for (std::size_t p = 0; p < positions.size(); ++p)
          if (!vals[pick[p]].is_identity()) d.entries.push_back({positions[p], vals[pick[p]]});
        std::sort(d.entries.begin(), d.entries.end(),
                  [](const auto& a, const auto& b) { return a.first.bytes() < b.first.bytes(); });
        lamps.push_back(std::move(d));
        std::size_t p = 0;
        while (p < positions.size() && ++pick[p] == vals.size()) pick[p++] = 0;
        if (p == positions.size()) break;
      }
      if (kind_ == GroupKind::DirectSum) {
        for (auto& l : lamps) out->push_back(make_sum(self, std::move(l)));
      } else {
        for (const auto& t : index_->elements())
          for (const auto& l : lamps) out->push_back(make_wreath(self, WreathData{l, t}));
      }
      break;
    }
    default:
      break;
  }
  std::sort(out->begin(), out->end(),
            [](const Element& a, const Element& b) { return a.bytes() < b.bytes(); });
  auto rank = std::make_shared<std::map<std::string, std::size_t>>();
  for (std::size_t i = 0; i < out->size(); ++i) (*rank)[(*out)[i].bytes()] = i;
  all_elements_ = out;
  element_rank_ = rank;
  return *all_elements_;
}

std::size_t Group::element_index(const Element& e) const {
  elements();
  auto it = element_rank_->find(e.bytes());
  if (it == element_rank_->end()) throw ComputeError("element not in enumeration");
  return it->second;
}

Element Group::table_element(unsigned idx) const {
  if (kind_ != GroupKind::FiniteTable || idx >= n_)
    throw ConfigInvalid("bad finite table element");
  return make_fin(shared_from_this(), idx);
}

Element Group::cyclic_element(long long power) const {
  if (kind_ != GroupKind::Cyclic) throw ConfigInvalid("not a cyclic group");
  long long r = power % static_cast<long long>(n_);
  if (r < 0) r += n_;
  return make_cyc(shared_from_this(), static_cast<unsigned>(r));
}

Element Group::free_syllables(const std::vector<std::pair<unsigned, long long>>& w) const {
  if (kind_ != GroupKind::Free) throw ConfigInvalid("not a free group");
  FreeData d;
  for (auto [gen, exp] : w) {
    if (gen >= n_) throw ConfigInvalid("free generator out of range");
    if (exp == 0) continue;
    if (!d.syl.empty() && d.syl.back().gen == gen) {
      d.syl.back().exp += exp;
      if (d.syl.back().exp == 0) d.syl.pop_back();
    } else {
      d.syl.push_back({gen, exp});
    }
  }
  return make_free(shared_from_this(), std::move(d));
}

Element Group::product_syllable(unsigned factor, const Element& of_factor) const {
  if (kind_ != GroupKind::FreeProduct || factor >= factors_.size())
    throw ConfigInvalid("bad free product syllable");
  if (!of_factor.group()->same_as(*factors_[factor]))
    throw MixedGroups("syllable element not of the named factor");
  if (of_factor.is_identity()) return identity();
  return make_prod(shared_from_this(), ProdData{{ProdSyllable{factor, of_factor}}});
}

Element Group::sum_element(const std::vector<std::pair<Element, Element>>& entries) const {
  if (kind_ != GroupKind::DirectSum) throw ConfigInvalid("not a direct sum");
  SumData d;
  std::set<std::string> seen;
  for (const auto& [pos, val] : entries) {
    if (!pos.group()->same_as(*index_)) throw MixedGroups("position not in the index group");
    if (!val.group()->same_as(*base_)) throw MixedGroups("value not in the base group");
    if (!seen.insert(pos.bytes()).second) throw ConfigInvalid("duplicate position");
    if (!val.is_identity()) d.entries.push_back({pos, val});
  }
  std::sort(d.entries.begin(), d.entries.end(),
            [](const auto& a, const auto& b) { return a.first.bytes() < b.first.bytes(); });
  return make_sum(shared_from_this(), std::move(d));
}

Element Group::wreath_element(const std::vector<std::pair<Element, Element>>& lamp,
                              const Element& top) const {
  if (kind_ != GroupKind::Wreath) throw ConfigInvalid("not a wreath product");
  if (!top.group()->same_as(*index_)) throw MixedGroups("top element not in the top group");
  SumData d;
  std::set<std::string> seen;
  for (const auto& [pos, val] : lamp) {
    if (!pos.group()->same_as(*index_)) throw MixedGroups("lamp position not in the top group");
    if (!val.group()->same_as(*base_)) throw MixedGroups("lamp value not in the base group");
    if (!seen.insert(pos.bytes()).second) throw ConfigInvalid("duplicate lamp position");
    if (!val.is_identity()) d.entries.push_back({pos, val});
  }
  std::sort(d.entries.begin(), d.entries.end(),
            [](const auto& a, const auto& b) { return a.first.bytes() < b.first.bytes(); });
  return make_wreath(shared_from_this(), WreathData{std::move(d), top});
}

// ---------------------------------------------------------------------------
// Element structure access

const FinData* Element::fin() const {
  return group_->kind() == GroupKind::FiniteTable ? static_cast<const FinData*>(data_.get())
                                                  : nullptr;
}
const CycData* Element::cyc() const {
  return group_->kind() == GroupKind::Cyclic ? static_cast<const CycData*>(data_.get())
                                             : nullptr;
}
const FreeData* Element::free_data() const {
  return group_->kind() == GroupKind::Free ? static_cast<const FreeData*>(data_.get())
                                           : nullptr;
}
const ProdData* Element::prod() const {
  return group_->kind() == GroupKind::FreeProduct
             ? static_cast<const ProdData*>(data_.get())
             : nullptr;
}
const SumData* Element::sum() const {
  return group_->kind() == GroupKind::DirectSum ? static_cast<const SumData*>(data_.get())
                                                : nullptr;
}
const WreathData* Element::wreath_data() const {
  return group_->kind() == GroupKind::Wreath ? static_cast<const WreathData*>(data_.get())
                                             : nullptr;
}

bool Element::is_identity() const {
  switch (group_->kind()) {
    case GroupKind::FiniteTable:
      return fin()->idx == 0;
    case GroupKind::Cyclic:
      return cyc()->r == 0;
    case GroupKind::Free:
      return free_data()->syl.empty();
    case GroupKind::FreeProduct:
      return prod()->syl.empty();
    case GroupKind::DirectSum:
      return sum()->entries.empty();
    case GroupKind::Wreath:
      return wreath_data()->lamp.entries.empty() && wreath_data()->top.is_identity();
  }
  return false;
}

bool Element::operator==(const Element& o) const {
  if (!group_ || !o.group_) return group_ == o.group_;
  return group_->same_as(*o.group_) && bytes_ == o.bytes_;
}

bool Element::operator<(const Element& o) const { return bytes_ < o.bytes_; }

Element Element::lamp_value(const Element& pos) const {
  const SumData* d = nullptr;
  GroupPtr base;
  if (group_->kind() == GroupKind::DirectSum) {
    d = sum();
    base = group_->base();
  } else if (group_->kind() == GroupKind::Wreath) {
    d = &wreath_data()->lamp;
    base = group_->base();
  } else {
    throw ConfigInvalid("element has no lamp part");
  }
  for (const auto& [p, v] : d->entries)
    if (p.bytes() == pos.bytes()) return v;
  return base->identity();
}

std::vector<Element> Element::lamp_support() const {
  const SumData* d = group_->kind() == GroupKind::DirectSum ? sum()
                     : group_->kind() == GroupKind::Wreath  ? &wreath_data()->lamp
                                                            : nullptr;
  if (!d) throw ConfigInvalid("element has no lamp part");
  std::vector<Element> out;
  for (const auto& [p, v] : d->entries) out.push_back(p);
  return out;
}

Element Element::top_part() const {
  if (group_->kind() != GroupKind::Wreath) throw ConfigInvalid("element has no top part");
  return wreath_data()->top;
}

// ---------------------------------------------------------------------------
// algebra

static SumData sum_multiply(const SumData& a, const SumData& b) {
  SumData out;
  auto ia = a.entries.begin(), ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() ||
        (ia != a.entries.end() && ia->first.bytes() < ib->first.bytes())) {
      out.entries.push_back(*ia++);
    } else if (ia == a.entries.end() || ib->first.bytes() < ia->first.bytes()) {
      out.entries.push_back(*ib++);
    } else {
      Element v = ia->second * ib->second;
      if (!v.is_identity()) out.entries.push_back({ia->first, v});
      ++ia;
      ++ib;
    }
  }
  return out;
}

static SumData sum_shift(const Element& by, const SumData& d) {
  SumData out;
  for (const auto& [pos, val] : d.entries) out.entries.push_back({by * pos, val});
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& x, const auto& y) { return x.first.bytes() < y.first.bytes(); });
  return out;
}

static SumData sum_inverse(const SumData& d) {
  SumData out;
  for (const auto& [pos, val] : d.entries) out.entries.push_back({pos, val.inverse()});
  return out;
}

Element operator*(const Element& a, const Element& b) {
  if (!a.group() || !b.group()) throw MixedGroups("uninitialized element");
  if (!a.group()->same_as(*b.group()))
    throw MixedGroups("multiplying elements of different groups");
  const GroupPtr& g = a.group();
  switch (g->kind()) {
    case GroupKind::FiniteTable:
      return make_fin(g, static_cast<unsigned>(g->table()[a.fin()->idx][b.fin()->idx]));
    case GroupKind::Cyclic:
      return make_cyc(g, (a.cyc()->r + b.cyc()->r) % g->cyclic_n());
    case GroupKind::Free: {
      FreeData d = *a.free_data();
      for (const auto& s : b.free_data()->syl) {
        if (!d.syl.empty() && d.syl.back().gen == s.gen) {
          d.syl.back().exp += s.exp;
          if (d.syl.back().exp == 0) d.syl.pop_back();
        } else {
          d.syl.push_back(s);
        }
      }
      return make_free(g, std::move(d));
    }
    case GroupKind::FreeProduct: {
      ProdData d = *a.prod();
      for (const auto& s : b.prod()->syl) {
        if (!d.syl.empty() && d.syl.back().factor == s.factor) {
          Element v = d.syl.back().e * s.e;
          d.syl.pop_back();
          if (!v.is_identity()) d.syl.push_back({s.factor, v});
        } else {
          d.syl.push_back(s);
        }
      }
      return make_prod(g, std::move(d));
    }
    case GroupKind::DirectSum:
      return make_sum(g, sum_multiply(*a.sum(), *b.sum()));
    case GroupKind::Wreath: {
      const auto& wa = *a.wreath_data();
      const auto& wb = *b.wreath_data();
      SumData shifted = sum_shift(wa.top, wb.lamp);
      return make_wreath(g, WreathData{sum_multiply(wa.lamp, shifted), wa.top * wb.top});
    }
  }
  throw ComputeError("unreachable");
}

Element Element::inverse() const {
  const GroupPtr& g = group_;
  switch (g->kind()) {
    case GroupKind::FiniteTable: {
      int idx = fin()->idx;
      return make_fin(g, static_cast<unsigned>(g->table_inv_[idx]));
    }
    case GroupKind::Cyclic:
      return make_cyc(g, cyc()->r == 0 ? 0u : g->cyclic_n() - cyc()->r);
    case GroupKind::Free: {
      FreeData d;
      const auto& s = free_data()->syl;
      for (auto it = s.rbegin(); it != s.rend(); ++it) d.syl.push_back({it->gen, -it->exp});
      return make_free(g, std::move(d));
    }
    case GroupKind::FreeProduct: {
      ProdData d;
      const auto& s = prod()->syl;
      for (auto it = s.rbegin(); it != s.rend(); ++it)
        d.syl.push_back({it->factor, it->e.inverse()});
      return make_prod(g, std::move(d));
    }
    case GroupKind::DirectSum:
      return make_sum(g, sum_inverse(*sum()));
    case GroupKind::Wreath: {
      const auto& w = *wreath_data();
      Element ti = w.top.inverse();
      return make_wreath(g, WreathData{sum_shift(ti, sum_inverse(w.lamp)), ti});
    }
  }
  throw ComputeError("unreachable");
}

Element Element::pow(long long k) const {
  if (k == 0) return group_->identity();
  Element base = k > 0 ? *this : inverse();
  unsigned long long n = k > 0 ? static_cast<unsigned long long>(k)
                               : static_cast<unsigned long long>(-(k + 1)) + 1;
  Element acc = group_->identity();
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

unsigned long long Element::word_length() const {
  switch (group_->kind()) {
    case GroupKind::FiniteTable:
      return fin()->idx == 0 ? 0 : 1;
    case GroupKind::Cyclic: {
      unsigned r = cyc()->r;
      unsigned n = group_->cyclic_n();
      return std::min(r, n - r);
    }
    case GroupKind::Free: {
      unsigned long long t = 0;
      for (const auto& s : free_data()->syl) t += s.exp > 0 ? s.exp : -s.exp;
      return t;
    }
    case GroupKind::FreeProduct: {
      unsigned long long t = 0;
      for (const auto& s : prod()->syl) t += s.e.word_length();
      return t;
    }
    default:
      throw ComputeError("word length unsupported for this kind; use ball()");
  }
}

std::vector<std::pair<unsigned, long long>> Element::generator_word() const {
  std::vector<std::pair<unsigned, long long>> out;
  switch (group_->kind()) {
    case GroupKind::FiniteTable:
      if (fin()->idx != 0) out.push_back({fin()->idx - 1, 1});
      return out;
    case GroupKind::Cyclic: {
      unsigned r = cyc()->r, n = group_->cyclic_n();
      if (r == 0) return out;
      long long e = (r <= n - r) ? static_cast<long long>(r)
                                 : -static_cast<long long>(n - r);
      out.push_back({0, e});
      return out;
    }
    case GroupKind::Free:
      for (const auto& s : free_data()->syl) out.push_back({s.gen, s.exp});
      return out;
    case GroupKind::FreeProduct: {
      // generator ids are offsets into the concatenated factor generator lists
      std::vector<unsigned> offset(group_->factors().size(), 0);
      unsigned acc = 0;
      for (std::size_t i = 0; i < group_->factors().size(); ++i) {
        offset[i] = acc;
        acc += static_cast<unsigned>(group_->factors()[i]->generators().size());
      }
      for (const auto& s : prod()->syl)
        for (auto [g, e] : s.e.generator_word()) out.push_back({offset[s.factor] + g, e});
      return out;
    }
    default:
      throw ComputeError("generator word unsupported for this kind");
  }
}

std::string Element::word() const {
  switch (group_->kind()) {
    case GroupKind::DirectSum:
    case GroupKind::Wreath: {
      const SumData* lamp =
          group_->kind() == GroupKind::DirectSum ? sum() : &wreath_data()->lamp;
      std::ostringstream os;
      os << "(";
      bool first = true;
      for (const auto& [pos, val] : lamp->entries) {
        if (!first) os << ",";
        first = false;
        os << pos.word() << ":" << val.word();
      }
      os << ")";
      if (group_->kind() == GroupKind::Wreath) os << "|" << wreath_data()->top.word();
      return os.str();
    }
    default:
      break;
  }
  auto w = generator_word();
  if (w.empty()) return "e";
  const auto& labels = group_->generator_labels();
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << "*";
    os << labels[w[i].first];
    if (w[i].second != 1) os << "^" << w[i].second;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// words and balls

Element Group::parse_word(const std::string& word) const {
  if (gen_labels_.empty()) throw ConfigInvalid("group has no labeled generators");
  Element acc = identity();
  std::string w;
  for (char c : word)
    if (!isspace(static_cast<unsigned char>(c))) w.push_back(c);
  if (w.empty() || w == "e") return acc;
  std::size_t start = 0;
  while (start < w.size()) {
    std::size_t end = w.find('*', start);
    if (end == std::string::npos) end = w.size();
    std::string tok = w.substr(start, end - start);
    start = end + 1;
    if (tok.empty()) throw ConfigInvalid("empty token in word");
    long long exp = 1;
    auto caret = tok.find('^');
    std::string label = tok;
    if (caret != std::string::npos) {
      label = tok.substr(0, caret);
      try {
        exp = std::stoll(tok.substr(caret + 1));
      } catch (...) {
        throw ConfigInvalid("bad exponent in word token: " + tok);
      }
    }
    auto it = std::find(gen_labels_.begin(), gen_labels_.end(), label);
    if (it == gen_labels_.end()) throw ConfigInvalid("unknown generator: " + label);
    acc = acc * gens_[it - gen_labels_.begin()].pow(exp);
  }
  return acc;
}

std::vector<std::pair<Element, unsigned>> Group::ball_with_length(unsigned radius,
                                                                 std::size_t cap) const {
  std::vector<std::pair<Element, unsigned>> out;
  std::set<std::string> seen;
  Element e = identity();
  out.push_back({e, 0});
  seen.insert(e.bytes());
  std::vector<Element> moves;
  for (const auto& g : generators()) {
    moves.push_back(g);
    Element gi = g.inverse();
    if (gi.bytes() != g.bytes()) moves.push_back(gi);
  }
  std::size_t frontier_begin = 0;
  for (unsigned depth = 1; depth <= radius; ++depth) {
    std::size_t frontier_end = out.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (const auto& m : moves) {
        Element next = out[i].first * m;
        if (seen.insert(next.bytes()).second) {
          out.push_back({next, depth});
          if (out.size() > cap)
            throw BallTooLarge("ball exceeds " + std::to_string(cap) + " elements");
        }
      }
    }
    if (out.size() == frontier_end) break;  // finite group exhausted
    frontier_begin = frontier_end;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first.bytes() < b.first.bytes();
  });
  return out;
}

std::vector<Element> Group::ball(unsigned radius, std::size_t cap) const {
  auto wl = ball_with_length(radius, cap);
  std::vector<Element> out;
  out.reserve(wl.size());
  for (auto& [e, d] : wl) out.push_back(std::move(e));
  return out;
}

void sort_unique(std::vector<Element>& v) {
  std::sort(v.begin(), v.end(),
            [](const Element& a, const Element& b) { return a.bytes() < b.bytes(); });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const Element& a, const Element& b) { return a.bytes() == b.bytes(); }),
          v.end());
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::json;

static json group_to_json(const Group& g) {
  json j;
  switch (g.kind()) {
    case GroupKind::FiniteTable: {
      j["kind"] = "finite-table";
      j["table"] = g.table();
      j["labels"] = g.labels();
      break;
    }
    case GroupKind::Cyclic:
      j["kind"] = "cyclic";
      j["n"] = g.cyclic_n();
      j["label"] = g.generator_labels().empty() ? "g" : g.generator_labels()[0];
      break;
    case GroupKind::Free:
      j["kind"] = "free";
      j["rank"] = g.free_rank();
      j["labels"] = g.generator_labels();
      break;
    case GroupKind::FreeProduct: {
      j["kind"] = "free-product";
      json fs = json::array();
      for (const auto& f : g.factors()) fs.push_back(group_to_json(*f));
      j["factors"] = fs;
      break;
    }
    case GroupKind::DirectSum:
      j["kind"] = "direct-sum";
      j["base"] = group_to_json(*g.base());
      j["index"] = group_to_json(*g.index_group());
      break;
    case GroupKind::Wreath:
      j["kind"] = "wreath";
      j["base"] = group_to_json(*g.base());
      j["top"] = group_to_json(*g.index_group());
      break;
  }
  return j;
}

static GroupPtr group_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigInvalid("group spec must be an object with a kind");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "cyclic") {
    return Group::cyclic(j.at("n").get<unsigned>(),
                         j.value("label", std::string("g")));
  }
  if (kind == "free") {
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Group::free_group(j.at("rank").get<unsigned>(), labels);
  }
  if (kind == "finite-table") {
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Group::finite_table(j.at("table").get<std::vector<std::vector<int>>>(), labels);
  }
  if (kind == "free-product") {
    std::vector<GroupPtr> fs;
    for (const auto& f : j.at("factors")) fs.push_back(group_from_json(f));
    return Group::free_product(fs);
  }
  if (kind == "direct-sum")
    return Group::direct_sum(group_from_json(j.at("base")), group_from_json(j.at("index")));
  if (kind == "wreath")
    return Group::wreath(group_from_json(j.at("base")), group_from_json(j.at("top")));
  throw ConfigInvalid("unknown group kind: " + kind);
}

GroupPtr Group::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("group spec parse error: ") + e.what());
  }
  return group_from_json(j);
}

std::string Group::to_json_text() const { return group_to_json(*this).dump(); }

}  // namespace mgt
