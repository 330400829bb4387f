#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mgt/errors.hpp"

namespace mgt {

class Group;
class Element;
struct ElementFactory;
using GroupPtr = std::shared_ptr<const Group>;

enum class GroupKind { FiniteTable, Cyclic, Free, FreeProduct, DirectSum, Wreath };

// Immutable group description. Elements carry a pointer to their group and a
// normal form; two elements are equal iff their groups have the same
// fingerprint and their canonical byte serializations coincide.
//
// Canonical serialization (little-endian throughout):
//   finite table   u32 element index
//   cyclic         u32 residue in [0, n)
//   free           u32 syllable count, then (u32 generator, i64 exponent) each
//   free product   u32 syllable count, then (u32 factor, u32 len, bytes) each
//   direct sum     u32 entry count, then (u32 len, position bytes,
//                  u32 len, value bytes) each, entries sorted by position bytes
//   wreath         direct-sum block for the lamp part, then u32 len + bytes
//                  of the top element
class Group : public std::enable_shared_from_this<Group> {
 public:
  // table[i][j] = index of product g_i * g_j; index 0 must be the identity.
  static GroupPtr finite_table(std::vector<std::vector<int>> table,
                               std::vector<std::string> labels = {});
  static GroupPtr cyclic(unsigned n, std::string label = "g");
  static GroupPtr free_group(unsigned rank, std::vector<std::string> labels = {});
  // Flattens nested free products; at least two factors after flattening.
  static GroupPtr free_product(std::vector<GroupPtr> factors);
  static GroupPtr direct_sum(GroupPtr base, GroupPtr index);
  static GroupPtr wreath(GroupPtr base, GroupPtr top);

  GroupKind kind() const { return kind_; }
  const std::string& fingerprint() const { return fingerprint_; }
  bool same_as(const Group& other) const { return fingerprint_ == other.fingerprint_; }
  std::string describe() const;

  // Structure accessors (valid for the matching kind only).
  unsigned cyclic_n() const { return n_; }
  unsigned free_rank() const { return n_; }
  const std::vector<std::vector<int>>& table() const { return table_; }
  const std::vector<GroupPtr>& factors() const { return factors_; }
  const GroupPtr& base() const { return base_; }
  const GroupPtr& index_group() const { return index_; }
  const GroupPtr& top() const { return index_; }  // wreath only
  const std::vector<std::string>& labels() const { return labels_; }

  Element identity() const;
  // Declared generating set (no inverses). Throws if the kind has none
  // (direct sum over an infinite index group).
  const std::vector<Element>& generators() const;
  const std::vector<std::string>& generator_labels() const;

  bool is_finite() const;
  std::size_t order() const;  // finite kinds only
  // All elements of a finite group, sorted by canonical bytes.
  const std::vector<Element>& elements() const;
  std::size_t element_index(const Element& e) const;

  // Elements by structure.
  Element table_element(unsigned idx) const;
  Element cyclic_element(long long power) const;
  Element free_syllables(const std::vector<std::pair<unsigned, long long>>& w) const;
  Element product_syllable(unsigned factor, const Element& of_factor) const;
  Element sum_element(const std::vector<std::pair<Element, Element>>& entries) const;
  Element wreath_element(const std::vector<std::pair<Element, Element>>& lamp,
                         const Element& top) const;

  // Word I/O over the declared generators, e.g. "a^2*b^-1*a"; "e" is the
  // identity. Requires unambiguous generator labels.
  Element parse_word(const std::string& word) const;

  // Closed ball in the word metric of the declared generators, sorted by
  // (distance, canonical bytes). Hard cap guards runaway growth.
  std::vector<Element> ball(unsigned radius, std::size_t cap = 1000000) const;
  // Same, with distances.
  std::vector<std::pair<Element, unsigned>> ball_with_length(
      unsigned radius, std::size_t cap = 1000000) const;

  static GroupPtr from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  Group() = default;
  void seal();  // computes fingerprint, generators, caches

  GroupKind kind_ = GroupKind::Cyclic;
  unsigned n_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<int> table_inv_;
  std::vector<GroupPtr> factors_;
  GroupPtr base_, index_;
  std::vector<std::string> labels_;
  std::string fingerprint_;
  std::vector<Element> gens_;
  std::vector<std::string> gen_labels_;
  mutable std::shared_ptr<std::vector<Element>> all_elements_;
  mutable std::shared_ptr<std::map<std::string, std::size_t>> element_rank_;

  friend class Element;
};

struct FinData {
  unsigned idx;
};
struct CycData {
  unsigned r;
};
struct FreeSyllable {
  unsigned gen;
  long long exp;
};
struct FreeData {
  std::vector<FreeSyllable> syl;
};
struct ProdSyllable;
struct ProdData {
  std::vector<ProdSyllable> syl;
};
struct SumData;
struct WreathData;

class Element {
 public:
  Element() = default;

  const GroupPtr& group() const { return group_; }
  const std::string& bytes() const { return bytes_; }
  bool is_identity() const;

  friend Element operator*(const Element& a, const Element& b);
  Element inverse() const;
  Element pow(long long k) const;

  bool operator==(const Element& o) const;
  bool operator!=(const Element& o) const { return !(*this == o); }
  // Total order: canonical bytes (groups must match).
  bool operator<(const Element& o) const;

  // Generator word length; defined for finite-table, cyclic, free and
  // free-product kinds (ball BFS covers the rest).
  unsigned long long word_length() const;

  // Reduced generator word (generator id, exponent), for kinds with
  // word_length support.
  std::vector<std::pair<unsigned, long long>> generator_word() const;

  std::string word() const;  // human-readable
  std::string str() const { return word(); }

  // Structure accessors.
  const FinData* fin() const;
  const CycData* cyc() const;
  const FreeData* free_data() const;
  const ProdData* prod() const;
  const SumData* sum() const;
  const WreathData* wreath_data() const;

  // Direct-sum/wreath lamp access: value at a position (identity if absent).
  Element lamp_value(const Element& pos) const;
  std::vector<Element> lamp_support() const;
  Element top_part() const;

 private:
  friend class Group;
  friend struct ElementFactory;
  Element(GroupPtr g, std::shared_ptr<const void> data, std::string bytes)
      : group_(std::move(g)), data_(std::move(data)), bytes_(std::move(bytes)) {}

  GroupPtr group_;
  std::shared_ptr<const void> data_;  // points at kind-specific node
  std::string bytes_;
};

struct ProdSyllable {
  unsigned factor;
  Element e;
};
struct SumData {
  // sorted by position bytes; values are never the identity
  std::vector<std::pair<Element, Element>> entries;
};
struct WreathData {
  SumData lamp;
  Element top;
};

// Sorted-unique by canonical bytes.
void sort_unique(std::vector<Element>& v);

}  // namespace mgt
