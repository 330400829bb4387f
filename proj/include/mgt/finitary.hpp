#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mgt/group.hpp"
#include "mgt/shift.hpp"

namespace mgt {

using CoordFn = std::function<unsigned(const Element&)>;

struct MeasureCertificate {
  enum class Kind { None, CoordinatewiseBijection, BlockPermutation } kind;
  std::string note;
};

// Equivariant-up-to-finite-defect map of shift spaces. eval computes one
// output coordinate reading finitely many input coordinates; an eval that
// would need more than window_cap distinct reads throws NonFinitaryAtPoint.
class FinitaryMap : public std::enable_shared_from_this<FinitaryMap> {
 public:
  virtual ~FinitaryMap() = default;

  const GroupPtr& group() const { return group_; }
  const AlphabetPtr& source_alphabet() const { return src_; }
  const AlphabetPtr& target_alphabet() const { return tgt_; }
  unsigned window_cap() const { return wcap_; }

  virtual unsigned eval(const Element& at, const CoordFn& input) const = 0;
  virtual std::shared_ptr<const FinitaryMap> inverse() const = 0;

  // Exact disagreement set of phi(delta.x) versus delta.phi(x), as a sorted
  // coordinate list. Only when exact_defect_supported(); the returned set is
  // the true defect, not a superset.
  virtual std::vector<Element> defect(const Element& delta, const CoordFn& input) const;
  virtual bool exact_defect_supported() const { return false; }

  // Structural flags used by composition to route defects.
  virtual bool always_equivariant() const { return false; }
  virtual bool coordinatewise() const { return false; }
  virtual MeasureCertificate measure_certificate() const {
    return {MeasureCertificate::Kind::None, ""};
  }

 protected:
  FinitaryMap(GroupPtr g, AlphabetPtr src, AlphabetPtr tgt, unsigned wcap);
  GroupPtr group_;
  AlphabetPtr src_, tgt_;
  unsigned wcap_;
};

using MapPtr = std::shared_ptr<const FinitaryMap>;

// Wraps a coordinate function and throws NonFinitaryAtPoint once more than
// `cap` distinct coordinates have been read.
class BudgetedReader {
 public:
  BudgetedReader(CoordFn fn, unsigned cap, std::string at_desc);
  unsigned operator()(const Element& g) const;
  CoordFn as_fn() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

MapPtr identity_map(GroupPtr g, AlphabetPtr a);

// x -> (g -> bij[x(g)]). Weights must be preserved symbol by symbol.
MapPtr coordinatewise_bijection(GroupPtr g, AlphabetPtr src, AlphabetPtr tgt,
                                std::vector<unsigned> bij);

// Binary adding machine over the integers with the uniform {0,1} alphabet.
MapPtr odometer_map(GroupPtr z, AlphabetPtr binary, unsigned window_cap = 64);

// Permutes the pattern seen in a fixed finite window, identity elsewhere.
// pattern_perm has size |alphabet|^|window|, pattern index little-endian in
// the sorted window order, and must preserve product weights.
MapPtr block_scramble_map(GroupPtr g, AlphabetPtr a, std::vector<Element> window,
                          std::vector<unsigned> pattern_perm);

// compose({f, g})(x) = f(g(x)); chain[i] consumes the output of chain[i+1].
MapPtr compose(std::vector<MapPtr> chain);

}  // namespace mgt
