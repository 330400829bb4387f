#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mgt/coset.hpp"
#include "mgt/finitary.hpp"

namespace mgt {

// Lift of a finitary map on the subgroup shift to the whole-group shift:
//   phi(y)(g) = phi_sub((sigma(g)^-1 . y)|_sub) at coordinate sigma(g)^-1 g.
// A lifted map is itself a FinitaryMap over the big group, so lifts compose
// and can be lifted again.
class LiftedMap : public FinitaryMap {
 public:
  LiftedMap(CosetSchema schema, MapPtr inner);

  unsigned eval(const Element& at, const CoordFn& input) const override;
  MapPtr inverse() const override;

  // Exact equivariance defect of the lifted map, transported coset by coset
  // from the inner map's defects:
  //   D(delta) = union over s in S \ delta S of  s rho_s^-1 . D_inner(rho_s, x_s)
  // with rho_s the schema cocycle of (delta^-1, s) and x_s the fiber of
  // (s^-1 delta . y) over the subgroup.
  std::vector<Element> defect(const Element& delta, const CoordFn& input) const override;
  bool exact_defect_supported() const override;
  bool always_equivariant() const override { return inner_->always_equivariant(); }
  bool coordinatewise() const override { return inner_->coordinatewise(); }
  MeasureCertificate measure_certificate() const override;

  const CosetSchema& schema() const { return schema_; }
  const MapPtr& inner() const { return inner_; }

 private:
  CosetSchema schema_;
  MapPtr inner_;
};

std::shared_ptr<const LiftedMap> lift(CosetSchema schema, MapPtr inner);

// Iterated lift along a chain of schemas, innermost subgroup first:
// tower_lift({s1, s0}, m) = lift(s0, lift(s1, m)) requires s1's group to be
// s0's subgroup.
MapPtr tower_lift(std::vector<CosetSchema> chain, MapPtr inner);

std::vector<Element> predicted_defect(const FinitaryMap& map, const Element& delta,
                                      const Configuration& y);

struct EquivarianceReport {
  std::vector<Element> disagreements;  // observed in the ball, sorted
  bool has_predicted = false;
  std::vector<Element> predicted;      // exact transported defect, if supported
  bool match = false;                  // observed == predicted restricted to the ball
  bool stabilized = false;  // no disagreement within two steps of the ball edge
  std::uint64_t checked = 0;
  // Lifted maps only: observed disagreements grouped by coset representative.
  std::vector<std::pair<Element, std::vector<Element>>> by_coset;
};

// Compares phi(delta.y) with delta.phi(y) on the ball of the given radius.
EquivarianceReport verify_cofinite_equivariance(const MapPtr& map, const Element& delta,
                                                const Configuration& y, unsigned radius);

}  // namespace mgt
