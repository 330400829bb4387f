#include "mgt/lift.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mgt/errors.hpp"

namespace mgt {

LiftedMap::LiftedMap(CosetSchema schema, MapPtr inner)
    : FinitaryMap(schema.group(), inner ? inner->source_alphabet() : nullptr,
                  inner ? inner->target_alphabet() : nullptr,
                  inner ? inner->window_cap() : 1),
      schema_(std::move(schema)),
      inner_(std::move(inner)) {
  if (!inner_->group()->same_as(*schema_.subgroup()))
    throw GroupMismatch("inner map does not act over the schema subgroup");
}

unsigned LiftedMap::eval(const Element& at, const CoordFn& input) const {
  if (!at.group()->same_as(*group_)) throw MixedGroups("coordinate from a different group");
  Element s = schema_.rep(at);
  Element mu = schema_.project(s.inverse() * at);
  CoordFn fiber = [this, &s, &input](const Element& m) {
    return input(s * schema_.embed(m));
  };
  return inner_->eval(mu, fiber);
}

MapPtr LiftedMap::inverse() const { return lift(schema_, inner_->inverse()); }

std::vector<Element> LiftedMap::defect(const Element& delta, const CoordFn& input) const {
  if (!delta.group()->same_as(*group_))
    throw MixedGroups("translation from a different group");
  Element dinv = delta.inverse();
  std::vector<Element> out;
  for (const Element& s : schema_.reps_minus_translate(delta)) {
    Element rho_big = schema_.cocycle(dinv, s);
    Element rho = schema_.project(rho_big);
    CoordFn fiber = [this, &dinv, &s, &input](const Element& m) {
      return input(dinv * (s * schema_.embed(m)));
    };
    std::vector<Element> inner_defect = inner_->defect(rho, fiber);
    Element carry = s * rho_big.inverse();
    for (const Element& d : inner_defect) out.push_back(carry * schema_.embed(d));
  }
  sort_unique(out);
  return out;
}

bool LiftedMap::exact_defect_supported() const { return inner_->exact_defect_supported(); }

MeasureCertificate LiftedMap::measure_certificate() const {
  MeasureCertificate c = inner_->measure_certificate();
  if (!c.note.empty()) c.note = "coset-by-coset: " + c.note;
  return c;
}

std::shared_ptr<const LiftedMap> lift(CosetSchema schema, MapPtr inner) {
  return std::make_shared<LiftedMap>(std::move(schema), std::move(inner));
}

MapPtr tower_lift(std::vector<CosetSchema> chain, MapPtr inner) {
  if (chain.empty()) throw ConfigInvalid("empty schema chain");
  if (!inner) throw ConfigInvalid("null inner map");
  if (!inner->group()->same_as(*chain.front().subgroup()))
    throw ChainMismatch("inner map does not act over the innermost subgroup");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!chain[i].group()->same_as(*chain[i + 1].subgroup()))
      throw ChainMismatch("schema " + std::to_string(i) +
                          " does not land in the subgroup of schema " + std::to_string(i + 1));
  MapPtr cur = std::move(inner);
  for (auto& s : chain) cur = lift(std::move(s), std::move(cur));
  return cur;
}

std::vector<Element> predicted_defect(const FinitaryMap& map, const Element& delta,
                                      const Configuration& y) {
  if (!y.group()->same_as(*map.group())) throw MixedGroups("configuration group mismatch");
  if (!y.alphabet()->same_as(*map.source_alphabet()))
    throw ConfigInvalid("configuration alphabet mismatch");
  return map.defect(delta, y.reader());
}

EquivarianceReport verify_cofinite_equivariance(const MapPtr& map, const Element& delta,
                                                const Configuration& y, unsigned radius) {
  if (!map) throw ConfigInvalid("null map");
  if (!y.group()->same_as(*map->group())) throw MixedGroups("configuration group mismatch");
  if (!y.alphabet()->same_as(*map->source_alphabet()))
    throw ConfigInvalid("configuration alphabet mismatch");
  if (!delta.group()->same_as(*map->group()))
    throw MixedGroups("translation from a different group");

  Element dinv = delta.inverse();
  CoordFn in0 = y.reader();
  Configuration y_copy = y;
  CoordFn in_shifted = [y_copy, dinv](const Element& c) { return y_copy.eval(dinv * c); };

  EquivarianceReport rep;
  auto ball = map->group()->ball_with_length(radius);
  std::map<std::string, unsigned> depth;
  for (const auto& [g, len] : ball) depth[g.bytes()] = len;
  for (const auto& [g, len] : ball) {
    unsigned a = map->eval(g, in_shifted);
    unsigned b = map->eval(dinv * g, in0);
    ++rep.checked;
    if (a != b) rep.disagreements.push_back(g);
  }
  sort_unique(rep.disagreements);

  rep.stabilized = true;
  for (const auto& g : rep.disagreements)
    if (radius < 2 || depth.at(g.bytes()) > radius - 2) rep.stabilized = false;

  if (map->exact_defect_supported()) {
    rep.has_predicted = true;
    rep.predicted = map->defect(delta, in0);
    std::vector<Element> in_ball;
    for (const auto& p : rep.predicted)
      if (depth.count(p.bytes())) in_ball.push_back(p);
    rep.match = in_ball == rep.disagreements;
  }

  if (auto lifted = std::dynamic_pointer_cast<const LiftedMap>(map)) {
    std::map<std::string, std::pair<Element, std::vector<Element>>> by;
    for (const auto& g : rep.disagreements) {
      Element s = lifted->schema().rep(g);
      auto [it, inserted] = by.try_emplace(s.bytes(), s, std::vector<Element>{});
      it->second.second.push_back(g);
    }
    for (auto& [k, v] : by) rep.by_coset.push_back(std::move(v));
  }
  return rep;
}

}  // namespace mgt
