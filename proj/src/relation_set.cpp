#include "birkhoff/relation_set.hpp"

#include "birkhoff/errors.hpp"

namespace birkhoff {

void RelationSet::add_generator(VarId v) {
  if (is_generator(v)) return;
  if (is_solved(v)) throw Error("RelationSet: " + var_name(v) + " is already solved");
  gen_index_.emplace(v, generators_.size());
  generators_.push_back(v);
}

void RelationSet::add_solution(VarId v, MultiPoly rhs) {
  if (is_generator(v)) throw Error("RelationSet: cannot solve generator " + var_name(v));
  if (!is_solved(v)) solved_order_.push_back(v);
  solved_[v] = std::move(rhs);
}

const MultiPoly* RelationSet::solution(VarId v) const {
  auto it = solved_.find(v);
  return it == solved_.end() ? nullptr : &it->second;
}

MultiPoly reduce(const MultiPoly& p, const RelationSet& rs, const VarPredicate& is_parameter) {
  for (VarId v : p.variables()) {
    if (rs.is_generator(v) || rs.is_solved(v)) continue;
    if (is_parameter && is_parameter(v)) continue;
    throw UnknownVariable(var_name(v) + " is neither a generator nor solved");
  }
  return reduce_partial(p, rs);
}

MultiPoly reduce_partial(const MultiPoly& p, const RelationSet& rs) {
  return p.substitute([&](VarId v) { return rs.solution(v); });
}

}  // namespace birkhoff
