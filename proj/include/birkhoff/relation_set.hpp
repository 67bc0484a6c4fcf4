#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "birkhoff/multipoly.hpp"

namespace birkhoff {

// Generators plus explicit solutions of the other symbols in terms of them.
// Solutions mention generators only, so one substitution pass reduces.
class RelationSet {
public:
  void add_generator(VarId v);
  void add_solution(VarId v, MultiPoly rhs);
  void add_residual(MultiPoly r) { residual_.push_back(std::move(r)); }

  bool is_generator(VarId v) const { return gen_index_.count(v) != 0; }
  bool is_solved(VarId v) const { return solved_.count(v) != 0; }
  const MultiPoly* solution(VarId v) const;

  const std::vector<VarId>& generators() const { return generators_; }
  // Solved symbols in the order they were determined.
  const std::vector<VarId>& solved_order() const { return solved_order_; }
  const std::map<VarId, MultiPoly>& solved() const { return solved_; }
  // Raw equations that must vanish once reduced.
  const std::vector<MultiPoly>& residual_relations() const { return residual_; }

private:
  std::vector<VarId> generators_;
  std::map<VarId, std::size_t> gen_index_;
  std::vector<VarId> solved_order_;
  std::map<VarId, MultiPoly> solved_;
  std::vector<MultiPoly> residual_;
};

using VarPredicate = std::function<bool(VarId)>;

// Rewrites p in generators. Variables that are neither generators nor solved
// raise UnknownVariable unless `is_parameter` accepts them.
MultiPoly reduce(const MultiPoly& p, const RelationSet& rs, const VarPredicate& is_parameter = {});

// Substitutes solved symbols and leaves everything else alone.
MultiPoly reduce_partial(const MultiPoly& p, const RelationSet& rs);

}  // namespace birkhoff
