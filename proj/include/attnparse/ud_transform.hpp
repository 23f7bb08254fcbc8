#ifndef ATTNPARSE_UD_TRANSFORM_HPP
#define ATTNPARSE_UD_TRANSFORM_HPP

#include <set>
#include <string>

#include "attnparse/conllu.hpp"

namespace attnparse {

// Rewrites of gold UD trees towards the structures found in attention:
// copula as clause head, expletive as subject, chained coordination.
struct TransformConfig {
  bool enable_copula = true;
  bool enable_expletive = true;
  bool enable_coordination = true;
  // Dependents of a copular predicate (matched by base label) that move to the copula.
  std::set<std::string> copula_rehang_labels = {"nsubj", "csubj", "expl", "aux"};

  // Throws std::invalid_argument when enable_copula is set with an empty rehang set.
  void check() const;
};

// The copula takes over the predicate's head and relation; the predicate hangs
// below it as obj, and rehang-labelled dependents follow the copula. Nested
// copulas are handled deepest predicate first.
Sentence transform_copula(const Sentence& sentence, const TransformConfig& config);

// expl becomes nsubj; an nsubj sibling of it becomes obj. Heads are untouched.
Sentence transform_expletive(const Sentence& sentence, const TransformConfig& config);

// Conjuncts sharing a head are chained left to right: the first keeps the head,
// each later one attaches to its predecessor.
Sentence transform_coordination(const Sentence& sentence, const TransformConfig& config);

// Coordination, then copula, then expletive, each gated by its flag.
Sentence apply_all(const Sentence& sentence, const TransformConfig& config);

}  // namespace attnparse

#endif  // ATTNPARSE_UD_TRANSFORM_HPP
