#ifndef ATTNPARSE_LABELED_TREE_HPP
#define ATTNPARSE_LABELED_TREE_HPP

#include <string>
#include <vector>

#include "attnparse/conllu.hpp"

namespace attnparse {

inline constexpr int kRootHead = -1;

// Predicted tree over 0-based positions. heads[root_index] == kRootHead.
struct LabeledTree {
  std::vector<int> heads;
  std::vector<std::string> labels;
  std::size_t root_index = 0;

  std::size_t size() const { return heads.size(); }
};

// Empty when the tree has one kRootHead at root_index and no cycles.
std::string labeled_tree_problem(const LabeledTree& tree);

// Gold tree with canonical labels; the root token gets label "root".
LabeledTree tree_from_sentence(const Sentence& sentence);

// Copy of sentence with HEAD/DEPREL replaced by the tree.
Sentence apply_tree(const Sentence& sentence, const LabeledTree& tree);

}  // namespace attnparse

#endif  // ATTNPARSE_LABELED_TREE_HPP
