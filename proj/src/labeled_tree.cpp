#include "attnparse/labeled_tree.hpp"

#include <stdexcept>

#include "attnparse/labels.hpp"

namespace attnparse {

std::string labeled_tree_problem(const LabeledTree& tree) {
  if (tree.labels.size() != tree.heads.size()) return "labels and heads differ in length";
  if (tree.heads.empty()) return {};
  if (tree.root_index >= tree.heads.size()) return "root index out of range";
  std::vector<int> one_based;
  one_based.reserve(tree.heads.size());
  for (int h : tree.heads) one_based.push_back(h == kRootHead ? 0 : h + 1);
  if (one_based[tree.root_index] != 0) return "root_index is not the root";
  return tree_problem(one_based);
}

LabeledTree tree_from_sentence(const Sentence& sentence) {
  LabeledTree tree;
  for (const Token& t : sentence.tokens) {
    tree.heads.push_back(t.head == 0 ? kRootHead : t.head - 1);
    tree.labels.push_back(t.head == 0 ? "root" : canonical_label(t.deprel));
  }
  tree.root_index = sentence.root();
  return tree;
}

Sentence apply_tree(const Sentence& sentence, const LabeledTree& tree) {
  if (tree.size() != sentence.size())
    throw std::invalid_argument("tree of " + std::to_string(tree.size()) + " tokens for sentence " +
                                sentence.sent_id + " of " + std::to_string(sentence.size()));
  Sentence out = sentence;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out.tokens[i].head = tree.heads[i] == kRootHead ? 0 : tree.heads[i] + 1;
    out.tokens[i].deprel = tree.labels[i];
  }
  return out;
}

}  // namespace attnparse
