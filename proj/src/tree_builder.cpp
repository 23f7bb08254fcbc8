#include "attnparse/tree_builder.hpp"

#include "attnparse/parallel.hpp"

namespace attnparse {

ScoredGraph label_maxpool(std::vector<std::pair<LabelId, Eigen::MatrixXd>> per_label) {
  if (per_label.empty()) throw std::invalid_argument("max-pool over no label matrices");
  std::stable_sort(per_label.begin(), per_label.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const Eigen::Index n = per_label.front().second.rows();
  ScoredGraph g;
  g.scores = per_label.front().second;
  g.edge_labels = Eigen::MatrixXi::Constant(n, n, per_label.front().first);
  for (std::size_t k = 1; k < per_label.size(); ++k) {
    const auto& [label, m] = per_label[k];
    if (m.rows() != n || m.cols() != n) throw std::invalid_argument("label matrices differ in shape");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (m(i, j) > g.scores(i, j)) {
          g.scores(i, j) = m(i, j);
          g.edge_labels(i, j) = label;
        }
      }
    }
  }
  return g;
}

ScoredGraph apply_root_constraint(ScoredGraph graph, std::size_t root, RootConstraint mode) {
  const auto r = static_cast<Eigen::Index>(root);
  if (r >= graph.scores.rows()) throw std::invalid_argument("root outside graph");
  if (mode == RootConstraint::incoming)
    graph.scores.col(r).setZero();
  else
    graph.scores.row(r).setZero();
  return graph;
}

std::optional<Eigen::MatrixXd> label_matrix(const AttentionDataset& dataset, const SentenceAttention& attention,
                                            const Ensemble* p2d, const Ensemble* d2p) {
  const double w_p2d = p2d ? p2d->dev_dep_acc : 0.0;
  const double w_d2p = d2p ? d2p->dev_dep_acc : 0.0;
  if (w_p2d + w_d2p <= 0.0) return std::nullopt;
  const Eigen::Index n = attention.n;
  Eigen::MatrixXd forward = p2d ? ensemble_matrix(dataset, attention, p2d->heads) : Eigen::MatrixXd::Ones(n, n);
  Eigen::MatrixXd backward = d2p ? ensemble_matrix(dataset, attention, d2p->heads) : Eigen::MatrixXd::Ones(n, n);
  return merge_directions(forward, backward, w_p2d, w_d2p);
}

std::vector<RelationKey> construction_keys(const ExtractOptions& options) {
  return options.use_labels ? non_clausal_keys() : pooled_keys();
}

LabeledTree extract_tree(const Sentence& sentence, const AttentionDataset& dataset,
                         const SentenceAttention& attention, const EnsembleSet& ensembles,
                         const ExtractOptions& options) {
  if (sentence.size() != attention.n)
    throw std::invalid_argument("sentence " + sentence.sent_id + " does not match its attention tensor");
  const std::size_t root = sentence.root();

  std::vector<std::pair<LabelId, Eigen::MatrixXd>> per_label;
  if (options.use_labels) {
    for (std::size_t l = 0; l < kNumNonClausal; ++l) {
      std::string label(kCanonicalLabels[l]);
      auto merged = label_matrix(dataset, attention, ensembles.find({label, Direction::p2d}),
                                 ensembles.find({label, Direction::d2p}));
      if (merged) per_label.emplace_back(static_cast<LabelId>(l), std::move(*merged));
    }
  } else {
    std::string label(kPooledLabel);
    auto merged = label_matrix(dataset, attention, ensembles.find({label, Direction::p2d}),
                               ensembles.find({label, Direction::d2p}));
    if (merged) per_label.emplace_back(*label_id("dep"), std::move(*merged));
  }
  if (per_label.empty())
    throw std::invalid_argument(options.use_labels ? "no non-clausal ensembles available for tree construction"
                                                   : "no pooled ensembles available for label-free construction");

  ScoredGraph graph = apply_root_constraint(label_maxpool(std::move(per_label)), root, options.root_mode);
  std::vector<int> parents = chu_liu_edmonds(graph.scores, root);

  LabeledTree tree;
  tree.root_index = root;
  tree.heads = parents;
  tree.labels.resize(parents.size());
  for (std::size_t v = 0; v < parents.size(); ++v) {
    if (parents[v] == kRootHead) {
      tree.labels[v] = "root";
      continue;
    }
    LabelId id = graph.edge_labels(parents[v], static_cast<Eigen::Index>(v));
    tree.labels[v] = std::string(label_name(id));
  }
  return tree;
}

std::vector<LabeledTree> extract_trees(const AlignedCorpus& corpus, const EnsembleSet& ensembles,
                                       const ExtractOptions& options) {
  std::vector<LabeledTree> trees(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    trees[i] = extract_tree(corpus.sentence(i), *corpus.dataset, *corpus.items[i].attention, ensembles, options);
  });
  return trees;
}

}  // namespace attnparse
