#ifndef ATTNPARSE_TREE_BUILDER_HPP
#define ATTNPARSE_TREE_BUILDER_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "attnparse/attention_store.hpp"
#include "attnparse/conllu.hpp"
#include "attnparse/head_selection.hpp"
#include "attnparse/labeled_tree.hpp"
#include "attnparse/labels.hpp"

namespace attnparse {

// Added to every entry before the geometric mean so logs stay finite and
// every edge keeps a positive score.
inline constexpr double kScoreFloor = 1e-9;

// Weighted geometric mean of the parent->dependent matrix and the transposed
// dependent->parent matrix. The result is indexed [parent][dependent]. A zero
// weight drops that factor entirely.
template <typename DerivedP2d, typename DerivedD2p>
Eigen::MatrixXd merge_directions(const Eigen::MatrixBase<DerivedP2d>& p2d, const Eigen::MatrixBase<DerivedD2p>& d2p,
                                 double w_p2d, double w_d2p) {
  if (w_p2d < 0.0 || w_d2p < 0.0) throw std::invalid_argument("direction weights must be non-negative");
  if (w_p2d + w_d2p <= 0.0) throw std::invalid_argument("direction weights are both zero");
  if (p2d.rows() != d2p.cols() || p2d.cols() != d2p.rows())
    throw std::invalid_argument("direction matrices differ in shape");
  const double total = w_p2d + w_d2p;
  const double a = w_p2d / total;
  const double b = w_d2p / total;
  Eigen::ArrayXXd forward = p2d.template cast<double>().array() + kScoreFloor;
  Eigen::ArrayXXd backward = d2p.template cast<double>().transpose().array() + kScoreFloor;
  if (b == 0.0) return forward.matrix();
  if (a == 0.0) return backward.matrix();
  return (forward.pow(a) * backward.pow(b)).matrix();
}

// scores(i, j): weight of edge parent i -> dependent j. edge_labels holds the
// label that produced each score.
struct ScoredGraph {
  Eigen::MatrixXd scores;
  Eigen::MatrixXi edge_labels;
};

// Elementwise max over label matrices; ties go to the label earlier in the
// canonical inventory. Throws std::invalid_argument on empty input or shape mismatch.
ScoredGraph label_maxpool(std::vector<std::pair<LabelId, Eigen::MatrixXd>> per_label);

enum class RootConstraint {
  incoming,  // zero the root's column: nothing may govern the root
  outgoing,  // zero the root's row, the literal reading kept for replication studies
};

ScoredGraph apply_root_constraint(ScoredGraph graph, std::size_t root,
                                  RootConstraint mode = RootConstraint::incoming);

class DisconnectedGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Scalar>
using ScoreMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Recursive cycle contraction. -infinity marks a missing edge.
template <typename Scalar>
std::vector<int> cle_recurse(const ScoreMatrix<Scalar>& w, int root) {
  const int n = static_cast<int>(w.rows());
  const Scalar none = -std::numeric_limits<Scalar>::infinity();
  std::vector<int> parent(static_cast<std::size_t>(n), kRootHead);
  for (int v = 0; v < n; ++v) {
    if (v == root) continue;
    int best = kRootHead;
    for (int u = 0; u < n; ++u) {
      if (u == v || w(u, v) == none) continue;
      if (best == kRootHead || w(u, v) > w(best, v)) best = u;
    }
    if (best == kRootHead) throw DisconnectedGraph("node " + std::to_string(v) + " has no incoming edge");
    parent[static_cast<std::size_t>(v)] = best;
  }

  // Find a cycle among the greedy choices.
  std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 on current walk, 2 done
  std::vector<int> cycle;
  for (int start = 0; start < n && cycle.empty(); ++start) {
    int v = start;
    std::vector<int> walk;
    while (v != kRootHead && state[static_cast<std::size_t>(v)] == 0) {
      state[static_cast<std::size_t>(v)] = 1;
      walk.push_back(v);
      v = parent[static_cast<std::size_t>(v)];
    }
    if (v != kRootHead && state[static_cast<std::size_t>(v)] == 1) {
      auto it = std::find(walk.begin(), walk.end(), v);
      cycle.assign(it, walk.end());
    }
    for (int x : walk) state[static_cast<std::size_t>(x)] = 2;
  }
  if (cycle.empty()) return parent;

  std::sort(cycle.begin(), cycle.end());
  std::vector<bool> in_cycle(static_cast<std::size_t>(n), false);
  for (int c : cycle) in_cycle[static_cast<std::size_t>(c)] = true;

  // Contracted graph: outside nodes keep their order, the cycle becomes the last node.
  std::vector<int> new_id(static_cast<std::size_t>(n), -1);
  std::vector<int> old_id;
  for (int v = 0; v < n; ++v) {
    if (in_cycle[static_cast<std::size_t>(v)]) continue;
    new_id[static_cast<std::size_t>(v)] = static_cast<int>(old_id.size());
    old_id.push_back(v);
  }
  const int m = static_cast<int>(old_id.size());
  const int c = m;
  ScoreMatrix<Scalar> cw = ScoreMatrix<Scalar>::Constant(m + 1, m + 1, none);
  std::vector<int> enter(static_cast<std::size_t>(n), -1);  // outside u -> cycle node it enters
  std::vector<int> leave(static_cast<std::size_t>(n), -1);  // outside v <- cycle node it leaves from

  for (int u = 0; u < n; ++u) {
    if (in_cycle[static_cast<std::size_t>(u)]) continue;
    const int nu = new_id[static_cast<std::size_t>(u)];
    for (int v = 0; v < n; ++v) {
      if (in_cycle[static_cast<std::size_t>(v)] || u == v) continue;
      cw(nu, new_id[static_cast<std::size_t>(v)]) = w(u, v);
    }
    for (int v : cycle) {
      if (w(u, v) == none) continue;
      Scalar gain = w(u, v) - w(parent[static_cast<std::size_t>(v)], v);
      if (enter[static_cast<std::size_t>(u)] == -1 || gain > cw(nu, c)) {
        cw(nu, c) = gain;
        enter[static_cast<std::size_t>(u)] = v;
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (in_cycle[static_cast<std::size_t>(v)]) continue;
    const int nv = new_id[static_cast<std::size_t>(v)];
    for (int u : cycle) {
      if (w(u, v) == none) continue;
      if (leave[static_cast<std::size_t>(v)] == -1 || w(u, v) > cw(c, nv)) {
        cw(c, nv) = w(u, v);
        leave[static_cast<std::size_t>(v)] = u;
      }
    }
  }

  std::vector<int> sub = cle_recurse<Scalar>(cw, new_id[static_cast<std::size_t>(root)]);

  std::vector<int> out = parent;
  for (int nv = 0; nv < m; ++nv) {
    const int v = old_id[static_cast<std::size_t>(nv)];
    const int p = sub[static_cast<std::size_t>(nv)];
    if (p == kRootHead) continue;
    out[static_cast<std::size_t>(v)] = p == c ? leave[static_cast<std::size_t>(v)] : old_id[static_cast<std::size_t>(p)];
  }
  const int entry_parent = old_id[static_cast<std::size_t>(sub[static_cast<std::size_t>(c)])];
  out[static_cast<std::size_t>(enter[static_cast<std::size_t>(entry_parent)])] = entry_parent;
  return out;
}

}  // namespace detail

// Maximum spanning arborescence rooted at root over scores(parent, dependent).
// Returns parent indices with kRootHead at root. Ties go to the lower parent index.
template <typename Derived>
std::vector<int> chu_liu_edmonds(const Eigen::MatrixBase<Derived>& scores, std::size_t root) {
  using Scalar = typename Derived::Scalar;
  if (scores.rows() != scores.cols()) throw std::invalid_argument("score matrix must be square");
  if (root >= static_cast<std::size_t>(scores.rows())) throw std::invalid_argument("root outside graph");
  detail::ScoreMatrix<Scalar> w = scores;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    w(i, i) = -std::numeric_limits<Scalar>::infinity();
    w(i, static_cast<Eigen::Index>(root)) = -std::numeric_limits<Scalar>::infinity();
  }
  return detail::cle_recurse<Scalar>(w, static_cast<int>(root));
}

struct ExtractOptions {
  bool use_labels = true;  // false: one pooled ensemble pair, no max-pooling
  RootConstraint root_mode = RootConstraint::incoming;
};

// Merged [parent][dependent] matrix of one label from its two directional
// ensembles, weighted by their selection DepAcc. nullopt when neither
// direction is present or both weights are zero.
std::optional<Eigen::MatrixXd> label_matrix(const AttentionDataset& dataset, const SentenceAttention& attention,
                                            const Ensemble* p2d, const Ensemble* d2p);

// Labeled tree for one sentence with the root fixed to the gold root. Throws
// std::invalid_argument when no usable ensemble exists.
LabeledTree extract_tree(const Sentence& sentence, const AttentionDataset& dataset,
                         const SentenceAttention& attention, const EnsembleSet& ensembles,
                         const ExtractOptions& options = {});

std::vector<LabeledTree> extract_trees(const AlignedCorpus& corpus, const EnsembleSet& ensembles,
                                       const ExtractOptions& options = {});

// Keys whose ensembles feed tree construction under the given options.
std::vector<RelationKey> construction_keys(const ExtractOptions& options);

}  // namespace attnparse

#endif  // ATTNPARSE_TREE_BUILDER_HPP
