#ifndef ATTNPARSE_METRICS_HPP
#define ATTNPARSE_METRICS_HPP

#include <Eigen/Core>
#include <compare>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "attnparse/attention_store.hpp"
#include "attnparse/conllu.hpp"
#include "attnparse/labeled_tree.hpp"

namespace attnparse {

class UndefinedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// d2p rows are dependents looking for their parent; p2d rows are parents
// looking for a dependent.
enum class Direction { d2p, p2d };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct RelationKey {
  std::string label;  // canonical label or kPooledLabel
  Direction direction = Direction::d2p;

  auto operator<=>(const RelationKey&) const = default;
  std::string name() const;  // "amod:d2p"
};

RelationKey parse_key(std::string_view name);

// Every canonical label, d2p before p2d, in inventory order.
std::vector<RelationKey> all_keys();
std::vector<RelationKey> non_clausal_keys();
std::vector<RelationKey> pooled_keys();

// Row `source` of the attention matrix is expected to peak at `target`.
struct Edge {
  Eigen::Index source;
  Eigen::Index target;
  bool operator==(const Edge&) const = default;
};

std::vector<Edge> sentence_edges(const Sentence& sentence, const RelationKey& key);

struct EdgeSet {
  std::vector<std::vector<Edge>> per_sentence;
  std::size_t total() const;
};

EdgeSet collect_edges(std::span<const Sentence> sentences, const RelationKey& key);
EdgeSet collect_edges(const AlignedCorpus& corpus, const RelationKey& key);

// Column of the row maximum; ties go to the lowest column.
template <typename Derived>
Eigen::Index row_argmax(const Eigen::MatrixBase<Derived>& m, Eigen::Index row) {
  Eigen::Index best = 0;
  auto best_value = m(row, 0);
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    auto v = m(row, c);
    if (v > best_value) {
      best_value = v;
      best = c;
    }
  }
  return best;
}

struct HitCount {
  std::size_t hits = 0;
  std::size_t total = 0;

  HitCount& operator+=(const HitCount& o) {
    hits += o.hits;
    total += o.total;
    return *this;
  }
  // Throws UndefinedMetric when total is zero.
  double fraction() const;
};

template <typename Derived>
HitCount count_argmax_hits(const Eigen::MatrixBase<Derived>& m, std::span<const Edge> edges) {
  HitCount c{0, edges.size()};
  for (const Edge& e : edges)
    if (row_argmax(m, e.source) == e.target) ++c.hits;
  return c;
}

// Fraction of edges whose row argmax in matrix_for(sentence_index) is the
// edge target. matrix_for may return any Eigen expression; it is only called
// for sentences that have edges.
template <typename MatrixFn>
double dep_acc(MatrixFn&& matrix_for, const EdgeSet& edges) {
  HitCount total;
  for (std::size_t s = 0; s < edges.per_sentence.size(); ++s) {
    const auto& list = edges.per_sentence[s];
    if (list.empty()) continue;
    total += count_argmax_hits(matrix_for(s), list);
  }
  if (total.total == 0) throw UndefinedMetric("DepAcc over an empty edge set");
  return total.fraction();
}

// Positional baseline: every key predicts target = source + offset.
using OffsetMap = std::map<RelationKey, int>;

// Mode of target - source; ties prefer smaller |offset|, then the negative one.
// Throws UndefinedMetric for an empty edge set.
int most_frequent_offset(const EdgeSet& edges);

// Keys without edges are left out of the map. Throws std::invalid_argument on
// an empty treebank.
OffsetMap fit_positional_baseline(std::span<const Sentence> sentences,
                                  const std::vector<RelationKey>& keys = all_keys());

double baseline_dep_acc(int offset, const EdgeSet& edges);

struct ScoreOptions {
  bool include_punct = true;
};

// Counts over non-root gold tokens: correct heads and correct heads+labels.
struct AttachmentCounts {
  std::size_t total = 0;
  std::size_t heads = 0;
  std::size_t labeled = 0;

  AttachmentCounts& operator+=(const AttachmentCounts& o) {
    total += o.total;
    heads += o.heads;
    labeled += o.labeled;
    return *this;
  }
  double uas() const;
  double las() const;
};

// Throws std::invalid_argument on a length mismatch.
AttachmentCounts attachment(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts = {});
double uas(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts = {});
double las(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts = {});

// Branching baselines with the gold root: every token attaches to its left
// (resp. right) neighbour; the token without such a neighbour attaches to the root.
LabeledTree left_branching(std::size_t n, std::size_t root);
LabeledTree right_branching(std::size_t n, std::size_t root);

}  // namespace attnparse

#endif  // ATTNPARSE_METRICS_HPP
