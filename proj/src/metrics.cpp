#include "attnparse/metrics.hpp"

#include <cstdlib>

#include "attnparse/labels.hpp"

namespace attnparse {

std::string_view to_string(Direction d) { return d == Direction::d2p ? "d2p" : "p2d"; }

Direction parse_direction(std::string_view s) {
  if (s == "d2p") return Direction::d2p;
  if (s == "p2d") return Direction::p2d;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

std::string RelationKey::name() const { return label + ":" + std::string(to_string(direction)); }

RelationKey parse_key(std::string_view name) {
  auto colon = name.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("relation key needs label:direction, got '" + std::string(name) + "'");
  RelationKey key{std::string(name.substr(0, colon)), parse_direction(name.substr(colon + 1))};
  if (key.label != kPooledLabel && !label_id(key.label))
    throw std::invalid_argument("unknown canonical label '" + key.label + "'");
  return key;
}

std::vector<RelationKey> all_keys() {
  std::vector<RelationKey> keys;
  for (std::string_view l : kCanonicalLabels) {
    keys.push_back({std::string(l), Direction::d2p});
    keys.push_back({std::string(l), Direction::p2d});
  }
  return keys;
}

std::vector<RelationKey> non_clausal_keys() {
  std::vector<RelationKey> keys = all_keys();
  keys.resize(2 * kNumNonClausal);
  return keys;
}

std::vector<RelationKey> pooled_keys() {
  return {{std::string(kPooledLabel), Direction::d2p}, {std::string(kPooledLabel), Direction::p2d}};
}

std::vector<Edge> sentence_edges(const Sentence& sentence, const RelationKey& key) {
  const bool pooled = key.label == kPooledLabel;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const Token& t = sentence.tokens[i];
    if (t.head == 0) continue;
    std::string label = canonical_label(t.deprel);
    if (pooled ? !is_non_clausal(label) : label != key.label) continue;
    auto dependent = static_cast<Eigen::Index>(i);
    auto governor = static_cast<Eigen::Index>(t.head - 1);
    if (key.direction == Direction::d2p)
      edges.push_back({dependent, governor});
    else
      edges.push_back({governor, dependent});
  }
  return edges;
}

std::size_t EdgeSet::total() const {
  std::size_t n = 0;
  for (const auto& v : per_sentence) n += v.size();
  return n;
}

EdgeSet collect_edges(std::span<const Sentence> sentences, const RelationKey& key) {
  EdgeSet set;
  set.per_sentence.reserve(sentences.size());
  for (const Sentence& s : sentences) set.per_sentence.push_back(sentence_edges(s, key));
  return set;
}

EdgeSet collect_edges(const AlignedCorpus& corpus, const RelationKey& key) {
  EdgeSet set;
  set.per_sentence.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) set.per_sentence.push_back(sentence_edges(corpus.sentence(i), key));
  return set;
}

double HitCount::fraction() const {
  if (total == 0) throw UndefinedMetric("fraction over zero items");
  return static_cast<double>(hits) / static_cast<double>(total);
}

int most_frequent_offset(const EdgeSet& edges) {
  std::map<long, std::size_t> freq;
  for (const auto& list : edges.per_sentence)
    for (const Edge& e : list) ++freq[static_cast<long>(e.target - e.source)];
  if (freq.empty()) throw UndefinedMetric("positional baseline over an empty edge set");
  long best = 0;
  std::size_t best_count = 0;
  for (const auto& [offset, count] : freq) {
    bool better = count > best_count ||
                  (count == best_count && (std::labs(offset) < std::labs(best) ||
                                           (std::labs(offset) == std::labs(best) && offset < best)));
    if (better) {
      best = offset;
      best_count = count;
    }
  }
  return static_cast<int>(best);
}

OffsetMap fit_positional_baseline(std::span<const Sentence> sentences, const std::vector<RelationKey>& keys) {
  if (sentences.empty()) throw std::invalid_argument("positional baseline needs a non-empty treebank");
  OffsetMap offsets;
  for (const RelationKey& key : keys) {
    EdgeSet edges = collect_edges(sentences, key);
    if (edges.total() == 0) continue;
    offsets[key] = most_frequent_offset(edges);
  }
  return offsets;
}

double baseline_dep_acc(int offset, const EdgeSet& edges) {
  HitCount c;
  for (const auto& list : edges.per_sentence) {
    for (const Edge& e : list) {
      ++c.total;
      if (e.source + offset == e.target) ++c.hits;
    }
  }
  if (c.total == 0) throw UndefinedMetric("baseline DepAcc over an empty edge set");
  return c.fraction();
}

double AttachmentCounts::uas() const {
  if (total == 0) throw UndefinedMetric("UAS over zero tokens");
  return static_cast<double>(heads) / static_cast<double>(total);
}

double AttachmentCounts::las() const {
  if (total == 0) throw UndefinedMetric("LAS over zero tokens");
  return static_cast<double>(labeled) / static_cast<double>(total);
}

AttachmentCounts attachment(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("predicted tree has " + std::to_string(predicted.size()) + " tokens, gold " +
                                gold.sent_id + " has " + std::to_string(gold.size()));
  AttachmentCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const Token& t = gold.tokens[i];
    if (t.head == 0) continue;
    std::string gold_label = canonical_label(t.deprel);
    if (!opts.include_punct && gold_label == "punct") continue;
    ++c.total;
    if (predicted.heads[i] != t.head - 1) continue;
    ++c.heads;
    if (canonical_label(predicted.labels[i]) == gold_label) ++c.labeled;
  }
  return c;
}

double uas(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts) {
  return attachment(predicted, gold, opts).uas();
}

double las(const LabeledTree& predicted, const Sentence& gold, const ScoreOptions& opts) {
  return attachment(predicted, gold, opts).las();
}

namespace {

LabeledTree branching(std::size_t n, std::size_t root, bool left) {
  if (root >= n) throw std::invalid_argument("root outside sentence");
  LabeledTree tree;
  tree.root_index = root;
  tree.heads.resize(n);
  tree.labels.assign(n, "dep");
  for (std::size_t i = 0; i < n; ++i) {
    if (i == root) {
      tree.heads[i] = kRootHead;
      tree.labels[i] = "root";
    } else if (left) {
      tree.heads[i] = i == 0 ? static_cast<int>(root) : static_cast<int>(i - 1);
    } else {
      tree.heads[i] = i + 1 == n ? static_cast<int>(root) : static_cast<int>(i + 1);
    }
  }
  return tree;
}

}  // namespace

LabeledTree left_branching(std::size_t n, std::size_t root) { return branching(n, root, true); }
LabeledTree right_branching(std::size_t n, std::size_t root) { return branching(n, root, false); }

}  // namespace attnparse
