#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "attnparse/head_selection.hpp"
#include "attnparse/labels.hpp"
#include "attnparse/metrics.hpp"
#include "attnparse/synthetic_attention.hpp"
#include "attnparse/tree_builder.hpp"
#include "attnparse/ud_transform.hpp"
#include "brute_force.hpp"
#include "test_util.hpp"

using namespace attnparse;
using attnparse::testing::Arcs;
using attnparse::testing::arcs;
using attnparse::testing::make_sentence;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Sentence> treebank(std::uint64_t seed, std::size_t count, std::size_t min_length,
                               std::size_t max_length) {
  TreebankSpec spec;
  spec.count = count;
  spec.min_length = min_length;
  spec.max_length = max_length;
  spec.seed = seed;
  return random_treebank(spec);
}

HeadAssignment assign(int layer, int head, const RelationKey& key, std::optional<DistanceBand> band = std::nullopt) {
  HeadAssignment a;
  a.head = {layer, head};
  a.key = key;
  a.band = band;
  return a;
}

Outcome oracle_pipeline() {
  Outcome out;
  auto start = Clock::now();
  auto dev = treebank(101, 200, 2, 20);
  auto test = treebank(102, 200, 2, 20);
  SynthSpec spec;
  spec.num_layers = 4;
  spec.num_heads = 12;
  spec.seed = 7;
  auto keys = non_clausal_keys();
  for (std::size_t k = 0; k < keys.size(); ++k)
    spec.assignments.push_back(assign(static_cast<int>(k / 12), static_cast<int>(k % 12), keys[k]));
  AttentionDataset dev_att = generate(dev, spec);
  AttentionDataset test_att = generate(test, spec);
  AlignedCorpus dev_c = align(dev_att, dev);
  AlignedCorpus test_c = align(test_att, test);
  EnsembleSet set = select_all(dev_c, keys);
  for (const RelationKey& key : keys) {
    const Ensemble* e = set.find(key);
    if (!e) {
      out.fail("no ensemble for " + key.name());
      continue;
    }
    if (collect_edges(test_c, key).total() == 0) continue;
    double acc = ensemble_dep_acc(test_c, *e);
    if (acc != 1.0) out.fail(key.name() + " DepAcc " + std::to_string(acc));
  }
  AttachmentCounts counts;
  auto trees = extract_trees(test_c, set);
  for (std::size_t i = 0; i < trees.size(); ++i) counts += attachment(trees[i], test[i]);
  if (counts.uas() != 1.0 || counts.las() != 1.0)
    out.fail("UAS " + std::to_string(counts.uas()) + " LAS " + std::to_string(counts.las()));
  double t = seconds_since(start);
  if (t >= 10.0) out.fail("took " + std::to_string(t) + " s");
  if (out.ok) out.detail = std::to_string(counts.total) + " tokens, " + std::to_string(t).substr(0, 5) + " s";
  return out;
}

Outcome distance_split() {
  Outcome out;
  auto start = Clock::now();
  auto sentences = treebank(103, 200, 2, 24);
  SynthSpec spec;
  spec.num_layers = 12;
  spec.num_heads = 12;
  RelationKey key = parse_key("nmod:d2p");
  spec.assignments = {assign(3, 5, key, DistanceBand{0, 2}), assign(9, 1, key, DistanceBand{3, std::nullopt})};
  AttentionDataset d = generate(sentences, spec);
  AlignedCorpus c = align(d, sentences);
  auto ranked = rank_heads(c, key);
  for (const ScoredHead& h : ranked)
    if (h.dep_acc >= 1.0) out.fail("a single head reaches 1");
  Ensemble e = select_ensemble(c, key);
  if (e.dev_dep_acc != 1.0) out.fail("ensemble DepAcc " + std::to_string(e.dev_dep_acc));
  auto has = [&](HeadId h) { return std::find(e.heads.begin(), e.heads.end(), h) != e.heads.end(); };
  if (!has({3, 5}) || !has({9, 1})) out.fail("ensemble misses a planted head");
  double t = seconds_since(start);
  if (t >= 5.0) out.fail("took " + std::to_string(t) + " s");
  if (out.ok)
    out.detail = "best single " + std::to_string(ranked[0].dep_acc).substr(0, 5) + ", " +
                 std::to_string(t).substr(0, 5) + " s";
  return out;
}

Outcome cle_brute_force() {
  Outcome out;
  std::mt19937_64 rng(104);
  std::size_t graphs = 0;
  for (int round = 0; round < 200; ++round) {
    for (int n = 1; n <= 6; ++n) {
      for (bool integer : {true, false}) {
        Eigen::MatrixXd w(n, n);
        std::uniform_int_distribution<int> small(0, 4);
        std::uniform_real_distribution<double> real(-1.0, 1.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) w(i, j) = integer ? small(rng) : real(rng);
        std::size_t root = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(n) - 1)(rng);
        std::vector<int> tree = chu_liu_edmonds(w, root);
        auto [best, best_tree] = attnparse::testing::brute_force_arborescence(w, root);
        ++graphs;
        if (tree[root] != kRootHead || !attnparse::testing::reaches_root(tree, root)) {
          out.fail("invalid tree at n=" + std::to_string(n));
          continue;
        }
        if (std::abs(attnparse::testing::tree_weight(w, tree) - best) > 1e-9)
          out.fail("suboptimal tree at n=" + std::to_string(n));
      }
    }
  }
  if (graphs < 1000) out.fail("only " + std::to_string(graphs) + " graphs");
  if (out.ok) out.detail = std::to_string(graphs) + " graphs";
  return out;
}

Outcome random_scores_valid() {
  Outcome out;
  auto sentences = treebank(105, 10000, 1, 20);
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  AttentionDataset d(2, 4);
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    d.add_sentence(sentences[si].sent_id, static_cast<std::uint32_t>(sentences[si].size()));
    for (int flat = 0; flat < 8; ++flat) {
      HeadMatrixMut m = d.mutable_matrix(si, {flat / 4, flat % 4});
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = u(rng);
        m.row(r) /= m.row(r).sum();
      }
    }
  }
  AlignedCorpus c = align(d, sentences);
  EnsembleSet set;
  std::uniform_int_distribution<int> layer(0, 1), head(0, 3);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<RelationKey> keys = non_clausal_keys();
  for (const RelationKey& k : pooled_keys()) keys.push_back(k);
  for (const RelationKey& k : keys) set.insert({k, {{layer(rng), head(rng)}, {layer(rng), head(rng)}}, weight(rng)});
  std::size_t calls = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    ExtractOptions opts;
    opts.use_labels = i % 2 == 0;
    opts.root_mode = i % 3 == 0 ? RootConstraint::outgoing : RootConstraint::incoming;
    LabeledTree t = extract_tree(c.sentence(i), d, *c.items[i].attention, set, opts);
    ++calls;
    const std::size_t root = c.sentence(i).root();
    if (!labeled_tree_problem(t).empty()) out.fail(c.sentence(i).sent_id + ": " + labeled_tree_problem(t));
    if (t.size() != c.sentence(i).size() || t.root_index != root || t.heads[root] != kRootHead)
      out.fail(c.sentence(i).sent_id + ": root not at the gold root");
  }
  if (out.ok) out.detail = std::to_string(calls) + " trees";
  return out;
}

Outcome ud_transforms() {
  Outcome out;
  Sentence cop = make_sentence("c", {{"cat", 4, "nsubj"}, {"is", 4, "cop"}, {"an", 4, "det"}, {"animal", 0, "root"}});
  Sentence expl = make_sentence("e", {{"there", 2, "expl"}, {"is", 0, "root"}, {"a", 4, "det"}, {"spoon", 2, "nsubj"}});
  Sentence coord = make_sentence(
      "k", {{"apples", 0, "root"}, {",", 3, "punct"}, {"oranges", 1, "conj"}, {"and", 5, "cc"}, {"pears", 1, "conj"}});
  if (arcs(apply_all(cop, {})) != Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}}) out.fail("copula example");
  if (arcs(apply_all(expl, {})) != Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}})
    out.fail("expletive example");
  if (arcs(apply_all(coord, {})) != Arcs{{0, "root"}, {3, "punct"}, {1, "conj"}, {5, "cc"}, {3, "conj"}})
    out.fail("coordination example");
  TreebankSpec spec;
  spec.count = 1000;
  spec.min_length = 1;
  spec.max_length = 14;
  spec.seed = 107;
  spec.labels = {"nsubj", "cop", "expl", "conj", "aux", "obj", "cc", "punct", "det", "csubj", "nsubj:pass"};
  spec.unique_label_per_head = false;
  std::size_t changed = 0;
  for (const Sentence& s : random_treebank(spec)) {
    Sentence once = apply_all(s, {});
    try {
      validate_tree(once);
    } catch (const std::exception& e) {
      out.fail(e.what());
      continue;
    }
    if (arcs(apply_all(once, {})) != arcs(once)) out.fail(s.sent_id + ": not idempotent");
    if (arcs(once) != arcs(s)) ++changed;
  }
  if (out.ok) out.detail = "1000 random trees, " + std::to_string(changed) + " rewritten";
  return out;
}

Outcome branching_and_offsets() {
  Outcome out;
  TreebankSpec spec;
  spec.count = 300;
  spec.min_length = 1;
  spec.max_length = 16;
  spec.seed = 108;
  spec.labels = {"amod", "det", "nsubj", "obj", "case", "nmod", "advcl", "punct"};
  spec.unique_label_per_head = false;
  auto sentences = random_treebank(spec);
  for (bool left : {true, false}) {
    AttachmentCounts counts;
    std::size_t hits = 0, total = 0;
    for (const Sentence& s : sentences) {
      const std::size_t r = s.root();
      counts += attachment(left ? left_branching(s.size(), r) : right_branching(s.size(), r), s);
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == r) continue;
        ++total;
        std::size_t expected = left ? (i == 0 ? r : i - 1) : (i + 1 == s.size() ? r : i + 1);
        if (static_cast<std::size_t>(s.tokens[i].head - 1) == expected) ++hits;
      }
    }
    if (counts.total != total || counts.heads != hits) out.fail(left ? "left-branching UAS" : "right-branching UAS");
  }
  OffsetMap offsets = fit_positional_baseline(sentences);
  std::size_t checked = 0;
  for (const RelationKey& key : all_keys()) {
    EdgeSet edges = collect_edges(sentences, key);
    if (edges.total() == 0) continue;
    std::map<int, std::size_t> counts;
    for (const auto& list : edges.per_sentence)
      for (const Edge& e : list) ++counts[static_cast<int>(e.target - e.source)];
    int mode = 0;
    std::size_t mode_count = 0;
    for (const auto& [o, n] : counts) {
      bool better = n > mode_count ||
                    (n == mode_count && (std::abs(o) < std::abs(mode) || (std::abs(o) == std::abs(mode) && o < mode)));
      if (better) mode = o, mode_count = n;
    }
    ++checked;
    if (!offsets.count(key) || offsets.at(key) != mode) out.fail(key.name() + " offset");
  }
  if (out.ok) out.detail = std::to_string(checked) + " offsets";
  return out;
}

Outcome ensemble_at_least_best_head() {
  Outcome out;
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto dev = treebank(110, 120, 2, 14);
  auto test = treebank(111, 120, 2, 14);
  const int layers = 5, heads = 10;
  std::vector<RelationKey> keys = {parse_key("amod:d2p"), parse_key("det:p2d"), parse_key("nsubj:d2p"),
                                   parse_key("obj:p2d"), parse_key("case:d2p")};
  std::vector<std::vector<double>> strength(keys.size(), std::vector<double>(layers * heads));
  for (auto& row : strength)
    for (double& v : row) v = 2.0 * u(rng) * u(rng);
  auto build = [&](const std::vector<Sentence>& sentences) {
    AttentionDataset d(layers, heads);
    for (std::size_t si = 0; si < sentences.size(); ++si) {
      const Sentence& s = sentences[si];
      d.add_sentence(s.sent_id, static_cast<std::uint32_t>(s.size()));
      for (int flat = 0; flat < layers * heads; ++flat) {
        HeadMatrixMut m = d.mutable_matrix(si, {flat / heads, flat % heads});
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<float>(u(rng));
        for (std::size_t k = 0; k < keys.size(); ++k)
          for (const Edge& e : sentence_edges(s, keys[k]))
            m(e.source, e.target) += static_cast<float>(strength[k][static_cast<std::size_t>(flat)] * u(rng));
        for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) /= m.row(r).sum();
      }
    }
    return d;
  };
  AttentionDataset dev_att = build(dev), test_att = build(test);
  AlignedCorpus dev_c = align(dev_att, dev), test_c = align(test_att, test);
  auto rows = sweep_ensemble_size(dev_c, test_c, keys, 6);
  std::size_t comparisons = 0;
  for (const SweepRow& r : rows) {
    const double best_single = rank_heads(dev_c, r.key)[0].dep_acc;
    if (r.dev[0] != best_single) out.fail(r.key.name() + ": N=1 is not the best head");
    for (std::size_t n = 0; n < r.dev.size(); ++n) {
      ++comparisons;
      if (r.dev[n] < best_single) out.fail(r.key.name() + " N=" + std::to_string(n + 1) + " below best head");
    }
  }
  if (rows.size() != keys.size()) out.fail("missing sweep rows");
  if (out.ok) out.detail = std::to_string(comparisons) + " ensembles over 50 heads";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle attention: DepAcc 1 per key, UAS = LAS = 1, under 10 s", oracle_pipeline},
      {"distance-split heads: singles below 1, ensemble 1 with both, under 5 s", distance_split},
      {"Chu-Liu-Edmonds equals brute force on >= 1000 graphs", cle_brute_force},
      {"10^4 random-score extractions give valid trees at the gold root", random_scores_valid},
      {"UD transforms: worked examples, validity and idempotence", ud_transforms},
      {"branching UAS and fitted offsets match counting oracles", branching_and_offsets},
      {"ensemble DepAcc >= best single head on a 50-head sweep", ensemble_at_least_best_head},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s  %s (%s)\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.ok) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
