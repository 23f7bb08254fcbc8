#include "attnparse/head_selection.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "attnparse/labels.hpp"
#include "attnparse/parallel.hpp"

namespace attnparse {
namespace {

// Flattened edge list of one key with direct access to every head's source row.
class EdgeRows {
 public:
  EdgeRows(const AlignedCorpus& corpus, const EdgeSet& edges) : dataset_(corpus.dataset) {
    for (std::size_t s = 0; s < edges.per_sentence.size(); ++s) {
      const SentenceAttention& att = *corpus.items[s].attention;
      for (const Edge& e : edges.per_sentence[s]) {
        entries_.push_back({att.values.data(), att.n, e.source, e.target});
        max_n_ = std::max<std::size_t>(max_n_, att.n);
      }
    }
  }

  std::size_t size() const { return entries_.size(); }

  HeadId head_at(std::size_t flat) const {
    return {static_cast<int>(flat / dataset_->num_heads()), static_cast<int>(flat % dataset_->num_heads())};
  }

  // Edges whose averaged row (members summed in the given order, then divided
  // by the member count) peaks at the target.
  std::size_t hits(const std::vector<std::size_t>& members) const {
    std::vector<double> acc(max_n_);
    const double k = static_cast<double>(members.size());
    std::size_t hit = 0;
    for (const Entry& e : entries_) {
      const std::size_t n = e.n;
      std::fill(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
      for (std::size_t m : members) {
        const float* row = e.values + m * n * n + static_cast<std::size_t>(e.source) * n;
        for (std::size_t c = 0; c < n; ++c) acc[c] += static_cast<double>(row[c]);
      }
      std::size_t best = 0;
      double best_value = acc[0] / k;
      for (std::size_t c = 1; c < n; ++c) {
        double v = acc[c] / k;
        if (v > best_value) {
          best_value = v;
          best = c;
        }
      }
      if (best == static_cast<std::size_t>(e.target)) ++hit;
    }
    return hit;
  }

 private:
  struct Entry {
    const float* values;
    std::uint32_t n;
    Eigen::Index source;
    Eigen::Index target;
  };
  const AttentionDataset* dataset_;
  std::vector<Entry> entries_;
  std::size_t max_n_ = 0;
};

struct RankedHead {
  std::size_t flat;
  std::size_t hits;
};

std::vector<RankedHead> rank_flat(const EdgeRows& rows, std::size_t total_heads) {
  std::vector<RankedHead> ranked(total_heads);
  parallel_for(total_heads, [&](std::size_t h) { ranked[h] = {h, rows.hits({h})}; });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedHead& a, const RankedHead& b) { return a.hits > b.hits; });
  return ranked;
}

Ensemble greedy_select(const EdgeRows& rows, const std::vector<RankedHead>& ranked, const RelationKey& key,
                       int max_heads) {
  if (max_heads < 1) throw std::invalid_argument("ensemble size must be at least 1");
  const auto capacity = static_cast<std::size_t>(max_heads);
  std::vector<std::size_t> members{ranked.front().flat};
  std::size_t best = ranked.front().hits;
  for (std::size_t r = 1; r < ranked.size(); ++r) {
    const std::size_t candidate = ranked[r].flat;
    if (members.size() < capacity) {
      std::vector<std::size_t> trial = members;
      trial.push_back(candidate);
      std::size_t h = rows.hits(trial);
      if (h > best) {
        members = std::move(trial);
        best = h;
      }
      continue;
    }
    std::size_t best_slot = capacity;
    std::size_t best_hits = best;
    for (std::size_t slot = 0; slot < capacity; ++slot) {
      std::vector<std::size_t> trial = members;
      trial[slot] = candidate;
      std::size_t h = rows.hits(trial);
      if (h > best_hits) {
        best_hits = h;
        best_slot = slot;
      }
    }
    if (best_slot < capacity) {
      members[best_slot] = candidate;
      best = best_hits;
    }
  }
  Ensemble e;
  e.key = key;
  for (std::size_t m : members) e.heads.push_back(rows.head_at(m));
  e.dev_dep_acc = static_cast<double>(best) / static_cast<double>(rows.size());
  return e;
}

EdgeSet checked_edges(const AlignedCorpus& corpus, const RelationKey& key) {
  EdgeSet edges = collect_edges(corpus, key);
  if (edges.total() == 0) throw UndefinedMetric("no edges for " + key.name());
  return edges;
}

}  // namespace

const Ensemble* EnsembleSet::find(const RelationKey& key) const {
  auto it = ensembles.find(key);
  return it == ensembles.end() ? nullptr : &it->second;
}

const Ensemble& EnsembleSet::at(const RelationKey& key) const {
  const Ensemble* e = find(key);
  if (!e) throw std::out_of_range("no ensemble for " + key.name());
  return *e;
}

std::vector<ScoredHead> rank_heads(const AlignedCorpus& corpus, const RelationKey& key) {
  EdgeSet edges = checked_edges(corpus, key);
  EdgeRows rows(corpus, edges);
  std::vector<ScoredHead> out;
  for (const RankedHead& r : rank_flat(rows, corpus.dataset->total_heads()))
    out.push_back({rows.head_at(r.flat), static_cast<double>(r.hits) / static_cast<double>(rows.size())});
  return out;
}

Ensemble select_ensemble(const AlignedCorpus& corpus, const RelationKey& key, int max_heads) {
  EdgeSet edges = checked_edges(corpus, key);
  EdgeRows rows(corpus, edges);
  return greedy_select(rows, rank_flat(rows, corpus.dataset->total_heads()), key, max_heads);
}

EnsembleSet select_all(const AlignedCorpus& corpus, const std::vector<RelationKey>& keys, int max_heads,
                       std::string model, std::string selection) {
  std::vector<std::optional<Ensemble>> results(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    EdgeSet edges = collect_edges(corpus, keys[i]);
    if (edges.total() == 0) return;
    EdgeRows rows(corpus, edges);
    results[i] = greedy_select(rows, rank_flat(rows, corpus.dataset->total_heads()), keys[i], max_heads);
  });
  EnsembleSet set;
  set.model = std::move(model);
  set.max_heads = max_heads;
  set.selection = std::move(selection);
  for (auto& r : results)
    if (r) set.insert(std::move(*r));
  return set;
}

Eigen::MatrixXd ensemble_matrix(const AttentionDataset& dataset, const SentenceAttention& attention,
                                const std::vector<HeadId>& heads) {
  if (heads.empty()) throw std::invalid_argument("ensemble without heads");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(attention.n, attention.n);
  for (HeadId h : heads) sum += dataset.matrix(attention, h).cast<double>();
  return sum / static_cast<double>(heads.size());
}

double ensemble_dep_acc(const AlignedCorpus& corpus, const Ensemble& ensemble) {
  EdgeSet edges = collect_edges(corpus, ensemble.key);
  return dep_acc(
      [&](std::size_t s) { return ensemble_matrix(*corpus.dataset, *corpus.items[s].attention, ensemble.heads); },
      edges);
}

std::size_t ensemble_overlap(const EnsembleSet& a, const EnsembleSet& b, const RelationKey& key_a,
                             const RelationKey& key_b) {
  std::vector<HeadId> ha = a.at(key_a).heads;
  std::vector<HeadId> hb = b.at(key_b).heads;
  std::sort(ha.begin(), ha.end());
  std::sort(hb.begin(), hb.end());
  std::vector<HeadId> common;
  std::set_intersection(ha.begin(), ha.end(), hb.begin(), hb.end(), std::back_inserter(common));
  return common.size();
}

HeadUsage head_usage(const EnsembleSet& set, const std::vector<RelationKey>& keys) {
  std::vector<HeadId> all;
  HeadUsage usage;
  for (const RelationKey& k : keys) {
    if (const Ensemble* e = set.find(k)) {
      usage.slots += e->heads.size();
      all.insert(all.end(), e->heads.begin(), e->heads.end());
    }
  }
  std::sort(all.begin(), all.end());
  usage.unique = static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  return usage;
}

std::vector<SweepRow> sweep_ensemble_size(const AlignedCorpus& selection, const AlignedCorpus& evaluation,
                                          const std::vector<RelationKey>& keys, int max_n) {
  if (max_n < 1) throw std::invalid_argument("sweep needs max_n >= 1");
  std::vector<std::optional<SweepRow>> rows(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    EdgeSet edges = collect_edges(selection, keys[i]);
    if (edges.total() == 0) return;
    EdgeRows cache(selection, edges);
    std::vector<RankedHead> ranked = rank_flat(cache, selection.dataset->total_heads());
    const bool has_test = collect_edges(evaluation, keys[i]).total() > 0;
    SweepRow row{keys[i], {}, {}};
    for (int n = 1; n <= max_n; ++n) {
      Ensemble e = greedy_select(cache, ranked, keys[i], n);
      row.dev.push_back(e.dev_dep_acc);
      row.test.push_back(has_test ? std::optional<double>(ensemble_dep_acc(evaluation, e)) : std::nullopt);
    }
    rows[i] = std::move(row);
  });
  std::vector<SweepRow> out;
  for (auto& r : rows)
    if (r) out.push_back(std::move(*r));
  return out;
}

std::string ensembles_to_json(const EnsembleSet& set) {
  nlohmann::ordered_json j;
  j["model"] = set.model;
  j["N"] = set.max_heads;
  if (!set.selection.empty()) j["selection"] = set.selection;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  std::vector<RelationKey> order = all_keys();
  for (const RelationKey& k : pooled_keys()) order.push_back(k);
  for (const RelationKey& k : order) {
    const Ensemble* e = set.find(k);
    if (!e) continue;
    nlohmann::ordered_json heads = nlohmann::ordered_json::array();
    for (HeadId h : e->heads) heads.push_back({h.layer, h.head});
    list.push_back({{"label", e->key.label},
                    {"direction", std::string(to_string(e->key.direction))},
                    {"heads", heads},
                    {"dev_depacc", e->dev_dep_acc}});
  }
  j["ensembles"] = list;
  return j.dump(2) + "\n";
}

EnsembleSet ensembles_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("ensemble JSON: ") + e.what());
  }
  EnsembleSet set;
  try {
    set.model = j.at("model").get<std::string>();
    set.max_heads = j.at("N").get<int>();
    set.selection = j.value("selection", std::string{});
    for (const auto& item : j.at("ensembles")) {
      Ensemble e;
      e.key = parse_key(item.at("label").get<std::string>() + ":" + item.at("direction").get<std::string>());
      for (const auto& pair : item.at("heads")) e.heads.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
      if (e.heads.empty()) throw std::runtime_error("ensemble " + e.key.name() + " has no heads");
      e.dev_dep_acc = item.at("dev_depacc").get<double>();
      if (set.find(e.key)) throw std::runtime_error("duplicate ensemble for " + e.key.name());
      set.insert(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("ensemble JSON: ") + e.what());
  }
  return set;
}

void save_ensembles(const EnsembleSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ensembles_to_json(set);
}

EnsembleSet load_ensembles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ensembles_from_json(buf.str());
}

}  // namespace attnparse
