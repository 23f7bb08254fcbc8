#ifndef ATTNPARSE_HEAD_SELECTION_HPP
#define ATTNPARSE_HEAD_SELECTION_HPP

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attnparse/attention_store.hpp"
#include "attnparse/metrics.hpp"

namespace attnparse {

inline constexpr int kDefaultEnsembleSize = 4;

struct ScoredHead {
  HeadId head;
  double dep_acc = 0.0;
};

// Heads whose averaged attention serves one directed relation. heads keeps
// insertion order; a substitution takes the replaced member's slot.
struct Ensemble {
  RelationKey key;
  std::vector<HeadId> heads;
  double dev_dep_acc = 0.0;
};

struct EnsembleSet {
  std::string model;
  int max_heads = kDefaultEnsembleSize;
  std::string selection;  // free-form description of the selection set
  std::map<RelationKey, Ensemble> ensembles;

  const Ensemble* find(const RelationKey& key) const;
  // Throws std::out_of_range naming the key.
  const Ensemble& at(const RelationKey& key) const;
  void insert(Ensemble e) { ensembles[e.key] = std::move(e); }
};

// Every head scored by DepAcc on the corpus, best first; ties by (layer, head).
// Throws UndefinedMetric when the key has no edges.
std::vector<ScoredHead> rank_heads(const AlignedCorpus& corpus, const RelationKey& key);

// Greedy selection with substitution. Starts from the best head and sweeps
// the remaining heads once in rank order. Below capacity a candidate joins
// when it strictly raises DepAcc of the averaged matrices; at capacity it
// replaces the member whose replacement gives the largest strict gain.
Ensemble select_ensemble(const AlignedCorpus& corpus, const RelationKey& key, int max_heads = kDefaultEnsembleSize);

// Runs select_ensemble for every key that has edges; parallel over keys.
EnsembleSet select_all(const AlignedCorpus& corpus, const std::vector<RelationKey>& keys,
                       int max_heads = kDefaultEnsembleSize, std::string model = {}, std::string selection = {});

// Elementwise mean of the member matrices, accumulated in double in member order.
Eigen::MatrixXd ensemble_matrix(const AttentionDataset& dataset, const SentenceAttention& attention,
                                const std::vector<HeadId>& heads);

// DepAcc of the ensemble's averaged matrices on another corpus.
double ensemble_dep_acc(const AlignedCorpus& corpus, const Ensemble& ensemble);

// |heads(a, key_a) ∩ heads(b, key_b)|. Throws std::out_of_range on a missing key.
std::size_t ensemble_overlap(const EnsembleSet& a, const EnsembleSet& b, const RelationKey& key_a,
                             const RelationKey& key_b);

// Unique heads over the given keys, and the number of ensemble slots they fill.
struct HeadUsage {
  std::size_t unique = 0;
  std::size_t slots = 0;
};
HeadUsage head_usage(const EnsembleSet& set, const std::vector<RelationKey>& keys);

// Per key, DepAcc for N = 1..max_n: on the selection corpus (dev) and on the
// evaluation corpus (test; nullopt when the key has no test edges).
struct SweepRow {
  RelationKey key;
  std::vector<double> dev;
  std::vector<std::optional<double>> test;
};
std::vector<SweepRow> sweep_ensemble_size(const AlignedCorpus& selection, const AlignedCorpus& evaluation,
                                          const std::vector<RelationKey>& keys, int max_n);

std::string ensembles_to_json(const EnsembleSet& set);
EnsembleSet ensembles_from_json(const std::string& text);
void save_ensembles(const EnsembleSet& set, const std::filesystem::path& path);
EnsembleSet load_ensembles(const std::filesystem::path& path);

}  // namespace attnparse

#endif  // ATTNPARSE_HEAD_SELECTION_HPP
