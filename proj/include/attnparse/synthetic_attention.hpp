#ifndef ATTNPARSE_SYNTHETIC_ATTENTION_HPP
#define ATTNPARSE_SYNTHETIC_ATTENTION_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attnparse/attention_store.hpp"
#include "attnparse/conllu.hpp"
#include "attnparse/metrics.hpp"

namespace attnparse {

// Inclusive range of |dependent - governor| an assignment responds to.
// max = nullopt means unbounded.
struct DistanceBand {
  int min = 0;
  std::optional<int> max;
  bool contains(int distance) const { return distance >= min && (!max || distance <= *max); }
};

// Makes one head attend from each source row of the relation's gold edges to
// the edge target with mass `fidelity`.
struct HeadAssignment {
  HeadId head;
  RelationKey key;
  std::optional<DistanceBand> band;
  double fidelity = 1.0;
};

enum class Filler {
  uniform,  // 1/n everywhere
  self,     // all mass on the diagonal
  random,   // seeded random stochastic rows
};

struct SynthSpec {
  std::uint32_t num_layers = 12;
  std::uint32_t num_heads = 12;
  std::vector<HeadAssignment> assignments;
  Filler filler = Filler::uniform;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range heads, fidelity outside
  // [0, 1] or an empty band.
  void check() const;
};

// Rows that carry an assignment put `fidelity` on their target(s) and spread
// the rest uniformly over all columns, with a seeded jitter of relative size
// 1e-3 so that vanishing fidelity falls back to a random guess instead of
// column 0. A row targeted by several assignments splits the mass evenly.
// Every other row follows the filler. Bit-identical for identical inputs.
AttentionDataset generate(std::span<const Sentence> sentences, const SynthSpec& spec);

SynthSpec synth_spec_from_json(const std::string& text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

// Random well-formed treebanks for tests and demos.
struct TreebankSpec {
  std::size_t count = 100;
  std::size_t min_length = 2;
  std::size_t max_length = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;  // empty: the twelve non-clausal labels
  // No governor gets two dependents with the same label.
  bool unique_label_per_head = true;
};

std::vector<Sentence> random_treebank(const TreebankSpec& spec);

}  // namespace attnparse

#endif  // ATTNPARSE_SYNTHETIC_ATTENTION_HPP
