#ifndef ATTNPARSE_ATTENTION_STORE_HPP
#define ATTNPARSE_ATTENTION_STORE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "attnparse/conllu.hpp"

namespace attnparse {

class AttentionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlignmentError : public std::runtime_error {
 public:
  AlignmentError(std::size_t index, const std::string& what)
      : std::runtime_error("sentence " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct HeadId {
  int layer = 0;
  int head = 0;
  auto operator<=>(const HeadId&) const = default;
};

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using HeadMatrixView = Eigen::Map<const RowMatrixXf>;
using HeadMatrixMut = Eigen::Map<RowMatrixXf>;

inline constexpr double kRowSumTolerance = 1e-3;

// Word-level attention of every head for one sentence. values holds
// [layer][head][row][col] in float32, rows are attention sources.
struct SentenceAttention {
  std::string sent_id;
  std::uint32_t n = 0;
  std::vector<float> values;

  bool operator==(const SentenceAttention&) const = default;
};

class AttentionDataset {
 public:
  AttentionDataset() = default;
  AttentionDataset(std::uint32_t num_layers, std::uint32_t num_heads)
      : num_layers_(num_layers), num_heads_(num_heads) {}

  std::uint32_t num_layers() const { return num_layers_; }
  std::uint32_t num_heads() const { return num_heads_; }
  std::size_t total_heads() const { return std::size_t{num_layers_} * num_heads_; }
  std::size_t size() const { return sentences_.size(); }
  const std::vector<SentenceAttention>& sentences() const { return sentences_; }
  const SentenceAttention& operator[](std::size_t i) const { return sentences_[i]; }

  // Allocates a zero tensor of n words and returns it for filling.
  SentenceAttention& add_sentence(std::string sent_id, std::uint32_t n);

  HeadMatrixView matrix(std::size_t sentence, HeadId id) const { return matrix(sentences_[sentence], id); }
  HeadMatrixView matrix(const SentenceAttention& s, HeadId id) const;
  HeadMatrixMut mutable_matrix(std::size_t sentence, HeadId id);

  bool contains(HeadId id) const {
    return id.layer >= 0 && id.head >= 0 && static_cast<std::uint32_t>(id.layer) < num_layers_ &&
           static_cast<std::uint32_t>(id.head) < num_heads_;
  }

  // Throws AttentionFormatError on negative/non-finite entries or a row whose
  // sum is off by more than kRowSumTolerance.
  void validate() const;

  bool operator==(const AttentionDataset&) const = default;

 private:
  std::size_t offset(const SentenceAttention& s, HeadId id) const;

  std::uint32_t num_layers_ = 0;
  std::uint32_t num_heads_ = 0;
  std::vector<SentenceAttention> sentences_;
};

std::vector<char> encode_attention(const AttentionDataset& dataset);
AttentionDataset decode_attention(std::span<const char> bytes);

AttentionDataset read_attention_file(const std::filesystem::path& path);
void write_attention_file(const AttentionDataset& dataset, const std::filesystem::path& path);

// A gold sentence paired with its attention tensor.
struct AlignedSentence {
  const Sentence* sentence;
  const SentenceAttention* attention;
};

struct AlignedCorpus {
  const AttentionDataset* dataset = nullptr;
  std::vector<AlignedSentence> items;

  std::size_t size() const { return items.size(); }
  const Sentence& sentence(std::size_t i) const { return *items[i].sentence; }
  HeadMatrixView matrix(std::size_t i, HeadId id) const { return dataset->matrix(*items[i].attention, id); }
  // First k sentences (all when k >= size()).
  AlignedCorpus prefix(std::size_t k) const;
};

// Pairs sentences with tensors in order. Sentences whose sent_id is in skip
// are dropped first (the extractor omits over-length sentences). Throws
// AlignmentError at the first count, sent_id or length mismatch.
AlignedCorpus align(const AttentionDataset& dataset, std::span<const Sentence> sentences,
                    const std::set<std::string>& skip = {});

// One sent_id per line; blank lines ignored.
std::set<std::string> read_skip_list(const std::filesystem::path& path);

}  // namespace attnparse

#endif  // ATTNPARSE_ATTENTION_STORE_HPP
