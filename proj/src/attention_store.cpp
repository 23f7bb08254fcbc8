#include "attnparse/attention_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace attnparse {
namespace {

constexpr char kMagic[4] = {'B', 'A', 'T', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

// Sequential little-endian reader over either a memory span or a file.
class ByteSource {
 public:
  explicit ByteSource(std::span<const char> bytes) : bytes_(bytes), size_(bytes.size()) {}
  explicit ByteSource(std::istream& in) : stream_(&in) {
    in.seekg(0, std::ios::end);
    size_ = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
  }

  // Fails like a short read when fewer than len bytes remain, before any
  // allocation sized by untrusted lengths.
  void require(std::size_t len) {
    if (size_ - pos_ < len) {
      pos_ = size_;
      eof();
    }
  }

  void read(char* dst, std::size_t len) {
    if (stream_) {
      stream_->read(dst, static_cast<std::streamsize>(len));
      auto got = static_cast<std::size_t>(stream_->gcount());
      pos_ += got;
      if (got != len) eof();
      return;
    }
    if (bytes_.size() - pos_ < len) {
      pos_ = bytes_.size();
      eof();
    }
    std::memcpy(dst, bytes_.data() + pos_, len);
    pos_ += len;
  }

  std::uint32_t u32() {
    unsigned char buf[4];
    read(reinterpret_cast<char*>(buf), 4);
    return get_u32(buf);
  }

  bool at_end() {
    if (stream_) return stream_->peek() == std::char_traits<char>::eof();
    return pos_ == bytes_.size();
  }

  std::size_t pos() const { return pos_; }

 private:
  [[noreturn]] void eof() const {
    throw AttentionFormatError("unexpected end of file at byte " + std::to_string(pos_));
  }

  std::span<const char> bytes_;
  std::istream* stream_ = nullptr;
  std::size_t size_ = 0;
  std::size_t pos_ = 0;
};

void validate_sentence(const AttentionDataset& d, const SentenceAttention& s) {
  for (std::uint32_t l = 0; l < d.num_layers(); ++l) {
    for (std::uint32_t h = 0; h < d.num_heads(); ++h) {
      HeadMatrixView m = d.matrix(s, {static_cast<int>(l), static_cast<int>(h)});
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          float v = m(r, c);
          if (!std::isfinite(v) || v < 0.0f)
            throw AttentionFormatError("sentence " + s.sent_id + " layer " + std::to_string(l) + " head " +
                                       std::to_string(h) + " row " + std::to_string(r) +
                                       ": invalid entry " + std::to_string(v));
          sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
          throw AttentionFormatError("sentence " + s.sent_id + " layer " + std::to_string(l) + " head " +
                                     std::to_string(h) + " row " + std::to_string(r) + ": row sum " +
                                     std::to_string(sum));
      }
    }
  }
}

AttentionDataset decode(ByteSource& src) {
  char magic[4];
  src.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw AttentionFormatError("bad magic, not a BATT file");
  std::uint32_t version = src.u32();
  if (version != kVersion) throw AttentionFormatError("unsupported BATT version " + std::to_string(version));
  std::uint32_t layers = src.u32();
  std::uint32_t heads = src.u32();
  std::uint32_t count = src.u32();

  AttentionDataset d(layers, heads);
  for (std::uint32_t s = 0; s < count; ++s) {
    std::uint32_t id_len = src.u32();
    src.require(id_len);
    std::string id(id_len, '\0');
    src.read(id.data(), id_len);
    std::uint32_t n = src.u32();
    src.require(d.total_heads() * n * n * sizeof(float));
    SentenceAttention& sa = d.add_sentence(std::move(id), n);
    src.read(reinterpret_cast<char*>(sa.values.data()), sa.values.size() * sizeof(float));
    if constexpr (std::endian::native == std::endian::big) {
      for (float& v : sa.values) {
        std::uint32_t raw = std::bit_cast<std::uint32_t>(v);
        const auto* p = reinterpret_cast<const unsigned char*>(&raw);
        v = std::bit_cast<float>(get_u32(p));
      }
    }
    validate_sentence(d, sa);
  }
  if (!src.at_end())
    throw AttentionFormatError("trailing bytes after sentence " + std::to_string(count) + " at byte " +
                               std::to_string(src.pos()));
  return d;
}

}  // namespace

SentenceAttention& AttentionDataset::add_sentence(std::string sent_id, std::uint32_t n) {
  SentenceAttention s;
  s.sent_id = std::move(sent_id);
  s.n = n;
  s.values.assign(total_heads() * n * n, 0.0f);
  sentences_.push_back(std::move(s));
  return sentences_.back();
}

std::size_t AttentionDataset::offset(const SentenceAttention& s, HeadId id) const {
  if (!contains(id))
    throw std::out_of_range("head (" + std::to_string(id.layer) + ", " + std::to_string(id.head) +
                            ") outside " + std::to_string(num_layers_) + "x" + std::to_string(num_heads_));
  std::size_t nn = std::size_t{s.n} * s.n;
  return (static_cast<std::size_t>(id.layer) * num_heads_ + static_cast<std::size_t>(id.head)) * nn;
}

HeadMatrixView AttentionDataset::matrix(const SentenceAttention& s, HeadId id) const {
  return HeadMatrixView(s.values.data() + offset(s, id), s.n, s.n);
}

HeadMatrixMut AttentionDataset::mutable_matrix(std::size_t sentence, HeadId id) {
  SentenceAttention& s = sentences_[sentence];
  return HeadMatrixMut(s.values.data() + offset(s, id), s.n, s.n);
}

void AttentionDataset::validate() const {
  for (const SentenceAttention& s : sentences_) {
    if (s.values.size() != total_heads() * s.n * s.n)
      throw AttentionFormatError("sentence " + s.sent_id + ": tensor size does not match n=" + std::to_string(s.n));
    validate_sentence(*this, s);
  }
}

std::vector<char> encode_attention(const AttentionDataset& d) {
  std::vector<char> out(kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, d.num_layers());
  put_u32(out, d.num_heads());
  put_u32(out, static_cast<std::uint32_t>(d.size()));
  for (const SentenceAttention& s : d.sentences()) {
    put_u32(out, static_cast<std::uint32_t>(s.sent_id.size()));
    out.insert(out.end(), s.sent_id.begin(), s.sent_id.end());
    put_u32(out, s.n);
    for (float v : s.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

AttentionDataset decode_attention(std::span<const char> bytes) {
  ByteSource src(bytes);
  return decode(src);
}

AttentionDataset read_attention_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ByteSource src(in);
  try {
    return decode(src);
  } catch (const AttentionFormatError& e) {
    throw AttentionFormatError(path.string() + ": " + e.what());
  }
}

void write_attention_file(const AttentionDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<char> bytes = encode_attention(dataset);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

AlignedCorpus AlignedCorpus::prefix(std::size_t k) const {
  AlignedCorpus out{dataset, {}};
  out.items.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(std::min(k, items.size())));
  return out;
}

AlignedCorpus align(const AttentionDataset& dataset, std::span<const Sentence> sentences,
                    const std::set<std::string>& skip) {
  std::vector<const Sentence*> kept;
  for (const Sentence& s : sentences)
    if (!skip.count(s.sent_id)) kept.push_back(&s);

  AlignedCorpus out{&dataset, {}};
  const std::size_t common = std::min(kept.size(), dataset.size());
  for (std::size_t i = 0; i < common; ++i) {
    const Sentence& s = *kept[i];
    const SentenceAttention& a = dataset[i];
    if (s.sent_id != a.sent_id)
      throw AlignmentError(i, "sent_id mismatch: treebank '" + s.sent_id + "' vs attention '" + a.sent_id + "'");
    if (s.size() != a.n)
      throw AlignmentError(i, "length mismatch for '" + s.sent_id + "': " + std::to_string(s.size()) +
                                  " tokens vs n=" + std::to_string(a.n));
    out.items.push_back({&s, &a});
  }
  if (kept.size() != dataset.size())
    throw AlignmentError(common, "count mismatch: " + std::to_string(kept.size()) + " sentences vs " +
                                     std::to_string(dataset.size()) + " attention entries");
  return out;
}

std::set<std::string> read_skip_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.insert(line);
  }
  return ids;
}

}  // namespace attnparse
