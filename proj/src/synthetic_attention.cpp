#include "attnparse/synthetic_attention.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "attnparse/labels.hpp"
#include "attnparse/parallel.hpp"

namespace attnparse {
namespace {

constexpr double kJitter = 1e-3;

// Uniform [0, 1) from the top 53 bits, independent of the standard library's
// distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

struct Target {
  Eigen::Index column;
  double fidelity;
};

}  // namespace

void SynthSpec::check() const {
  for (const HeadAssignment& a : assignments) {
    if (a.head.layer < 0 || a.head.head < 0 || static_cast<std::uint32_t>(a.head.layer) >= num_layers ||
        static_cast<std::uint32_t>(a.head.head) >= num_heads)
      throw std::invalid_argument("assignment head (" + std::to_string(a.head.layer) + ", " +
                                  std::to_string(a.head.head) + ") outside the model");
    if (!(a.fidelity >= 0.0 && a.fidelity <= 1.0))
      throw std::invalid_argument("fidelity must lie in [0, 1]");
    if (a.band && (a.band->min < 0 || (a.band->max && *a.band->max < a.band->min)))
      throw std::invalid_argument("empty distance band for " + a.key.name());
  }
}

AttentionDataset generate(std::span<const Sentence> sentences, const SynthSpec& spec) {
  spec.check();
  AttentionDataset dataset(spec.num_layers, spec.num_heads);
  for (const Sentence& s : sentences) dataset.add_sentence(s.sent_id, static_cast<std::uint32_t>(s.size()));
  const std::size_t total_heads = dataset.total_heads();

  parallel_for(sentences.size(), [&](std::size_t si) {
    const Sentence& sentence = sentences[si];
    const auto n = static_cast<Eigen::Index>(sentence.size());
    std::mt19937_64 rng = stream_for(spec.seed, si);

    // targets[head][row]
    std::vector<std::vector<std::vector<Target>>> targets(total_heads);
    for (const HeadAssignment& a : spec.assignments) {
      auto flat = static_cast<std::size_t>(a.head.layer) * spec.num_heads + static_cast<std::size_t>(a.head.head);
      auto& rows = targets[flat];
      if (rows.empty()) rows.resize(static_cast<std::size_t>(n));
      for (const Edge& e : sentence_edges(sentence, a.key)) {
        int distance = static_cast<int>(std::abs(e.target - e.source));
        if (a.band && !a.band->contains(distance)) continue;
        rows[static_cast<std::size_t>(e.source)].push_back({e.target, a.fidelity});
      }
    }

    Eigen::VectorXd row(n);
    for (std::size_t flat = 0; flat < total_heads; ++flat) {
      HeadId id{static_cast<int>(flat / spec.num_heads), static_cast<int>(flat % spec.num_heads)};
      HeadMatrixMut m = dataset.mutable_matrix(si, id);
      for (Eigen::Index r = 0; r < n; ++r) {
        const std::vector<Target>* assigned =
            targets[flat].empty() ? nullptr : &targets[flat][static_cast<std::size_t>(r)];
        if (assigned && !assigned->empty()) {
          for (Eigen::Index c = 0; c < n; ++c) row(c) = 1.0 + kJitter * unit(rng);
          row /= row.sum();
          const double k = static_cast<double>(assigned->size());
          double mass = 0.0;
          for (const Target& t : *assigned) mass += t.fidelity / k;
          row *= 1.0 - mass;
          for (const Target& t : *assigned) row(t.column) += t.fidelity / k;
        } else {
          switch (spec.filler) {
            case Filler::uniform:
              row.setConstant(1.0 / static_cast<double>(n));
              break;
            case Filler::self:
              row.setZero();
              row(r) = 1.0;
              break;
            case Filler::random:
              for (Eigen::Index c = 0; c < n; ++c) row(c) = -std::log(1.0 - unit(rng));
              row /= row.sum();
              break;
          }
        }
        m.row(r) = row.cast<float>().transpose();
      }
    }
  });
  return dataset;
}

SynthSpec synth_spec_from_json(const std::string& text) {
  SynthSpec spec;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    spec.num_layers = j.value("num_layers", 12u);
    spec.num_heads = j.value("num_heads", 12u);
    spec.seed = j.value("seed", std::uint64_t{0});
    std::string filler = j.value("filler", std::string("uniform"));
    if (filler == "uniform")
      spec.filler = Filler::uniform;
    else if (filler == "self")
      spec.filler = Filler::self;
    else if (filler == "random")
      spec.filler = Filler::random;
    else
      throw std::invalid_argument("unknown filler '" + filler + "'");
    for (const auto& a : j.value("assignments", nlohmann::json::array())) {
      HeadAssignment h;
      h.head = {a.at("layer").get<int>(), a.at("head").get<int>()};
      h.key = parse_key(a.at("label").get<std::string>() + ":" + a.at("direction").get<std::string>());
      h.fidelity = a.value("fidelity", 1.0);
      if (a.contains("band") && !a.at("band").is_null()) {
        const auto& b = a.at("band");
        DistanceBand band;
        band.min = b.at(0).get<int>();
        if (b.size() > 1 && !b.at(1).is_null()) band.max = b.at(1).get<int>();
        h.band = band;
      }
      spec.assignments.push_back(h);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("synthetic spec JSON: ") + e.what());
  }
  spec.check();
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return synth_spec_from_json(buf.str());
}

std::vector<Sentence> random_treebank(const TreebankSpec& spec) {
  if (spec.min_length < 1 || spec.max_length < spec.min_length)
    throw std::invalid_argument("bad sentence length range");
  std::vector<std::string> labels = spec.labels;
  if (labels.empty())
    for (std::size_t i = 0; i < kNumNonClausal; ++i) labels.emplace_back(kCanonicalLabels[i]);

  std::mt19937_64 rng(spec.seed);
  auto below = [&](std::size_t bound) { return static_cast<std::size_t>(unit(rng) * static_cast<double>(bound)); };

  std::vector<Sentence> out;
  out.reserve(spec.count);
  for (std::size_t s = 0; s < spec.count; ++s) {
    const std::size_t n = spec.min_length + below(spec.max_length - spec.min_length + 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[below(i)]);

    Sentence sent;
    sent.sent_id = "synth-" + std::to_string(s + 1);
    sent.tokens.resize(n);
    std::vector<std::vector<bool>> used(n, std::vector<bool>(labels.size(), false));
    for (std::size_t i = 0; i < n; ++i) {
      Token& t = sent.tokens[i];
      t.index = static_cast<int>(i + 1);
      t.form = "w" + std::to_string(i + 1);
      t.upos = "X";
    }
    sent.tokens[order[0]].head = 0;
    sent.tokens[order[0]].deprel = "root";
    for (std::size_t k = 1; k < n; ++k) {
      Token& t = sent.tokens[order[k]];
      // Parent among already placed nodes; with unique labels, one with a free
      // label slot (some node always has one while k <= n).
      std::size_t parent, label;
      for (;;) {
        parent = order[below(k)];
        label = below(labels.size());
        if (!spec.unique_label_per_head || !used[parent][label]) break;
        bool any = false;
        for (std::size_t l = 0; l < labels.size() && !any; ++l) any = !used[parent][l];
        if (any) {
          do label = below(labels.size());
          while (used[parent][label]);
          break;
        }
      }
      used[parent][label] = true;
      t.head = static_cast<int>(parent + 1);
      t.deprel = labels[label];
    }
    out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace attnparse
