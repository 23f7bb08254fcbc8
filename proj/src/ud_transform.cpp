#include "attnparse/ud_transform.hpp"

#include <stdexcept>

#include "attnparse/labels.hpp"

namespace attnparse {
namespace {

// Distance to the root for every token, 1-based heads.
std::vector<int> depths(const Sentence& s) {
  const std::size_t n = s.size();
  std::vector<int> depth(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int d = 0;
    for (int cur = s.tokens[i].head; cur != 0 && d <= static_cast<int>(n); cur = s.tokens[static_cast<std::size_t>(cur - 1)].head)
      ++d;
    depth[i] = d;
  }
  return depth;
}

bool has_base(const Token& t, std::string_view base) { return base_label(t.deprel) == base; }

}  // namespace

void TransformConfig::check() const {
  if (enable_copula && copula_rehang_labels.empty())
    throw std::invalid_argument("copula transform enabled with an empty rehang label set");
}

Sentence transform_copula(const Sentence& sentence, const TransformConfig& config) {
  Sentence out = sentence;
  const std::size_t n = out.size();
  // Each step removes one cop edge or moves it strictly closer to the root.
  for (std::size_t guard = 0; guard < n * n + 1; ++guard) {
    std::vector<int> depth = depths(out);
    std::size_t copula = n;
    for (std::size_t c = 0; c < n; ++c) {
      const Token& t = out.tokens[c];
      if (t.head == 0 || !has_base(t, "cop")) continue;
      if (copula == n || depth[static_cast<std::size_t>(t.head - 1)] >
                             depth[static_cast<std::size_t>(out.tokens[copula].head - 1)])
        copula = c;
    }
    if (copula == n) break;

    Token& cop = out.tokens[copula];
    const std::size_t pred = static_cast<std::size_t>(cop.head - 1);
    Token& predicate = out.tokens[pred];
    cop.head = predicate.head;
    cop.deprel = predicate.deprel;
    predicate.head = cop.index;
    predicate.deprel = "obj";
    for (Token& t : out.tokens) {
      if (t.index == cop.index || t.head != predicate.index) continue;
      if (config.copula_rehang_labels.count(std::string(base_label(t.deprel)))) t.head = cop.index;
    }
  }
  return out;
}

Sentence transform_expletive(const Sentence& sentence, const TransformConfig&) {
  Sentence out = sentence;
  const std::size_t n = sentence.size();
  std::vector<bool> head_has_expl(n + 1, false);
  for (const Token& t : sentence.tokens)
    if (has_base(t, "expl")) head_has_expl[static_cast<std::size_t>(t.head)] = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Token& orig = sentence.tokens[i];
    if (!head_has_expl[static_cast<std::size_t>(orig.head)]) continue;
    if (has_base(orig, "expl"))
      out.tokens[i].deprel = "nsubj";
    else if (has_base(orig, "nsubj"))
      out.tokens[i].deprel = "obj";
  }
  return out;
}

Sentence transform_coordination(const Sentence& sentence, const TransformConfig&) {
  Sentence out = sentence;
  const std::size_t n = out.size();
  // Reattaching moves subtrees strictly deeper, so the sweep reaches a fixed
  // point well before the guard for any valid tree.
  for (std::size_t guard = 0; guard < n * n + 1; ++guard) {
    bool changed = false;
    for (int head = 1; head <= static_cast<int>(n); ++head) {
      int previous = 0;
      for (Token& t : out.tokens) {
        if (t.head != head || !has_base(t, "conj")) continue;
        if (previous != 0) {
          t.head = previous;
          changed = true;
        }
        previous = t.index;
      }
    }
    if (!changed) break;
  }
  return out;
}

Sentence apply_all(const Sentence& sentence, const TransformConfig& config) {
  config.check();
  Sentence out = sentence;
  if (config.enable_coordination) out = transform_coordination(out, config);
  if (config.enable_copula) out = transform_copula(out, config);
  if (config.enable_expletive) out = transform_expletive(out, config);
  return out;
}

}  // namespace attnparse
