#include "attnparse/labels.hpp"

#include <algorithm>
#include <stdexcept>

namespace attnparse {

std::string_view base_label(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

std::string canonical_label(std::string_view deprel) {
  std::string_view base = base_label(deprel);
  if (base == "iobj") return "obj";
  if (base == "ccomp" || base == "xcomp") return "x/ccomp";
  if (label_id(base)) return std::string(base);
  return "dep";
}

std::optional<LabelId> label_id(std::string_view canonical) {
  auto it = std::find(kCanonicalLabels.begin(), kCanonicalLabels.end(), canonical);
  if (it == kCanonicalLabels.end()) return std::nullopt;
  return static_cast<LabelId>(it - kCanonicalLabels.begin());
}

std::string_view label_name(LabelId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= kCanonicalLabels.size())
    throw std::out_of_range("label id out of range: " + std::to_string(id));
  return kCanonicalLabels[static_cast<std::size_t>(id)];
}

bool is_non_clausal(std::string_view canonical) {
  auto id = label_id(canonical);
  return id && static_cast<std::size_t>(*id) < kNumNonClausal;
}

bool is_clausal(std::string_view canonical) {
  auto id = label_id(canonical);
  return id && static_cast<std::size_t>(*id) >= kNumNonClausal &&
         static_cast<std::size_t>(*id) < kNumNonClausal + kNumClausal;
}

}  // namespace attnparse
