#ifndef ATTNPARSE_LABELS_HPP
#define ATTNPARSE_LABELS_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace attnparse {

// Canonical relation inventory in fixed report order. The order is also the
// tie-break order used when max-pooling label matrices.
inline constexpr std::array<std::string_view, 19> kCanonicalLabels = {
    "amod", "advmod", "aux",   "case",  "compound", "conj",  "det",
    "nmod", "nummod", "mark",  "obj",   "nsubj",    "acl",   "advcl",
    "csubj", "x/ccomp", "parataxis", "punct", "dep"};

inline constexpr std::size_t kNumNonClausal = 12;
inline constexpr std::size_t kNumClausal = 5;

// Pseudo-label for the pooled key that groups every non-clausal edge. Used by
// the label-free tree construction mode.
inline constexpr std::string_view kPooledLabel = "nonclausal";

using LabelId = int;

// Strips the subtype, folds iobj into obj and ccomp/xcomp into x/ccomp, and
// maps everything outside the inventory to dep.
std::string canonical_label(std::string_view deprel);

// Part of the label before the first ':'.
std::string_view base_label(std::string_view deprel);

std::optional<LabelId> label_id(std::string_view canonical);
std::string_view label_name(LabelId id);

bool is_non_clausal(std::string_view canonical);
bool is_clausal(std::string_view canonical);

}  // namespace attnparse

#endif  // ATTNPARSE_LABELS_HPP
