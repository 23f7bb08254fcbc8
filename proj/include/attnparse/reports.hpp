#ifndef ATTNPARSE_REPORTS_HPP
#define ATTNPARSE_REPORTS_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attnparse/head_selection.hpp"
#include "attnparse/metrics.hpp"

namespace attnparse {

enum class ReportFormat { tsv, json };

// DepAcc per canonical label: positional baseline plus d2p/p2d for each named
// ensemble set. Averages follow the table layout: macro mean over the labels
// of a group (baseline) and over both directions of every label (ensembles).
struct DepAccRow {
  std::string label;
  std::optional<double> baseline;
  std::vector<std::pair<std::optional<double>, std::optional<double>>> columns;  // (d2p, p2d) per set
};

struct DepAccTable {
  std::vector<std::string> set_names;
  std::vector<DepAccRow> rows;  // canonical inventory order
  DepAccRow avg_non_clausal;
  DepAccRow avg_clausal;
};

DepAccTable depacc_table(const AlignedCorpus& evaluation, const std::optional<OffsetMap>& baseline,
                         const std::vector<std::pair<std::string, const EnsembleSet*>>& sets);

std::string format_depacc(const DepAccTable& table, ReportFormat format);

struct TreeScores {
  std::string setting;
  std::optional<AttachmentCounts> predicted;
  AttachmentCounts left_branching;
  AttachmentCounts right_branching;
  std::optional<HeadUsage> heads;
};

std::string format_tree_scores(const TreeScores& scores, ReportFormat format);

std::string format_sweep(const std::vector<SweepRow>& rows, ReportFormat format);

// Fitted offset and baseline DepAcc per key on original and modified gold.
struct BaselineRow {
  RelationKey key;
  std::optional<int> offset_original;
  std::optional<double> original;
  std::optional<int> offset_modified;
  std::optional<double> modified;
};
std::string format_baseline(const std::vector<BaselineRow>& rows, ReportFormat format);

struct OverlapMatrix {
  std::vector<RelationKey> rows;
  std::vector<RelationKey> cols;
  std::vector<std::vector<std::optional<std::size_t>>> counts;  // nullopt: a key is missing
};
OverlapMatrix overlap_matrix(const EnsembleSet& a, const EnsembleSet& b, const std::vector<RelationKey>& keys_a,
                             const std::vector<RelationKey>& keys_b);
std::string format_overlap(const OverlapMatrix& m, ReportFormat format);

ReportFormat parse_report_format(const std::string& s);

}  // namespace attnparse

#endif  // ATTNPARSE_REPORTS_HPP
