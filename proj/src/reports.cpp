#include "attnparse/reports.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "attnparse/labels.hpp"

namespace attnparse {
namespace {

using Json = nlohmann::ordered_json;

std::string percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

DepAccRow average_row(const std::string& name, const std::vector<DepAccRow>& rows, std::size_t sets) {
  DepAccRow avg;
  avg.label = name;
  std::vector<double> base;
  for (const DepAccRow& r : rows)
    if (r.baseline) base.push_back(*r.baseline);
  avg.baseline = mean(base);
  for (std::size_t s = 0; s < sets; ++s) {
    // Both directions of every label enter one mean; it fills both columns.
    std::vector<double> directed;
    for (const DepAccRow& r : rows) {
      if (r.columns[s].first) directed.push_back(*r.columns[s].first);
      if (r.columns[s].second) directed.push_back(*r.columns[s].second);
    }
    std::optional<double> m = mean(directed);
    avg.columns.emplace_back(m, m);
  }
  return avg;
}

std::optional<double> ensemble_value(const AlignedCorpus& corpus, const EnsembleSet& set, const RelationKey& key) {
  const Ensemble* e = set.find(key);
  if (!e) return std::nullopt;
  try {
    return ensemble_dep_acc(corpus, *e);
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
}

Json row_json(const DepAccRow& r, const std::vector<std::string>& names) {
  Json j;
  j["label"] = r.label;
  j["baseline"] = optional_json(r.baseline);
  for (std::size_t s = 0; s < names.size(); ++s) {
    j[names[s]] = {{"d2p", optional_json(r.columns[s].first)}, {"p2d", optional_json(r.columns[s].second)}};
  }
  return j;
}

void row_tsv(std::ostringstream& out, const DepAccRow& r) {
  out << r.label << '\t' << percent(r.baseline);
  for (const auto& [d2p, p2d] : r.columns) out << '\t' << percent(d2p) << '\t' << percent(p2d);
  out << '\n';
}

Json counts_json(const AttachmentCounts& c) {
  return {{"tokens", c.total}, {"uas", c.uas()}, {"las", c.las()}};
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "tsv") return ReportFormat::tsv;
  if (s == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format '" + s + "'");
}

DepAccTable depacc_table(const AlignedCorpus& evaluation, const std::optional<OffsetMap>& baseline,
                         const std::vector<std::pair<std::string, const EnsembleSet*>>& sets) {
  DepAccTable table;
  for (const auto& [name, set] : sets) table.set_names.push_back(name);
  for (std::string_view label : kCanonicalLabels) {
    DepAccRow row;
    row.label = std::string(label);
    if (baseline) {
      // One offset per label: the fitted d2p offset, scored on d2p edges.
      RelationKey key{row.label, Direction::d2p};
      auto it = baseline->find(key);
      EdgeSet edges = collect_edges(evaluation, key);
      if (it != baseline->end() && edges.total() > 0) row.baseline = baseline_dep_acc(it->second, edges);
    }
    for (const auto& [name, set] : sets) {
      row.columns.emplace_back(ensemble_value(evaluation, *set, {row.label, Direction::d2p}),
                               ensemble_value(evaluation, *set, {row.label, Direction::p2d}));
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<DepAccRow> non_clausal(table.rows.begin(), table.rows.begin() + kNumNonClausal);
  std::vector<DepAccRow> clausal(table.rows.begin() + kNumNonClausal,
                                 table.rows.begin() + kNumNonClausal + kNumClausal);
  table.avg_non_clausal = average_row("AVG NON-CLAUSAL", non_clausal, sets.size());
  table.avg_clausal = average_row("AVG CLAUSAL", clausal, sets.size());
  return table;
}

std::string format_depacc(const DepAccTable& table, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["sets"] = table.set_names;
    Json rows = Json::array();
    for (const DepAccRow& r : table.rows) rows.push_back(row_json(r, table.set_names));
    j["rows"] = rows;
    j["avg_non_clausal"] = row_json(table.avg_non_clausal, table.set_names);
    j["avg_clausal"] = row_json(table.avg_clausal, table.set_names);
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "relation\tbaseline";
  for (const std::string& name : table.set_names) out << '\t' << name << ":d2p\t" << name << ":p2d";
  out << '\n';
  for (const DepAccRow& r : table.rows) row_tsv(out, r);
  row_tsv(out, table.avg_non_clausal);
  row_tsv(out, table.avg_clausal);
  return out.str();
}

std::string format_tree_scores(const TreeScores& scores, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["setting"] = scores.setting;
    j["predicted"] = scores.predicted ? counts_json(*scores.predicted) : Json(nullptr);
    j["left_branching"] = counts_json(scores.left_branching);
    j["right_branching"] = counts_json(scores.right_branching);
    if (scores.heads) j["heads_used"] = {{"unique", scores.heads->unique}, {"slots", scores.heads->slots}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "setting\tuas\tlas\theads_unique\theads_slots\n";
  if (scores.predicted) {
    out << scores.setting << '\t' << percent(scores.predicted->uas()) << '\t' << percent(scores.predicted->las());
    if (scores.heads)
      out << '\t' << scores.heads->unique << '\t' << scores.heads->slots;
    else
      out << "\t-\t-";
    out << '\n';
  }
  out << "left-branching\t" << percent(scores.left_branching.uas()) << "\t-\t-\t-\n";
  out << "right-branching\t" << percent(scores.right_branching.uas()) << "\t-\t-\t-\n";
  return out.str();
}

std::string format_sweep(const std::vector<SweepRow>& rows, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j = Json::array();
    for (const SweepRow& r : rows) {
      Json test = Json::array();
      for (const auto& t : r.test) test.push_back(optional_json(t));
      j.push_back({{"key", r.key.name()}, {"dev", r.dev}, {"test", test}});
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "relation\tn\tdev\ttest\n";
  for (const SweepRow& r : rows) {
    for (std::size_t k = 0; k < r.dev.size(); ++k) {
      out << r.key.name() << '\t' << (k + 1) << '\t' << fixed4(r.dev[k]) << '\t'
          << (r.test[k] ? fixed4(*r.test[k]) : std::string("-")) << '\n';
    }
  }
  return out.str();
}

std::string format_baseline(const std::vector<BaselineRow>& rows, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j = Json::array();
    for (const BaselineRow& r : rows)
      j.push_back({{"key", r.key.name()},
                   {"offset_original", r.offset_original ? Json(*r.offset_original) : Json(nullptr)},
                   {"original", optional_json(r.original)},
                   {"offset_modified", r.offset_modified ? Json(*r.offset_modified) : Json(nullptr)},
                   {"modified", optional_json(r.modified)}});
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  auto offset = [](const std::optional<int>& o) { return o ? std::to_string(*o) : std::string("-"); };
  out << "relation\toffset_original\toriginal\toffset_modified\tmodified\n";
  for (const BaselineRow& r : rows)
    out << r.key.name() << '\t' << offset(r.offset_original) << '\t' << percent(r.original) << '\t'
        << offset(r.offset_modified) << '\t' << percent(r.modified) << '\n';
  return out.str();
}

OverlapMatrix overlap_matrix(const EnsembleSet& a, const EnsembleSet& b, const std::vector<RelationKey>& keys_a,
                             const std::vector<RelationKey>& keys_b) {
  OverlapMatrix m;
  m.rows = keys_a;
  m.cols = keys_b;
  for (const RelationKey& ka : keys_a) {
    std::vector<std::optional<std::size_t>> line;
    for (const RelationKey& kb : keys_b) {
      if (a.find(ka) && b.find(kb))
        line.emplace_back(ensemble_overlap(a, b, ka, kb));
      else
        line.emplace_back(std::nullopt);
    }
    m.counts.push_back(std::move(line));
  }
  return m;
}

std::string format_overlap(const OverlapMatrix& m, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    Json rows = Json::array(), cols = Json::array(), counts = Json::array();
    for (const RelationKey& k : m.rows) rows.push_back(k.name());
    for (const RelationKey& k : m.cols) cols.push_back(k.name());
    for (const auto& line : m.counts) {
      Json l = Json::array();
      for (const auto& c : line) l.push_back(c ? Json(*c) : Json(nullptr));
      counts.push_back(l);
    }
    j["rows"] = rows;
    j["cols"] = cols;
    j["counts"] = counts;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "relation";
  for (const RelationKey& k : m.cols) out << '\t' << k.name();
  out << '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << m.rows[i].name();
    for (const auto& c : m.counts[i]) out << '\t' << (c ? std::to_string(*c) : std::string("-"));
    out << '\n';
  }
  return out.str();
}

}  // namespace attnparse
