#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attnparse/attention_store.hpp"
#include "attnparse/conllu.hpp"
#include "attnparse/head_selection.hpp"
#include "attnparse/labeled_tree.hpp"
#include "attnparse/metrics.hpp"
#include "attnparse/reports.hpp"
#include "attnparse/synthetic_attention.hpp"
#include "attnparse/tree_builder.hpp"
#include "attnparse/ud_transform.hpp"

namespace fs = std::filesystem;
using namespace attnparse;

namespace {

// Thrown for bad inputs; main prints it and exits with status 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Prefixes the file name unless the message already starts with it.
InputError file_error(const fs::path& path, const std::exception& e) {
  std::string what = e.what();
  if (what.rfind(path.string(), 0) == 0) return InputError(what);
  return InputError(path.string() + ": " + what);
}

std::vector<Sentence> load_conllu(const fs::path& path) {
  try {
    return read_conllu_file(path);
  } catch (const std::exception& e) {
    throw file_error(path, e);
  }
}

AttentionDataset load_attention(const fs::path& path) {
  try {
    return read_attention_file(path);
  } catch (const std::exception& e) {
    throw file_error(path, e);
  }
}

EnsembleSet load_set(const fs::path& path) {
  try {
    return load_ensembles(path);
  } catch (const std::exception& e) {
    throw file_error(path, e);
  }
}

std::set<std::string> load_skip(const std::string& path) {
  if (path.empty()) return {};
  try {
    return read_skip_list(path);
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::vector<Sentence> modified(const std::vector<Sentence>& sentences, const TransformConfig& config = {}) {
  std::vector<Sentence> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) out.push_back(apply_all(s, config));
  return out;
}

// A treebank paired with its attention file; owns both.
struct Corpus {
  std::vector<Sentence> sentences;
  AttentionDataset dataset;
  AlignedCorpus aligned;
};

std::unique_ptr<Corpus> load_corpus(const std::string& conllu, const std::string& attention, const std::string& skip,
                                    bool modify) {
  auto c = std::make_unique<Corpus>(Corpus{load_conllu(conllu), load_attention(attention), {}});
  if (modify) c->sentences = modified(c->sentences);
  try {
    c->aligned = align(c->dataset, c->sentences, load_skip(skip));
  } catch (const AlignmentError& e) {
    std::string where = conllu + " / " + attention + ": ";
    throw InputError(where + e.what());
  }
  return c;
}

std::string set_name(const EnsembleSet& set, const fs::path& path) {
  return set.model.empty() ? path.stem().string() : set.model;
}

std::vector<RelationKey> parse_keys(const std::vector<std::string>& names) {
  std::vector<RelationKey> keys;
  for (const std::string& n : names) keys.push_back(parse_key(n));
  return keys;
}

AttachmentCounts branching_counts(const std::vector<Sentence>& gold, bool left, const ScoreOptions& opts) {
  AttachmentCounts total;
  for (const Sentence& s : gold) {
    LabeledTree t = left ? left_branching(s.size(), s.root()) : right_branching(s.size(), s.root());
    total += attachment(t, s, opts);
  }
  return total;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency trees from transformer attention head ensembles"};
  app.require_subcommand(1);
  std::string format_name = "tsv";

  // modify-ud
  auto* modify = app.add_subcommand("modify-ud", "Apply copula, expletive and coordination transforms");
  std::string mod_in, mod_out;
  bool no_copula = false, no_expletive = false, no_coordination = false;
  modify->add_option("--in", mod_in, "Input CoNLL-U")->required();
  modify->add_option("--out", mod_out, "Output CoNLL-U")->required();
  modify->add_flag("--no-copula", no_copula);
  modify->add_flag("--no-expletive", no_expletive);
  modify->add_flag("--no-coordination", no_coordination);

  // select-heads
  auto* select = app.add_subcommand("select-heads", "Select a head ensemble per directed relation");
  std::string sel_conllu, sel_attention, sel_skip, sel_out, sel_model;
  int sel_n = kDefaultEnsembleSize;
  std::size_t sel_sentences = 0;
  bool sel_modified = false, sel_single = false;
  select->add_option("--conllu", sel_conllu, "Selection treebank")->required();
  select->add_option("--attention", sel_attention, "Selection attention (BATT)")->required();
  select->add_option("--skip", sel_skip, "File of sent_ids missing from the attention file");
  select->add_option("--n-heads", sel_n, "Maximum ensemble size")->check(CLI::PositiveNumber);
  select->add_option("--sentences", sel_sentences, "Use only the first k sentences")->check(CLI::PositiveNumber);
  select->add_flag("--modified", sel_modified, "Select on modified UD");
  select->add_flag("--single-ensemble", sel_single, "One pooled non-clausal ensemble per direction");
  select->add_option("--model", sel_model, "Model name stored in the output");
  select->add_option("--out", sel_out, "Ensemble JSON")->required();

  // extract-trees
  auto* extract = app.add_subcommand("extract-trees", "Build labeled trees from attention");
  std::string ex_conllu, ex_attention, ex_skip, ex_ensembles, ex_out, ex_sel_conllu, ex_sel_attention, ex_sel_skip;
  std::string ex_root_mode = "incoming";
  int ex_n = kDefaultEnsembleSize;
  std::size_t ex_sentences = 0;
  bool ex_no_labels = false, ex_single = false, ex_sel_modified = false;
  extract->add_option("--conllu", ex_conllu, "Treebank to parse (tokens and gold root)")->required();
  extract->add_option("--attention", ex_attention, "Its attention (BATT)")->required();
  extract->add_option("--skip", ex_skip);
  auto* ens_opt = extract->add_option("--ensembles", ex_ensembles, "Ensemble JSON");
  auto* sc_opt = extract->add_option("--select-conllu", ex_sel_conllu, "Select ensembles inline from this treebank");
  auto* sa_opt = extract->add_option("--select-attention", ex_sel_attention);
  extract->add_option("--select-skip", ex_sel_skip);
  extract->add_flag("--select-modified", ex_sel_modified);
  auto* n_opt = extract->add_option("--n-heads", ex_n)->check(CLI::PositiveNumber);
  auto* k_opt = extract->add_option("--sentences", ex_sentences)->check(CLI::PositiveNumber);
  extract->add_flag("--no-labels", ex_no_labels, "Label-free: pooled ensemble pair, no max-pool");
  extract->add_flag("--single-ensemble", ex_single, "Same as --no-labels");
  extract->add_option("--root-mode", ex_root_mode, "incoming|outgoing")
      ->check(CLI::IsMember({"incoming", "outgoing"}));
  extract->add_option("--out", ex_out, "Output CoNLL-U")->required();
  sc_opt->needs(sa_opt);
  sa_opt->needs(sc_opt);
  ens_opt->excludes(sc_opt);
  n_opt->needs(sc_opt);
  k_opt->needs(sc_opt);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "DepAcc table or UAS/LAS report");
  std::string ev_gold, ev_pred, ev_attention, ev_skip, ev_fit, ev_out, ev_setting = "attention";
  std::vector<std::string> ev_ensembles;
  bool ev_modified = false, ev_no_punct = false, ev_no_baseline = false;
  evaluate->add_option("--gold", ev_gold, "Gold treebank")->required();
  evaluate->add_option("--pred", ev_pred, "Predicted trees: report UAS/LAS");
  evaluate->add_option("--attention", ev_attention, "Attention of the gold treebank: report DepAcc");
  evaluate->add_option("--skip", ev_skip);
  evaluate->add_option("--ensembles", ev_ensembles, "Ensemble JSON (repeatable)");
  evaluate->add_flag("--modified", ev_modified, "Evaluate DepAcc on modified UD");
  evaluate->add_option("--baseline-fit", ev_fit, "Treebank for the positional baseline (default: gold)");
  evaluate->add_flag("--no-baseline", ev_no_baseline);
  evaluate->add_flag("--no-punct", ev_no_punct, "Exclude punct tokens from UAS/LAS");
  evaluate->add_option("--setting", ev_setting, "Row name of the predicted trees");
  evaluate->add_option("--format", format_name)->check(CLI::IsMember({"tsv", "json"}));
  evaluate->add_option("--out", ev_out, "Report file (default stdout)");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Positional baseline on original and modified UD");
  std::string bl_fit, bl_eval, bl_out;
  baseline->add_option("--fit", bl_fit, "Treebank to fit offsets on")->required();
  baseline->add_option("--eval", bl_eval, "Treebank to score (default: the fit treebank)");
  baseline->add_option("--format", format_name)->check(CLI::IsMember({"tsv", "json"}));
  baseline->add_option("--out", bl_out);

  // overlap
  auto* overlap = app.add_subcommand("overlap", "Shared heads between ensembles");
  std::string ov_a, ov_b, ov_out;
  std::vector<std::string> ov_keys_a, ov_keys_b;
  overlap->add_option("--a", ov_a, "Ensemble JSON (rows)")->required();
  overlap->add_option("--b", ov_b, "Ensemble JSON (columns; default: same as --a)");
  overlap->add_option("--keys-a", ov_keys_a, "Row keys such as amod:d2p (default: all in a)");
  overlap->add_option("--keys-b", ov_keys_b, "Column keys (default: all in b)");
  overlap->add_option("--format", format_name)->check(CLI::IsMember({"tsv", "json"}));
  overlap->add_option("--out", ov_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "DepAcc as a function of ensemble size");
  std::string sw_sel_conllu, sw_sel_attention, sw_sel_skip, sw_ev_conllu, sw_ev_attention, sw_ev_skip, sw_out;
  std::vector<std::string> sw_keys;
  int sw_max = 10;
  bool sw_modified = false;
  sweep->add_option("--select-conllu", sw_sel_conllu)->required();
  sweep->add_option("--select-attention", sw_sel_attention)->required();
  sweep->add_option("--select-skip", sw_sel_skip);
  sweep->add_option("--eval-conllu", sw_ev_conllu)->required();
  sweep->add_option("--eval-attention", sw_ev_attention)->required();
  sweep->add_option("--eval-skip", sw_ev_skip);
  sweep->add_option("--max-n", sw_max)->check(CLI::PositiveNumber);
  sweep->add_option("--keys", sw_keys, "Keys such as nsubj:d2p (default: all)");
  sweep->add_flag("--modified", sw_modified);
  sweep->add_option("--format", format_name)->check(CLI::IsMember({"tsv", "json"}));
  sweep->add_option("--out", sw_out);

  // synth
  auto* synth = app.add_subcommand("synth", "Synthetic attention for a treebank");
  std::string sy_conllu, sy_spec, sy_out;
  bool sy_modified = false;
  synth->add_option("--conllu", sy_conllu)->required();
  synth->add_option("--spec", sy_spec, "Synthetic spec JSON")->required();
  synth->add_flag("--modified", sy_modified, "Assign edges of the modified trees");
  synth->add_option("--out", sy_out, "Output BATT")->required();

  // random-treebank
  auto* random = app.add_subcommand("random-treebank", "Random well-formed treebank");
  TreebankSpec rt;
  std::string rt_out;
  random->add_option("--count", rt.count);
  random->add_option("--min-length", rt.min_length)->check(CLI::PositiveNumber);
  random->add_option("--max-length", rt.max_length)->check(CLI::PositiveNumber);
  random->add_option("--seed", rt.seed);
  random->add_option("--labels", rt.labels, "Relation labels (default: the non-clausal set)");
  random->add_option("--out", rt_out, "Output CoNLL-U")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const ReportFormat format = parse_report_format(format_name);

    if (*modify) {
      TransformConfig config;
      config.enable_copula = !no_copula;
      config.enable_expletive = !no_expletive;
      config.enable_coordination = !no_coordination;
      write_conllu_file(modified(load_conllu(mod_in), config), mod_out);

    } else if (*select) {
      auto corpus = load_corpus(sel_conllu, sel_attention, sel_skip, sel_modified);
      AlignedCorpus used = sel_sentences ? corpus->aligned.prefix(sel_sentences) : corpus->aligned;
      std::string desc = fs::path(sel_conllu).filename().string() + ", " + std::to_string(used.size()) + " sentences" +
                         (sel_modified ? ", modified UD" : "");
      EnsembleSet set =
          select_all(used, sel_single ? pooled_keys() : all_keys(), sel_n, sel_model, desc);
      save_ensembles(set, sel_out);

    } else if (*extract) {
      if (ex_ensembles.empty() && ex_sel_conllu.empty())
        throw InputError("extract-trees needs --ensembles or --select-conllu/--select-attention");
      ExtractOptions opts;
      opts.use_labels = !(ex_no_labels || ex_single);
      opts.root_mode = ex_root_mode == "outgoing" ? RootConstraint::outgoing : RootConstraint::incoming;
      EnsembleSet set;
      if (!ex_ensembles.empty()) {
        set = load_set(ex_ensembles);
      } else {
        auto sel = load_corpus(ex_sel_conllu, ex_sel_attention, ex_sel_skip, ex_sel_modified);
        AlignedCorpus used = ex_sentences ? sel->aligned.prefix(ex_sentences) : sel->aligned;
        set = select_all(used, construction_keys(opts), ex_n);
      }
      auto corpus = load_corpus(ex_conllu, ex_attention, ex_skip, false);
      std::vector<LabeledTree> trees = extract_trees(corpus->aligned, set, opts);
      std::vector<Sentence> out;
      out.reserve(trees.size());
      for (std::size_t i = 0; i < trees.size(); ++i) out.push_back(apply_tree(corpus->aligned.sentence(i), trees[i]));
      write_conllu_file(out, ex_out);

    } else if (*evaluate) {
      std::vector<Sentence> gold = load_conllu(ev_gold);
      if (!ev_pred.empty()) {
        std::vector<Sentence> pred = load_conllu(ev_pred);
        std::set<std::string> skip = load_skip(ev_skip);
        std::vector<Sentence> kept;
        for (const Sentence& s : gold)
          if (!skip.count(s.sent_id)) kept.push_back(s);
        if (kept.size() != pred.size())
          throw InputError(ev_pred + ": " + std::to_string(pred.size()) + " sentences, gold has " +
                           std::to_string(kept.size()));
        ScoreOptions opts;
        opts.include_punct = !ev_no_punct;
        TreeScores scores;
        scores.setting = ev_setting;
        AttachmentCounts total;
        for (std::size_t i = 0; i < kept.size(); ++i) {
          if (pred[i].sent_id != kept[i].sent_id || pred[i].size() != kept[i].size())
            throw InputError(ev_pred + ": sentence " + pred[i].sent_id + " does not match gold sentence " +
                             kept[i].sent_id);
          total += attachment(tree_from_sentence(pred[i]), kept[i], opts);
        }
        scores.predicted = total;
        scores.left_branching = branching_counts(kept, true, opts);
        scores.right_branching = branching_counts(kept, false, opts);
        if (!ev_ensembles.empty()) {
          EnsembleSet set = load_set(ev_ensembles.front());
          std::vector<RelationKey> keys;
          for (const auto& [key, e] : set.ensembles)
            if (key.label == kPooledLabel || is_non_clausal(key.label)) keys.push_back(key);
          scores.heads = head_usage(set, keys);
        }
        write_text(ev_out, format_tree_scores(scores, format));
      } else if (!ev_attention.empty()) {
        auto corpus = load_corpus(ev_gold, ev_attention, ev_skip, ev_modified);
        std::vector<EnsembleSet> sets;
        for (const std::string& p : ev_ensembles) sets.push_back(load_set(p));
        std::vector<std::pair<std::string, const EnsembleSet*>> named;
        for (std::size_t i = 0; i < sets.size(); ++i) named.emplace_back(set_name(sets[i], ev_ensembles[i]), &sets[i]);
        std::optional<OffsetMap> offsets;
        if (!ev_no_baseline) {
          std::vector<Sentence> fit = ev_fit.empty() ? corpus->sentences : load_conllu(ev_fit);
          if (!ev_fit.empty() && ev_modified) fit = modified(fit);
          offsets = fit_positional_baseline(fit);
        }
        write_text(ev_out, format_depacc(depacc_table(corpus->aligned, offsets, named), format));
      } else {
        // Branching baselines only.
        ScoreOptions opts;
        opts.include_punct = !ev_no_punct;
        TreeScores scores;
        scores.left_branching = branching_counts(gold, true, opts);
        scores.right_branching = branching_counts(gold, false, opts);
        write_text(ev_out, format_tree_scores(scores, format));
      }

    } else if (*baseline) {
      std::vector<Sentence> fit = load_conllu(bl_fit);
      std::vector<Sentence> eval = bl_eval.empty() ? fit : load_conllu(bl_eval);
      std::vector<Sentence> fit_mod = modified(fit), eval_mod = modified(eval);
      OffsetMap original = fit_positional_baseline(fit), changed = fit_positional_baseline(fit_mod);
      std::vector<BaselineRow> rows;
      for (const RelationKey& key : all_keys()) {
        BaselineRow row;
        row.key = key;
        if (auto it = original.find(key); it != original.end()) {
          row.offset_original = it->second;
          EdgeSet edges = collect_edges(eval, key);
          if (edges.total()) row.original = baseline_dep_acc(it->second, edges);
        }
        if (auto it = changed.find(key); it != changed.end()) {
          row.offset_modified = it->second;
          EdgeSet edges = collect_edges(eval_mod, key);
          if (edges.total()) row.modified = baseline_dep_acc(it->second, edges);
        }
        if (row.offset_original || row.offset_modified) rows.push_back(row);
      }
      write_text(bl_out, format_baseline(rows, format));

    } else if (*overlap) {
      EnsembleSet a = load_set(ov_a);
      EnsembleSet b = ov_b.empty() ? a : load_set(ov_b);
      auto keys_of = [](const EnsembleSet& s) {
        std::vector<RelationKey> keys;
        for (const RelationKey& k : all_keys())
          if (s.find(k)) keys.push_back(k);
        for (const RelationKey& k : pooled_keys())
          if (s.find(k)) keys.push_back(k);
        return keys;
      };
      std::vector<RelationKey> ka = ov_keys_a.empty() ? keys_of(a) : parse_keys(ov_keys_a);
      std::vector<RelationKey> kb = ov_keys_b.empty() ? keys_of(b) : parse_keys(ov_keys_b);
      write_text(ov_out, format_overlap(overlap_matrix(a, b, ka, kb), format));

    } else if (*sweep) {
      auto sel = load_corpus(sw_sel_conllu, sw_sel_attention, sw_sel_skip, sw_modified);
      auto ev = load_corpus(sw_ev_conllu, sw_ev_attention, sw_ev_skip, sw_modified);
      std::vector<RelationKey> keys;
      for (const RelationKey& k : sw_keys.empty() ? all_keys() : parse_keys(sw_keys))
        if (collect_edges(sel->aligned, k).total()) keys.push_back(k);
      write_text(sw_out, format_sweep(sweep_ensemble_size(sel->aligned, ev->aligned, keys, sw_max), format));

    } else if (*synth) {
      std::vector<Sentence> sentences = load_conllu(sy_conllu);
      if (sy_modified) sentences = modified(sentences);
      SynthSpec spec;
      try {
        spec = load_synth_spec(sy_spec);
      } catch (const std::exception& e) {
        throw InputError(sy_spec + ": " + e.what());
      }
      write_attention_file(generate(sentences, spec), sy_out);

    } else if (*random) {
      write_conllu_file(random_treebank(rt), rt_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "attnparse: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
