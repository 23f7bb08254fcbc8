#include "attnparse/conllu.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace attnparse {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

struct Block {
  Sentence sentence;
  bool has_id = false;
  std::size_t first_line = 0;
};

void finish_block(Block& block, std::vector<Sentence>& out) {
  if (!block.sentence.tokens.empty()) {
    if (!block.has_id) block.sentence.sent_id = std::to_string(out.size() + 1);
    validate_tree(block.sentence);
    out.push_back(std::move(block.sentence));
  }
  block = Block{};
}

}  // namespace

std::size_t Sentence::root() const {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i].head == 0) return i;
  throw ValidationError("sentence " + sent_id + " has no root");
}

std::vector<Sentence> parse_conllu(std::string_view text) {
  std::vector<Sentence> out;
  Block block;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    bool last = nl == std::string_view::npos;
    std::string_view line = text.substr(pos, last ? std::string_view::npos : nl - pos);
    pos = last ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      finish_block(block, out);
      continue;
    }
    if (block.first_line == 0) block.first_line = line_no;
    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      std::string_view stripped = trim(body);
      if (stripped.starts_with("sent_id")) {
        std::string_view rest = trim(stripped.substr(7));
        if (!rest.empty() && rest.front() == '=') rest = trim(rest.substr(1));
        block.sentence.sent_id = std::string(rest);
        block.has_id = true;
      } else {
        block.sentence.comments.emplace_back(body);
      }
      continue;
    }

    auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ConlluError(line_no, "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;  // multiword range or empty node

    Token tok;
    if (!parse_int(cols[0], tok.index)) throw ConlluError(line_no, "bad ID '" + std::string(cols[0]) + "'");
    int expected = static_cast<int>(block.sentence.tokens.size()) + 1;
    if (tok.index != expected)
      throw ConlluError(line_no, "ID " + std::to_string(tok.index) + " out of sequence, expected " +
                                     std::to_string(expected));
    if (!parse_int(cols[6], tok.head) || tok.head < 0)
      throw ConlluError(line_no, "bad HEAD '" + std::string(cols[6]) + "'");
    if (cols[7].empty() || cols[7] == "_") throw ConlluError(line_no, "missing DEPREL");
    tok.form = cols[1];
    tok.lemma = cols[2];
    tok.upos = cols[3];
    tok.xpos = cols[4];
    tok.feats = cols[5];
    tok.deprel = cols[7];
    tok.deps = cols[8];
    tok.misc = cols[9];
    block.sentence.tokens.push_back(std::move(tok));
  }
  finish_block(block, out);
  return out;
}

std::vector<Sentence> read_conllu_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_conllu(buf.str());
  } catch (const ConlluError& e) {
    throw ConlluError(e.line(), e.message(), path.string());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string write_conllu(std::span<const Sentence> sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    out += "# sent_id = " + s.sent_id + "\n";
    for (const std::string& c : s.comments) out += "#" + c + "\n";
    for (const Token& t : s.tokens) {
      out += std::to_string(t.index) + '\t' + t.form + '\t' + t.lemma + '\t' + t.upos + '\t' + t.xpos +
             '\t' + t.feats + '\t' + std::to_string(t.head) + '\t' + t.deprel + '\t' + t.deps + '\t' +
             t.misc + '\n';
    }
    out += '\n';
  }
  return out;
}

void write_conllu_file(std::span<const Sentence> sentences, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << write_conllu(sentences);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string tree_problem(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    int h = heads[static_cast<std::size_t>(i)];
    if (h < 0 || h > n) return "token " + std::to_string(i + 1) + " has head " + std::to_string(h) + " out of range";
    if (h == i + 1) return "token " + std::to_string(i + 1) + " is its own head";
    if (h == 0) ++roots;
  }
  if (roots != 1) return std::to_string(roots) + " roots";
  // Walk up from each token; a walk longer than n means a cycle.
  for (int i = 0; i < n; ++i) {
    int cur = i + 1;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cycle through token " + std::to_string(i + 1);
      cur = heads[static_cast<std::size_t>(cur - 1)];
    }
  }
  return {};
}

std::vector<int> heads_of(const Sentence& sentence) {
  std::vector<int> heads;
  heads.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) heads.push_back(t.head);
  return heads;
}

void validate_tree(const Sentence& sentence) {
  for (const Token& t : sentence.tokens)
    if (t.deprel.empty()) throw ValidationError("sentence " + sentence.sent_id + ": empty deprel");
  std::vector<int> heads = heads_of(sentence);
  std::string problem = tree_problem(heads);
  if (!problem.empty()) throw ValidationError("sentence " + sentence.sent_id + ": " + problem);
}

}  // namespace attnparse
