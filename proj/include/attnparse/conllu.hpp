#ifndef ATTNPARSE_CONLLU_HPP
#define ATTNPARSE_CONLLU_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace attnparse {

// Malformed input. line() is 1-based.
class ConlluError : public std::runtime_error {
 public:
  ConlluError(std::size_t line, const std::string& message, const std::string& file = {})
      : std::runtime_error((file.empty() ? "line " : file + ":") + std::to_string(line) + ": " + message),
        line_(line),
        message_(message) {}
  std::size_t line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

// Well-formed lines that do not describe a single-rooted tree.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One syntactic word. head follows the file convention: 1-based, 0 = root.
struct Token {
  int index = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  int head = 0;
  std::string deprel;
  std::string deps = "_";
  std::string misc = "_";
};

struct Sentence {
  std::string sent_id;
  std::vector<std::string> comments;  // without the leading '#', sent_id excluded
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  // 0-based position of the token attached to the root.
  std::size_t root() const;
};

std::vector<Sentence> parse_conllu(std::string_view text);
std::vector<Sentence> read_conllu_file(const std::filesystem::path& path);

std::string write_conllu(std::span<const Sentence> sentences);
void write_conllu_file(std::span<const Sentence> sentences, const std::filesystem::path& path);

// Empty string when heads (1-based, 0 = root) form a single-rooted tree,
// otherwise a description of the first problem found.
std::string tree_problem(std::span<const int> heads);

// Throws ValidationError naming the sentence.
void validate_tree(const Sentence& sentence);

std::vector<int> heads_of(const Sentence& sentence);

}  // namespace attnparse

#endif  // ATTNPARSE_CONLLU_HPP
