#include <doctest.h>

#include "attnparse/conllu.hpp"
#include "attnparse/labels.hpp"
#include "attnparse/synthetic_attention.hpp"
#include "attnparse/ud_transform.hpp"

using namespace attnparse;

namespace {

const char* kCatSleeps =
    "# sent_id = s1\n"
    "# text = cat sleeps\n"
    "1\tcat\tcat\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tsleeps\tsleep\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST_CASE("minimal sentence parses") {
  auto sentences = parse_conllu(kCatSleeps);
  REQUIRE(sentences.size() == 1);
  const Sentence& s = sentences[0];
  CHECK(s.sent_id == "s1");
  REQUIRE(s.size() == 2);
  CHECK(s.tokens[0].form == "cat");
  CHECK(s.tokens[0].head == 2);
  CHECK(s.tokens[0].deprel == "nsubj");
  CHECK(s.tokens[1].form == "sleeps");
  CHECK(s.tokens[1].head == 0);
  CHECK(s.tokens[1].deprel == "root");
  CHECK(s.root() == 1);
  REQUIRE(s.comments.size() == 1);
  CHECK(s.comments[0] == " text = cat sleeps");
}

TEST_CASE("range and empty-node lines are dropped") {
  const char* text =
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
      "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
      "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "\n";
  auto sentences = parse_conllu(text);
  REQUIRE(sentences.size() == 1);
  REQUIRE(sentences[0].size() == 3);
  CHECK(sentences[0].tokens[0].form == "do");
  CHECK(sentences[0].tokens[1].form == "n't");
  CHECK(sentences[0].sent_id == "1");
}

TEST_CASE("missing trailing blank line and CRLF are tolerated") {
  auto sentences = parse_conllu("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\r\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens[0].deprel == "root");
}

TEST_CASE("wrong column count reports the line") {
  const char* text =
      "# sent_id = a\n"
      "1\tcat\tcat\tNOUN\t_\t_\t2\tnsubj\t_\n"
      "2\tsleeps\tsleep\tVERB\t_\t_\t0\troot\t_\t_\n";
  try {
    parse_conllu(text);
    FAIL("expected ConlluError");
  } catch (const ConlluError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("bad head and missing deprel are parse errors") {
  CHECK_THROWS_AS(parse_conllu("1\ta\t_\t_\t_\t_\tx\troot\t_\t_\n"), ConlluError);
  CHECK_THROWS_AS(parse_conllu("1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n"), ConlluError);
  CHECK_THROWS_AS(parse_conllu("2\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"), ConlluError);
}

TEST_CASE("multi-root and cyclic trees name the sentence") {
  const char* two_roots =
      "# sent_id = bad-roots\n"
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t0\troot\t_\t_\n";
  try {
    parse_conllu(two_roots);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("bad-roots") != std::string::npos);
  }
  const char* cycle =
      "# sent_id = bad-cycle\n"
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t3\tdep\t_\t_\n"
      "3\tc\t_\t_\t_\t_\t2\tdep\t_\t_\n";
  try {
    parse_conllu(cycle);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("bad-cycle") != std::string::npos);
  }
  const char* out_of_range = "1\ta\t_\t_\t_\t_\t5\tdep\t_\t_\n";
  CHECK_THROWS_AS(parse_conllu(out_of_range), ValidationError);
}

TEST_CASE("tree_problem") {
  CHECK(tree_problem(std::vector<int>{2, 0}).empty());
  CHECK_FALSE(tree_problem(std::vector<int>{0, 0}).empty());
  CHECK_FALSE(tree_problem(std::vector<int>{2, 1}).empty());
  CHECK_FALSE(tree_problem(std::vector<int>{1}).empty());
}

TEST_CASE("empty document round trip") {
  CHECK(write_conllu(std::vector<Sentence>{}).empty());
  CHECK(parse_conllu("").empty());
}

TEST_CASE("single sentence round trip keeps heads and labels") {
  auto once = parse_conllu(kCatSleeps);
  std::string text = write_conllu(once);
  CHECK(text == kCatSleeps);
  auto twice = parse_conllu(text);
  REQUIRE(twice.size() == 1);
  for (std::size_t i = 0; i < once[0].size(); ++i) {
    CHECK(twice[0].tokens[i].form == once[0].tokens[i].form);
    CHECK(twice[0].tokens[i].head == once[0].tokens[i].head);
    CHECK(twice[0].tokens[i].deprel == once[0].tokens[i].deprel);
  }
}

TEST_CASE("write then parse then write is a fixed point on random trees") {
  TreebankSpec spec;
  spec.count = 200;
  spec.max_length = 15;
  spec.seed = 11;
  auto sentences = random_treebank(spec);
  std::string first = write_conllu(sentences);
  auto parsed = parse_conllu(first);
  REQUIRE(parsed.size() == sentences.size());
  CHECK(write_conllu(parsed) == first);
  for (const Sentence& s : parsed) CHECK_NOTHROW(validate_tree(s));
}

TEST_CASE("modified copula sentence is written with the copula as root") {
  const char* text =
      "# sent_id = cop\n"
      "1\tcat\t_\tNOUN\t_\t_\t4\tnsubj\t_\t_\n"
      "2\tis\t_\tAUX\t_\t_\t4\tcop\t_\t_\n"
      "3\tan\t_\tDET\t_\t_\t4\tdet\t_\t_\n"
      "4\tanimal\t_\tNOUN\t_\t_\t0\troot\t_\t_\n";
  Sentence s = apply_all(parse_conllu(text)[0], {});
  auto back = parse_conllu(write_conllu(std::vector<Sentence>{s}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].tokens[1].head == 0);
  CHECK(back[0].tokens[1].deprel == "root");
}

TEST_CASE("canonical labels") {
  CHECK(canonical_label("nsubj:pass") == "nsubj");
  CHECK(canonical_label("iobj") == "obj");
  CHECK(canonical_label("ccomp") == "x/ccomp");
  CHECK(canonical_label("xcomp") == "x/ccomp");
  CHECK(canonical_label("vocative") == "dep");
  CHECK(canonical_label("obl:tmod") == "dep");
  CHECK(canonical_label("acl:relcl") == "acl");
  CHECK(canonical_label("x/ccomp") == "x/ccomp");
  for (const char* l : {"nsubj:pass", "iobj", "ccomp", "xcomp", "vocative", "root", "det:poss", "x/ccomp",
                        "punct", "flat:name", "cop", "expl"}) {
    std::string once = canonical_label(l);
    CHECK(canonical_label(once) == once);
  }
}

TEST_CASE("label groups") {
  CHECK(kCanonicalLabels.size() == 19);
  CHECK(is_non_clausal("nsubj"));
  CHECK(is_non_clausal("amod"));
  CHECK_FALSE(is_non_clausal("acl"));
  CHECK(is_clausal("x/ccomp"));
  CHECK_FALSE(is_clausal("punct"));
  CHECK(label_id("amod") == 0);
  CHECK(label_name(*label_id("dep")) == "dep");
  CHECK_FALSE(label_id("cop").has_value());
}
