#include <doctest.h>

#include "attnparse/synthetic_attention.hpp"
#include "attnparse/ud_transform.hpp"
#include "test_util.hpp"

using namespace attnparse;
using attnparse::testing::Arcs;
using attnparse::testing::arcs;
using attnparse::testing::make_sentence;

namespace {

TransformConfig only(bool copula, bool expletive, bool coordination) {
  TransformConfig c;
  c.enable_copula = copula;
  c.enable_expletive = expletive;
  c.enable_coordination = coordination;
  return c;
}

std::vector<Sentence> transform_corpus(std::uint64_t seed, std::size_t count) {
  TreebankSpec spec;
  spec.count = count;
  spec.min_length = 1;
  spec.max_length = 14;
  spec.seed = seed;
  spec.labels = {"nsubj", "cop", "expl", "conj", "aux", "obj", "cc", "punct", "det", "csubj", "nsubj:pass", "cop"};
  spec.unique_label_per_head = false;
  return random_treebank(spec);
}

}  // namespace

TEST_CASE("copula becomes the root") {
  Sentence s = make_sentence("cop", {{"cat", 4, "nsubj"}, {"is", 4, "cop"}, {"an", 4, "det"}, {"animal", 0, "root"}});
  Sentence out = transform_copula(s, {});
  CHECK(arcs(out) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}});
  CHECK_NOTHROW(validate_tree(out));
}

TEST_CASE("copula rehangs auxiliaries and keeps other dependents") {
  Sentence s = make_sentence("aux", {{"he", 5, "nsubj"}, {"will", 5, "aux"}, {"be", 5, "cop"}, {"a", 5, "det"},
                                     {"doctor", 0, "root"}, {".", 5, "punct"}});
  Sentence out = transform_copula(s, {});
  CHECK(arcs(out) == Arcs{{3, "nsubj"}, {3, "aux"}, {0, "root"}, {5, "det"}, {3, "obj"}, {5, "punct"}});
}

TEST_CASE("two copula clauses joined by conj") {
  // cat is big and dog is small
  Sentence s = make_sentence("two", {{"cat", 3, "nsubj"},
                                     {"is", 3, "cop"},
                                     {"big", 0, "root"},
                                     {"and", 7, "cc"},
                                     {"dog", 7, "nsubj"},
                                     {"is", 7, "cop"},
                                     {"small", 3, "conj"}});
  Sentence out = transform_copula(s, {});
  CHECK(arcs(out) ==
        Arcs{{2, "nsubj"}, {0, "root"}, {2, "obj"}, {7, "cc"}, {6, "nsubj"}, {3, "conj"}, {6, "obj"}});
  CHECK_NOTHROW(validate_tree(out));
}

TEST_CASE("no cop edge is the identity") {
  Sentence s = make_sentence("id", {{"cat", 2, "nsubj"}, {"sleeps", 0, "root"}});
  CHECK(arcs(transform_copula(s, {})) == arcs(s));
  CHECK(arcs(transform_expletive(s, {})) == arcs(s));
  CHECK(arcs(transform_coordination(s, {})) == arcs(s));
}

TEST_CASE("expletive is treated as a subject") {
  Sentence s = make_sentence("expl", {{"there", 2, "expl"}, {"is", 0, "root"}, {"a", 4, "det"}, {"spoon", 2, "nsubj"}});
  Sentence out = transform_expletive(s, {});
  CHECK(arcs(out) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}});
}

TEST_CASE("expletive without a subject is only relabeled") {
  Sentence s = make_sentence("rain", {{"it", 2, "expl"}, {"rains", 0, "root"}});
  CHECK(arcs(transform_expletive(s, {})) == Arcs{{2, "nsubj"}, {0, "root"}});
}

TEST_CASE("subject of another head is untouched") {
  Sentence s = make_sentence("far", {{"there", 2, "expl"}, {"is", 0, "root"}, {"he", 4, "nsubj"}, {"says", 2, "dep"}});
  CHECK(arcs(transform_expletive(s, {})) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "nsubj"}, {2, "dep"}});
}

TEST_CASE("conjuncts attach to the previous one") {
  Sentence s = make_sentence("fruit", {{"apples", 0, "root"},
                                       {",", 3, "punct"},
                                       {"oranges", 1, "conj"},
                                       {"and", 5, "cc"},
                                       {"pears", 1, "conj"}});
  Sentence out = transform_coordination(s, {});
  CHECK(arcs(out) == Arcs{{0, "root"}, {3, "punct"}, {1, "conj"}, {5, "cc"}, {3, "conj"}});
}

TEST_CASE("single conjunct is the identity") {
  Sentence s = make_sentence("pair", {{"a", 0, "root"}, {"and", 3, "cc"}, {"b", 1, "conj"}});
  CHECK(arcs(transform_coordination(s, {})) == arcs(s));
}

TEST_CASE("four conjuncts form a left-to-right chain") {
  Sentence s = make_sentence("four", {{"a", 0, "root"},
                                      {",", 3, "punct"},
                                      {"b", 1, "conj"},
                                      {",", 5, "punct"},
                                      {"c", 1, "conj"},
                                      {"and", 7, "cc"},
                                      {"d", 1, "conj"}});
  Sentence out = transform_coordination(s, {});
  CHECK(arcs(out) == Arcs{{0, "root"}, {3, "punct"}, {1, "conj"}, {5, "punct"}, {3, "conj"}, {7, "cc"}, {5, "conj"}});
}

TEST_CASE("apply_all on the three example sentences") {
  Sentence cop = make_sentence("c", {{"cat", 4, "nsubj"}, {"is", 4, "cop"}, {"an", 4, "det"}, {"animal", 0, "root"}});
  Sentence expl = make_sentence("e", {{"there", 2, "expl"}, {"is", 0, "root"}, {"a", 4, "det"}, {"spoon", 2, "nsubj"}});
  Sentence coord = make_sentence(
      "k", {{"apples", 0, "root"}, {",", 3, "punct"}, {"oranges", 1, "conj"}, {"and", 5, "cc"}, {"pears", 1, "conj"}});
  CHECK(arcs(apply_all(cop, {})) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}});
  CHECK(arcs(apply_all(expl, {})) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}});
  CHECK(arcs(apply_all(coord, {})) == Arcs{{0, "root"}, {3, "punct"}, {1, "conj"}, {5, "cc"}, {3, "conj"}});
}

TEST_CASE("copula with expletive: rehang then relabel") {
  // there is a problem: cop on the nominal, expl attached to it
  Sentence s = make_sentence("ce", {{"there", 4, "expl"}, {"is", 4, "cop"}, {"a", 4, "det"}, {"problem", 0, "root"}});
  CHECK(arcs(apply_all(s, {})) == Arcs{{2, "nsubj"}, {0, "root"}, {4, "det"}, {2, "obj"}});
}

TEST_CASE("flags gate each transform") {
  Sentence s = make_sentence("all", {{"there", 2, "expl"},
                                     {"is", 0, "root"},
                                     {"a", 4, "det"},
                                     {"spoon", 2, "nsubj"},
                                     {"and", 6, "cc"},
                                     {"fork", 4, "conj"},
                                     {"and", 8, "cc"},
                                     {"knife", 4, "conj"}});
  CHECK(arcs(apply_all(s, only(false, false, false))) == arcs(s));
  Sentence no_expl = apply_all(s, only(true, false, true));
  CHECK(no_expl.tokens[0].deprel == "expl");
  CHECK(no_expl.tokens[7].head == 6);
  Sentence no_coord = apply_all(s, only(true, true, false));
  CHECK(no_coord.tokens[0].deprel == "nsubj");
  CHECK(no_coord.tokens[7].head == 4);
}

TEST_CASE("empty rehang set is rejected when the copula transform is on") {
  TransformConfig c;
  c.copula_rehang_labels.clear();
  Sentence s = make_sentence("x", {{"a", 0, "root"}});
  CHECK_THROWS_AS(apply_all(s, c), std::invalid_argument);
  c.enable_copula = false;
  CHECK_NOTHROW(apply_all(s, c));
}

TEST_CASE("random trees stay valid; apply_all is idempotent; forms and order are kept") {
  for (const Sentence& s : transform_corpus(5, 1000)) {
    Sentence once = apply_all(s, {});
    CAPTURE(s.sent_id);
    REQUIRE_NOTHROW(validate_tree(once));
    REQUIRE(once.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(once.tokens[i].form == s.tokens[i].form);
    REQUIRE(arcs(apply_all(once, {})) == arcs(once));
    REQUIRE_NOTHROW(validate_tree(transform_copula(s, {})));
    REQUIRE_NOTHROW(validate_tree(transform_coordination(s, {})));
    REQUIRE_NOTHROW(validate_tree(transform_expletive(s, {})));
  }
}
