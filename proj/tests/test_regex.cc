// test_regex.cc -- regex parsing/printing and DFA-vs-naive-matcher oracle
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hh"
#include "sdt/dfa.hh"
#include "sdt/regex.hh"

using namespace sdt;

TEST_CASE("parse basic shapes") {
  Alphabet ab = alphabet_from_string("ab");
  RegexPtr e = parse_regex("(ba)*", ab);
  CHECK(e->kind == RxKind::Star);
  CHECK(e->left->kind == RxKind::Concat);
  CHECK(e->left->left->sym == 'b');
  CHECK(e->left->right->sym == 'a');

  Alphabet ab2 = alphabet_from_string("a#$");
  RegexPtr e2 = parse_regex("a*\\#a*\\$", ab2);
  CHECK(e2->kind == RxKind::Concat);
  CHECK(print_regex(e2) == "a*\\#a*\\$");

  CHECK_THROWS_AS(parse_regex("a(", ab), RegexSyntaxError);
  CHECK_THROWS_AS(parse_regex("c", ab), RegexSyntaxError);
  CHECK(parse_regex("()", ab)->kind == RxKind::Eps);
  CHECK(parse_regex("0", ab)->kind == RxKind::Empty);
}

TEST_CASE("print/parse round trip") {
  Alphabet ab = alphabet_from_string("ab#$");
  for (const char* txt :
       {"(ba)*", "a|b", "ab|b*a", "(a|b)*\\#", "()", "0", "a(b|())*"}) {
    RegexPtr e = parse_regex(txt, ab);
    RegexPtr e2 = parse_regex(print_regex(e), ab);
    CHECK(print_regex(e) == print_regex(e2));
  }
}

TEST_CASE("regex_to_dfa agrees with naive matcher") {
  Alphabet ab = alphabet_from_string("ab");
  // hand-picked plus pseudo-random expressions of size ≤ 8
  std::vector<std::string> exprs = {"(a*ba*b)*", "(ba)*",   "a*b|b*a",
                                    "(a|b)*abb", "a**",     "(ab|a)(b|())",
                                    "0*",        "(()|a)b*"};
  std::mt19937 rng(20260823);
  for (int i = 0; i < 40; ++i)
    exprs.push_back(print_regex(oracle::random_regex(rng, ab, 8)));
  for (auto& txt : exprs) {
    RegexPtr e = parse_regex(txt, ab);
    Dfa d = regex_to_dfa(e, ab);
    for (auto& w : oracle::all_words(ab, 6)) {
      CAPTURE(txt);
      CAPTURE(w);
      CHECK(d.accepts(w) == oracle::regex_match(e, w));
    }
  }
}

TEST_CASE("empty and sink shapes") {
  Alphabet abc = alphabet_from_string("abc");
  Dfa none = regex_to_dfa(Regex::empty(), abc);
  CHECK(none.numStates == 1);
  CHECK(!none.finals[0]);
  Dfa cstar = regex_to_dfa(parse_regex("c*", abc), abc);
  CHECK(cstar.numStates == 2);
}

TEST_CASE("simplify preserves language") {
  Alphabet ab = alphabet_from_string("ab");
  std::mt19937 rng(7);
  for (int i = 0; i < 60; ++i) {
    RegexPtr e = oracle::random_regex(rng, ab, 8);
    RegexPtr s = simplify_regex(e);
    CHECK(dfa_equivalent(regex_to_dfa(e, ab), regex_to_dfa(s, ab)));
  }
}
