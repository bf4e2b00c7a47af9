// test_dfa.cc -- boolean/rational operations on DFAs
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hh"
#include "sdt/dfa.hh"

using namespace sdt;

static Dfa dfa(const std::string& rx, const std::string& ab) {
  return regex_to_dfa(parse_regex(rx, alphabet_from_string(ab)),
                      alphabet_from_string(ab));
}

TEST_CASE("complement is an involution") {
  std::mt19937 rng(99);
  Alphabet ab = alphabet_from_string("ab");
  for (int i = 0; i < 30; ++i) {
    Dfa x = regex_to_dfa(oracle::random_regex(rng, ab, 7), ab);
    CHECK(dfa_equivalent(dfa_complement(dfa_complement(x)), x));
  }
}

TEST_CASE("letter quotients") {
  Dfa l = dfa("a*\\#", "a#");
  Dfa q = dfa_left_quotient(l, 'a');
  CHECK(dfa_equivalent(q, l));
  for (auto& w : oracle::all_words(l.alphabet, 6))
    CHECK(q.accepts(w) == l.accepts("a" + w));
  Dfa rq = dfa_right_quotient(l, '#');
  for (auto& w : oracle::all_words(l.alphabet, 6))
    CHECK(rq.accepts(w) == l.accepts(w + "#"));
}

TEST_CASE("intersection of (ba)* and (ab)* is epsilon") {
  Dfa x = dfa("(ba)*", "ab"), y = dfa("(ab)*", "ab");
  Dfa inter = dfa_intersect(x, y);
  CHECK(dfa_equivalent(inter, dfa_eps(x.alphabet)));
}

TEST_CASE("set semantics against membership") {
  std::mt19937 rng(4242);
  Alphabet ab = alphabet_from_string("ab");
  for (int i = 0; i < 20; ++i) {
    Dfa x = regex_to_dfa(oracle::random_regex(rng, ab, 6), ab);
    Dfa y = regex_to_dfa(oracle::random_regex(rng, ab, 6), ab);
    Dfa u = dfa_union(x, y), n = dfa_intersect(x, y), d = dfa_difference(x, y);
    Dfa c = dfa_concat(x, y), s = dfa_star(x), r = dfa_reverse(x);
    for (auto& w : oracle::all_words(ab, 5)) {
      CHECK(u.accepts(w) == (x.accepts(w) || y.accepts(w)));
      CHECK(n.accepts(w) == (x.accepts(w) && y.accepts(w)));
      CHECK(d.accepts(w) == (x.accepts(w) && !y.accepts(w)));
      bool splitOk = false;
      for (size_t j = 0; j <= w.size() && !splitOk; ++j)
        splitOk = x.accepts(w.substr(0, j)) && y.accepts(w.substr(j));
      CHECK(c.accepts(w) == splitOk);
      std::string rw(w.rbegin(), w.rend());
      CHECK(r.accepts(w) == x.accepts(rw));
      bool starOk =
          w.empty() ||
          !oracle::factorizations(w, [&](const std::string& f) {
             return x.accepts(f);
           }).empty();
      CHECK(s.accepts(w) == starOk);
    }
  }
}

TEST_CASE("equivalence produces true distinguishing words") {
  Dfa x = dfa("(a|b)*a", "ab"), y = dfa("(a|b)*a(a|b)*", "ab");
  auto w = dfa_distinguish(x, y);
  REQUIRE(w.has_value());
  CHECK(x.accepts(*w) != y.accepts(*w));
  CHECK(dfa_equivalent(x, x));
  CHECK(!dfa_distinguish(dfa("(a*b)*", "ab"), dfa("(a|b)*b|()", "ab")));
}

TEST_CASE("dfa_to_regex round trips") {
  std::mt19937 rng(5150);
  Alphabet ab = alphabet_from_string("ab");
  for (int i = 0; i < 25; ++i) {
    Dfa x = regex_to_dfa(oracle::random_regex(rng, ab, 6), ab);
    Dfa back = regex_to_dfa(dfa_to_regex(x), ab);
    CHECK(dfa_equivalent(x, back));
  }
}

TEST_CASE("powers") {
  Dfa x = dfa("ab|a", "ab");
  Dfa x2 = dfa_power(x, 2);
  CHECK(x2.accepts("abab"));
  CHECK(x2.accepts("aab"));
  CHECK(!x2.accepts("a"));
  Dfa lt3 = dfa_power_below(x, 3);
  CHECK(lt3.accepts(""));
  CHECK(lt3.accepts("a"));
  CHECK(lt3.accepts("aba"));
  CHECK(!lt3.accepts("aaa"));
}
