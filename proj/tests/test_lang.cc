// test_lang.cc -- prefix codes, codes, synchronisation delay, unambiguity
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "oracles.hh"
#include "sdt/lang.hh"

using namespace sdt;

static Dfa dfa(const std::string& rx, const std::string& ab) {
  return regex_to_dfa(parse_regex(rx, alphabet_from_string(ab)),
                      alphabet_from_string(ab));
}

TEST_CASE("aperiodicity of languages") {
  CHECK(is_aperiodic_lang(dfa("(ba)*", "ab")));
  CHECK(!is_aperiodic_lang(dfa("(aa)*", "ab")));
  CHECK(is_aperiodic_lang(dfa("a*b", "ab")));
  CHECK(is_aperiodic_lang(dfa("(a|b)*abb(a|b)*", "ab")));
  CHECK(is_aperiodic_lang(dfa("(ab|ba)*", "ab")));
  CHECK(!is_aperiodic_lang(dfa("((a|b)(a|b))*", "ab")));
}

TEST_CASE("prefix codes") {
  Alphabet ab = alphabet_from_string("ab");
  CHECK(is_prefix_code(dfa_finite({"a", "ba", "bba"}, ab)).ok);
  CHECK(is_prefix_code(dfa_finite({"aa", "ab", "ba", "bb"}, ab)).ok);
  CHECK(is_prefix_code(dfa("a*b", "ab")).ok);

  auto bad = is_prefix_code(dfa_finite({"a", "ab", "ba", "bba"}, ab));
  CHECK(!bad.ok);
  REQUIRE(bad.witness.has_value());
  auto [u, uv] = *bad.witness;
  Dfa w = dfa_finite({"a", "ab", "ba", "bba"}, ab);
  CHECK(w.accepts(u));
  CHECK(w.accepts(uv));
  CHECK(uv.size() > u.size());
  CHECK(uv.substr(0, u.size()) == u);
}

TEST_CASE("codes, with the classic non-code witness") {
  Alphabet ab = alphabet_from_string("ab");
  Dfa w = dfa_finite({"a", "ab", "ba", "bba"}, ab);
  auto res = is_code(w);
  CHECK(!res.ok);
  REQUIRE(res.witness.has_value());
  // every witness must genuinely have two factorizations over W
  auto facs = oracle::factorizations(
      *res.witness, [&](const std::string& f) { return w.accepts(f); });
  CHECK(facs.size() >= 2);
  // the canonical short example is abba = a·bba = ab·ba
  CHECK(oracle::factorizations("abba", [&](const std::string& f) {
          return w.accepts(f);
        }).size() == 2);

  CHECK(is_code(dfa_finite({"a", "ba", "bba"}, ab)).ok);
  CHECK(is_code(dfa("a*b", "ab")).ok);
  CHECK(!is_code(dfa("a|aa", "ab")).ok);
  CHECK(!is_code(dfa("()|a", "ab")).ok);  // ε breaks unique factorization
}

TEST_CASE("synchronisation delay") {
  auto sd = [&](const std::string& rx, int dMax) {
    return sync_delay(dfa(rx, "ab"), dMax);
  };
  auto d1 = sd("ba", 8);
  REQUIRE(d1.delay.has_value());
  CHECK(*d1.delay == 1);

  auto none = sd("aa", 8);
  CHECK(!none.delay.has_value());
  REQUIRE(none.witness.has_value());
  {
    auto [u, v, w] = *none.witness;
    Dfa l = dfa("aa", "ab");
    Dfa lstar = dfa_star(l), ld = dfa_power(l, 8);
    CHECK(lstar.accepts(u + v + w));
    CHECK(ld.accepts(v));
    CHECK(!lstar.accepts(u + v));
  }

  auto both = sync_delay(dfa_finite({"aa", "ba"}, alphabet_from_string("ab")), 8);
  CHECK(!both.delay.has_value());

  auto astarb = sd("a*b", 8);
  REQUIRE(astarb.delay.has_value());
  CHECK(*astarb.delay == 1);

  // (1-SD implies 2-SD etc.; delay reported is the least one)
  auto w12 = sync_delay(dfa_finite({"a", "ba", "bba"}, alphabet_from_string("ab")), 8);
  REQUIRE(w12.delay.has_value());

  CHECK_THROWS_AS(sync_delay(dfa("a|aa", "ab"), 4), std::invalid_argument);
}

TEST_CASE("unambiguity of expressions") {
  Alphabet ab = alphabet_from_string("ab");
  auto check = [&](const std::string& rx) {
    return check_unambiguous(parse_regex(rx, ab), ab);
  };
  CHECK(check("(ba)*").ok);
  CHECK(check("a*b|b*a").ok);  // disjoint branches
  CHECK(check("(a|b)*").ok);
  CHECK(check("a*(ba*)*").ok);

  // union overlap
  auto u = check("a*|a");
  CHECK(!u.ok);
  REQUIRE(u.witness.has_value());
  CHECK(regex_to_dfa(parse_regex("a*", ab), ab).accepts(*u.witness));
  CHECK(regex_to_dfa(parse_regex("a", ab), ab).accepts(*u.witness));

  // concat overlap: a*·a* gives many splits of "a"
  auto c = check("a*a*");
  CHECK(!c.ok);

  // star of a non-code
  auto s = check("(a|ab|ba|bba)*");
  CHECK(!s.ok);

  // star of ε-containing language that isn't {ε}
  CHECK(!check("(a|())*").ok);
  CHECK(check("()*").ok);
}

TEST_CASE("unambiguity against brute-force reading counts") {
  Alphabet ab = alphabet_from_string("ab");
  std::mt19937 rng(314159);
  // count readings of w in e by a naive weighted matcher
  std::function<std::map<size_t, long>(const RegexPtr&, const std::string&,
                                       const std::map<size_t, long>&)>
      countsFrom = [&](const RegexPtr& e, const std::string& w,
                       const std::map<size_t, long>& from)
      -> std::map<size_t, long> {
    std::map<size_t, long> out;
    switch (e->kind) {
      case RxKind::Empty:
        break;
      case RxKind::Eps:
        out = from;
        break;
      case RxKind::Letter:
        for (auto [i, c] : from)
          if (i < w.size() && (Sym)(unsigned char)w[i] == e->sym)
            out[i + 1] += c;
        break;
      case RxKind::Union: {
        for (auto [i, c] : countsFrom(e->left, w, from)) out[i] += c;
        for (auto [i, c] : countsFrom(e->right, w, from)) out[i] += c;
        break;
      }
      case RxKind::Concat:
        out = countsFrom(e->right, w, countsFrom(e->left, w, from));
        break;
      case RxKind::Star: {
        out = from;
        std::map<size_t, long> layer = from;
        for (size_t round = 0; round <= w.size() + 1; ++round) {
          layer = countsFrom(e->left, w, layer);
          // drop ε-loops: a nullable body makes the count infinite; cap it
          bool grew = false;
          for (auto [i, c] : layer) {
            long add = std::min(c, 1000000L);
            if (add > 0 && out[i] < 2000000L) out[i] += add, grew = true;
          }
          if (!grew) break;
        }
        break;
      }
    }
    return out;
  };
  // semantic counting: star iterations must consume at least one letter, so
  // a star whose body denotes {ε} stays unambiguous
  std::function<std::map<size_t, long>(const RegexPtr&, const std::string&,
                                       const std::map<size_t, long>&)>
      semCounts = [&](const RegexPtr& e, const std::string& w,
                      const std::map<size_t, long>& from)
      -> std::map<size_t, long> {
    if (e->kind == RxKind::Star) {
      std::vector<long> f(w.size() + 1, 0);
      for (auto [i, c] : from) f[i] += c;
      for (size_t i = 0; i <= w.size(); ++i) {
        if (f[i] == 0) continue;
        auto reach = semCounts(e->left, w, {{i, 1}});
        for (auto [j, c] : reach)
          if (j > i) f[j] = std::min(f[j] + f[i] * c, 2000000L);
      }
      std::map<size_t, long> out;
      for (size_t i = 0; i <= w.size(); ++i)
        if (f[i]) out[i] = f[i];
      return out;
    }
    if (e->kind == RxKind::Union) {
      auto out = semCounts(e->left, w, from);
      for (auto [i, c] : semCounts(e->right, w, from)) out[i] += c;
      return out;
    }
    if (e->kind == RxKind::Concat)
      return semCounts(e->right, w, semCounts(e->left, w, from));
    return countsFrom(e, w, from);
  };
  auto ambiguousBrute = [&](const RegexPtr& e, int maxLen) {
    for (auto& w : oracle::all_words(ab, maxLen)) {
      auto m = semCounts(e, w, {{0, 1}});
      auto it = m.find(w.size());
      if (it != m.end() && it->second > 1) return true;
    }
    return false;
  };
  int witnessChecked = 0, okChecked = 0;
  for (int i = 0; i < 120; ++i) {
    RegexPtr e = oracle::random_regex(rng, ab, 6);
    auto res = check_unambiguous(e, ab);
    if (!res.ok && res.witness.has_value()) {
      // the witness has ≥ 2 syntactic readings of the offending subexpression
      RegexPtr sub = parse_regex(res.offending, ab);
      auto m = countsFrom(sub, *res.witness, {{0, 1}});
      CAPTURE(print_regex(e));
      CAPTURE(res.offending);
      CAPTURE(*res.witness);
      CHECK(m[res.witness->size()] > 1);
      ++witnessChecked;
    } else if (res.ok) {
      CAPTURE(print_regex(e));
      CHECK(!ambiguousBrute(e, 5));
      ++okChecked;
    }
  }
  CHECK(witnessChecked > 10);
  CHECK(okChecked > 10);
}

TEST_CASE("ambiguous_concat_dfa matches split counting") {
  Alphabet ab = alphabet_from_string("ab");
  std::mt19937 rng(2718);
  for (int i = 0; i < 25; ++i) {
    Dfa x = regex_to_dfa(oracle::random_regex(rng, ab, 5), ab);
    Dfa y = regex_to_dfa(oracle::random_regex(rng, ab, 5), ab);
    Dfa amb = ambiguous_concat_dfa(x, y);
    for (auto& w : oracle::all_words(ab, 5)) {
      int splits = 0;
      for (size_t j = 0; j <= w.size(); ++j)
        if (x.accepts(w.substr(0, j)) && y.accepts(w.substr(j))) ++splits;
      CHECK(amb.accepts(w) == (splits >= 2));
    }
  }
}
