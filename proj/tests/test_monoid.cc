// test_monoid.cc -- transition monoids, aperiodicity, classification
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hh"
#include "sdt/lang.hh"
#include "sdt/monoid.hh"

using namespace sdt;

static Dfa dfa(const std::string& rx, const std::string& ab) {
  return regex_to_dfa(parse_regex(rx, alphabet_from_string(ab)),
                      alphabet_from_string(ab));
}

TEST_CASE("transition monoid basics") {
  // L = (ba)*: syntactic monoid is finite, aperiodic
  auto [m, phi] = transition_monoid_of_dfa(dfa("(ba)*", "ab"));
  m->check();
  CHECK(phi.of_word("") == m->unit);
  CHECK(phi.of_word("ba") == m->mul(phi.of_sym('b'), phi.of_sym('a')));
  // morphism property on all short words
  for (auto& u : oracle::all_words(phi.alphabet, 3))
    for (auto& v : oracle::all_words(phi.alphabet, 3))
      CHECK(phi.of_word(u + v) == m->mul(phi.of_word(u), phi.of_word(v)));
  CHECK(is_aperiodic(*m).aperiodic);

  auto [m2, phi2] = transition_monoid_of_dfa(dfa("(aa)*", "ab"));
  auto ap2 = is_aperiodic(*m2);
  CHECK(!ap2.aperiodic);
  CHECK(ap2.witness >= 0);
  // the witness really cycles: s^k ≠ s^{k+1} for all k up to |M|
  {
    int s = ap2.witness;
    bool stabilises = false;
    for (int k = 1; k <= m2->size + 1; ++k)
      if (m2->pow(s, k) == m2->pow(s, k + 1)) stabilises = true;
    CHECK(!stabilises);
  }
}

TEST_CASE("image of a language under a morphism") {
  Dfa whole = dfa("(a|b)*", "ab");
  auto [m, phi] = transition_monoid_of_dfa(dfa("a*b", "ab"));
  ElementSet img = image_of_language(phi, dfa("a*", "ab"));
  CHECK(set_contains(img, m->unit));
  CHECK(set_contains(img, phi.of_sym('a')));
  ElementSet everything = image_of_language(phi, whole);
  CHECK((int)everything.size() == m->size);  // phi is surjective here
  // oracle: collect φ(w) for all short words
  ElementSet seen;
  for (auto& w : oracle::all_words(phi.alphabet, 6))
    seen = set_insert(seen, phi.of_word(w));
  CHECK(seen == everything);
}

TEST_CASE("stabilising index") {
  // X = φ(aa) in the (aa)* monoid never stabilises
  {
    auto [m, phi] = transition_monoid_of_dfa(dfa("(aa)*", "a"));
    ElementSet x{phi.of_word("a")};
    CHECK(!stabilising_index(*m, x, 10).has_value());
  }
  // X = φ(a*b) in an aperiodic monoid stabilises
  {
    auto [m, phi] = transition_monoid_of_dfa(dfa("b(a*b)*", "ab"));
    ElementSet x = image_of_language(phi, dfa("a*b", "ab"));
    auto k = stabilising_index(*m, x, 64);
    REQUIRE(k.has_value());
    // check the defining property at k and its failure at k-1
    ElementSet xk{m->unit};
    for (int i = 0; i < *k; ++i) xk = set_product(*m, xk, x);
    for (int e : xk)
      for (int y : x) CHECK(m->mul(e, y) == e);
  }
}

TEST_CASE("submonoid and products") {
  auto [m, phi] = transition_monoid_of_dfa(dfa("(a|b)*abb", "ab"));
  ElementSet gens{phi.of_sym('a')};
  ElementSet sub = submonoid(*m, gens);
  CHECK(set_contains(sub, m->unit));
  for (int x : sub)
    for (int y : sub) CHECK(set_contains(sub, m->mul(x, y)));
}

TEST_CASE("classification: cyclic") {
  // M = {1, s, s², s³=s²} realized by φ(a)=s over Σ={a}
  auto [m, phi] = transition_monoid_of_dfa(dfa("aa*aa*", "a"));
  auto cls = classify(*m, phi);
  CHECK(cls.kind == Classification::Cyclic);
  int g = cls.generator;
  CHECK(g == phi.of_sym('a'));
  // every element is a power of g
  for (int e = 0; e < m->size; ++e) {
    bool found = e == m->unit;
    int p = m->unit;
    for (int k = 1; k <= m->size && !found; ++k) {
      p = m->mul(p, g);
      found = p == e;
    }
    CHECK(found);
  }
}

TEST_CASE("classification: iso to U~n") {
  // Ũ₂: φ(a), φ(b) both left zeros (xy = x for x ≠ 1)
  FiniteMonoid u2;
  u2.size = 3;
  u2.unit = 0;
  u2.table = {{0, 1, 2}, {1, 1, 1}, {2, 2, 2}};
  u2.names = {"1", "sa", "sb"};
  u2.check();
  auto m = std::make_shared<FiniteMonoid>(u2);
  Morphism phi{alphabet_from_string("ab"), m, {{'a', 1}, {'b', 2}}};
  auto cls = classify(*m, phi);
  CHECK(cls.kind == Classification::IsoUn);
  CHECK(cls.n == 2);
  CHECK(cls.mapping[0] == 0);
  CHECK(cls.mapping[1] != cls.mapping[2]);
}

TEST_CASE("classification: partition") {
  // the (ba)*-style monoid over {a,b} is neither cyclic nor Ũₙ
  auto [m, phi] = transition_monoid_of_dfa(dfa("b(a*b)*", "ab"));
  auto cls = classify(*m, phi);
  CHECK(cls.kind == Classification::Partition);
  CHECK(!cls.A.empty());
  CHECK(!cls.B.empty());
  Alphabet all = alphabet_union(cls.A, cls.B);
  CHECK(all == phi.alphabet);
  for (Sym x : cls.A) CHECK(!alphabet_contains(cls.B, x));
}

TEST_CASE("classification rejects neutral letters") {
  // φ(a) = 1 is neutral
  FiniteMonoid u1;
  u1.size = 2;
  u1.unit = 0;
  u1.table = {{0, 1}, {1, 1}};
  u1.check();
  auto m = std::make_shared<FiniteMonoid>(u1);
  Morphism phi{alphabet_from_string("ab"), m, {{'a', 0}, {'b', 1}}};
  CHECK_THROWS_AS(classify(*m, phi), std::invalid_argument);
}
