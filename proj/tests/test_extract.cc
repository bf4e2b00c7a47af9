// test_extract.cc -- class-preimage expressions, step expressions, and
// machine-to-expression extraction
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fixtures.hh"
#include "oracles.hh"
#include "sdt/extract.hh"
#include "sdt/lang.hh"

using namespace sdt;

namespace {

std::string rep(char c, int n) { return std::string(n, c); }

// the test blocks aᵢ = aⁱb used throughout
std::string blk(int i) { return rep('a', i) + "b"; }

RegexPtr aplusb() { return parse_regex("aa*b"); }

RegexPtr aplusb4() {
  RegexPtr f = aplusb();
  return Regex::cat_all({f, f, f, f});
}

Morphism restrict_to(const Morphism& phi, const Alphabet& sigma) {
  Morphism r;
  r.alphabet = sigma;
  r.target = phi.target;
  for (Sym a : sigma) r.letterImage[a] = phi.of_sym(a);
  return r;
}

// The full contract of the class-preimage construction: every class denotes
// exactly φ⁻¹(s), the classes partition Σ*, every expression is unambiguous,
// and every star body is an SD prefix code whose image stabilises.
void check_uss_validity(const Morphism& phi) {
  auto classes = uss_expressions(phi);
  REQUIRE((int)classes.size() == phi.target->size);

  std::vector<Dfa> dfas;
  for (auto& [s, e] : classes) {
    Dfa got = regex_to_dfa(e, phi.alphabet);
    CHECK(dfa_distinguish(got, oracle::preimage_dfa(phi, s)) == std::nullopt);
    CHECK(check_unambiguous(e, phi.alphabet).ok);
    dfas.push_back(got);
  }

  Dfa uni = dfa_none(phi.alphabet);
  for (size_t i = 0; i < dfas.size(); ++i) {
    for (size_t j = i + 1; j < dfas.size(); ++j)
      CHECK(dfa_is_empty(dfa_intersect(dfas[i], dfas[j])));
    uni = dfa_union(uni, dfas[i]);
  }
  CHECK(dfa_equivalent(uni, dfa_all(phi.alphabet)));

  int bound = 2 * phi.target->size + 4;
  for (auto& [s, e] : classes)
    for (auto& f : oracle::star_bodies(e)) {
      Dfa fd = regex_to_dfa(f, phi.alphabet);
      auto sd = sync_delay(fd, default_dmax(fd));
      CHECK(sd.delay.has_value());
      ElementSet x = image_of_language(phi, fd);
      CHECK(stabilising_index(*phi.target, x, bound).has_value());
    }
}

}  // namespace

TEST_CASE("marked substitutions verify their shape") {
  Alphabet src = alphabet_from_string("ab");
  Alphabet b1 = alphabet_from_string("c");
  Alphabet b2 = alphabet_from_string("de");

  auto alpha = MarkedSubstitution::make(
      src, b1, b2,
      {{'a', parse_regex("c*d")}, {'b', parse_regex("c*e")}});
  // substitution commutes with the language semantics
  RegexPtr image = alpha.apply(parse_regex("(a|b)*"));
  CHECK(dfa_equivalent(regex_to_dfa(image, alphabet_from_string("cde")),
                       regex_to_dfa(parse_regex("(c*d|c*e)*"),
                                    alphabet_from_string("cde"))));

  // image escaping B₁*B₂
  CHECK_THROWS_AS(MarkedSubstitution::make(
                      src, b1, b2,
                      {{'a', parse_regex("dc")}, {'b', parse_regex("c*e")}}),
                  std::invalid_argument);
  // overlapping images
  CHECK_THROWS_AS(MarkedSubstitution::make(
                      src, b1, b2,
                      {{'a', parse_regex("c*d")}, {'b', parse_regex("cc*d|e")}}),
                  std::invalid_argument);
  // partition letters must be disjoint
  CHECK_THROWS_AS(MarkedSubstitution::make(src, alphabet_from_string("cd"),
                                           alphabet_from_string("de"),
                                           {{'a', parse_regex("c*d")},
                                            {'b', parse_regex("c*e")}}),
                  std::invalid_argument);
}

TEST_CASE("marked substitution bumps synchronisation delay by at most one") {
  Alphabet src = alphabet_from_string("ab");
  auto alpha = MarkedSubstitution::make(
      src, alphabet_from_string("c"), alphabet_from_string("de"),
      {{'a', parse_regex("c*d")}, {'b', parse_regex("c*e")}});
  Alphabet tgt = alphabet_from_string("cde");

  for (const char* code : {"ba", "a*b", "b|ab", "aa*b"}) {
    Dfa l = regex_to_dfa(parse_regex(code), src);
    auto before = sync_delay(l, default_dmax(l));
    REQUIRE(before.delay.has_value());
    Dfa al = regex_to_dfa(alpha.apply(parse_regex(code)), tgt);
    auto after = sync_delay(al, *before.delay + 1);
    REQUIRE(after.delay.has_value());
    CHECK(*after.delay <= *before.delay + 1);
  }
}

TEST_CASE("class preimages: two left zeros plus a neutral letter") {
  FiniteMonoid u2;
  u2.size = 3;
  u2.unit = 0;
  u2.table = {{0, 1, 2}, {1, 1, 1}, {2, 2, 2}};
  u2.check();
  auto m = std::make_shared<FiniteMonoid>(u2);
  Morphism phi{alphabet_from_string("abc"), m,
               {{'a', 1}, {'b', 2}, {'c', 0}}};

  auto classes = uss_expressions(phi);
  Alphabet ab = phi.alphabet;
  // the first non-neutral letter decides the class
  CHECK(dfa_equivalent(regex_to_dfa(classes[0], ab),
                       regex_to_dfa(parse_regex("c*"), ab)));
  CHECK(dfa_equivalent(regex_to_dfa(classes[1], ab),
                       regex_to_dfa(parse_regex("c*a(a|b|c)*"), ab)));
  CHECK(dfa_equivalent(regex_to_dfa(classes[2], ab),
                       regex_to_dfa(parse_regex("c*b(a|b|c)*"), ab)));
  check_uss_validity(phi);
}

TEST_CASE("class preimages: cyclic chain") {
  // M = {1, s, s² = s³} realized by φ(a) = s
  auto [m, phi] = transition_monoid_of_dfa(
      regex_to_dfa(parse_regex("aa*aa*"), alphabet_from_string("a")));
  REQUIRE(m->size == 3);
  auto classes = uss_expressions(phi);
  Alphabet ab = phi.alphabet;
  CHECK(dfa_equivalent(regex_to_dfa(classes[m->unit], ab), dfa_eps(ab)));
  CHECK(dfa_equivalent(regex_to_dfa(classes[phi.of_word("a")], ab),
                       dfa_word("a", ab)));
  CHECK(dfa_equivalent(regex_to_dfa(classes[phi.of_word("aa")], ab),
                       regex_to_dfa(parse_regex("aaa*"), ab)));
  check_uss_validity(phi);
}

TEST_CASE("class preimages: shuffler transition monoid over its input") {
  TrMonoid trm = transition_monoid(fixtures::shuffler());
  check_uss_validity(restrict_to(trm.phi, alphabet_from_string("ab")));
}

TEST_CASE("class preimages: random aperiodic morphisms") {
  for (const Morphism& phi : oracle::random_aperiodic_morphisms(74412, 20))
    check_uss_validity(phi);
}

TEST_CASE("class preimages reject non-aperiodic targets") {
  // the parity monoid Z₂ has a nontrivial group
  FiniteMonoid z2;
  z2.size = 2;
  z2.unit = 0;
  z2.table = {{0, 1}, {1, 0}};
  z2.check();
  auto m = std::make_shared<FiniteMonoid>(z2);
  Morphism phi{alphabet_from_string("a"), m, {{'a', 1}}};
  CHECK_THROWS_AS(uss_expressions(phi), std::invalid_argument);
}

TEST_CASE("step expressions reproduce the shuffler's worked runs") {
  TwoWayTransducer A = fixtures::shuffler();
  StepExprTable table(A);
  const TrMonoid& trm = table.transition();
  Alphabet ab = alphabet_from_string("ab");

  int y2 = trm.phi.of_word("ab");
  int z2 = trm.phi.of_word("abababab");  // (φ(ab))⁴
  int q1 = A.state_index("q1"), q2 = A.state_index("q2"),
      q3 = A.state_index("q3"), q6 = A.state_index("q6");

  std::string w4 = blk(1) + blk(2) + blk(3) + blk(4);
  std::string w8 = w4 + blk(5) + blk(6) + blk(7) + blk(8);

  // a left-right pass through one block produces nothing
  SdrtePtr lr1 = table.step_expr(aplusb(), y2, {StepDir::LR, q1, q2});
  CHECK(eval_sdrte(lr1, "aaab", ab) == "");
  // a left-left bounce copies the block
  SdrtePtr ll1 = table.step_expr(aplusb(), y2, {StepDir::LL, q2, q3});
  CHECK(eval_sdrte(ll1, "aaab", ab) == "aaab");
  // the right-right step through four blocks copies the third
  SdrtePtr rr4 = table.step_expr(aplusb4(), z2, {StepDir::RR, q3, q1});
  CHECK(eval_sdrte(rr4, w4, ab) == blk(3));
  // the left-right step through four blocks
  SdrtePtr lr4 = table.step_expr(aplusb4(), z2, {StepDir::LR, q6, q2});
  CHECK(eval_sdrte(lr4, w4, ab) == blk(1) + blk(4) + blk(2));

  // the starred version extends it window by window: each later window
  // appends the last block and the one three before it
  SdrtePtr lrs = table.step_expr(Regex::star(aplusb()), z2,
                                 {StepDir::LR, q6, q2});
  CHECK(eval_sdrte(lrs, w8, ab) ==
        blk(1) + blk(4) + blk(2) + blk(5) + blk(3) + blk(6) + blk(4) +
            blk(7) + blk(5) + blk(8) + blk(6));

  // the empty word under the unit element
  SdrtePtr unit = table.step_expr(Regex::eps(), trm.monoid->unit,
                                  {StepDir::LR, 0, 0});
  CHECK(eval_sdrte(unit, "", ab) == "");
  CHECK(!eval_sdrte(unit, "b", ab).has_value());

  // steps outside the element give the nowhere-defined expression
  SdrtePtr none = table.step_expr(aplusb(), y2, {StepDir::LR, q2, q2});
  CHECK(!eval_sdrte(none, "ab", ab).has_value());
}

TEST_CASE("zigzag expressions at a block seam") {
  TwoWayTransducer A = fixtures::shuffler();
  StepExprTable table(A);
  const TrMonoid& trm = table.transition();
  Alphabet ab = alphabet_from_string("ab");

  int y2 = trm.phi.of_word("ab");
  int y4 = trm.phi.of_word("abab");
  int z2 = trm.phi.of_word("abababab");
  int q0 = A.state_index("q0"), q1 = A.state_index("q1"),
      q2 = A.state_index("q2"), q6 = A.state_index("q6");

  // the step-set zigzag underlying the expressions
  ZigzagResult z = zigzag(trm.payload[y4], trm.payload[y4], q1, StepDir::LL);
  REQUIRE(z.exit.has_value());
  CHECK(*z.exit == std::make_pair(StepDir::RR, q0));

  // the seam between four blocks and a fifth: bounce off the fifth block,
  // then ride the right-right step back through the four
  for (int i = 1; i <= 4; ++i) {
    std::string w =
        blk(i) + blk(i + 1) + blk(i + 2) + blk(i + 3) + blk(i + 4);
    SdrtePtr zz =
        table.zigzag_expr(aplusb4(), z2, aplusb(), y2, q2, StepDir::LL);
    CHECK(eval_sdrte(zz, w, ab) == blk(i + 4) + blk(i + 2));
  }

  // entering in a state with an immediate crossing: the zigzag is empty and
  // the expression is ε on the whole product language
  SdrtePtr empty =
      table.zigzag_expr(aplusb4(), z2, aplusb(), y2, q6, StepDir::LL);
  std::string w5 = blk(1) + blk(2) + blk(3) + blk(4) + blk(5);
  CHECK(eval_sdrte(empty, w5, ab) == "");
}

TEST_CASE("step expression domains equal the sliced language") {
  TwoWayTransducer A = fixtures::shuffler();
  StepExprTable table(A);
  const TrMonoid& trm = table.transition();
  Alphabet ab = alphabet_from_string("ab");

  for (const RegexPtr& e :
       {aplusb(), parse_regex("b(a*b)*"), parse_regex("(aa*b)(aa*b)")}) {
    for (int s : table.image(e)) {
      Dfa want = regex_to_dfa(table.slice(e, s), ab);
      for (const Step& x : trm.payload[s].steps()) {
        Dfa got = domain_automaton(table.step_expr(e, s, x), ab);
        CHECK(dfa_distinguish(got, want) == std::nullopt);
      }
    }
  }
}

TEST_CASE("extraction rejects non-aperiodic machines") {
  // flip-flop over a: even number of a's, one state suffices for parity via
  // two states alternating; its transition monoid contains a 2-cycle
  TwoWayTransducer A;
  A.add_state("p");
  A.add_state("q");
  A.initial = 0;
  A.finals[0] = true;
  A.input = alphabet_from_string("a");
  A.output = alphabet_from_string("a");
  A.add_rule(0, kLeftMark, 0, +1, "");
  A.add_rule(0, 'a', 1, +1, "");
  A.add_rule(1, 'a', 0, +1, "");
  A.check();
  CHECK(!is_aperiodic_2dft(A));
  CHECK_THROWS_AS(extract(A), std::invalid_argument);
}

TEST_CASE("extraction round trip: single-state copier") {
  TwoWayTransducer A;
  A.add_state("q");
  A.initial = 0;
  A.finals[0] = true;
  A.input = alphabet_from_string("ab");
  A.output = alphabet_from_string("ab");
  A.add_rule(0, kLeftMark, 0, +1, "");
  A.add_rule(0, 'a', 0, +1, "a");
  A.add_rule(0, 'b', 0, +1, "b");
  A.check();

  SdrtePtr c = extract(A);
  CHECK(validate(c).ok);
  for (const std::string& w : oracle::all_words(A.input, 6))
    CHECK(eval_sdrte(c, w, A.input) == w);
}

TEST_CASE("extraction round trip: shuffler") {
  TwoWayTransducer A = fixtures::shuffler();
  std::string traceJson;
  SdrtePtr c = extract(A, &traceJson);
  CHECK(traceJson.find("\"rule\"") != std::string::npos);
  for (const std::string& w : oracle::all_words(A.input, 8))
    CHECK(eval_sdrte(c, w, A.input) == eval(A, w));
}

TEST_CASE("extraction round trip: rotator") {
  TwoWayTransducer A = fixtures::rotator();
  SdrtePtr c = extract(A);
  for (const std::string& w : oracle::all_words(A.input, 8))
    CHECK(eval_sdrte(c, w, A.input) == eval(A, w));
}
