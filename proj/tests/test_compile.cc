// test_compile.cc -- expression-to-pipeline compilation
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hh"
#include "oracles.hh"
#include "sdt/compile.hh"
#include "sdt/twoway_io.hh"

using namespace sdt;

namespace {

// compare the pipeline against the evaluator on every word up to maxLen,
// including undefinedness, and check that no marker leaks into an output
void check_equiv(const SdrtePtr& c, int maxLen) {
  Pipeline P = compile(c);
  Alphabet sigma = c->input;
  for (const std::string& w : oracle::all_words(sigma, maxLen)) {
    auto got = pipeline_eval(P, w);
    auto want = eval_sdrte(c, w, sigma);
    CHECK(got == want);
    if (got)
      for (unsigned char ch : *got)
        CHECK(alphabet_contains(c->output, (Sym)ch));
  }
}

// a stage producing a fixed word and ignoring its input
TwoWayTransducer const_stage(const std::string& v, const std::string& in) {
  TwoWayTransducer A;
  A.input = alphabet_from_string(in);
  A.output = alphabet_from_string(v);
  int st = A.add_state("st");
  int go = A.add_state("go", true);
  A.initial = st;
  A.add_rule(st, kLeftMark, go, +1, v);
  for (Sym a : A.input) A.add_rule(go, a, go, +1, "");
  A.check();
  return A;
}

}  // namespace

TEST_CASE("k-window stage") {
  Alphabet sa = alphabet_from_string("a");
  TwoWayTransducer w3 = make_kwindow(3, sa);
  CHECK(eval(w3, "#a#aa#aaa#aaaa#") == "#aaaaaa#aaaaaaaaa#");
  CHECK(eval(w3, "#a#aa#aaa#") == "#aaaaaa#");
  CHECK(!eval(w3, "#a#aa#").has_value());   // fewer than k blocks
  CHECK(!eval(w3, "a#aa#aaa#").has_value()); // missing leading #
  CHECK(!eval(w3, "#a#aa#aaa").has_value()); // missing trailing #
  CHECK(!eval(w3, "").has_value());

  TwoWayTransducer w1 = make_kwindow(1, alphabet_from_string("ab"));
  CHECK(eval(w1, "#ab#b#") == "#ab#b#");  // k = 1: identity
  CHECK(!eval(w1, "#").has_value());      // zero blocks is still below k
  CHECK(!eval(w1, "ab").has_value());

  CHECK_THROWS_AS(make_kwindow(0, sa), std::invalid_argument);

  // randomized well-formed inputs against the window equation
  std::mt19937 rng(20260823);
  Alphabet ab = alphabet_from_string("ab");
  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + (int)(rng() % 4);
    int n = k + (int)(rng() % 4);
    std::vector<std::string> blocks;
    for (int i = 0; i < n; ++i) {
      std::string u;
      for (int l = (int)(rng() % 4); l > 0; --l)
        u += (char)ab[rng() % ab.size()];
      blocks.push_back(u);
    }
    std::string in = "#";
    for (auto& u : blocks) in += u + "#";
    std::string expect = "#";
    for (int i = 0; i + k <= n; ++i) {
      for (int j = 0; j < k; ++j) expect += blocks[i + j];
      expect += "#";
    }
    TwoWayTransducer W = make_kwindow(k, ab);
    CHECK(eval(W, in) == expect);
  }
}

TEST_CASE("factor-marking stage") {
  Alphabet ab = alphabet_from_string("ab");
  TwoWayTransducer f = make_boundary_marker(parse_regex("a*b"), ab);
  CHECK(eval(f, "abaab") == "#ab#aab#");
  CHECK(eval(f, "") == "#");
  CHECK(eval(f, "bbb") == "#b#b#b#");
  CHECK(!eval(f, "aba").has_value());  // not a full factorization

  TwoWayTransducer g = make_boundary_marker(parse_regex("ba"), ab);
  CHECK(eval(g, "baba") == "#ba#ba#");
  CHECK(!eval(g, "ab").has_value());
}

TEST_CASE("per-segment stage") {
  // the rotator uses # itself, so segments are delimited with !
  TwoWayTransducer rot = fixtures::rotator();
  TwoWayTransducer seg = make_segmentwise(rot, (Sym)'!');
  seg.check();
  CHECK(eval(seg, "!") == "");  // no segments
  CHECK(eval(seg, "!$a#aa$!") == "bba");
  CHECK(eval(seg, "!$a#aa$!$#$!") == "bba");
  CHECK(eval(seg, "!$a#aa$!$aaa#a$!") == "bba" "baaa");
  CHECK(!eval(seg, "!$a#aa$!a#a$!").has_value());  // bad middle segment
  CHECK(!eval(seg, "!!").has_value());             // rotator rejects ε
  CHECK(!eval(seg, "$a#aa$").has_value());         // not #-delimited

  TwoWayTransducer kept = make_segmentwise(rot, (Sym)'!', true);
  CHECK(eval(kept, "!$a#aa$!$aaa#a$!") == "!bba!baaa!");

  // randomized segment lists against per-segment evaluation
  std::mt19937 rng(99);
  std::vector<std::string> pool{"$a#aa$", "$#$", "$aa#a$a#aa$", "$a#a",
                                "a#a$",   "",    "$aaa#$"};
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + (int)(rng() % 3);
    std::string in = "!";
    std::string expect;
    bool defined = true;
    for (int i = 0; i < n; ++i) {
      const std::string& s = pool[rng() % pool.size()];
      in += s + "!";
      auto r = eval(rot, s);
      if (!r) defined = false;
      else expect += *r;
    }
    auto got = eval(seg, in);
    if (defined) CHECK(got == expect);
    else CHECK(!got.has_value());
  }
}

TEST_CASE("relativize stages") {
  Alphabet ab = alphabet_from_string("ab");
  TwoWayTransducer cv = const_stage("v", "ab");
  TwoWayTransducer L = make_relativize_left(cv, (Sym)'#', ab);
  CHECK(eval(L, "ab#ba") == "vba");
  CHECK(eval(L, "#") == "v");
  CHECK(!eval(L, "ab").has_value());  // marker required
  TwoWayTransducer Lk = make_relativize_left(cv, (Sym)'#', ab, true);
  CHECK(eval(Lk, "ab#ba") == "v#ba");

  TwoWayTransducer R = make_relativize_right(cv, (Sym)'#', ab);
  CHECK(eval(R, "ab#ba") == "abv");
  CHECK(eval(R, "#") == "v");
  TwoWayTransducer Rk = make_relativize_right(cv, (Sym)'#', ab, true);
  CHECK(eval(Rk, "ab#ba") == "ab#v");

  // a genuinely two-way inner stage on either side of the marker
  TwoWayTransducer rot = fixtures::rotator();
  Alphabet rin = alphabet_from_string("a#$");
  TwoWayTransducer rl = make_relativize_left(rot, (Sym)'!', rin);
  CHECK(eval(rl, "$a#aa$!a$") == "bbaa$");
  CHECK(!eval(rl, "a#a!a$").has_value());  // left half outside dom
  TwoWayTransducer rr = make_relativize_right(rot, (Sym)'!', rin);
  CHECK(eval(rr, "a$!$a#aa$") == "a$bba");
  CHECK(!eval(rr, "a$!$a#a").has_value());
}

TEST_CASE("compiled pipelines match evaluation") {
  check_equiv(parse_sdrte("out(\"xy\")"), 4);
  check_equiv(parse_sdrte("bot"), 4);
  check_equiv(parse_sdrte("ite(a*b, out(\"x\"), out(\"y\"))"), 6);
  check_equiv(parse_sdrte("restrict(a(a|b)*, out(\"z\"))"), 6);
  check_equiv(parse_sdrte("had(star(1, a|b, out(\"x\")),"
                          "    cat(star(1, a, out(\"\")),"
                          "        star(1, b, out(\"b\"))))"),
              6);
  check_equiv(parse_sdrte("cat(star(1, a, out(\"x\")), star(1, b, out(\"y\")))"),
              6);
  check_equiv(parse_sdrte("cat(star(1, a|b, out(\"c\")), restrict(b, out(\"\")))"),
              6);
  check_equiv(parse_sdrte("star(2, a*b, star(1, a|b, out(\"z\")))"), 6);
  check_equiv(parse_sdrte("star(2, a|b, ite(a(a|b), out(\"x\"), out(\"y\")))"), 6);
  check_equiv(parse_sdrte("star(3, (a|b)*c, star(1, a|b|c,"
                          "  ite(a, out(\"a\"), ite(b, out(\"b\"), out(\"c\")))))"),
              5);
  check_equiv(parse_sdrte("rstar(1, a|b, ite(a, out(\"A\"), out(\"B\")))"), 6);
  check_equiv(parse_sdrte("rstar(2, a*b, star(1, a|b, out(\"z\")))"), 6);
  // nesting a star below a Hadamard below a concatenation
  check_equiv(parse_sdrte("cat(restrict(b, out(\"\")),"
                          "    had(star(1, a|b, out(\"x\")),"
                          "        rstar(1, a|b, ite(a, out(\"A\"), out(\"B\")))))"),
              6);
}

TEST_CASE("block swapper pipeline") {
  const char* dtxt =
      "had(cat(restrict(a*\\#, out(\"\")),"
      "        cat(star(1, a, out(\"b\")), restrict(\\$, out(\"\")))),"
      "    cat(cat(star(1, a, out(\"a\")), restrict(\\#, out(\"\"))),"
      "        restrict(a*\\$, out(\"\"))))";
  SdrtePtr d = parse_sdrte(dtxt);
  SdrtePtr dp = Sdrte::cauchy(
      sdrte_restrict(parse_regex("\\$"), Sdrte::constant("")), sdrte_star1(d));
  Pipeline P = compile(dp);
  CHECK(pipeline_eval(P, "$aa#aaa$aaaa#aaaaa$") == "bbbaabbbbbaaaa");
  CHECK(pipeline_eval(P, "$a#a$") == "ba");
  CHECK(pipeline_eval(P, "$") == "");
  CHECK(!pipeline_eval(P, "a#a$").has_value());
  CHECK(!pipeline_eval(P, "").has_value());
  CHECK(!pipeline_eval(P, "$a#a").has_value());

  // the pipeline, the expression, and the reference machine agree; the
  // machine additionally accepts a trailing a-block (with empty output),
  // which the expression's domain $(a*#a*$)* excludes
  TwoWayTransducer rot = fixtures::rotator();
  for (const std::string& w : oracle::all_words(dp->input, 7)) {
    auto got = pipeline_eval(P, w);
    CHECK(got == eval_sdrte(dp, w, dp->input));
    auto ref = fixtures::simulate(rot, w);
    if (got) {
      CHECK(got == ref);
    } else if (ref) {
      std::string head = w;
      while (!head.empty() && head.back() == 'a') head.pop_back();
      CHECK(head.size() < w.size());
      CHECK(ref == eval_sdrte(dp, head, dp->input));
    }
  }
}

TEST_CASE("every stage is aperiodic") {
  for (const char* txt :
       {"ite(a*b, out(\"x\"), out(\"y\"))",
        "cat(star(1, a, out(\"x\")), star(1, b, out(\"y\")))",
        "had(star(1, a|b, out(\"x\")), star(1, a|b, out(\"y\")))",
        "star(2, a*b, star(1, a|b, out(\"z\")))",
        "rstar(2, a*b, star(1, a|b, out(\"z\")))"}) {
    Pipeline P = compile(parse_sdrte(txt));
    StageReport rep = assert_stage_aperiodicity(P);
    CHECK(rep.ok);
    for (auto& f : rep.failures) {
      CAPTURE(f.stage);
      CAPTURE(f.tag);
      CAPTURE(f.witness);
      CHECK(false);
    }
  }
}

TEST_CASE("a parity stage is flagged") {
  // copies its input but accepts only even-length words: the letter behavior
  // generates a two-element cycle
  TwoWayTransducer A;
  A.input = A.output = alphabet_from_string("a");
  int e = A.add_state("even", true);
  int o = A.add_state("odd");
  A.initial = e;
  A.add_rule(e, kLeftMark, e, +1, "");
  A.add_rule(e, 'a', o, +1, "a");
  A.add_rule(o, 'a', e, +1, "a");
  A.check();
  CHECK(!is_aperiodic_2dft(A));
  Pipeline P;
  P.stages.push_back(A);
  StageReport rep = assert_stage_aperiodicity(P);
  CHECK(!rep.ok);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].stage == 0);
  CHECK(!rep.failures[0].witness.empty());
}

TEST_CASE("pipelines serialize with stage kinds") {
  SdrtePtr c = parse_sdrte("ite(a*b, out(\"x\"), out(\"y\"))");
  Pipeline P = compile(c);
  std::string js = pipeline_to_json(P);
  Pipeline Q = pipeline_from_json(js);
  REQUIRE(Q.stages.size() == P.stages.size());
  for (size_t i = 0; i < P.stages.size(); ++i)
    CHECK(Q.stages[i].tag == P.stages[i].tag);
  CHECK(pipeline_eval(Q, "aab") == "x");
  CHECK(pipeline_eval(Q, "ba") == "y");
}

TEST_CASE("compilation rejects extended expressions") {
  CHECK_THROWS_AS(compile(parse_sdrte("rev")), std::invalid_argument);
  CHECK_THROWS_AS(compile(parse_sdrte("compose(rev, rev)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(compile(parse_sdrte("dup(\"#\")")), std::invalid_argument);
  // the k-star elimination trades wide stars for compositions, which stay
  // outside the compilable core
  SdrtePtr c = rewrite_kstar(parse_sdrte("star(2, a|b, out(\"z\"))"));
  CHECK(!c->is_core());
  CHECK_THROWS_AS(compile(c), std::invalid_argument);
}
