// sdrtekit.cc -- command-line front end: validation, evaluation, domain
// inspection, language/monoid/machine checks, compilation, extraction, and a
// bounded brute-force equivalence harness.
//
// Exit codes: 0 ok, 1 validation failure or disagreement, 2 I/O/parse error.
#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "sdt/compile.hh"
#include "sdt/extract.hh"
#include "sdt/lang.hh"
#include "sdt/sdrte.hh"
#include "sdt/twoway_io.hh"

using namespace sdt;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

bool has_ext(const std::string& path, const char* ext) {
  std::string dot = std::string(".") + ext;
  return path.size() >= dot.size() &&
         path.compare(path.size() - dot.size(), dot.size(), dot) == 0;
}

// Anything the equivalence harness can run a word through.
struct Evaluable {
  enum { Sdt, Machine, Pipe } kind;
  SdrtePtr c;
  TwoWayTransducer a;
  Pipeline p;
  Alphabet input;

  std::optional<std::string> operator()(const std::string& w) const {
    switch (kind) {
      case Sdt:
        return eval_sdrte(c, w, input);
      case Machine:
        return eval(a, w);
      default:
        return pipeline_eval(p, w);
    }
  }
};

Evaluable load_evaluable(const std::string& path) {
  Evaluable e;
  if (has_ext(path, "sdrte")) {
    e.kind = Evaluable::Sdt;
    e.c = parse_sdrte(slurp(path));
    e.input = e.c->input;
  } else if (has_ext(path, "2dft")) {
    e.kind = Evaluable::Machine;
    e.a = load_twoway(path);
    e.input = e.a.input;
  } else if (has_ext(path, "pipe")) {
    e.kind = Evaluable::Pipe;
    e.p = load_pipeline(path);
    e.input = e.p.stages.empty() ? Alphabet{} : e.p.stages.front().input;
  } else {
    throw IoError(path + ": expected .sdrte, .2dft or .pipe");
  }
  return e;
}

// Words over ab in shortlex order; index 0 is the empty word.
std::vector<std::string> shortlex_words(const Alphabet& ab, int maxLen) {
  std::vector<std::string> out{""};
  size_t lo = 0;
  for (int len = 1; len <= maxLen; ++len) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (Sym a : ab) out.push_back(out[i] + (char)a);
    lo = hi;
  }
  return out;
}

int harness_threads() {
  if (const char* env = std::getenv("SDRTE_KIT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

std::string show(const std::optional<std::string>& r) {
  return r ? "\"" + *r + "\"" : "undefined";
}

struct EquivReport {
  long checkedCount = 0;
  int maxLen = 0;
  // (word, left result, right result)
  std::optional<std::tuple<std::string, std::optional<std::string>,
                           std::optional<std::string>>>
      firstDisagreement;
};

EquivReport run_equiv(const Evaluable& l, const Evaluable& r, int maxLen,
                      unsigned seed, long samples) {
  Alphabet ab = alphabet_union(l.input, r.input);
  std::vector<std::string> words = shortlex_words(ab, maxLen);
  if (samples > 0 && !ab.empty()) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> len(maxLen + 1, 2 * maxLen);
    std::uniform_int_distribution<size_t> pick(0, ab.size() - 1);
    for (long i = 0; i < samples; ++i) {
      std::string w;
      for (int j = len(rng); j > 0; --j) w += (char)ab[pick(rng)];
      words.push_back(w);
    }
  }

  int nThreads = harness_threads();
  // each worker records the smallest disagreeing index in its stride
  std::atomic<size_t> firstBad{words.size()};
  std::vector<std::thread> pool;
  for (int t = 0; t < nThreads; ++t)
    pool.emplace_back([&, t] {
      for (size_t i = t; i < words.size(); i += nThreads) {
        if (i >= firstBad.load(std::memory_order_relaxed)) continue;
        if (l(words[i]) != r(words[i])) {
          size_t cur = firstBad.load();
          while (i < cur && !firstBad.compare_exchange_weak(cur, i)) {
          }
        }
      }
    });
  for (auto& th : pool) th.join();

  EquivReport rep;
  rep.checkedCount = (long)words.size();
  rep.maxLen = maxLen;
  size_t bad = firstBad.load();
  if (bad < words.size())
    rep.firstDisagreement = {words[bad], l(words[bad]), r(words[bad])};
  return rep;
}

int cmd_validate(const std::string& path, int dMax) {
  SdrtePtr c = parse_sdrte(slurp(path));
  ValidationReport rep = validate(c, dMax);
  if (rep.ok) {
    std::cout << "ok: " << path << "\n";
    return 0;
  }
  for (auto& f : rep.failures) {
    std::cout << "fail at " << (f.path.empty() ? "/" : f.path) << ": "
              << f.condition;
    if (!f.witness.empty()) std::cout << " (witness: " << f.witness << ")";
    std::cout << "\n";
  }
  return 1;
}

int cmd_eval(const std::string& path, const std::string& word) {
  Evaluable e = load_evaluable(path);
  auto r = e(word);
  if (!r) {
    std::cout << "undefined\n";
    return 1;
  }
  std::cout << *r << "\n";
  return 0;
}

int cmd_domain(const std::string& path, int maxLen,
               const std::string& dotPath) {
  SdrtePtr c = parse_sdrte(slurp(path));
  Dfa d = domain_automaton(c);
  std::cout << "states: " << d.numStates << "\n";
  for (auto& w : dfa_words_upto(d, maxLen))
    std::cout << (w.empty() ? "(empty word)" : w) << "\n";
  if (!dotPath.empty()) {
    std::ostringstream ss;
    ss << "digraph domain {\n  rankdir=LR;\n  hidden [shape=none label=\"\"];\n";
    for (int q = 0; q < d.numStates; ++q)
      ss << "  " << q << " [shape=" << (d.finals[q] ? "doublecircle" : "circle")
         << "];\n";
    ss << "  hidden -> " << d.initial << ";\n";
    for (int q = 0; q < d.numStates; ++q)
      for (size_t i = 0; i < d.alphabet.size(); ++i)
        ss << "  " << q << " -> " << d.trans[q][i] << " [label=\""
           << (char)d.alphabet[i] << "\"];\n";
    ss << "}\n";
    spit(dotPath, ss.str());
  }
  return 0;
}

int cmd_check(const std::string& what, const std::string& path, int dMax) {
  if (what == "lang") {
    RegexPtr e = parse_regex(slurp(path));
    Dfa d = regex_to_dfa(e);
    LangReport rep = analyze_language(d, dMax);
    std::cout << "prefix code: " << (rep.isPrefixCode ? "yes" : "no");
    if (rep.prefixWitness)
      std::cout << " (witness: " << rep.prefixWitness->first << " and "
                << rep.prefixWitness->first + rep.prefixWitness->second << ")";
    std::cout << "\n";
    std::cout << "code: " << (rep.isCode ? "yes" : "no");
    if (rep.codeWitness) std::cout << " (witness: " << *rep.codeWitness << ")";
    std::cout << "\n";
    if (rep.syncDelay)
      std::cout << "synchronisation delay: " << *rep.syncDelay << "\n";
    else
      std::cout << "synchronisation delay: none found\n";
    std::cout << "aperiodic: " << (rep.isAperiodic ? "yes" : "no") << "\n";
    return rep.isAperiodic && rep.isPrefixCode && rep.syncDelay ? 0 : 1;
  }
  if (what == "monoid") {
    TrMonoid trm = transition_monoid(load_twoway(path));
    auto ap = is_aperiodic(*trm.monoid);
    std::cout << "elements: " << trm.monoid->size << "\n";
    if (ap.aperiodic)
      std::cout << "aperiodic: yes (idempotent power " << ap.idempotentPower
                << ")\n";
    else
      std::cout << "aperiodic: no (witness element " << ap.witness << ")\n";
    return ap.aperiodic ? 0 : 1;
  }
  if (what == "2dft") {
    TwoWayTransducer a = load_twoway(path);
    a.check();
    bool ap = is_aperiodic_2dft(a);
    std::cout << "states: " << a.num_states() << "\n";
    std::cout << "aperiodic: " << (ap ? "yes" : "no") << "\n";
    return ap ? 0 : 1;
  }
  throw IoError("check: expected lang, monoid or 2dft, got " + what);
}

int cmd_trmonoid(const std::string& path, const std::string& showWord) {
  TwoWayTransducer a = load_twoway(path);
  TrMonoid trm = transition_monoid(a);
  std::cout << "elements: " << trm.monoid->size << "\n";
  if (!showWord.empty()) {
    int s = trm.phi.of_word(showWord);
    std::cout << "phi(" << showWord << ") = element " << s << "\n"
              << dump_stepset(a, trm.payload[s]);
  }
  return 0;
}

int cmd_compile(const std::string& path, const std::string& outPath,
                bool simplify) {
  SdrtePtr c = parse_sdrte(slurp(path));
  if (simplify) c = simplify_sdrte(c);
  Pipeline p = compile(c);
  StageReport rep = assert_stage_aperiodicity(p);
  std::cout << "stages: " << p.stages.size() << "\n";
  for (auto& f : rep.failures)
    std::cout << "stage " << f.stage << " (" << f.tag
              << ") not aperiodic: " << f.witness << "\n";
  if (!outPath.empty()) save_pipeline(p, outPath);
  else std::cout << pipeline_to_json(p) << "\n";
  return rep.ok ? 0 : 1;
}

int cmd_extract(const std::string& path, const std::string& outPath,
                bool simplify, bool trace) {
  TwoWayTransducer a = load_twoway(path);
  std::string traceJson;
  SdrtePtr c = extract(a, trace ? &traceJson : nullptr);
  if (simplify) c = simplify_sdrte(c, a.input);
  if (trace) std::cerr << traceJson << "\n";
  if (!outPath.empty()) spit(outPath, print_sdrte(c));
  else std::cout << print_sdrte(c) << "\n";
  return 0;
}

int cmd_rewrite(const std::string& path, const std::string& outPath,
                bool simplify) {
  SdrtePtr c = parse_sdrte(slurp(path));
  c = rewrite_kstar(c);
  if (simplify) c = simplify_sdrte(c);
  if (!outPath.empty()) spit(outPath, print_sdrte(c));
  else std::cout << print_sdrte(c) << "\n";
  return 0;
}

int cmd_equiv(const std::string& left, const std::string& right, int maxLen,
              unsigned seed, long samples) {
  EquivReport rep =
      run_equiv(load_evaluable(left), load_evaluable(right), maxLen, seed,
                samples);
  if (!rep.firstDisagreement) {
    std::cout << "agree on " << rep.checkedCount << " words up to length "
              << rep.maxLen << "\n";
    return 0;
  }
  auto& [w, lr, rr] = *rep.firstDisagreement;
  std::cout << "disagree on \"" << w << "\": left " << show(lr) << ", right "
            << show(rr) << " (" << rep.checkedCount << " words checked)\n";
  return 1;
}

int cmd_export_dot(const std::string& path, const std::string& dotPath) {
  if (has_ext(path, "2dft")) {
    spit(dotPath, twoway_to_dot(load_twoway(path)));
    return 0;
  }
  if (has_ext(path, "pipe")) {
    Pipeline p = load_pipeline(path);
    for (size_t i = 0; i < p.stages.size(); ++i) {
      std::string name = dotPath;
      size_t dot = name.rfind('.');
      std::string suffix = "-" + std::to_string(i);
      if (dot == std::string::npos) name += suffix;
      else name.insert(dot, suffix);
      spit(name, twoway_to_dot(p.stages[i]));
    }
    std::cout << "wrote " << p.stages.size() << " stage files\n";
    return 0;
  }
  throw IoError(path + ": expected .2dft or .pipe");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolkit for transducer expressions and two-way machines"};
  app.require_subcommand(1);

  std::string file, left, right, word, outPath, dotPath, what, showWord;
  int maxLen = 8, dMax = 0;
  unsigned seed = 0;
  long samples = 0;
  bool simplify = false, trace = false;

  auto* validateCmd = app.add_subcommand("validate", "check an expression");
  validateCmd->add_option("file", file, "an .sdrte file")->required();
  validateCmd->add_option("--dmax", dMax, "delay bound (0 = heuristic)");

  auto* evalCmd = app.add_subcommand("eval", "run one word");
  evalCmd->add_option("file", file, ".sdrte, .2dft or .pipe")->required();
  evalCmd->add_option("--word", word, "input word")->required();

  auto* domainCmd = app.add_subcommand("domain", "domain of an expression");
  domainCmd->add_option("file", file, "an .sdrte file")->required();
  domainCmd->add_option("--max-len", maxLen, "list domain words up to length");
  domainCmd->add_option("--emit-dot", dotPath, "write the domain DFA as DOT");

  auto* checkCmd = app.add_subcommand("check", "analyze lang, monoid or 2dft");
  checkCmd->add_option("what", what, "lang | monoid | 2dft")->required();
  checkCmd->add_option("file", file, ".regex or .2dft")->required();
  checkCmd->add_option("--dmax", dMax, "delay bound (0 = heuristic)");

  auto* trmCmd = app.add_subcommand("trmonoid", "transition monoid");
  trmCmd->add_option("file", file, "a .2dft file")->required();
  trmCmd->add_option("--show", showWord, "print the step set of this word");

  auto* compileCmd = app.add_subcommand("compile", "expression to pipeline");
  compileCmd->add_option("file", file, "an .sdrte file")->required();
  compileCmd->add_option("-o,--out", outPath, "output .pipe file");
  compileCmd->add_flag("--simplify", simplify, "simplify before compiling");

  auto* extractCmd = app.add_subcommand("extract", "machine to expression");
  extractCmd->add_option("file", file, "a .2dft file")->required();
  extractCmd->add_option("-o,--out", outPath, "output .sdrte file");
  extractCmd->add_flag("--simplify", simplify, "simplify the result");
  extractCmd->add_flag("--trace", trace, "emit the recursion tree as JSON");

  auto* rewriteCmd = app.add_subcommand("rewrite", "reduce k-stars to 1-stars");
  rewriteCmd->add_option("file", file, "an .sdrte file")->required();
  rewriteCmd->add_option("-o,--out", outPath, "output .sdrte file");
  rewriteCmd->add_flag("--simplify", simplify, "simplify the result");

  auto* equivCmd = app.add_subcommand("equiv", "bounded equivalence check");
  equivCmd->add_option("--left", left, "first evaluable")->required();
  equivCmd->add_option("--right", right, "second evaluable")->required();
  equivCmd->add_option("--max-len", maxLen, "exhaustive up to this length");
  equivCmd->add_option("--seed", seed, "seed for the extra random samples");
  equivCmd->add_option("--samples", samples,
                       "extra random words of length up to 2*max-len");

  auto* dotCmd = app.add_subcommand("export-dot", "render as graphviz");
  dotCmd->add_option("file", file, ".2dft or .pipe")->required();
  dotCmd->add_option("--emit-dot", dotPath, "output DOT path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validateCmd->parsed()) return cmd_validate(file, dMax);
    if (evalCmd->parsed()) return cmd_eval(file, word);
    if (domainCmd->parsed()) return cmd_domain(file, maxLen, dotPath);
    if (checkCmd->parsed()) return cmd_check(what, file, dMax);
    if (trmCmd->parsed()) return cmd_trmonoid(file, showWord);
    if (compileCmd->parsed()) return cmd_compile(file, outPath, simplify);
    if (extractCmd->parsed()) return cmd_extract(file, outPath, simplify, trace);
    if (rewriteCmd->parsed()) return cmd_rewrite(file, outPath, simplify);
    if (equivCmd->parsed()) return cmd_equiv(left, right, maxLen, seed, samples);
    if (dotCmd->parsed()) return cmd_export_dot(file, dotPath);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TransducerIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RegexSyntaxError& e) {
    std::cerr << "parse error at " << e.offset << ": " << e.what() << "\n";
    return 2;
  } catch (const SdrteSyntaxError& e) {
    std::cerr << "parse error at " << e.offset << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
