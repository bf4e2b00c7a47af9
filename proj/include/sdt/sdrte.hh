// sdrte.hh -- regular transducer expressions over SD parsers: AST,
// parsing, validation, evaluation, domain automata, quotients, projection
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdt/dfa.hh"
#include "sdt/lang.hh"
#include "sdt/regex.hh"

namespace sdt {

enum class SdKind {
  Bot,      // nowhere defined
  Const,    // constant output on every input
  Ite,      // guard ? C₁ : C₂
  Had,      // pointwise concatenation f(w)·g(w)
  Cauchy,   // unique-split concatenation f(u)·g(v), w = uv
  Star,     // k-window iterated product over a prefix code
  RStar,    // same windows, output in reverse order
  Compose,  // outer ∘ inner          (extended)
  Dup,      // u ↦ u·m·u              (extended)
  Rev,      // u ↦ reverse(u)         (extended)
};

struct Sdrte;
using SdrtePtr = std::shared_ptr<const Sdrte>;

struct Sdrte {
  SdKind kind = SdKind::Bot;
  std::string value;         // Const: the output word
  RegexPtr lang;             // Ite guard, Star/RStar parser
  int k = 0;                 // Star/RStar window width
  Sym marker = 0;            // Dup
  SdrtePtr left, right;      // children; Compose: left=outer, right=inner
  Alphabet input, output;    // letters mentioned below this node

  struct Cache;                        // internal memo (see sdrte.cc)
  mutable std::shared_ptr<Cache> memo; // lazily created, mutex-guarded

  static SdrtePtr bot();
  static SdrtePtr constant(const std::string& v);
  static SdrtePtr ite(RegexPtr l, SdrtePtr c1, SdrtePtr c2);
  static SdrtePtr had(SdrtePtr c1, SdrtePtr c2);
  static SdrtePtr cauchy(SdrtePtr c1, SdrtePtr c2);
  static SdrtePtr star(int k, RegexPtr l, SdrtePtr c);
  static SdrtePtr rstar(int k, RegexPtr l, SdrtePtr c);
  static SdrtePtr compose(SdrtePtr outer, SdrtePtr inner);
  static SdrtePtr dup(Sym marker);
  static SdrtePtr rev();

  bool is_core() const;      // no Compose/Dup/Rev anywhere
  size_t size() const;       // node count
};

// Derived forms (desugared):
//   sum(f,g)        = dom f ? f : g
//   restrict(L,f)   = L ? f : ⊥
//   rcat(f,g)       = (dom f ▷ ε)·g ⊙ f·(dom g ▷ ε)    (reversed Cauchy)
//   star1(f)        = ⟨1, dom f⟩⋆ f
SdrtePtr sdrte_sum(SdrtePtr c1, SdrtePtr c2);
SdrtePtr sdrte_restrict(RegexPtr l, SdrtePtr c);
SdrtePtr sdrte_rcat(SdrtePtr c1, SdrtePtr c2);
SdrtePtr sdrte_star1(SdrtePtr c);

struct SdrteSyntaxError : std::runtime_error {
  size_t offset;
  SdrteSyntaxError(const std::string& msg, size_t off)
      : std::runtime_error(msg), offset(off) {}
};

// Function-call grammar: bot, out("v"), ite(L,C,C), had(C,C), cat(C,C),
// star(K,L,C), rstar(K,L,C), sum(C,C), restrict(L,C), rcat(C,C),
// compose(C,C), dup(CHAR), rev.  L uses the regex grammar.
SdrtePtr parse_sdrte(const std::string& text);
std::string print_sdrte(const SdrtePtr& c);

struct ValidationFailure {
  std::string path;       // /left/right-style path into the AST
  std::string condition;  // violated side condition
  std::string witness;    // re-checkable evidence, possibly empty
};
struct ValidationReport {
  bool ok = true;
  std::vector<ValidationFailure> failures;
};
// Checks each Star/RStar parser (aperiodic prefix code with synchronisation
// delay ≤ dMax; 0 picks a per-parser default) and each Ite guard (aperiodic).
ValidationReport validate(const SdrtePtr& c, int dMax = 0);

std::optional<std::string> eval_sdrte(const SdrtePtr& c, const std::string& w);
std::optional<std::string> eval_sdrte(const SdrtePtr& c, const std::string& w,
                                      const Alphabet& sigma);

// DFA of dom C over the given alphabet (default: C->input).  Extended nodes:
// Dup/Rev have full domain; Compose is supported when the inner part is a
// Rev (domain transported through reversal) and rejected otherwise.
Dfa domain_automaton(const SdrtePtr& c);
Dfa domain_automaton(const SdrtePtr& c, const Alphabet& sigma);

// Structural simplification: Bot absorption, ε-concat elision, trivial
// guards; preserves semantics over sigma (default: the letters of c).
SdrtePtr simplify_sdrte(const SdrtePtr& c);
SdrtePtr simplify_sdrte(const SdrtePtr& c, const Alphabet& sigma);

// ⟦left_quotient(a,C)⟧(w) = ⟦C⟧(aw);  ⟦right_quotient(a,C)⟧(w) = ⟦C⟧(wa),
// for w over sigma (default: the letters of C plus a).  Domain guards are
// spelled out over sigma, so larger ambient alphabets need it explicit.
SdrtePtr left_quotient(Sym a, const SdrtePtr& c);
SdrtePtr left_quotient(Sym a, const SdrtePtr& c, const Alphabet& sigma);
SdrtePtr right_quotient(Sym a, const SdrtePtr& c);
SdrtePtr right_quotient(Sym a, const SdrtePtr& c, const Alphabet& sigma);

// Restriction of every guard and parser to Σ′*; agrees with C on Σ′*.
SdrtePtr project(const SdrtePtr& c, const Alphabet& sigmaPrime);

// Replaces every k-window star with k > 1 by an equivalent composition of
// 1-stars using two fresh markers; the result has only 1-stars.
SdrtePtr rewrite_kstar(const SdrtePtr& c);

}  // namespace sdt
