// regex.hh -- regular expressions over small symbol alphabets
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdt {

// Symbols are ints so that synthesized alphabets (used by the monoid
// decomposition) can live outside the character range.  User-facing symbols
// are always plain chars.
using Sym = int;
using Alphabet = std::vector<Sym>;  // sorted, duplicate-free

constexpr Sym kLeftMark = '<';   // left endmarker
constexpr Sym kRightMark = '>';  // right endmarker

Alphabet alphabet_from_string(const std::string& chars);
std::string alphabet_to_string(const Alphabet& a);
bool alphabet_contains(const Alphabet& a, Sym s);
Alphabet alphabet_union(const Alphabet& a, const Alphabet& b);
Alphabet alphabet_minus(const Alphabet& a, const Alphabet& b);

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

enum class RxKind { Empty, Eps, Letter, Union, Concat, Star };

struct Regex {
  RxKind kind;
  Sym sym = 0;              // Letter
  RegexPtr left, right;     // Union/Concat both; Star uses left

  static RegexPtr empty();
  static RegexPtr eps();
  static RegexPtr letter(Sym a);
  static RegexPtr alt(RegexPtr l, RegexPtr r);
  static RegexPtr cat(RegexPtr l, RegexPtr r);
  static RegexPtr star(RegexPtr e);
  // union/concatenation over a whole list (Empty/Eps respectively when empty)
  static RegexPtr alt_all(const std::vector<RegexPtr>& es);
  static RegexPtr cat_all(const std::vector<RegexPtr>& es);
  // union of single letters
  static RegexPtr letters(const Alphabet& a);
  // word as a concatenation of letters
  static RegexPtr word(const std::string& w);
};

struct RegexSyntaxError : std::runtime_error {
  size_t offset;
  RegexSyntaxError(const std::string& msg, size_t off)
      : std::runtime_error(msg), offset(off) {}
};

// Text grammar: `0` empty, `()` epsilon, `|` union, juxtaposition concat,
// postfix `*`, parentheses group; escapes \# \$ \| \( \) \\ \0.
RegexPtr parse_regex(const std::string& text, const Alphabet& alphabet);
RegexPtr parse_regex(const std::string& text);  // alphabet inferred from letters
std::string print_regex(const RegexPtr& e);
// Truncated form ending in "..." once maxLen characters are reached.
// Expressions with shared subterms can print astronomically longer than
// their node count, so anything that merely labels them should use this.
std::string print_regex_capped(const RegexPtr& e, size_t maxLen);

// Collect the letters appearing in e (sorted).
Alphabet regex_letters(const RegexPtr& e);

// Cheap algebraic cleanup: drops Empty from unions, absorbs Empty in
// concatenations, elides Eps factors, deduplicates union branches.
RegexPtr simplify_regex(const RegexPtr& e);

bool regex_nullable(const RegexPtr& e);

// Substitute letters by regexes (letters not in the map stay themselves).
RegexPtr subst_regex(const RegexPtr& e,
                     const std::vector<std::pair<Sym, RegexPtr>>& images);

}  // namespace sdt
