// lang.hh -- language predicates: aperiodicity, prefix codes,
// synchronisation delay, codes, unambiguity of expressions
#pragma once

#include <optional>
#include <string>
#include <tuple>

#include "sdt/dfa.hh"
#include "sdt/monoid.hh"

namespace sdt {

bool is_aperiodic_lang(const Dfa& d);

struct PrefixCodeResult {
  bool ok = true;
  // on failure: u and uv both in L with v ≠ ε
  std::optional<std::pair<std::string, std::string>> witness;
};
PrefixCodeResult is_prefix_code(const Dfa& d);

struct CodeResult {
  bool ok = true;
  std::optional<std::string> witness;  // a word with two factorizations
};
CodeResult is_code(const Dfa& d);

struct SyncDelayResult {
  std::optional<int> delay;  // smallest d ≤ dMax such that L is d-SD
  // when absent: (u, v, w) with uvw ∈ L*, v ∈ L^dMax, uv ∉ L*
  std::optional<std::tuple<std::string, std::string, std::string>> witness;
};
// Throws std::invalid_argument when L is not a prefix code.
SyncDelayResult sync_delay(const Dfa& d, int dMax);
int default_dmax(const Dfa& d);

struct UnambiguityResult {
  bool ok = true;
  std::string offending;               // printed subexpression
  std::optional<std::string> witness;  // a word with two readings
};
UnambiguityResult check_unambiguous(const RegexPtr& e);
UnambiguityResult check_unambiguous(const RegexPtr& e, const Alphabet& alphabet);

struct LangReport {
  bool isPrefixCode = false;
  std::optional<int> syncDelay;
  bool isCode = false;
  bool isAperiodic = false;
  std::optional<std::pair<std::string, std::string>> prefixWitness;
  std::optional<std::string> codeWitness;
  std::optional<std::tuple<std::string, std::string, std::string>> syncWitness;
};
LangReport analyze_language(const Dfa& d, int dMax = 0);  // 0 = default_dmax

// DFA of the words with at least two factorizations u·v, u ∈ L(d1), v ∈ L(d2)
// (the exclusion language of an ambiguous Cauchy split).
Dfa ambiguous_concat_dfa(const Dfa& d1, const Dfa& d2);

}  // namespace sdt
