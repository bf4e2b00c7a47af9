// dfa.hh -- complete deterministic finite automata and language operations
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdt/regex.hh"

namespace sdt {

// Always complete: trans[q][i] defined for every state q and alphabet index i.
// Canonical form (as produced by regex_to_dfa / minimize): minimal, states
// numbered by BFS from the initial state in alphabet order.
struct Dfa {
  Alphabet alphabet;
  int numStates = 1;
  std::vector<std::vector<int>> trans;  // [state][letter index]
  int initial = 0;
  std::vector<bool> finals;

  int letter_index(Sym a) const;  // -1 if absent
  int step(int q, Sym a) const;   // throws if a outside alphabet
  int run(const std::string& w) const { return run(initial, w); }
  int run(int q, const std::string& w) const;
  bool accepts(const std::string& w) const;
};

using DfaPtr = std::shared_ptr<const Dfa>;

// Minimal complete DFA for ⟦e⟧ over the given alphabet (default: the regex's
// own letters).
Dfa regex_to_dfa(const RegexPtr& e, const Alphabet& alphabet);
Dfa regex_to_dfa(const RegexPtr& e);

Dfa minimize(const Dfa& d);
// Same language over a larger alphabet (new letters go to a sink).
Dfa extend_alphabet(const Dfa& d, const Alphabet& alphabet);

// Binary operations extend both arguments to the union alphabet first.
Dfa dfa_union(const Dfa& x, const Dfa& y);
Dfa dfa_intersect(const Dfa& x, const Dfa& y);
Dfa dfa_difference(const Dfa& x, const Dfa& y);
Dfa dfa_complement(const Dfa& x);
Dfa dfa_concat(const Dfa& x, const Dfa& y);
Dfa dfa_star(const Dfa& x);
Dfa dfa_power(const Dfa& x, int k);          // L^k
Dfa dfa_power_below(const Dfa& x, int k);    // L^0 ∪ … ∪ L^{k-1}
Dfa dfa_reverse(const Dfa& x);
Dfa dfa_left_quotient(const Dfa& x, Sym a);   // a⁻¹L
Dfa dfa_right_quotient(const Dfa& x, Sym a);  // La⁻¹

bool dfa_is_empty(const Dfa& x);
std::optional<std::string> dfa_shortest_word(const Dfa& x);
// nullopt when equivalent, else a shortest distinguishing word.
std::optional<std::string> dfa_distinguish(const Dfa& x, const Dfa& y);
bool dfa_equivalent(const Dfa& x, const Dfa& y);

Dfa dfa_none(const Alphabet& alphabet);
Dfa dfa_all(const Alphabet& alphabet);   // Σ*
Dfa dfa_eps(const Alphabet& alphabet);   // {ε}
Dfa dfa_word(const std::string& w, const Alphabet& alphabet);
Dfa dfa_finite(const std::vector<std::string>& words, const Alphabet& alphabet);

// State elimination; result may be large but denotes the same language.
RegexPtr dfa_to_regex(const Dfa& d);

// All words of length ≤ maxLen accepted by d, in shortlex order.
std::vector<std::string> dfa_words_upto(const Dfa& d, int maxLen,
                                        size_t limit = SIZE_MAX);

}  // namespace sdt
