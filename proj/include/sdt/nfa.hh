// nfa.hh -- nondeterministic automaton used by construction code
#pragma once

#include "sdt/dfa.hh"

namespace sdt {

struct Nfa {
  Alphabet alphabet;
  int n = 0;
  std::vector<std::vector<std::vector<int>>> trans;  // [state][letter idx]
  std::vector<std::vector<int>> eps;
  std::vector<int> initials;
  std::vector<bool> finals;

  int add_state() {
    trans.emplace_back(alphabet.size());
    eps.emplace_back();
    finals.push_back(false);
    return n++;
  }
  void add_edge(int from, Sym a, int to);
};

Dfa determinize(const Nfa& a);
Nfa nfa_of_dfa(const Dfa& d);

}  // namespace sdt
