// monoid.hh -- finite monoids, morphisms, aperiodicity, stabilising sets
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdt/dfa.hh"

namespace sdt {

struct FiniteMonoid {
  int size = 1;
  int unit = 0;
  std::vector<std::vector<int>> table;  // table[a][b] = a·b
  std::vector<std::string> names;       // optional display labels

  int mul(int a, int b) const { return table[a][b]; }
  int pow(int a, int k) const;
  // Asserts unit laws and associativity (fully for size ≤ 64, sampled above).
  void check() const;
  std::string name_of(int e) const;
};

using MonoidPtr = std::shared_ptr<const FiniteMonoid>;

struct Morphism {
  Alphabet alphabet;
  MonoidPtr target;
  std::map<Sym, int> letterImage;

  int of_sym(Sym a) const;
  int of_word(const std::string& w) const;
  int of_syms(const std::vector<Sym>& w) const;
};

// Sorted set of element indices.
using ElementSet = std::vector<int>;

ElementSet set_insert(ElementSet s, int e);
bool set_contains(const ElementSet& s, int e);
ElementSet set_product(const FiniteMonoid& m, const ElementSet& x,
                       const ElementSet& y);
// Smallest submonoid containing the generators (always includes the unit).
ElementSet submonoid(const FiniteMonoid& m, const ElementSet& generators);

// Monoid of state transformations generated by the letters; elements are
// discovered by BFS over words in shortlex order, so numbering is canonical.
std::pair<MonoidPtr, Morphism> transition_monoid_of_dfa(const Dfa& d);

struct AperiodicityResult {
  bool aperiodic = true;
  int idempotentPower = 1;  // smallest n ≥ 1 with sⁿ=sⁿ⁺¹ for all s, if aperiodic
  int witness = -1;         // an element generating a nontrivial cycle, if not
};
AperiodicityResult is_aperiodic(const FiniteMonoid& m);

// {φ(w) : w ∈ L}, by reachability in the product of L's DFA with the
// right-Cayley structure of the target monoid.
ElementSet image_of_language(const Morphism& phi, const Dfa& L);

// Smallest k ≤ bound with xy=x for all x∈X^k, y∈X.
std::optional<int> stabilising_index(const FiniteMonoid& m, const ElementSet& X,
                                     int bound);

struct Classification {
  enum Kind { Cyclic, IsoUn, Partition } kind;
  int generator = -1;        // Cyclic: m = {1, g, …, gⁿ}
  int n = 0;                 // IsoUn: m ≅ Ũₙ
  std::vector<int> mapping;  // IsoUn: element index -> 0 (unit) or i ∈ 1..n
  Alphabet A, B;             // Partition: Σ = A ⊎ B
};

// Requires m aperiodic, phi surjective, and no neutral letters.
Classification classify(const FiniteMonoid& m, const Morphism& phi);

std::string dump_table(const FiniteMonoid& m);
std::string dump_element_set(const FiniteMonoid& m, const ElementSet& s);

}  // namespace sdt
