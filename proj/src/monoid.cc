// monoid.cc -- finite monoid machinery
#include "sdt/monoid.hh"

#include <algorithm>
#include <cassert>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sdt {

int FiniteMonoid::pow(int a, int k) const {
  int acc = unit;
  for (int i = 0; i < k; ++i) acc = mul(acc, a);
  return acc;
}

void FiniteMonoid::check() const {
  if ((int)table.size() != size) throw std::logic_error("monoid table size");
  for (auto& row : table)
    if ((int)row.size() != size) throw std::logic_error("monoid table row");
  for (int a = 0; a < size; ++a)
    if (mul(unit, a) != a || mul(a, unit) != a)
      throw std::logic_error("monoid unit law violated");
  if (size <= 64) {
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b)
        for (int c = 0; c < size; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw std::logic_error("monoid associativity violated");
  } else {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> pick(0, size - 1);
    for (int i = 0; i < 10000; ++i) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      if (mul(mul(a, b), c) != mul(a, mul(b, c)))
        throw std::logic_error("monoid associativity violated (sampled)");
    }
  }
}

std::string FiniteMonoid::name_of(int e) const {
  if (e >= 0 && e < (int)names.size() && !names[e].empty()) return names[e];
  return "m" + std::to_string(e);
}

int Morphism::of_sym(Sym a) const {
  auto it = letterImage.find(a);
  if (it == letterImage.end())
    throw std::invalid_argument("letter outside morphism alphabet");
  return it->second;
}

int Morphism::of_word(const std::string& w) const {
  int acc = target->unit;
  for (unsigned char c : w) acc = target->mul(acc, of_sym((Sym)c));
  return acc;
}

int Morphism::of_syms(const std::vector<Sym>& w) const {
  int acc = target->unit;
  for (Sym c : w) acc = target->mul(acc, of_sym(c));
  return acc;
}

ElementSet set_insert(ElementSet s, int e) {
  auto it = std::lower_bound(s.begin(), s.end(), e);
  if (it == s.end() || *it != e) s.insert(it, e);
  return s;
}

bool set_contains(const ElementSet& s, int e) {
  return std::binary_search(s.begin(), s.end(), e);
}

ElementSet set_product(const FiniteMonoid& m, const ElementSet& x,
                       const ElementSet& y) {
  std::set<int> out;
  for (int a : x)
    for (int b : y) out.insert(m.mul(a, b));
  return ElementSet(out.begin(), out.end());
}

ElementSet submonoid(const FiniteMonoid& m, const ElementSet& generators) {
  std::set<int> seen{m.unit};
  std::vector<int> work{m.unit};
  while (!work.empty()) {
    int e = work.back();
    work.pop_back();
    for (int g : generators) {
      int p = m.mul(e, g);
      if (seen.insert(p).second) work.push_back(p);
    }
  }
  return ElementSet(seen.begin(), seen.end());
}

std::pair<MonoidPtr, Morphism> transition_monoid_of_dfa(const Dfa& d) {
  using Transf = std::vector<int>;
  std::vector<Transf> elems;
  std::map<Transf, int> ids;
  auto intern = [&](Transf t) {
    auto [it, inserted] = ids.emplace(std::move(t), (int)elems.size());
    if (inserted) elems.push_back(it->first);
    return it->second;
  };
  Transf id(d.numStates);
  for (int q = 0; q < d.numStates; ++q) id[q] = q;
  int unit = intern(id);
  std::vector<Transf> gens;
  std::vector<int> genIds;
  for (size_t li = 0; li < d.alphabet.size(); ++li) {
    Transf t(d.numStates);
    for (int q = 0; q < d.numStates; ++q) t[q] = d.trans[q][li];
    genIds.push_back(intern(t));
    gens.push_back(t);
  }
  // BFS in shortlex order: elements discovered by increasing word length
  for (size_t i = 0; i < elems.size(); ++i) {
    Transf cur = elems[i];
    for (auto& g : gens) {
      Transf nxt(d.numStates);
      for (int q = 0; q < d.numStates; ++q) nxt[q] = g[cur[q]];
      intern(std::move(nxt));
    }
  }
  auto m = std::make_shared<FiniteMonoid>();
  m->size = (int)elems.size();
  m->unit = unit;
  m->table.assign(m->size, std::vector<int>(m->size));
  for (int a = 0; a < m->size; ++a)
    for (int b = 0; b < m->size; ++b) {
      Transf comp(d.numStates);
      for (int q = 0; q < d.numStates; ++q) comp[q] = elems[b][elems[a][q]];
      auto it = ids.find(comp);
      assert(it != ids.end());
      m->table[a][b] = it->second;
    }
  m->check();
  Morphism phi;
  phi.alphabet = d.alphabet;
  phi.target = m;
  for (size_t li = 0; li < d.alphabet.size(); ++li)
    phi.letterImage[d.alphabet[li]] = genIds[li];
  return {m, phi};
}

AperiodicityResult is_aperiodic(const FiniteMonoid& m) {
  AperiodicityResult r;
  int maxN = 1;
  for (int s = 0; s < m.size; ++s) {
    std::vector<int> powers{m.unit};
    std::map<int, int> firstAt{{m.unit, 0}};
    int cur = m.unit;
    for (int k = 1;; ++k) {
      cur = m.mul(cur, s);
      auto it = firstAt.find(cur);
      if (it != firstAt.end()) {
        // s^k == s^{it->second}; aperiodic for this s iff cycle length 1
        if (k - it->second == 1) {
          maxN = std::max(maxN, it->second == 0 ? 1 : it->second);
        } else {
          return {false, 0, s};
        }
        break;
      }
      firstAt.emplace(cur, k);
      powers.push_back(cur);
    }
  }
  r.aperiodic = true;
  r.idempotentPower = maxN;
  return r;
}

ElementSet image_of_language(const Morphism& phi, const Dfa& L) {
  Dfa d = extend_alphabet(L, phi.alphabet);
  // restrict to letters in phi's alphabet: words using other letters have no
  // image, so they are ignored (they cannot be in L over phi's alphabet)
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> work;
  std::set<int> out;
  auto push = [&](int q, int e) {
    if (seen.insert({q, e}).second) work.push_back({q, e});
  };
  push(d.initial, phi.target->unit);
  while (!work.empty()) {
    auto [q, e] = work.back();
    work.pop_back();
    if (d.finals[q]) out.insert(e);
    for (Sym a : phi.alphabet)
      push(d.step(q, a), phi.target->mul(e, phi.of_sym(a)));
  }
  return ElementSet(out.begin(), out.end());
}

std::optional<int> stabilising_index(const FiniteMonoid& m, const ElementSet& X,
                                     int bound) {
  ElementSet xk = X;
  for (int k = 1; k <= bound; ++k) {
    bool ok = true;
    for (int x : xk) {
      for (int y : X)
        if (m.mul(x, y) != x) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (ok) return k;
    xk = set_product(m, xk, X);
  }
  return std::nullopt;
}

Classification classify(const FiniteMonoid& m, const Morphism& phi) {
  for (auto& [a, e] : phi.letterImage)
    if (e == m.unit)
      throw std::invalid_argument("classify: neutral letter present");
  // Case 1: cyclic
  for (int g = 0; g < m.size; ++g) {
    ElementSet gen = submonoid(m, {g});
    if ((int)gen.size() == m.size) {
      Classification c;
      c.kind = Classification::Cyclic;
      c.generator = g;
      return c;
    }
  }
  // Case 2: isomorphic to Ũₙ — all non-unit elements are left zeros
  {
    bool ok = m.size >= 2;
    for (int e = 0; ok && e < m.size; ++e) {
      if (e == m.unit) continue;
      for (int x = 0; x < m.size; ++x)
        if (m.mul(e, x) != e) {
          ok = false;
          break;
        }
    }
    if (ok) {
      Classification c;
      c.kind = Classification::IsoUn;
      c.n = m.size - 1;
      c.mapping.assign(m.size, 0);
      int i = 1;
      for (int e = 0; e < m.size; ++e)
        if (e != m.unit) c.mapping[e] = i++;
      return c;
    }
  }
  // Case 3: partition Σ = A ⊎ B with φ(A*) and φ((A*B)*) proper submonoids;
  // subsets of Σ enumerated by increasing size, then lexicographically
  const Alphabet& sigma = phi.alphabet;
  int n = (int)sigma.size();
  for (int sz = 0; sz <= n; ++sz) {
    // enumerate combinations of `sz` positions in lexicographic order
    std::vector<int> comb(sz);
    for (int i = 0; i < sz; ++i) comb[i] = i;
    for (;;) {
      Alphabet A, B;
      std::vector<bool> inA(n, false);
      for (int i : comb) inA[i] = true;
      for (int i = 0; i < n; ++i) (inA[i] ? A : B).push_back(sigma[i]);
      ElementSet aGens;
      for (Sym a : A) aGens = set_insert(aGens, phi.of_sym(a));
      ElementSet MA = submonoid(m, aGens);
      if ((int)MA.size() < m.size) {
        ElementSet cGens;
        for (int e : MA)
          for (Sym b : B) cGens = set_insert(cGens, m.mul(e, phi.of_sym(b)));
        ElementSet MB = submonoid(m, cGens);
        if ((int)MB.size() < m.size) {
          Classification c;
          c.kind = Classification::Partition;
          c.A = A;
          c.B = B;
          return c;
        }
      }
      // next combination
      if (sz == 0) break;
      int i = sz - 1;
      while (i >= 0 && comb[i] == n - sz + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < sz; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  throw std::logic_error(
      "classify: no case applies (violated precondition or bug)");
}

std::string dump_table(const FiniteMonoid& m) {
  size_t w = 1;
  for (int e = 0; e < m.size; ++e) w = std::max(w, m.name_of(e).size());
  std::ostringstream os;
  auto cell = [&](const std::string& s) {
    os << s;
    for (size_t i = s.size(); i < w + 1; ++i) os << ' ';
  };
  cell("*");
  for (int e = 0; e < m.size; ++e) cell(m.name_of(e));
  os << '\n';
  for (int a = 0; a < m.size; ++a) {
    cell(m.name_of(a));
    for (int b = 0; b < m.size; ++b) cell(m.name_of(m.mul(a, b)));
    os << '\n';
  }
  return os.str();
}

std::string dump_element_set(const FiniteMonoid& m, const ElementSet& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += m.name_of(s[i]);
  }
  return out + "}";
}

}  // namespace sdt
