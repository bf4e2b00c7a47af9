// lang.cc -- language predicates
#include "sdt/lang.hh"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "sdt/nfa.hh"

namespace sdt {

bool is_aperiodic_lang(const Dfa& d) {
  Dfa m = minimize(d);
  auto [mon, phi] = transition_monoid_of_dfa(m);
  (void)phi;
  return is_aperiodic(*mon).aperiodic;
}

PrefixCodeResult is_prefix_code(const Dfa& d) {
  // L is a prefix code iff L ∩ L·Σ⁺ = ∅
  Dfa sigmaPlus = dfa_difference(dfa_all(d.alphabet), dfa_eps(d.alphabet));
  Dfa bad = dfa_intersect(d, dfa_concat(d, sigmaPlus));
  auto uv = dfa_shortest_word(bad);
  if (!uv) return {true, std::nullopt};
  // find a proper prefix of uv in L
  for (size_t i = 0; i < uv->size(); ++i) {
    std::string u = uv->substr(0, i);
    if (d.accepts(u)) return {false, std::make_pair(u, *uv)};
  }
  // should be unreachable: uv itself is in L·Σ⁺ so a proper prefix is in L
  return {false, std::make_pair(std::string(), *uv)};
}

CodeResult is_code(const Dfa& d) {
  if (d.accepts("")) return {false, std::string()};
  // Search for a word with two distinct factorizations over L: run two
  // parses in lockstep; each parse may close a factor (state in F) and
  // restart at the initial state before reading the next letter.  The flag
  // records whether the two parses ever disagreed on a factor boundary.
  struct Conf {
    int p, q;
    bool diverged;
    bool operator<(const Conf& o) const {
      return std::tie(p, q, diverged) < std::tie(o.p, o.q, o.diverged);
    }
  };
  std::map<Conf, std::pair<Conf, int>> prev;  // parent + letter index
  std::deque<Conf> work;
  Conf start{d.initial, d.initial, false};
  prev[start] = {start, -1};
  work.push_back(start);
  while (!work.empty()) {
    Conf c = work.front();
    work.pop_front();
    if (c.diverged && d.finals[c.p] && d.finals[c.q]) {
      std::string w;
      Conf at = c;
      while (prev[at].second >= 0) {
        w += (char)d.alphabet[prev[at].second];
        at = prev[at].first;
      }
      std::reverse(w.begin(), w.end());
      return {false, w};
    }
    for (size_t li = 0; li < d.alphabet.size(); ++li) {
      for (int reset1 = 0; reset1 < 2; ++reset1) {
        if (reset1 && !d.finals[c.p]) continue;
        int p0 = reset1 ? d.initial : c.p;
        for (int reset2 = 0; reset2 < 2; ++reset2) {
          if (reset2 && !d.finals[c.q]) continue;
          int q0 = reset2 ? d.initial : c.q;
          Conf nxt{d.trans[p0][li], d.trans[q0][li],
                   c.diverged || (reset1 != reset2)};
          if (!prev.count(nxt)) {
            prev[nxt] = {c, (int)li};
            work.push_back(nxt);
          }
        }
      }
    }
  }
  return {true, std::nullopt};
}

int default_dmax(const Dfa& d) {
  Dfa l = minimize(d);
  Dfa lstar = dfa_star(l);
  return l.numStates + lstar.numStates;
}

namespace {

// shortest word from state q to a final state of d; empty optional if none
std::optional<std::string> word_to_final(const Dfa& d, int q) {
  Dfa copy = d;
  copy.initial = q;
  return dfa_shortest_word(copy);
}

// shortest word from the initial state to q
std::optional<std::string> word_to_state(const Dfa& d, int q) {
  std::vector<int> prevState(d.numStates, -1), prevLetter(d.numStates, -1);
  std::vector<bool> seen(d.numStates, false);
  std::deque<int> bfs{d.initial};
  seen[d.initial] = true;
  while (!bfs.empty()) {
    int s = bfs.front();
    bfs.pop_front();
    if (s == q) {
      std::string w;
      while (prevState[s] >= 0) {
        w += (char)d.alphabet[prevLetter[s]];
        s = prevState[s];
      }
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (size_t li = 0; li < d.alphabet.size(); ++li) {
      int t = d.trans[s][li];
      if (!seen[t]) {
        seen[t] = true;
        prevState[t] = s;
        prevLetter[t] = (int)li;
        bfs.push_back(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

SyncDelayResult sync_delay(const Dfa& d, int dMax) {
  auto pc = is_prefix_code(d);
  if (!pc.ok) throw std::invalid_argument("sync_delay: not a prefix code");
  Dfa L = minimize(d);
  Dfa A = dfa_star(L);  // minimal DFA of L*
  // co-accessible states of A
  std::vector<bool> coacc(A.numStates, false);
  for (int q = 0; q < A.numStates; ++q) coacc[q] = word_to_final(A, q).has_value();

  SyncDelayResult res;
  for (int dd = 1; dd <= dMax; ++dd) {
    Dfa B = dfa_power(L, dd);
    B = extend_alphabet(B, A.alphabet);
    Dfa A2 = extend_alphabet(A, B.alphabet);
    // product reachability from every (p, B.initial), p reachable in A2
    std::map<std::pair<int, int>, std::tuple<int, int, int>> prev;  // -> (pa, pb, letter)
    std::deque<std::pair<int, int>> work;
    std::map<std::pair<int, int>, int> srcOf;
    for (int p = 0; p < A2.numStates; ++p) {
      auto key = std::make_pair(p, B.initial);
      if (!prev.count(key)) {
        prev[key] = {-1, -1, -1};
        srcOf[key] = p;
        work.push_back(key);
      }
    }
    bool violated = false;
    while (!work.empty() && !violated) {
      auto [qa, qb] = work.front();
      work.pop_front();
      if (B.finals[qb] && !A2.finals[qa] && coacc[qa]) {
        violated = true;
        if (dd == dMax) {
          // reconstruct v, then u and w
          std::string v;
          auto at = std::make_pair(qa, qb);
          while (std::get<2>(prev[at]) >= 0) {
            v += (char)A2.alphabet[std::get<2>(prev[at])];
            at = {std::get<0>(prev[at]), std::get<1>(prev[at])};
          }
          std::reverse(v.begin(), v.end());
          int p = srcOf[at];
          auto u = word_to_state(A2, p);
          auto w = word_to_final(A2, qa);
          res.witness = std::make_tuple(u.value_or(""), v, w.value_or(""));
        }
        break;
      }
      for (size_t li = 0; li < A2.alphabet.size(); ++li) {
        auto nxt = std::make_pair(A2.trans[qa][li], B.trans[qb][li]);
        if (!prev.count(nxt)) {
          prev[nxt] = {qa, qb, (int)li};
          srcOf[nxt] = srcOf[{qa, qb}];
          work.push_back(nxt);
        }
      }
    }
    if (!violated) {
      res.delay = dd;
      return res;
    }
  }
  return res;
}

// -------------------------------------------------------------- ambiguity

Dfa ambiguous_concat_dfa(const Dfa& d1in, const Dfa& d2in) {
  Alphabet ab = alphabet_union(d1in.alphabet, d2in.alphabet);
  Dfa d1 = extend_alphabet(d1in, ab), d2 = extend_alphabet(d2in, ab);
  // Three-phase automaton tracking a word u v w with u, uv ∈ L1 and
  // vw, w ∈ L2, v ≠ ε.  Phase 1 runs d1; phase 2 runs d1 and the d2 copy
  // started at the first boundary; phase 3 runs both d2 copies.
  Nfa a;
  a.alphabet = ab;
  int n1 = d1.numStates, n2 = d2.numStates;
  // state layout: phase1: p | phase2entered: (p,q) | phase2: (p,q) |
  // phase3: (q,q')
  auto p1 = [&](int p) { return p; };
  auto p2e = [&](int p, int q) { return n1 + p * n2 + q; };
  auto p2 = [&](int p, int q) { return n1 + n1 * n2 + p * n2 + q; };
  auto p3 = [&](int q, int qq) { return n1 + 2 * n1 * n2 + q * n2 + qq; };
  int total = n1 + 2 * n1 * n2 + n2 * n2;
  for (int i = 0; i < total; ++i) a.add_state();
  for (int p = 0; p < n1; ++p) {
    for (size_t li = 0; li < ab.size(); ++li)
      a.trans[p1(p)][li].push_back(p1(d1.trans[p][li]));
    if (d1.finals[p]) a.eps[p1(p)].push_back(p2e(p, d2.initial));
    for (int q = 0; q < n2; ++q) {
      for (size_t li = 0; li < ab.size(); ++li) {
        int t = p2(d1.trans[p][li], d2.trans[q][li]);
        a.trans[p2e(p, q)][li].push_back(t);
        a.trans[p2(p, q)][li].push_back(t);
      }
      if (d1.finals[p]) a.eps[p2(p, q)].push_back(p3(q, d2.initial));
    }
  }
  for (int q = 0; q < n2; ++q)
    for (int qq = 0; qq < n2; ++qq) {
      for (size_t li = 0; li < ab.size(); ++li)
        a.trans[p3(q, qq)][li].push_back(
            p3(d2.trans[q][li], d2.trans[qq][li]));
      if (d2.finals[q] && d2.finals[qq]) a.finals[p3(q, qq)] = true;
    }
  a.initials.push_back(p1(d1.initial));
  return minimize(determinize(a));
}

namespace {

// Unambiguity is a property of the expression alone, so verified nodes are
// remembered across calls; the stored RegexPtr pins the node so its address
// stays valid as a key.
struct VerifiedNodes {
  std::mutex mu;
  std::map<const Regex*, RegexPtr> ok;

  bool contains(const RegexPtr& e) {
    std::lock_guard<std::mutex> lock(mu);
    return ok.count(e.get()) != 0;
  }
  void insert(const RegexPtr& e) {
    std::lock_guard<std::mutex> lock(mu);
    ok.emplace(e.get(), e);
  }
};

VerifiedNodes& verified_nodes() {
  static VerifiedNodes v;
  return v;
}

struct UnambChecker {
  Alphabet alphabet;
  // expressions are shared DAGs: each node is checked and converted once
  std::set<const Regex*> okNodes;
  std::map<const Regex*, Dfa> dfas;

  const Dfa& dfa(const RegexPtr& e) {
    auto it = dfas.find(e.get());
    if (it != dfas.end()) return it->second;
    return dfas.emplace(e.get(), regex_to_dfa(e, alphabet)).first->second;
  }

  std::optional<UnambiguityResult> fail(const RegexPtr& sub,
                                        std::optional<std::string> witness) {
    UnambiguityResult r;
    r.ok = false;
    r.offending = print_regex(sub);
    r.witness = std::move(witness);
    return r;
  }

  std::optional<UnambiguityResult> visit(const RegexPtr& e) {
    if (okNodes.count(e.get())) return std::nullopt;
    if (verified_nodes().contains(e)) return std::nullopt;
    switch (e->kind) {
      case RxKind::Empty:
      case RxKind::Eps:
      case RxKind::Letter:
        break;
      case RxKind::Union: {
        if (auto r = visit(e->left)) return r;
        if (auto r = visit(e->right)) return r;
        Dfa both = dfa_intersect(dfa(e->left), dfa(e->right));
        if (auto w = dfa_shortest_word(both)) return fail(e, *w);
        break;
      }
      case RxKind::Concat: {
        if (auto r = visit(e->left)) return r;
        if (auto r = visit(e->right)) return r;
        // a word with two u·v splits witnesses ambiguity
        Dfa bad = ambiguous_concat_dfa(dfa(e->left), dfa(e->right));
        if (auto w = dfa_shortest_word(bad)) return fail(e, *w);
        break;
      }
      case RxKind::Star: {
        if (auto r = visit(e->left)) return r;
        const Dfa& f = dfa(e->left);
        if (f.accepts("")) {
          if (dfa_equivalent(f, dfa_eps(alphabet)) ||
              dfa_equivalent(f, dfa_none(alphabet)))
            break;  // ∅* and ε* denote {ε}: harmless
          return fail(e, std::string());
        }
        auto c = is_code(f);
        if (!c.ok) return fail(e, c.witness);
        break;
      }
    }
    okNodes.insert(e.get());
    verified_nodes().insert(e);
    return std::nullopt;
  }

};

}  // namespace

UnambiguityResult check_unambiguous(const RegexPtr& e, const Alphabet& alphabet) {
  UnambChecker c{alphabet_union(alphabet, regex_letters(e))};
  if (auto r = c.visit(e)) return *r;
  return {};
}

UnambiguityResult check_unambiguous(const RegexPtr& e) {
  return check_unambiguous(e, regex_letters(e));
}

LangReport analyze_language(const Dfa& d, int dMax) {
  LangReport rep;
  rep.isAperiodic = is_aperiodic_lang(d);
  auto pc = is_prefix_code(d);
  rep.isPrefixCode = pc.ok;
  rep.prefixWitness = pc.witness;
  if (!d.accepts("")) {
    auto c = is_code(d);
    rep.isCode = c.ok;
    rep.codeWitness = c.witness;
  } else {
    rep.isCode = false;
    rep.codeWitness = std::string();
  }
  if (rep.isPrefixCode) {
    int bound = dMax > 0 ? dMax : default_dmax(d);
    auto sd = sync_delay(d, bound);
    rep.syncDelay = sd.delay;
    rep.syncWitness = sd.witness;
  }
  return rep;
}

}  // namespace sdt
