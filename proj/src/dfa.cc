// dfa.cc -- determinization, minimization, boolean/rational operations
#include "sdt/dfa.hh"

#include "sdt/nfa.hh"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sdt {

int Dfa::letter_index(Sym a) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), a);
  if (it == alphabet.end() || *it != a) return -1;
  return (int)(it - alphabet.begin());
}

int Dfa::step(int q, Sym a) const {
  int i = letter_index(a);
  if (i < 0) throw std::invalid_argument("letter outside DFA alphabet");
  return trans[q][i];
}

int Dfa::run(int q, const std::string& w) const {
  for (unsigned char c : w) q = step(q, (Sym)c);
  return q;
}

bool Dfa::accepts(const std::string& w) const {
  for (unsigned char c : w) {
    int i = letter_index((Sym)c);
    if (i < 0) return false;  // letter outside alphabet: not in language
  }
  return finals[run(w)];
}

// ------------------------------------------------------------------- NFA

void Nfa::add_edge(int from, Sym a, int to) {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), a);
  if (it == alphabet.end() || *it != a)
    throw std::invalid_argument("NFA edge letter outside alphabet");
  trans[from][it - alphabet.begin()].push_back(to);
}

namespace {

void eps_closure(const Nfa& a, std::set<int>& s) {
  std::vector<int> work(s.begin(), s.end());
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    for (int t : a.eps[q])
      if (s.insert(t).second) work.push_back(t);
  }
}

}  // namespace

Dfa determinize(const Nfa& a) {
  Dfa d;
  d.alphabet = a.alphabet;
  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> sets;
  auto intern = [&](std::set<int> s) {
    eps_closure(a, s);
    auto [it, inserted] = ids.emplace(std::move(s), (int)sets.size());
    if (inserted) sets.push_back(it->first);
    return it->second;
  };
  d.initial = intern(std::set<int>(a.initials.begin(), a.initials.end()));
  for (size_t qi = 0; qi < sets.size(); ++qi) {
    std::set<int> cur = sets[qi];  // copy: intern below may grow `sets`
    d.trans.emplace_back(a.alphabet.size());
    bool fin = false;
    for (int q : cur) fin = fin || a.finals[q];
    d.finals.push_back(fin);
    for (size_t li = 0; li < a.alphabet.size(); ++li) {
      std::set<int> next;
      for (int q : cur)
        for (int t : a.trans[q][li]) next.insert(t);
      d.trans[qi][li] = intern(std::move(next));
    }
  }
  d.numStates = (int)sets.size();
  return d;
}

Nfa nfa_of_dfa(const Dfa& d) {
  Nfa a;
  a.alphabet = d.alphabet;
  for (int q = 0; q < d.numStates; ++q) a.add_state();
  for (int q = 0; q < d.numStates; ++q) {
    a.finals[q] = d.finals[q];
    for (size_t li = 0; li < d.alphabet.size(); ++li)
      a.trans[q][li].push_back(d.trans[q][li]);
  }
  a.initials.push_back(d.initial);
  return a;
}

namespace {

// Thompson construction fragment: returns (in, out) state pair.
std::pair<int, int> thompson(Nfa& a, const RegexPtr& e) {
  int in = a.add_state(), out = a.add_state();
  switch (e->kind) {
    case RxKind::Empty:
      break;
    case RxKind::Eps:
      a.eps[in].push_back(out);
      break;
    case RxKind::Letter: {
      auto it = std::lower_bound(a.alphabet.begin(), a.alphabet.end(), e->sym);
      if (it == a.alphabet.end() || *it != e->sym)
        throw std::invalid_argument("regex letter outside alphabet");
      a.trans[in][it - a.alphabet.begin()].push_back(out);
      break;
    }
    case RxKind::Union: {
      auto [li, lo] = thompson(a, e->left);
      auto [ri, ro] = thompson(a, e->right);
      a.eps[in].push_back(li);
      a.eps[in].push_back(ri);
      a.eps[lo].push_back(out);
      a.eps[ro].push_back(out);
      break;
    }
    case RxKind::Concat: {
      auto [li, lo] = thompson(a, e->left);
      auto [ri, ro] = thompson(a, e->right);
      a.eps[in].push_back(li);
      a.eps[lo].push_back(ri);
      a.eps[ro].push_back(out);
      break;
    }
    case RxKind::Star: {
      auto [li, lo] = thompson(a, e->left);
      a.eps[in].push_back(li);
      a.eps[lo].push_back(in);
      a.eps[in].push_back(out);
      break;
    }
  }
  return {in, out};
}

}  // namespace

// ---------------------------------------------------------- minimization

Dfa minimize(const Dfa& d) {
  int n = d.numStates;
  size_t k = d.alphabet.size();
  // reachable states only
  std::vector<int> order;
  std::vector<int> idx(n, -1);
  order.push_back(d.initial);
  idx[d.initial] = 0;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t li = 0; li < k; ++li) {
      int t = d.trans[order[i]][li];
      if (idx[t] < 0) {
        idx[t] = (int)order.size();
        order.push_back(t);
      }
    }
  int m = (int)order.size();
  // Moore refinement on reachable part
  std::vector<int> cls(m);
  for (int i = 0; i < m; ++i) cls[i] = d.finals[order[i]] ? 1 : 0;
  for (;;) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next(m);
    for (int i = 0; i < m; ++i) {
      std::vector<int> key;
      key.reserve(k + 1);
      key.push_back(cls[i]);
      for (size_t li = 0; li < k; ++li) key.push_back(cls[idx[d.trans[order[i]][li]]]);
      auto [it, _] = sig.emplace(std::move(key), (int)sig.size());
      next[i] = it->second;
    }
    bool changed = false;
    for (int i = 0; i < m; ++i) changed |= (next[i] != cls[i]);
    cls = std::move(next);
    if (!changed) break;
  }
  // canonical BFS numbering of classes
  int nclasses = *std::max_element(cls.begin(), cls.end()) + 1;
  std::vector<int> rep(nclasses, -1);
  for (int i = m - 1; i >= 0; --i) rep[cls[i]] = i;  // any representative
  std::vector<int> number(nclasses, -1);
  std::vector<int> bfs;
  number[cls[0]] = 0;
  bfs.push_back(cls[0]);
  for (size_t i = 0; i < bfs.size(); ++i) {
    int c = bfs[i];
    for (size_t li = 0; li < k; ++li) {
      int t = cls[idx[d.trans[order[rep[c]]][li]]];
      if (number[t] < 0) {
        number[t] = (int)bfs.size();
        bfs.push_back(t);
      }
    }
  }
  Dfa out;
  out.alphabet = d.alphabet;
  out.numStates = (int)bfs.size();
  out.initial = 0;
  out.trans.assign(out.numStates, std::vector<int>(k));
  out.finals.assign(out.numStates, false);
  for (int c : bfs) {
    int q = number[c];
    int r = order[rep[c]];
    out.finals[q] = d.finals[r];
    for (size_t li = 0; li < k; ++li) out.trans[q][li] = number[cls[idx[d.trans[r][li]]]];
  }
  return out;
}

namespace {

// number of tree nodes, saturating at cap (expressions are shared DAGs whose
// tree expansion can be astronomically larger than the node count)
size_t size_capped(const Regex* e, size_t cap,
                   std::map<const Regex*, size_t>& memo) {
  if (!e) return 0;
  auto it = memo.find(e);
  if (it != memo.end()) return it->second;
  size_t l = size_capped(e->left.get(), cap, memo);
  size_t r = size_capped(e->right.get(), cap, memo);
  size_t v = std::min(cap, 1 + l + r);
  memo[e] = v;
  return v;
}

Dfa thompson_dfa(const RegexPtr& e, const Alphabet& alphabet) {
  Nfa a;
  a.alphabet = alphabet;
  auto [in, out] = thompson(a, e);
  a.initials.push_back(in);
  a.finals[out] = true;
  return minimize(determinize(a));
}

// Thompson on small subtrees, composition of minimal DFAs above that; shared
// nodes are converted once and the results cached for the process lifetime
// (the cache pins its keys, so the node addresses stay valid).
constexpr size_t kThompsonCap = 256;

struct DfaCache {
  std::mutex mu;
  std::map<const Regex*, std::pair<RegexPtr, Dfa>> done;
};

Dfa build_dfa(const RegexPtr& e, DfaCache& cache,
              std::map<const Regex*, size_t>& sizes) {
  {
    std::lock_guard<std::mutex> lk(cache.mu);
    auto it = cache.done.find(e.get());
    if (it != cache.done.end()) return it->second.second;
  }
  Dfa d;
  if (size_capped(e.get(), kThompsonCap, sizes) < kThompsonCap) {
    d = thompson_dfa(e, regex_letters(e));
  } else {
    switch (e->kind) {
      case RxKind::Union:
        d = dfa_union(build_dfa(e->left, cache, sizes),
                      build_dfa(e->right, cache, sizes));
        break;
      case RxKind::Concat:
        d = dfa_concat(build_dfa(e->left, cache, sizes),
                       build_dfa(e->right, cache, sizes));
        break;
      case RxKind::Star:
        d = dfa_star(build_dfa(e->left, cache, sizes));
        break;
      default:  // atoms are always below the cap
        d = thompson_dfa(e, regex_letters(e));
        break;
    }
  }
  std::lock_guard<std::mutex> lk(cache.mu);
  return cache.done.emplace(e.get(), std::make_pair(e, d)).first->second.second;
}

}  // namespace

Dfa regex_to_dfa(const RegexPtr& e, const Alphabet& alphabet) {
  for (Sym a : regex_letters(e))
    if (!alphabet_contains(alphabet, a))
      throw std::invalid_argument("regex letter outside alphabet");
  static DfaCache cache;
  std::map<const Regex*, size_t> sizes;
  return extend_alphabet(build_dfa(e, cache, sizes), alphabet);
}

Dfa regex_to_dfa(const RegexPtr& e) { return regex_to_dfa(e, regex_letters(e)); }

Dfa extend_alphabet(const Dfa& d, const Alphabet& alphabet) {
  Alphabet merged = alphabet_union(d.alphabet, alphabet);
  if (merged == d.alphabet) return d;
  Dfa out;
  out.alphabet = merged;
  out.numStates = d.numStates + 1;  // + sink
  int sink = d.numStates;
  out.initial = d.initial;
  out.finals = d.finals;
  out.finals.push_back(false);
  out.trans.assign(out.numStates, std::vector<int>(merged.size(), sink));
  for (int q = 0; q < d.numStates; ++q)
    for (size_t li = 0; li < merged.size(); ++li) {
      int old = d.letter_index(merged[li]);
      out.trans[q][li] = old < 0 ? sink : d.trans[q][old];
    }
  return minimize(out);
}

// ------------------------------------------------------------- products

namespace {

template <class FinalOp>
Dfa product(const Dfa& x0, const Dfa& y0, FinalOp f) {
  Alphabet ab = alphabet_union(x0.alphabet, y0.alphabet);
  Dfa x = extend_alphabet(x0, ab), y = extend_alphabet(y0, ab);
  Dfa out;
  out.alphabet = ab;
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> states;
  auto intern = [&](std::pair<int, int> p) {
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    int id = (int)states.size();
    ids.emplace(p, id);
    states.push_back(p);
    return id;
  };
  out.initial = intern({x.initial, y.initial});
  for (size_t i = 0; i < states.size(); ++i) {
    auto [p, q] = states[i];
    out.trans.emplace_back(ab.size());
    out.finals.push_back(f(x.finals[p], y.finals[q]));
    for (size_t li = 0; li < ab.size(); ++li)
      out.trans[i][li] = intern({x.trans[p][li], y.trans[q][li]});
  }
  out.numStates = (int)states.size();
  return minimize(out);
}

}  // namespace

Dfa dfa_union(const Dfa& x, const Dfa& y) {
  return product(x, y, [](bool a, bool b) { return a || b; });
}
Dfa dfa_intersect(const Dfa& x, const Dfa& y) {
  return product(x, y, [](bool a, bool b) { return a && b; });
}
Dfa dfa_difference(const Dfa& x, const Dfa& y) {
  return product(x, y, [](bool a, bool b) { return a && !b; });
}
Dfa dfa_complement(const Dfa& x) {
  Dfa out = x;
  for (int q = 0; q < out.numStates; ++q) out.finals[q] = !out.finals[q];
  return minimize(out);
}

Dfa dfa_concat(const Dfa& x0, const Dfa& y0) {
  Alphabet ab = alphabet_union(x0.alphabet, y0.alphabet);
  Dfa x = extend_alphabet(x0, ab), y = extend_alphabet(y0, ab);
  Nfa a;
  a.alphabet = ab;
  Nfa nx = nfa_of_dfa(x), ny = nfa_of_dfa(y);
  for (int q = 0; q < nx.n + ny.n; ++q) a.add_state();
  auto copy_in = [&](const Nfa& src, int off) {
    for (int q = 0; q < src.n; ++q) {
      for (size_t li = 0; li < ab.size(); ++li)
        for (int t : src.trans[q][li]) a.trans[q + off][li].push_back(t + off);
      for (int t : src.eps[q]) a.eps[q + off].push_back(t + off);
    }
  };
  copy_in(nx, 0);
  copy_in(ny, nx.n);
  a.initials.push_back(x.initial);
  for (int q = 0; q < nx.n; ++q)
    if (nx.finals[q]) a.eps[q].push_back(nx.n + y.initial);
  for (int q = 0; q < ny.n; ++q) a.finals[nx.n + q] = ny.finals[q];
  return minimize(determinize(a));
}

Dfa dfa_star(const Dfa& x) {
  Nfa nx = nfa_of_dfa(x);
  Nfa a;
  a.alphabet = x.alphabet;
  for (int q = 0; q < nx.n + 1; ++q) a.add_state();
  int start = nx.n;
  for (int q = 0; q < nx.n; ++q) {
    for (size_t li = 0; li < a.alphabet.size(); ++li)
      for (int t : nx.trans[q][li]) a.trans[q][li].push_back(t);
    if (nx.finals[q]) a.eps[q].push_back(start);
  }
  a.eps[start].push_back(x.initial);
  a.initials.push_back(start);
  a.finals[start] = true;
  return minimize(determinize(a));
}

Dfa dfa_power(const Dfa& x, int k) {
  Dfa acc = dfa_eps(x.alphabet);
  for (int i = 0; i < k; ++i) acc = dfa_concat(acc, x);
  return acc;
}

Dfa dfa_power_below(const Dfa& x, int k) {
  Dfa acc = dfa_none(x.alphabet);
  Dfa pw = dfa_eps(x.alphabet);
  for (int i = 0; i < k; ++i) {
    acc = dfa_union(acc, pw);
    pw = dfa_concat(pw, x);
  }
  return acc;
}

Dfa dfa_reverse(const Dfa& x) {
  Nfa a;
  a.alphabet = x.alphabet;
  for (int q = 0; q < x.numStates; ++q) a.add_state();
  for (int q = 0; q < x.numStates; ++q)
    for (size_t li = 0; li < a.alphabet.size(); ++li)
      a.trans[x.trans[q][li]][li].push_back(q);
  for (int q = 0; q < x.numStates; ++q)
    if (x.finals[q]) a.initials.push_back(q);
  a.finals[x.initial] = true;
  return minimize(determinize(a));
}

Dfa dfa_left_quotient(const Dfa& x, Sym a) {
  Dfa out = x;
  int li = out.letter_index(a);
  if (li < 0) return dfa_none(x.alphabet);
  out.initial = out.trans[out.initial][li];
  return minimize(out);
}

Dfa dfa_right_quotient(const Dfa& x, Sym a) {
  Dfa out = x;
  int li = out.letter_index(a);
  if (li < 0) return dfa_none(x.alphabet);
  for (int q = 0; q < out.numStates; ++q)
    out.finals[q] = x.finals[x.trans[q][li]];
  return minimize(out);
}

// --------------------------------------------------------------- queries

std::optional<std::string> dfa_shortest_word(const Dfa& x) {
  std::vector<int> prevState(x.numStates, -1), prevLetter(x.numStates, -1);
  std::vector<bool> seen(x.numStates, false);
  std::deque<int> q{x.initial};
  seen[x.initial] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    if (x.finals[s]) {
      std::string w;
      while (s != x.initial || prevState[s] >= 0) {
        w += (char)x.alphabet[prevLetter[s]];
        s = prevState[s];
      }
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (size_t li = 0; li < x.alphabet.size(); ++li) {
      int t = x.trans[s][li];
      if (!seen[t]) {
        seen[t] = true;
        prevState[t] = s;
        prevLetter[t] = (int)li;
        q.push_back(t);
      }
    }
  }
  return std::nullopt;
}

bool dfa_is_empty(const Dfa& x) { return !dfa_shortest_word(x).has_value(); }

std::optional<std::string> dfa_distinguish(const Dfa& x0, const Dfa& y0) {
  Alphabet ab = alphabet_union(x0.alphabet, y0.alphabet);
  Dfa x = extend_alphabet(x0, ab), y = extend_alphabet(y0, ab);
  // BFS over pairs for a shortest word with differing acceptance
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> prev;
  std::deque<std::pair<int, int>> q;
  auto start = std::make_pair(x.initial, y.initial);
  prev[start] = {{-1, -1}, -1};
  q.push_back(start);
  while (!q.empty()) {
    auto cur = q.front();
    q.pop_front();
    if (x.finals[cur.first] != y.finals[cur.second]) {
      std::string w;
      auto at = cur;
      while (prev[at].second >= 0) {
        w += (char)ab[prev[at].second];
        at = prev[at].first;
      }
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (size_t li = 0; li < ab.size(); ++li) {
      auto nxt = std::make_pair(x.trans[cur.first][li], y.trans[cur.second][li]);
      if (!prev.count(nxt)) {
        prev[nxt] = {cur, (int)li};
        q.push_back(nxt);
      }
    }
  }
  return std::nullopt;
}

bool dfa_equivalent(const Dfa& x, const Dfa& y) {
  return !dfa_distinguish(x, y).has_value();
}

// ---------------------------------------------------------- constructors

Dfa dfa_none(const Alphabet& alphabet) {
  Dfa d;
  d.alphabet = alphabet;
  d.numStates = 1;
  d.initial = 0;
  d.trans.assign(1, std::vector<int>(alphabet.size(), 0));
  d.finals.assign(1, false);
  return d;
}

Dfa dfa_all(const Alphabet& alphabet) {
  Dfa d = dfa_none(alphabet);
  d.finals[0] = true;
  return d;
}

Dfa dfa_eps(const Alphabet& alphabet) {
  if (alphabet.empty()) {
    Dfa d = dfa_none(alphabet);
    d.finals[0] = true;
    return d;
  }
  Dfa d;
  d.alphabet = alphabet;
  d.numStates = 2;
  d.initial = 0;
  d.trans.assign(2, std::vector<int>(alphabet.size(), 1));
  d.finals = {true, false};
  return d;
}

Dfa dfa_word(const std::string& w, const Alphabet& alphabet) {
  return regex_to_dfa(Regex::word(w), alphabet);
}

Dfa dfa_finite(const std::vector<std::string>& words, const Alphabet& alphabet) {
  std::vector<RegexPtr> es;
  for (auto& w : words) es.push_back(Regex::word(w));
  return regex_to_dfa(Regex::alt_all(es), alphabet);
}

// --------------------------------------------------------- to regex

RegexPtr dfa_to_regex(const Dfa& d) {
  int n = d.numStates;
  int init = n, fin = n + 1;
  // edge labels between GNFA states; absent = Empty
  std::map<std::pair<int, int>, RegexPtr> edge;
  auto add = [&](int a, int b, RegexPtr e) {
    auto it = edge.find({a, b});
    if (it == edge.end())
      edge[{a, b}] = e;
    else
      it->second = Regex::alt(it->second, e);
  };
  for (int q = 0; q < n; ++q)
    for (size_t li = 0; li < d.alphabet.size(); ++li)
      add(q, d.trans[q][li], Regex::letter(d.alphabet[li]));
  add(init, d.initial, Regex::eps());
  for (int q = 0; q < n; ++q)
    if (d.finals[q]) add(q, fin, Regex::eps());
  for (int victim = 0; victim < n; ++victim) {
    RegexPtr loop = Regex::eps();
    auto lit = edge.find({victim, victim});
    if (lit != edge.end()) loop = Regex::star(lit->second);
    std::vector<std::pair<int, RegexPtr>> in, out;
    for (auto& [k, e] : edge) {
      if (k.second == victim && k.first != victim) in.push_back({k.first, e});
      if (k.first == victim && k.second != victim) out.push_back({k.second, e});
    }
    for (auto& [a, ea] : in)
      for (auto& [b, eb] : out)
        add(a, b, Regex::cat(ea, Regex::cat(loop, eb)));
    for (auto it = edge.begin(); it != edge.end();) {
      if (it->first.first == victim || it->first.second == victim)
        it = edge.erase(it);
      else
        ++it;
    }
  }
  auto it = edge.find({init, fin});
  RegexPtr r = it == edge.end() ? Regex::empty() : it->second;
  return simplify_regex(r);
}

std::vector<std::string> dfa_words_upto(const Dfa& d, int maxLen, size_t limit) {
  std::vector<std::string> out;
  std::vector<std::string> layer{""};
  for (int len = 0; len <= maxLen && out.size() < limit; ++len) {
    for (auto& w : layer)
      if (d.accepts(w)) {
        out.push_back(w);
        if (out.size() >= limit) break;
      }
    if (len == maxLen) break;
    std::vector<std::string> next;
    next.reserve(layer.size() * d.alphabet.size());
    for (auto& w : layer)
      for (Sym a : d.alphabet) next.push_back(w + (char)a);
    layer = std::move(next);
  }
  return out;
}

}  // namespace sdt
