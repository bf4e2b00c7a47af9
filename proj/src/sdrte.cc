// sdrte.cc -- AST construction, evaluation, domain automata, validation
#include "sdt/sdrte.hh"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>

namespace sdt {

struct Sdrte::Cache {
  std::mutex mu;
  // per ambient alphabet: DFA of the node's domain and of its lang field
  std::vector<std::pair<Alphabet, DfaPtr>> dom;
  std::vector<std::pair<Alphabet, DfaPtr>> domUp;  // upper approximation
  std::vector<std::pair<Alphabet, DfaPtr>> lang;
};

namespace {

std::shared_ptr<Sdrte> node(SdKind k) {
  auto n = std::make_shared<Sdrte>();
  n->kind = k;
  return n;
}

Alphabet word_letters(const std::string& v) {
  Alphabet a;
  for (char c : v) {
    Sym s = (Sym)(unsigned char)c;
    if (!alphabet_contains(a, s)) a.push_back(s);
  }
  std::sort(a.begin(), a.end());
  return a;
}

void inherit(Sdrte& n, const SdrtePtr& c) {
  n.input = alphabet_union(n.input, c->input);
  n.output = alphabet_union(n.output, c->output);
}

}  // namespace

SdrtePtr Sdrte::bot() { return node(SdKind::Bot); }

SdrtePtr Sdrte::constant(const std::string& v) {
  auto n = node(SdKind::Const);
  n->value = v;
  n->output = word_letters(v);
  return n;
}

SdrtePtr Sdrte::ite(RegexPtr l, SdrtePtr c1, SdrtePtr c2) {
  auto n = node(SdKind::Ite);
  n->lang = l;
  n->left = c1;
  n->right = c2;
  n->input = regex_letters(l);
  inherit(*n, c1);
  inherit(*n, c2);
  return n;
}

SdrtePtr Sdrte::had(SdrtePtr c1, SdrtePtr c2) {
  auto n = node(SdKind::Had);
  n->left = c1;
  n->right = c2;
  inherit(*n, c1);
  inherit(*n, c2);
  return n;
}

SdrtePtr Sdrte::cauchy(SdrtePtr c1, SdrtePtr c2) {
  auto n = node(SdKind::Cauchy);
  n->left = c1;
  n->right = c2;
  inherit(*n, c1);
  inherit(*n, c2);
  return n;
}

static SdrtePtr make_star(SdKind kind, int k, RegexPtr l, SdrtePtr c) {
  if (k < 1) throw std::invalid_argument("star: window width must be >= 1");
  auto n = node(kind);
  n->k = k;
  n->lang = l;
  n->left = c;
  n->input = regex_letters(l);
  inherit(*n, c);
  return n;
}

SdrtePtr Sdrte::star(int k, RegexPtr l, SdrtePtr c) {
  return make_star(SdKind::Star, k, l, c);
}

SdrtePtr Sdrte::rstar(int k, RegexPtr l, SdrtePtr c) {
  return make_star(SdKind::RStar, k, l, c);
}

SdrtePtr Sdrte::compose(SdrtePtr outer, SdrtePtr inner) {
  auto n = node(SdKind::Compose);
  n->left = outer;
  n->right = inner;
  inherit(*n, outer);
  inherit(*n, inner);
  return n;
}

SdrtePtr Sdrte::dup(Sym marker) {
  auto n = node(SdKind::Dup);
  n->marker = marker;
  n->output = Alphabet{marker};
  return n;
}

SdrtePtr Sdrte::rev() { return node(SdKind::Rev); }

bool Sdrte::is_core() const {
  if (kind == SdKind::Compose || kind == SdKind::Dup || kind == SdKind::Rev)
    return false;
  if (left && !left->is_core()) return false;
  if (right && !right->is_core()) return false;
  return true;
}

namespace {
void count_nodes(const Sdrte* c, std::set<const Sdrte*>& seen) {
  if (!c || !seen.insert(c).second) return;
  count_nodes(c->left.get(), seen);
  count_nodes(c->right.get(), seen);
}
}  // namespace

// distinct nodes reached; subterms are shared aggressively, so the tree
// expansion would be meaningless (and sometimes astronomically large)
size_t Sdrte::size() const {
  std::set<const Sdrte*> seen;
  count_nodes(this, seen);
  return seen.size();
}

// ---------------------------------------------------------------------------
// derived forms

static RegexPtr dom_regex(const SdrtePtr& c) {
  return simplify_regex(dfa_to_regex(domain_automaton(c)));
}

SdrtePtr sdrte_restrict(RegexPtr l, SdrtePtr c) {
  return Sdrte::ite(l, c, Sdrte::bot());
}

SdrtePtr sdrte_sum(SdrtePtr c1, SdrtePtr c2) {
  return Sdrte::ite(dom_regex(c1), c1, c2);
}

SdrtePtr sdrte_rcat(SdrtePtr c1, SdrtePtr c2) {
  RegexPtr d1 = dom_regex(c1), d2 = dom_regex(c2);
  return Sdrte::had(
      Sdrte::cauchy(sdrte_restrict(d1, Sdrte::constant("")), c2),
      Sdrte::cauchy(c1, sdrte_restrict(d2, Sdrte::constant(""))));
}

SdrtePtr sdrte_star1(SdrtePtr c) {
  return Sdrte::star(1, dom_regex(c), c);
}

// ---------------------------------------------------------------------------
// cached automata

namespace {

Sdrte::Cache& cache_of(const Sdrte* c) {
  static std::mutex createMu;
  if (!c->memo) {
    std::lock_guard<std::mutex> lk(createMu);
    if (!c->memo) c->memo = std::make_shared<Sdrte::Cache>();
  }
  return *c->memo;
}

DfaPtr lookup(std::vector<std::pair<Alphabet, DfaPtr>>& v,
              const Alphabet& sigma) {
  for (auto& [a, d] : v)
    if (a == sigma) return d;
  return nullptr;
}

DfaPtr lang_dfa(const Sdrte* c, const Alphabet& sigma) {
  Sdrte::Cache& m = cache_of(c);
  {
    std::lock_guard<std::mutex> lk(m.mu);
    if (auto d = lookup(m.lang, sigma)) return d;
  }
  auto d = std::make_shared<Dfa>(regex_to_dfa(c->lang, sigma));
  std::lock_guard<std::mutex> lk(m.mu);
  if (auto old = lookup(m.lang, sigma)) return old;
  m.lang.emplace_back(sigma, d);
  return d;
}

// upper=true over-approximates the domain of unsupported compositions by
// the full language; evaluation uses this to locate Cauchy splits (a spurious
// split never survives: the sub-evaluation itself still fails)
DfaPtr dom_dfa(const SdrtePtr& c, const Alphabet& sigma, bool upper = false);

Dfa dom_build(const SdrtePtr& c, const Alphabet& sigma, bool upper) {
  switch (c->kind) {
    case SdKind::Bot:
      return dfa_none(sigma);
    case SdKind::Const:
    case SdKind::Dup:
    case SdKind::Rev:
      return dfa_all(sigma);
    case SdKind::Ite: {
      Dfa l = *lang_dfa(c.get(), sigma);
      Dfa d1 = *dom_dfa(c->left, sigma, upper);
      Dfa d2 = *dom_dfa(c->right, sigma, upper);
      return dfa_union(dfa_intersect(l, d1), dfa_difference(d2, l));
    }
    case SdKind::Had:
      return dfa_intersect(*dom_dfa(c->left, sigma, upper),
                           *dom_dfa(c->right, sigma, upper));
    case SdKind::Cauchy: {
      Dfa d1 = *dom_dfa(c->left, sigma, upper);
      Dfa d2 = *dom_dfa(c->right, sigma, upper);
      return dfa_difference(dfa_concat(d1, d2), ambiguous_concat_dfa(d1, d2));
    }
    case SdKind::Star:
    case SdKind::RStar: {
      Dfa l = *lang_dfa(c.get(), sigma);
      Dfa lstar = dfa_star(l);
      Dfa badWindow =
          dfa_difference(dfa_power(l, c->k), *dom_dfa(c->left, sigma, upper));
      Dfa bad = dfa_concat(dfa_concat(lstar, badWindow), lstar);
      return dfa_difference(lstar, bad);
    }
    case SdKind::Compose:
      if (c->right->kind == SdKind::Rev)
        return dfa_reverse(*dom_dfa(c->left, sigma, upper));
      if (upper) return *dom_dfa(c->right, sigma, true);
      throw std::invalid_argument(
          "domain_automaton: composition supported only over a reversal");
  }
  throw std::logic_error("dom_build: unreachable");
}

DfaPtr dom_dfa(const SdrtePtr& c, const Alphabet& sigma, bool upper) {
  Sdrte::Cache& m = cache_of(c.get());
  {
    std::lock_guard<std::mutex> lk(m.mu);
    if (auto d = lookup(m.dom, sigma)) return d;  // exact is also an upper
    if (upper)
      if (auto d = lookup(m.domUp, sigma)) return d;
  }
  auto d = std::make_shared<Dfa>(minimize(dom_build(c, sigma, upper)));
  std::lock_guard<std::mutex> lk(m.mu);
  auto& slot = upper ? m.domUp : m.dom;
  if (auto old = lookup(slot, sigma)) return old;
  slot.emplace_back(sigma, d);
  return d;
}

}  // namespace

Dfa domain_automaton(const SdrtePtr& c, const Alphabet& sigma) {
  return *dom_dfa(c, sigma);
}

Dfa domain_automaton(const SdrtePtr& c) {
  return domain_automaton(c, c->input);
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

// greedy unique factorization over a prefix code; factors are nonempty
std::optional<std::vector<size_t>> factor_ends(const Dfa& l,
                                               const std::string& w) {
  std::vector<size_t> ends;
  size_t i = 0;
  while (i < w.size()) {
    int q = l.initial;
    size_t j = i;
    bool found = false;
    while (j < w.size()) {
      int li = l.letter_index((Sym)(unsigned char)w[j]);
      if (li < 0) return std::nullopt;
      q = l.trans[q][li];
      ++j;
      if (l.finals[q]) {
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    ends.push_back(j);
    i = j;
  }
  return ends;
}

// Expressions assembled by extraction are heavily shared DAGs; a per-call
// memo keeps evaluation proportional to (#nodes × #substrings) instead of the
// tree expansion.
using EvalMemo =
    std::map<std::tuple<const Sdrte*, std::string, Alphabet>,
             std::optional<std::string>>;

std::optional<std::string> eval_memo(const SdrtePtr& c, const std::string& w,
                                     const Alphabet& sigma, EvalMemo& memo);

std::optional<std::string> eval_rec(const SdrtePtr& c, const std::string& w,
                                    const Alphabet& sigma, EvalMemo& memo) {
  switch (c->kind) {
    case SdKind::Bot:
      return std::nullopt;
    case SdKind::Const:
      return c->value;
    case SdKind::Ite:
      return lang_dfa(c.get(), sigma)->accepts(w)
                 ? eval_memo(c->left, w, sigma, memo)
                 : eval_memo(c->right, w, sigma, memo);
    case SdKind::Had: {
      auto a = eval_memo(c->left, w, sigma, memo);
      if (!a) return std::nullopt;
      auto b = eval_memo(c->right, w, sigma, memo);
      if (!b) return std::nullopt;
      return *a + *b;
    }
    case SdKind::Cauchy: {
      DfaPtr d1 = dom_dfa(c->left, sigma, true);
      DfaPtr d2 = dom_dfa(c->right, sigma, true);
      std::optional<size_t> split;
      for (size_t i = 0; i <= w.size(); ++i) {
        if (!d1->accepts(w.substr(0, i)) || !d2->accepts(w.substr(i))) continue;
        if (split) return std::nullopt;  // ambiguous split
        split = i;
      }
      if (!split) return std::nullopt;
      auto a = eval_memo(c->left, w.substr(0, *split), sigma, memo);
      if (!a) return std::nullopt;
      auto b = eval_memo(c->right, w.substr(*split), sigma, memo);
      if (!b) return std::nullopt;
      return *a + *b;
    }
    case SdKind::Star:
    case SdKind::RStar: {
      DfaPtr l = lang_dfa(c.get(), sigma);
      auto ends = factor_ends(*l, w);
      if (!ends) return std::nullopt;
      int n = (int)ends->size();
      if (n < c->k) return std::string();
      std::vector<std::string> pieces;
      for (int i = 0; i + c->k <= n; ++i) {
        size_t from = i == 0 ? 0 : (*ends)[i - 1];
        size_t to = (*ends)[i + c->k - 1];
        auto piece = eval_memo(c->left, w.substr(from, to - from), sigma, memo);
        if (!piece) return std::nullopt;
        pieces.push_back(std::move(*piece));
      }
      if (c->kind == SdKind::RStar)
        std::reverse(pieces.begin(), pieces.end());
      std::string out;
      for (auto& p : pieces) out += p;
      return out;
    }
    case SdKind::Compose: {
      auto mid = eval_memo(c->right, w, sigma, memo);
      if (!mid) return std::nullopt;
      Alphabet outerSigma = alphabet_union(sigma, c->left->input);
      return eval_memo(c->left, *mid, outerSigma, memo);
    }
    case SdKind::Dup:
      return w + (char)c->marker + w;
    case SdKind::Rev:
      return std::string(w.rbegin(), w.rend());
  }
  throw std::logic_error("eval_rec: unreachable");
}

std::optional<std::string> eval_memo(const SdrtePtr& c, const std::string& w,
                                     const Alphabet& sigma, EvalMemo& memo) {
  auto key = std::make_tuple(c.get(), w, sigma);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  auto v = eval_rec(c, w, sigma, memo);
  memo[std::move(key)] = v;
  return v;
}

}  // namespace

std::optional<std::string> eval_sdrte(const SdrtePtr& c, const std::string& w,
                                      const Alphabet& sigma) {
  for (char ch : w)
    if (!alphabet_contains(sigma, (Sym)(unsigned char)ch)) return std::nullopt;
  EvalMemo memo;
  return eval_memo(c, w, sigma, memo);
}

std::optional<std::string> eval_sdrte(const SdrtePtr& c, const std::string& w) {
  return eval_sdrte(c, w, c->input);
}

// ---------------------------------------------------------------------------
// validation

namespace {

void validate_rec(const SdrtePtr& c, const std::string& path, int dMax,
                  ValidationReport& rep) {
  auto fail = [&](const std::string& cond, const std::string& wit) {
    rep.ok = false;
    rep.failures.push_back({path.empty() ? "/" : path, cond, wit});
  };
  switch (c->kind) {
    case SdKind::Ite: {
      Dfa l = regex_to_dfa(c->lang, regex_letters(c->lang));
      if (!is_aperiodic_lang(l))
        fail("guard language is not aperiodic", print_regex(c->lang));
      break;
    }
    case SdKind::Star:
    case SdKind::RStar: {
      Dfa l = regex_to_dfa(c->lang, regex_letters(c->lang));
      if (!is_aperiodic_lang(l))
        fail("parser language is not aperiodic", print_regex(c->lang));
      auto pc = is_prefix_code(l);
      if (!pc.ok) {
        fail("parser language is not a prefix code",
             pc.witness ? pc.witness->first + " , " + pc.witness->second
                        : "");
      } else {
        int bound = dMax > 0 ? dMax : default_dmax(l);
        auto sd = sync_delay(l, bound);
        if (!sd.delay) {
          std::string wit;
          if (sd.witness) {
            auto& [u, v, w] = *sd.witness;
            wit = "u=" + u + " v=" + v + " w=" + w;
          }
          fail("parser language has synchronisation delay above " +
                   std::to_string(bound),
               wit);
        }
      }
      break;
    }
    default:
      break;
  }
  if (c->left) validate_rec(c->left, path + "/left", dMax, rep);
  if (c->right) validate_rec(c->right, path + "/right", dMax, rep);
}

}  // namespace

ValidationReport validate(const SdrtePtr& c, int dMax) {
  ValidationReport rep;
  validate_rec(c, "", dMax, rep);
  return rep;
}

// ---------------------------------------------------------------------------
// simplification

namespace {

bool same_tree(const SdrtePtr& a, const SdrtePtr& b) {
  // shared-subterm expressions can be too large to print; pointer identity
  // is the only equality that stays cheap (and regexes are interned, so
  // identical guards do coincide)
  return a == b;
}

bool dom_is_eps_only(const SdrtePtr& c, const Alphabet& sigma) {
  Dfa d = domain_automaton(c, sigma);
  return dfa_equivalent(d, dfa_eps(d.alphabet));
}

using SimplifyMemo = std::map<std::pair<const Sdrte*, Alphabet>, SdrtePtr>;

SdrtePtr simplify_rec(const SdrtePtr& c, const Alphabet& sigma,
                      SimplifyMemo& memo);

SdrtePtr simplify_node(const SdrtePtr& c, const Alphabet& sigma,
                       SimplifyMemo& memo) {
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
    case SdKind::Dup:
    case SdKind::Rev:
      return c;
    case SdKind::Ite: {
      SdrtePtr l = simplify_rec(c->left, sigma, memo),
               r = simplify_rec(c->right, sigma, memo);
      RegexPtr g = simplify_regex(c->lang);
      Dfa gd = regex_to_dfa(g, sigma);
      if (dfa_is_empty(gd)) return r;
      if (dfa_equivalent(gd, dfa_all(sigma))) return l;
      if (l->kind == SdKind::Bot && r->kind == SdKind::Bot)
        return Sdrte::bot();
      if (same_tree(l, r)) return l;
      return Sdrte::ite(g, l, r);
    }
    case SdKind::Had: {
      SdrtePtr l = simplify_rec(c->left, sigma, memo),
               r = simplify_rec(c->right, sigma, memo);
      if (l->kind == SdKind::Bot || r->kind == SdKind::Bot)
        return Sdrte::bot();
      if (l->kind == SdKind::Const && l->value.empty()) return r;
      if (r->kind == SdKind::Const && r->value.empty()) return l;
      return Sdrte::had(l, r);
    }
    case SdKind::Cauchy: {
      SdrtePtr l = simplify_rec(c->left, sigma, memo),
               r = simplify_rec(c->right, sigma, memo);
      if (l->kind == SdKind::Bot || r->kind == SdKind::Bot)
        return Sdrte::bot();
      // an ε-only factor producing ε is neutral
      auto neutral = [&](const SdrtePtr& x) {
        return x->kind == SdKind::Ite && x->left->kind == SdKind::Const &&
               x->left->value.empty() && x->right->kind == SdKind::Bot &&
               dom_is_eps_only(x, sigma);
      };
      if (neutral(l)) return r;
      if (neutral(r)) return l;
      return Sdrte::cauchy(l, r);
    }
    case SdKind::Star:
    case SdKind::RStar: {
      SdrtePtr body = simplify_rec(c->left, sigma, memo);
      RegexPtr g = simplify_regex(c->lang);
      return c->kind == SdKind::Star ? Sdrte::star(c->k, g, body)
                                     : Sdrte::rstar(c->k, g, body);
    }
    case SdKind::Compose: {
      // the outer expression reads the inner image, not sigma
      SdrtePtr outer = simplify_rec(c->left, c->left->input, memo);
      SdrtePtr inner = simplify_rec(c->right, sigma, memo);
      return Sdrte::compose(outer, inner);
    }
  }
  return c;
}

SdrtePtr simplify_rec(const SdrtePtr& c, const Alphabet& sigma,
                      SimplifyMemo& memo) {
  auto key = std::make_pair(c.get(), sigma);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  SdrtePtr v = simplify_node(c, sigma, memo);
  memo[std::move(key)] = v;
  return v;
}

}  // namespace

SdrtePtr simplify_sdrte(const SdrtePtr& c, const Alphabet& sigma) {
  SimplifyMemo memo;
  return simplify_rec(c, sigma, memo);
}

SdrtePtr simplify_sdrte(const SdrtePtr& c) {
  SimplifyMemo memo;
  return simplify_rec(c, c->input, memo);
}

}  // namespace sdt
