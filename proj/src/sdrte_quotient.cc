// sdrte_quotient.cc -- letter quotients, alphabet projection, and the
// reduction of k-window stars to 1-stars via duplication and composition
#include <map>
#include <stdexcept>

#include "sdt/sdrte.hh"

namespace sdt {

namespace {

RegexPtr regex_of(const Dfa& d) { return simplify_regex(dfa_to_regex(d)); }

RegexPtr lq_regex(const RegexPtr& l, Sym a) {
  Alphabet ab = alphabet_union(regex_letters(l), Alphabet{a});
  return regex_of(dfa_left_quotient(regex_to_dfa(l, ab), a));
}

RegexPtr rq_regex(const RegexPtr& l, Sym a) {
  Alphabet ab = alphabet_union(regex_letters(l), Alphabet{a});
  return regex_of(dfa_right_quotient(regex_to_dfa(l, ab), a));
}

RegexPtr dom_lq_regex(const SdrtePtr& c, Sym a, const Alphabet& sigma) {
  return regex_of(dfa_left_quotient(domain_automaton(c, sigma), a));
}

RegexPtr dom_rq_regex(const SdrtePtr& c, Sym a, const Alphabet& sigma) {
  return regex_of(dfa_right_quotient(domain_automaton(c, sigma), a));
}

RegexPtr regex_power(const RegexPtr& l, int n) {
  RegexPtr e = Regex::eps();
  for (int i = 0; i < n; ++i) e = Regex::cat(e, l);
  return e;
}

RegexPtr regex_power_below(const RegexPtr& l, int n) {
  RegexPtr e = Regex::empty();
  for (int i = 0; i < n; ++i) e = Regex::alt(e, regex_power(l, i));
  return e;
}

SdrtePtr eps_output(const std::optional<std::string>& v) {
  // ε ▷ v  (empty-domain expression when v is undefined)
  if (!v) return Sdrte::bot();
  return sdrte_restrict(Regex::eps(), Sdrte::constant(*v));
}

// like sdrte_sum, but with the first-branch guard computed over a fixed
// alphabet (the branch alone may mention fewer letters than its domain uses)
SdrtePtr sum_over(const SdrtePtr& c1, const SdrtePtr& c2, const Alphabet& ab) {
  return Sdrte::ite(regex_of(domain_automaton(c1, ab)), c1, c2);
}

// quotients and projection rebuild shared DAGs; per-call memos keep one
// rebuilt node per source node
using NodeMemo = std::map<const Sdrte*, SdrtePtr>;

SdrtePtr lq_rec(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                NodeMemo& memo);

SdrtePtr lq_node(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                 NodeMemo& memo) {
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
      return c;
    case SdKind::Ite:
      return Sdrte::ite(lq_regex(c->lang, a), lq_rec(a, c->left, sigma, memo),
                        lq_rec(a, c->right, sigma, memo));
    case SdKind::Had:
      return Sdrte::had(lq_rec(a, c->left, sigma, memo),
                        lq_rec(a, c->right, sigma, memo));
    case SdKind::Cauchy: {
      SdrtePtr cp = Sdrte::cauchy(lq_rec(a, c->left, sigma, memo), c->right);
      auto atEps = eval_sdrte(c->left, "");
      SdrtePtr cpp =
          atEps ? Sdrte::cauchy(eps_output(atEps), lq_rec(a, c->right, sigma, memo))
                : Sdrte::bot();
      return sdrte_restrict(dom_lq_regex(c, a, sigma),
                            sum_over(cp, cpp, sigma));
    }
    case SdKind::Star:
    case SdKind::RStar: {
      RegexPtr l = c->lang;
      RegexPtr la = lq_regex(l, a);  // a⁻¹L
      int k = c->k;
      // n < k windows: the star yields ε
      SdrtePtr cp = sdrte_restrict(
          Regex::cat(la, regex_power_below(l, k - 1)), Sdrte::constant(""));
      // the first window, with its leading letter removed
      SdrtePtr cpp = Sdrte::cauchy(
          sdrte_restrict(Regex::cat(la, regex_power(l, k - 1)),
                         lq_rec(a, c->left, sigma, memo)),
          sdrte_restrict(Regex::star(l), Sdrte::constant("")));
      // the remaining windows: the original star after the first factor
      SdrtePtr rest = c->kind == SdKind::Star
                          ? Sdrte::star(k, l, c->left)
                          : Sdrte::rstar(k, l, c->left);
      SdrtePtr tail =
          Sdrte::cauchy(sdrte_restrict(la, Sdrte::constant("")), rest);
      SdrtePtr windows = c->kind == SdKind::Star ? Sdrte::had(cpp, tail)
                                                 : Sdrte::had(tail, cpp);
      return sdrte_restrict(Regex::cat(la, Regex::star(l)),
                            sum_over(cp, windows, sigma));
    }
    case SdKind::Compose:
    case SdKind::Dup:
    case SdKind::Rev:
      throw std::invalid_argument("left_quotient: extended node");
  }
  throw std::logic_error("left_quotient: unreachable");
}

SdrtePtr lq_rec(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                NodeMemo& memo) {
  auto it = memo.find(c.get());
  if (it != memo.end()) return it->second;
  SdrtePtr v = lq_node(a, c, sigma, memo);
  return memo[c.get()] = v;
}

SdrtePtr rq_rec(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                NodeMemo& memo);

SdrtePtr rq_node(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                 NodeMemo& memo) {
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
      return c;
    case SdKind::Ite:
      return Sdrte::ite(rq_regex(c->lang, a), rq_rec(a, c->left, sigma, memo),
                        rq_rec(a, c->right, sigma, memo));
    case SdKind::Had:
      return Sdrte::had(rq_rec(a, c->left, sigma, memo),
                        rq_rec(a, c->right, sigma, memo));
    case SdKind::Cauchy: {
      SdrtePtr cp = Sdrte::cauchy(c->left, rq_rec(a, c->right, sigma, memo));
      auto atEps = eval_sdrte(c->right, "");
      SdrtePtr cpp =
          atEps ? Sdrte::cauchy(rq_rec(a, c->left, sigma, memo), eps_output(atEps))
                : Sdrte::bot();
      return sdrte_restrict(dom_rq_regex(c, a, sigma),
                            sum_over(cp, cpp, sigma));
    }
    case SdKind::Star:
    case SdKind::RStar: {
      RegexPtr l = c->lang;
      RegexPtr la = rq_regex(l, a);  // La⁻¹
      int k = c->k;
      SdrtePtr cp = sdrte_restrict(
          Regex::cat(regex_power_below(l, k - 1), la), Sdrte::constant(""));
      // the last window, with its trailing letter removed
      SdrtePtr cpp = Sdrte::cauchy(
          sdrte_restrict(Regex::star(l), Sdrte::constant("")),
          sdrte_restrict(Regex::cat(regex_power(l, k - 1), la),
                         rq_rec(a, c->left, sigma, memo)));
      SdrtePtr rest = c->kind == SdKind::Star
                          ? Sdrte::star(k, l, c->left)
                          : Sdrte::rstar(k, l, c->left);
      SdrtePtr head =
          Sdrte::cauchy(rest, sdrte_restrict(la, Sdrte::constant("")));
      SdrtePtr windows = c->kind == SdKind::Star ? Sdrte::had(head, cpp)
                                                 : Sdrte::had(cpp, head);
      return sdrte_restrict(Regex::cat(Regex::star(l), la),
                            sum_over(cp, windows, sigma));
    }
    case SdKind::Compose:
    case SdKind::Dup:
    case SdKind::Rev:
      throw std::invalid_argument("right_quotient: extended node");
  }
  throw std::logic_error("right_quotient: unreachable");
}

SdrtePtr rq_rec(Sym a, const SdrtePtr& c, const Alphabet& sigma,
                NodeMemo& memo) {
  auto it = memo.find(c.get());
  if (it != memo.end()) return it->second;
  SdrtePtr v = rq_node(a, c, sigma, memo);
  return memo[c.get()] = v;
}

}  // namespace

SdrtePtr left_quotient(Sym a, const SdrtePtr& c, const Alphabet& sigma) {
  NodeMemo memo;
  return lq_rec(a, c, sigma, memo);
}

SdrtePtr left_quotient(Sym a, const SdrtePtr& c) {
  return left_quotient(a, c, alphabet_union(c->input, Alphabet{a}));
}

SdrtePtr right_quotient(Sym a, const SdrtePtr& c, const Alphabet& sigma) {
  NodeMemo memo;
  return rq_rec(a, c, sigma, memo);
}

SdrtePtr right_quotient(Sym a, const SdrtePtr& c) {
  return right_quotient(a, c, alphabet_union(c->input, Alphabet{a}));
}

// ---------------------------------------------------------------------------
// projection

namespace {

RegexPtr project_regex(const RegexPtr& e, const Alphabet& keep) {
  std::vector<std::pair<Sym, RegexPtr>> subst;
  for (Sym a : regex_letters(e))
    if (!alphabet_contains(keep, a)) subst.emplace_back(a, Regex::empty());
  return simplify_regex(subst_regex(e, subst));
}

SdrtePtr project_rec(const SdrtePtr& c, const Alphabet& sigmaPrime,
                     std::map<const Sdrte*, SdrtePtr>& memo);

SdrtePtr project_node(const SdrtePtr& c, const Alphabet& sigmaPrime,
                      std::map<const Sdrte*, SdrtePtr>& memo) {
  auto project = [&](const SdrtePtr& x, const Alphabet& keep) {
    return project_rec(x, keep, memo);
  };
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
    case SdKind::Dup:
    case SdKind::Rev:
      return c;
    case SdKind::Ite:
      return Sdrte::ite(project_regex(c->lang, sigmaPrime),
                        project(c->left, sigmaPrime),
                        project(c->right, sigmaPrime));
    case SdKind::Had:
      return Sdrte::had(project(c->left, sigmaPrime),
                        project(c->right, sigmaPrime));
    case SdKind::Cauchy:
      return Sdrte::cauchy(project(c->left, sigmaPrime),
                           project(c->right, sigmaPrime));
    case SdKind::Star:
      return Sdrte::star(c->k, project_regex(c->lang, sigmaPrime),
                         project(c->left, sigmaPrime));
    case SdKind::RStar:
      return Sdrte::rstar(c->k, project_regex(c->lang, sigmaPrime),
                          project(c->left, sigmaPrime));
    case SdKind::Compose:
      return Sdrte::compose(project(c->left, sigmaPrime),
                            project(c->right, sigmaPrime));
  }
  throw std::logic_error("project: unreachable");
}

SdrtePtr project_rec(const SdrtePtr& c, const Alphabet& sigmaPrime,
                     std::map<const Sdrte*, SdrtePtr>& memo) {
  auto it = memo.find(c.get());
  if (it != memo.end()) return it->second;
  SdrtePtr v = project_node(c, sigmaPrime, memo);
  return memo[c.get()] = v;
}

}  // namespace

SdrtePtr project(const SdrtePtr& c, const Alphabet& sigmaPrime) {
  std::map<const Sdrte*, SdrtePtr> memo;
  return project_rec(c, sigmaPrime, memo);
}

// ---------------------------------------------------------------------------
// k-star elimination

namespace {

Sym fresh_marker(Alphabet& used) {
  for (Sym cand : {(Sym)'#', (Sym)'$', (Sym)'%', (Sym)'&', (Sym)'@',
                   (Sym)'!'})
    if (!alphabet_contains(used, cand)) {
      used = alphabet_union(used, Alphabet{cand});
      return cand;
    }
  for (Sym cand = 0x80; cand < 0x100; ++cand)
    if (!alphabet_contains(used, cand)) {
      used = alphabet_union(used, Alphabet{cand});
      return cand;
    }
  throw std::runtime_error("fresh_marker: alphabet exhausted");
}

// identity over Σ* as a 1-star of single-letter copies
SdrtePtr identity_expr(const Alphabet& sigma) {
  SdrtePtr body = Sdrte::bot();
  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it) {
    RegexPtr l = Regex::letter(*it);
    body = Sdrte::ite(l, Sdrte::constant(std::string(1, (char)*it)), body);
  }
  return Sdrte::star(1, Regex::letters(sigma), body);
}

SdrtePtr rewrite_node(const SdrtePtr& c, Alphabet& used);

SdrtePtr rewrite_star(int k, const RegexPtr& l, const SdrtePtr& f,
                      Alphabet& used) {
  if (k == 1) return Sdrte::star(1, l, f);
  Alphabet sigma = alphabet_union(regex_letters(l), f->input);
  Sym dollar = fresh_marker(used);
  Sym hash = fresh_marker(used);
  RegexPtr sig = Regex::letters(sigma);
  RegexPtr sigStar = Regex::star(sig);
  RegexPtr rHash = Regex::letter(hash), rDollar = Regex::letter(dollar);

  // f₁ marks every L-factor u as u$u#
  SdrtePtr f1 = Sdrte::star(
      1, l,
      Sdrte::cauchy(Sdrte::dup(dollar),
                    sdrte_restrict(Regex::eps(),
                                   Sdrte::constant(std::string(1, (char)hash)))));

  // g reassembles a window of k consecutive factors from k−1 marked pairs
  SdrtePtr id = identity_expr(sigma);
  SdrtePtr g = Sdrte::cauchy(
      id, sdrte_restrict(Regex::cat(rHash, Regex::cat(sigStar, rDollar)),
                         Sdrte::constant("")));
  SdrtePtr gTail = Sdrte::cauchy(
      Sdrte::cauchy(id, sdrte_restrict(rHash, Sdrte::constant(""))),
      Sdrte::cauchy(id, sdrte_restrict(rDollar, Sdrte::constant(""))));
  SdrtePtr gAll = gTail;
  for (int i = 0; i < k - 2; ++i) gAll = Sdrte::cauchy(g, gAll);

  RegexPtr pair = Regex::cat(sigStar, Regex::cat(rHash,
                             Regex::cat(sigStar, rDollar)));
  SdrtePtr inner = rewrite_star(k - 1, pair, Sdrte::compose(f, gAll), used);
  SdrtePtr middle = Sdrte::ite(
      Regex::eps(), Sdrte::constant(""),
      Sdrte::cauchy(
          sdrte_restrict(Regex::cat(sigStar, rDollar), Sdrte::constant("")),
          Sdrte::cauchy(inner, sdrte_restrict(Regex::cat(sigStar, rHash),
                                              Sdrte::constant("")))));
  return Sdrte::compose(middle, f1);
}

SdrtePtr rewrite_node(const SdrtePtr& c, Alphabet& used) {
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
    case SdKind::Dup:
    case SdKind::Rev:
      return c;
    case SdKind::Ite:
      return Sdrte::ite(c->lang, rewrite_node(c->left, used),
                        rewrite_node(c->right, used));
    case SdKind::Had:
      return Sdrte::had(rewrite_node(c->left, used),
                        rewrite_node(c->right, used));
    case SdKind::Cauchy:
      return Sdrte::cauchy(rewrite_node(c->left, used),
                           rewrite_node(c->right, used));
    case SdKind::Compose:
      return Sdrte::compose(rewrite_node(c->left, used),
                            rewrite_node(c->right, used));
    case SdKind::Star:
      return rewrite_star(c->k, c->lang, rewrite_node(c->left, used), used);
    case SdKind::RStar: {
      SdrtePtr f = rewrite_node(c->left, used);
      if (c->k == 1) return Sdrte::rstar(1, c->lang, f);
      // swap window order by reversing inside and outside the plain star
      SdrtePtr star = rewrite_star(c->k, c->lang,
                                   Sdrte::compose(Sdrte::rev(), f), used);
      return Sdrte::compose(Sdrte::rev(), star);
    }
  }
  throw std::logic_error("rewrite_node: unreachable");
}

}  // namespace

SdrtePtr rewrite_kstar(const SdrtePtr& c) {
  Alphabet used = alphabet_union(c->input, c->output);
  return rewrite_node(c, used);
}

}  // namespace sdt
