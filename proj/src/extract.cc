// extract.cc -- from an aperiodic two-way machine to an equivalent
// expression: class-preimage regexes by monoid decomposition, then step
// expressions by structural induction, then endmarker removal
#include "sdt/extract.hh"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include <json.hpp>

#include "sdt/lang.hh"

namespace sdt {

namespace {

RegexPtr rx_simp(const RegexPtr& e) { return simplify_regex(e); }

SdrtePtr eps_on(const RegexPtr& lang) {
  return sdrte_restrict(lang, Sdrte::constant(""));
}

// Disjoint-domain sum where each branch's domain is exactly its guard
// language; the last branch needs no guard.
SdrtePtr guarded_sum(std::vector<std::pair<RegexPtr, SdrtePtr>> branches) {
  std::vector<std::pair<RegexPtr, SdrtePtr>> live;
  for (auto& [g, t] : branches)
    if (g->kind != RxKind::Empty && t->kind != SdKind::Bot)
      live.emplace_back(g, t);
  if (live.empty()) return Sdrte::bot();
  SdrtePtr acc = live.back().second;
  for (int i = (int)live.size() - 2; i >= 0; --i)
    acc = Sdrte::ite(live[i].first, live[i].second, acc);
  return acc;
}

SdrtePtr had_all(const std::vector<SdrtePtr>& ops) {
  SdrtePtr acc = ops.front();
  for (size_t i = 1; i < ops.size(); ++i) acc = Sdrte::had(acc, ops[i]);
  return acc;
}


}  // namespace

// ---------------------------------------------------------------- marked
// substitutions

MarkedSubstitution MarkedSubstitution::make(
    const Alphabet& source, const Alphabet& b1, const Alphabet& b2,
    std::vector<std::pair<Sym, RegexPtr>> images) {
  for (Sym x : b1)
    if (alphabet_contains(b2, x))
      throw std::invalid_argument(
          "marked substitution: target halves are not disjoint");
  Alphabet target = alphabet_union(b1, b2);
  if (images.size() != source.size())
    throw std::invalid_argument(
        "marked substitution: one image per source letter required");
  for (auto& [a, img] : images) {
    if (!alphabet_contains(source, a))
      throw std::invalid_argument("marked substitution: image of a foreign letter");
    for (Sym x : regex_letters(img))
      if (!alphabet_contains(target, x))
        throw std::invalid_argument(
            "marked substitution: image uses a letter outside the target");
  }
  // every image inside B₁*B₂
  Dfa markedShape = regex_to_dfa(
      Regex::cat(Regex::star(Regex::letters(b1)), Regex::letters(b2)), target);
  std::vector<Dfa> dfas;
  for (auto& [a, img] : images) {
    Dfa d = regex_to_dfa(img, target);
    if (auto w = dfa_shortest_word(dfa_difference(d, markedShape)))
      throw std::invalid_argument(
          "marked substitution: image escapes the marked shape at \"" + *w +
          "\"");
    dfas.push_back(std::move(d));
  }
  // pairwise disjointness
  for (size_t i = 0; i < dfas.size(); ++i)
    for (size_t j = i + 1; j < dfas.size(); ++j)
      if (auto w = dfa_shortest_word(dfa_intersect(dfas[i], dfas[j])))
        throw std::invalid_argument(
            "marked substitution: images overlap at \"" + *w + "\"");
  MarkedSubstitution ms;
  ms.source = source;
  ms.b1 = b1;
  ms.b2 = b2;
  ms.images = std::move(images);
  return ms;
}

RegexPtr MarkedSubstitution::apply(const RegexPtr& e) const {
  return subst_regex(e, images);
}

// ---------------------------------------------------------------- class
// preimages

namespace {

// a monoid over a product-closed element subset, with index translations
struct SubMonoid {
  MonoidPtr monoid;
  std::vector<int> toGlobal;
  std::map<int, int> toLocal;
};

SubMonoid restrict_monoid(const MonoidPtr& m, const ElementSet& elems) {
  SubMonoid sub;
  sub.toGlobal.assign(elems.begin(), elems.end());
  for (int i = 0; i < (int)sub.toGlobal.size(); ++i)
    sub.toLocal[sub.toGlobal[i]] = i;
  auto out = std::make_shared<FiniteMonoid>();
  out->size = (int)elems.size();
  out->unit = sub.toLocal.at(m->unit);
  out->table.assign(out->size, std::vector<int>(out->size));
  out->names.resize(out->size);
  for (int i = 0; i < out->size; ++i) {
    out->names[i] = m->name_of(sub.toGlobal[i]);
    for (int j = 0; j < out->size; ++j)
      out->table[i][j] = sub.toLocal.at(m->mul(sub.toGlobal[i], sub.toGlobal[j]));
  }
  sub.monoid = out;
  return sub;
}

std::string letters_detail(const Alphabet& a) {
  std::string s;
  for (Sym x : a) {
    if (!s.empty()) s += ",";
    s += (x >= 0x20 && x < 0x7f) ? std::string(1, (char)x)
                                 : "#" + std::to_string(x);
  }
  return s;
}

std::atomic<Sym> freshSym{0x110000};  // outside any real letter range

// phi surjective onto an aperiodic target
std::map<int, RegexPtr> uss_core(const Morphism& phi, UssTrace* trace) {
  const FiniteMonoid& m = *phi.target;
  Alphabet neutral, active;
  for (Sym a : phi.alphabet)
    (phi.of_sym(a) == m.unit ? neutral : active).push_back(a);

  if (active.empty()) {
    // surjectivity forces the trivial monoid
    if (trace) trace->rule = "trivial";
    std::map<int, RegexPtr> out;
    out[m.unit] = neutral.empty() ? Regex::eps()
                                  : Regex::star(Regex::letters(neutral));
    return out;
  }

  if (!neutral.empty()) {
    // factor the unit-image letters out first: every word is an interleaving
    // of a word over the active letters with runs of neutral ones
    Morphism inner;
    inner.alphabet = active;
    inner.target = phi.target;
    for (Sym a : active) inner.letterImage[a] = phi.of_sym(a);
    UssTrace child;
    auto rec = uss_core(inner, trace ? &child : nullptr);
    std::vector<std::pair<Sym, RegexPtr>> images;
    RegexPtr pad = Regex::star(Regex::letters(neutral));
    for (Sym a : active)
      images.emplace_back(a, Regex::cat(pad, Regex::letter(a)));
    MarkedSubstitution ms =
        MarkedSubstitution::make(active, neutral, active, images);
    std::map<int, RegexPtr> out;
    for (auto& [s, e] : rec) out[s] = rx_simp(Regex::cat(ms.apply(e), pad));
    if (trace) {
      trace->rule = "neutral-letters";
      trace->detail = letters_detail(neutral);
      trace->children.push_back(std::move(child));
    }
    return out;
  }

  Classification cls = classify(m, phi);

  if (cls.kind == Classification::Cyclic) {
    // m = {1, g, ..., gⁿ} with gⁿ⁺¹ = gⁿ; words are graded by the exponent
    // their image reaches, capped at n
    int g = cls.generator;
    int n = m.size - 1;
    std::vector<int> powIdx(m.size, -1);
    int e = m.unit;
    for (int j = 0; j <= n; ++j) {
      powIdx[e] = j;
      e = m.mul(e, g);
    }
    std::vector<Alphabet> cl(n + 1);  // letters by exponent
    for (Sym a : phi.alphabet) cl[powIdx[phi.of_sym(a)]].push_back(a);
    std::vector<RegexPtr> E(n + 1);
    E[0] = Regex::eps();
    for (int j = 1; j < n; ++j) {
      std::vector<RegexPtr> parts{Regex::letters(cl[j])};
      for (int i = 1; i < j; ++i)
        parts.push_back(Regex::cat(E[i], Regex::letters(cl[j - i])));
      E[j] = rx_simp(Regex::alt_all(parts));
    }
    {
      // once the exponent reaches n it stays there: split at the letter
      // achieving it, then allow anything
      std::vector<RegexPtr> parts{Regex::letters(cl[n])};
      for (int i = 1; i < n; ++i)
        for (int j = 1; j <= n; ++j)
          if (i + j >= n)
            parts.push_back(Regex::cat(E[i], Regex::letters(cl[j])));
      E[n] = rx_simp(Regex::cat(Regex::alt_all(parts),
                                Regex::star(Regex::letters(phi.alphabet))));
    }
    std::map<int, RegexPtr> out;
    for (int el = 0; el < m.size; ++el) out[el] = E[powIdx[el]];
    if (trace) {
      trace->rule = "cyclic";
      trace->detail = "generator " + m.name_of(g) + ", height " +
                      std::to_string(n);
    }
    return out;
  }

  if (cls.kind == Classification::IsoUn) {
    // all non-unit elements are left zeros: the first letter decides
    std::map<int, RegexPtr> out;
    RegexPtr any = Regex::star(Regex::letters(phi.alphabet));
    for (int el = 0; el < m.size; ++el) {
      if (el == m.unit) {
        out[el] = Regex::eps();
        continue;
      }
      Alphabet first;
      for (Sym a : phi.alphabet)
        if (phi.of_sym(a) == el) first.push_back(a);
      out[el] = rx_simp(Regex::cat(Regex::letters(first), any));
    }
    if (trace) {
      trace->rule = "left-zero";
      trace->detail = std::to_string(m.size - 1) + " classes";
    }
    return out;
  }

  // split Σ = A ⊎ B where both φ(A*) and φ((A*B)*) generate proper
  // submonoids; solve each side recursively and stitch along Σ* = (A*B)*A*
  const Alphabet& A = cls.A;
  const Alphabet& B = cls.B;

  ElementSet aGens;
  for (Sym a : A) aGens = set_insert(aGens, phi.of_sym(a));
  SubMonoid MA = restrict_monoid(phi.target, submonoid(m, aGens));
  Morphism f;
  f.alphabet = A;
  f.target = MA.monoid;
  for (Sym a : A) f.letterImage[a] = MA.toLocal.at(phi.of_sym(a));
  UssTrace childA;
  auto EA = uss_core(f, trace ? &childA : nullptr);

  ElementSet cElems;
  for (int s : MA.toGlobal)
    for (Sym b : B) cElems = set_insert(cElems, m.mul(s, phi.of_sym(b)));
  SubMonoid MB = restrict_monoid(phi.target, submonoid(m, cElems));
  Alphabet cAlpha;
  std::vector<int> cGlobal(cElems.begin(), cElems.end());
  for (size_t i = 0; i < cGlobal.size(); ++i)
    cAlpha.push_back(freshSym.fetch_add(1));
  Morphism g;
  g.alphabet = cAlpha;
  g.target = MB.monoid;
  for (size_t i = 0; i < cGlobal.size(); ++i)
    g.letterImage[cAlpha[i]] = MB.toLocal.at(cGlobal[i]);
  UssTrace childB;
  auto FB = uss_core(g, trace ? &childB : nullptr);

  // image of the synthetic letter for c: all A-words extended by a B-letter
  // landing on c
  std::vector<std::pair<Sym, RegexPtr>> images;
  for (size_t i = 0; i < cGlobal.size(); ++i) {
    std::vector<RegexPtr> parts;
    for (int sLoc = 0; sLoc < MA.monoid->size; ++sLoc)
      for (Sym b : B)
        if (m.mul(MA.toGlobal[sLoc], phi.of_sym(b)) == cGlobal[i])
          parts.push_back(Regex::cat(EA.at(sLoc), Regex::letter(b)));
    images.emplace_back(cAlpha[i], rx_simp(Regex::alt_all(parts)));
  }
  MarkedSubstitution ms = MarkedSubstitution::make(cAlpha, A, B, images);

  std::map<int, RegexPtr> out;
  for (int el = 0; el < m.size; ++el) {
    std::vector<RegexPtr> parts;
    for (int tLoc = 0; tLoc < MB.monoid->size; ++tLoc)
      for (int rLoc = 0; rLoc < MA.monoid->size; ++rLoc)
        if (m.mul(MB.toGlobal[tLoc], MA.toGlobal[rLoc]) == el)
          parts.push_back(Regex::cat(ms.apply(FB.at(tLoc)), EA.at(rLoc)));
    out[el] = rx_simp(Regex::alt_all(parts));
  }
  if (trace) {
    trace->rule = "split";
    trace->detail =
        "A=" + letters_detail(A) + " B=" + letters_detail(B);
    trace->children.push_back(std::move(childA));
    trace->children.push_back(std::move(childB));
  }
  return out;
}

}  // namespace

std::map<int, RegexPtr> uss_expressions(const Morphism& phi, UssTrace* trace) {
  const FiniteMonoid& m = *phi.target;
  if (!is_aperiodic(m).aperiodic)
    throw std::invalid_argument(
        "uss_expressions: target monoid is not aperiodic");
  ElementSet gens;
  for (Sym a : phi.alphabet) gens = set_insert(gens, phi.of_sym(a));
  ElementSet reach = submonoid(m, gens);

  std::map<int, RegexPtr> out;
  if ((int)reach.size() < m.size) {
    SubMonoid sub = restrict_monoid(phi.target, reach);
    Morphism inner;
    inner.alphabet = phi.alphabet;
    inner.target = sub.monoid;
    for (Sym a : phi.alphabet)
      inner.letterImage[a] = sub.toLocal.at(phi.of_sym(a));
    auto rec = uss_core(inner, trace);
    for (auto& [loc, e] : rec) out[sub.toGlobal[loc]] = e;
  } else {
    out = uss_core(phi, trace);
  }
  for (int el = 0; el < m.size; ++el)
    if (!out.count(el)) out[el] = Regex::empty();
  return out;
}

// ---------------------------------------------------------------- step
// expressions

StepExprTable::StepExprTable(const TwoWayTransducer& a) : a_(a) {
  a_.check();
  tm_ = transition_monoid(a_);
}

const ElementSet& StepExprTable::image(const RegexPtr& e) {
  keep_.emplace(e.get(), e);
  auto it = images_.find(e.get());
  if (it != images_.end()) return it->second;
  const FiniteMonoid& m = *tm_.monoid;
  ElementSet r;
  switch (e->kind) {
    case RxKind::Empty:
      break;
    case RxKind::Eps:
      r = {m.unit};
      break;
    case RxKind::Letter:
      if (!tm_.phi.letterImage.count(e->sym))
        throw std::invalid_argument(
            "step_expr: letter outside the machine's alphabet");
      r = {tm_.phi.of_sym(e->sym)};
      break;
    case RxKind::Union:
      for (int x : image(e->left)) r = set_insert(r, x);
      for (int x : image(e->right)) r = set_insert(r, x);
      break;
    case RxKind::Concat:
      r = set_product(m, image(e->left), image(e->right));
      break;
    case RxKind::Star:
      r = submonoid(m, image(e->left));
      break;
  }
  return images_[e.get()] = std::move(r);
}

RegexPtr StepExprTable::power(const RegexPtr& f, int n) {
  auto key = std::make_pair(f.get(), n);
  auto it = powers_.find(key);
  if (it != powers_.end()) return it->second;
  RegexPtr r = n == 0 ? Regex::eps() : Regex::cat(power(f, n - 1), f);
  return powers_[key] = r;
}

int StepExprTable::width_of(const RegexPtr& f) {
  auto it = widths_.find(f.get());
  if (it != widths_.end()) return it->second;
  const ElementSet& x = image(f);
  auto k = stabilising_index(*tm_.monoid, x, 2 * tm_.monoid->size + 4);
  if (!k)
    throw std::invalid_argument(
        "step_expr: star parser is not stabilising for this machine");
  // shared subterms can print astronomically longer than their node count
  starLog_.emplace_back(print_regex_capped(f, 160), *k);
  return widths_[f.get()] = *k;
}

RegexPtr StepExprTable::slice(const RegexPtr& e, int s) {
  auto key = std::make_pair(e.get(), s);
  auto it = slices_.find(key);
  if (it != slices_.end()) return it->second;
  RegexPtr r;
  if (!set_contains(image(e), s)) {
    r = Regex::empty();
  } else {
    switch (e->kind) {
      case RxKind::Empty:
        r = Regex::empty();
        break;
      case RxKind::Eps:
        r = Regex::eps();
        break;
      case RxKind::Letter:
        r = Regex::letter(e->sym);
        break;
      case RxKind::Union:
        r = rx_simp(Regex::alt(slice(e->left, s), slice(e->right, s)));
        break;
      case RxKind::Concat: {
        const FiniteMonoid& m = *tm_.monoid;
        std::vector<RegexPtr> parts;
        for (int s1 : image(e->left))
          for (int s2 : image(e->right))
            if (m.mul(s1, s2) == s)
              parts.push_back(
                  Regex::cat(slice(e->left, s1), slice(e->right, s2)));
        r = rx_simp(Regex::alt_all(parts));
        break;
      }
      case RxKind::Star: {
        // short words listed per factor count; once k factors are reached
        // the class is frozen, so anything may follow
        int k = width_of(e->left);
        std::vector<RegexPtr> parts;
        for (int n = 0; n < k; ++n)
          parts.push_back(slice(power(e->left, n), s));
        parts.push_back(Regex::cat(slice(power(e->left, k), s), e));
        r = rx_simp(Regex::alt_all(parts));
        break;
      }
    }
  }
  return slices_[key] = r;
}

SdrtePtr StepExprTable::step_expr(const RegexPtr& e, int s, Step x) {
  keep_.emplace(e.get(), e);
  StepKey key{e.get(), s, (int)x.dir, x.from, x.to};
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  SdrtePtr r = build(e, s, x);
  return table_[key] = r;
}

SdrtePtr StepExprTable::build(const RegexPtr& e, int s, Step x) {
  if (!tm_.payload[s].has(x.dir, x.from, x.to)) return Sdrte::bot();
  if (!set_contains(image(e), s)) return Sdrte::bot();
  switch (e->kind) {
    case RxKind::Empty:
      return Sdrte::bot();
    case RxKind::Eps:
      return eps_on(Regex::eps());
    case RxKind::Letter: {
      const TwoWayTransducer::Rule* rule = a_.rule(x.from, e->sym);
      return sdrte_restrict(Regex::letter(e->sym), Sdrte::constant(rule->out));
    }
    case RxKind::Union:
      return guarded_sum({{slice(e->left, s), step_expr(e->left, s, x)},
                          {slice(e->right, s), step_expr(e->right, s, x)}});
    case RxKind::Concat:
      return concat_case(e->left, e->right, s, x);
    case RxKind::Star:
      return star_case(e, s, x);
  }
  return Sdrte::bot();
}

SdrtePtr StepExprTable::zigzag_expr(const RegexPtr& e, int s,
                                    const RegexPtr& f, int t, int p,
                                    StepDir start) {
  keep_.emplace(e.get(), e);
  keep_.emplace(f.get(), f);
  auto key = std::make_tuple(e.get(), s, f.get(), t, p, (int)start);
  auto it = zigzags_.find(key);
  if (it != zigzags_.end()) return it->second;

  SdrtePtr r;
  ZigzagResult z = zigzag(tm_.payload[s], tm_.payload[t], p, start);
  if (!z.exit) {
    r = Sdrte::bot();
  } else if (z.steps.empty()) {
    r = eps_on(rx_simp(Regex::cat(slice(e, s), slice(f, t))));
  } else {
    std::vector<SdrtePtr> ops;
    SdrtePtr leftPart;
    for (const Step& st : z.steps) {
      if (st.dir == StepDir::RR) {
        leftPart = step_expr(e, s, st);
      } else {
        SdrtePtr lp = leftPart ? leftPart : eps_on(slice(e, s));
        ops.push_back(Sdrte::cauchy(lp, step_expr(f, t, st)));
        leftPart = nullptr;
      }
    }
    if (leftPart) ops.push_back(Sdrte::cauchy(leftPart, eps_on(slice(f, t))));
    r = had_all(ops);
  }
  return zigzags_[key] = r;
}

SdrtePtr StepExprTable::concat_case(const RegexPtr& l, const RegexPtr& r,
                                    int el, Step x) {
  const FiniteMonoid& m = *tm_.monoid;
  std::vector<std::pair<RegexPtr, SdrtePtr>> branches;
  for (int s : image(l)) {
    for (int t : image(r)) {
      if (m.mul(s, t) != el) continue;
      const StepSet& S = tm_.payload[s];
      const StepSet& T = tm_.payload[t];
      SdrtePtr term;
      switch (x.dir) {
        case StepDir::LL: {
          auto it = S.leftEntry.find(x.from);
          if (it == S.leftEntry.end()) break;
          if (it->second.first == StepDir::LL) {
            if (it->second.second != x.to) break;
            term = Sdrte::cauchy(step_expr(l, s, x), eps_on(slice(r, t)));
            break;
          }
          int p1 = it->second.second;
          ZigzagResult z = zigzag(S, T, p1, StepDir::LL);
          if (!z.exit || z.exit->first != StepDir::LL) break;
          int q1 = z.exit->second;
          if (!S.has(StepDir::RL, q1, x.to)) break;
          term = had_all(
              {Sdrte::cauchy(step_expr(l, s, {StepDir::LR, x.from, p1}),
                             eps_on(slice(r, t))),
               zigzag_expr(l, s, r, t, p1, StepDir::LL),
               Sdrte::cauchy(step_expr(l, s, {StepDir::RL, q1, x.to}),
                             eps_on(slice(r, t)))});
          break;
        }
        case StepDir::LR: {
          auto it = S.leftEntry.find(x.from);
          if (it == S.leftEntry.end() || it->second.first != StepDir::LR)
            break;
          int p1 = it->second.second;
          ZigzagResult z = zigzag(S, T, p1, StepDir::LL);
          if (!z.exit || z.exit->first != StepDir::RR) break;
          int q1 = z.exit->second;
          if (!T.has(StepDir::LR, q1, x.to)) break;
          term = had_all(
              {Sdrte::cauchy(step_expr(l, s, {StepDir::LR, x.from, p1}),
                             eps_on(slice(r, t))),
               zigzag_expr(l, s, r, t, p1, StepDir::LL),
               Sdrte::cauchy(eps_on(slice(l, s)),
                             step_expr(r, t, {StepDir::LR, q1, x.to}))});
          break;
        }
        case StepDir::RL: {
          auto it = T.rightEntry.find(x.from);
          if (it == T.rightEntry.end() || it->second.first != StepDir::RL)
            break;
          int p1 = it->second.second;
          ZigzagResult z = zigzag(S, T, p1, StepDir::RR);
          if (!z.exit || z.exit->first != StepDir::LL) break;
          int q1 = z.exit->second;
          if (!S.has(StepDir::RL, q1, x.to)) break;
          term = had_all(
              {Sdrte::cauchy(eps_on(slice(l, s)),
                             step_expr(r, t, {StepDir::RL, x.from, p1})),
               zigzag_expr(l, s, r, t, p1, StepDir::RR),
               Sdrte::cauchy(step_expr(l, s, {StepDir::RL, q1, x.to}),
                             eps_on(slice(r, t)))});
          break;
        }
        case StepDir::RR: {
          auto it = T.rightEntry.find(x.from);
          if (it == T.rightEntry.end()) break;
          if (it->second.first == StepDir::RR) {
            if (it->second.second != x.to) break;
            term = Sdrte::cauchy(eps_on(slice(l, s)), step_expr(r, t, x));
            break;
          }
          int p1 = it->second.second;
          ZigzagResult z = zigzag(S, T, p1, StepDir::RR);
          if (!z.exit || z.exit->first != StepDir::RR) break;
          int q1 = z.exit->second;
          if (!T.has(StepDir::LR, q1, x.to)) break;
          term = had_all(
              {Sdrte::cauchy(eps_on(slice(l, s)),
                             step_expr(r, t, {StepDir::RL, x.from, p1})),
               zigzag_expr(l, s, r, t, p1, StepDir::RR),
               Sdrte::cauchy(eps_on(slice(l, s)),
                             step_expr(r, t, {StepDir::LR, q1, x.to}))});
          break;
        }
      }
      if (!term || term->kind == SdKind::Bot) continue;
      branches.emplace_back(rx_simp(Regex::cat(slice(l, s), slice(r, t))),
                            term);
    }
  }
  return guarded_sum(std::move(branches));
}

SdrtePtr StepExprTable::star_case(const RegexPtr& e, int s, Step x) {
  const FiniteMonoid& m = *tm_.monoid;
  const RegexPtr& f = e->left;
  int k = width_of(f);
  RegexPtr fk = power(f, k);

  std::vector<std::pair<RegexPtr, SdrtePtr>> branches;
  for (int n = 0; n < k; ++n) {
    RegexPtr fn = power(f, n);
    if (!set_contains(image(fn), s)) continue;
    branches.emplace_back(slice(fn, s), step_expr(fn, s, x));
  }

  switch (x.dir) {
    case StepDir::LL: {
      // long inputs: the run never leaves the first k factors
      if (!set_contains(image(fk), s)) break;
      branches.emplace_back(
          rx_simp(Regex::cat(slice(fk, s), e)),
          Sdrte::cauchy(step_expr(fk, s, x), eps_on(e)));
      break;
    }
    case StepDir::LR: {
      // forward-progressing: a head over the first k factors, then one
      // window product per further factor
      if (!set_contains(image(fk), s)) break;
      std::vector<std::pair<RegexPtr, SdrtePtr>> win;
      for (int s1 : image(fk)) {
        for (int s2 : image(f)) {
          ZigzagResult z =
              zigzag(tm_.payload[s1], tm_.payload[s2], x.to, StepDir::LL);
          if (!z.exit || z.exit->first != StepDir::RR) continue;
          int q1 = z.exit->second;
          if (!tm_.payload[s2].has(StepDir::LR, q1, x.to)) continue;
          win.emplace_back(
              rx_simp(Regex::cat(slice(fk, s1), slice(f, s2))),
              Sdrte::had(zigzag_expr(fk, s1, f, s2, x.to, StepDir::LL),
                         Sdrte::cauchy(eps_on(slice(fk, s1)),
                                       step_expr(f, s2,
                                                 {StepDir::LR, q1, x.to}))));
        }
      }
      branches.emplace_back(
          rx_simp(Regex::cat(slice(fk, s), e)),
          Sdrte::had(Sdrte::cauchy(step_expr(fk, s, x), eps_on(e)),
                     Sdrte::star(k + 1, f, guarded_sum(std::move(win)))));
      break;
    }
    case StepDir::RL: {
      // backward-progressing: window products right to left, then a tail
      // over the k leftmost factors
      std::vector<std::pair<RegexPtr, SdrtePtr>> win;
      for (int s1 : image(f)) {
        for (int s2 : image(fk)) {
          auto re = tm_.payload[s2].rightEntry.find(x.from);
          if (re == tm_.payload[s2].rightEntry.end() ||
              re->second.first != StepDir::RL)
            continue;
          int p1 = re->second.second;
          ZigzagResult z =
              zigzag(tm_.payload[s1], tm_.payload[s2], p1, StepDir::RR);
          if (!z.exit || z.exit->first != StepDir::LL) continue;
          int q1 = z.exit->second;
          auto re2 = tm_.payload[s1].rightEntry.find(q1);
          if (re2 == tm_.payload[s1].rightEntry.end() ||
              re2->second.first != StepDir::RL)
            continue;
          int q2 = re2->second.second;
          win.emplace_back(
              rx_simp(Regex::cat(slice(f, s1), slice(fk, s2))),
              Sdrte::had(zigzag_expr(f, s1, fk, s2, p1, StepDir::RR),
                         Sdrte::cauchy(step_expr(f, s1, {StepDir::RL, q1, q2}),
                                       eps_on(slice(fk, s2)))));
        }
      }
      std::vector<std::pair<RegexPtr, SdrtePtr>> head;
      std::vector<RegexPtr> headLangs;
      for (int s1 : image(e)) {
        for (int s2 : image(fk)) {
          if (m.mul(s1, s2) != s) continue;
          auto re = tm_.payload[s2].rightEntry.find(x.from);
          if (re == tm_.payload[s2].rightEntry.end() ||
              re->second.first != StepDir::RL)
            continue;
          int p1 = re->second.second;
          RegexPtr lang = rx_simp(Regex::cat(slice(e, s1), slice(fk, s2)));
          head.emplace_back(
              lang,
              Sdrte::cauchy(eps_on(slice(e, s1)),
                            step_expr(fk, s2, {StepDir::RL, x.from, p1})));
          headLangs.push_back(lang);
        }
      }
      if (head.empty()) break;
      branches.emplace_back(
          rx_simp(Regex::alt_all(headLangs)),
          Sdrte::had(guarded_sum(std::move(head)),
                     Sdrte::rstar(k + 1, f, guarded_sum(std::move(win)))));
      break;
    }
    case StepDir::RR: {
      // either the run stays within the last k factors...
      for (int s1 : image(e)) {
        for (int s2 : image(fk)) {
          if (m.mul(s1, s2) != s) continue;
          if (!tm_.payload[s2].has(StepDir::RR, x.from, x.to)) continue;
          branches.emplace_back(
              rx_simp(Regex::cat(slice(e, s1), slice(fk, s2))),
              Sdrte::cauchy(eps_on(slice(e, s1)), step_expr(fk, s2, x)));
        }
      }
      // ...or it turns around exactly once, at a uniquely determined factor
      for (int r : image(e)) {
        for (int s1 : image(f)) {
          for (int s2 : image(fk)) {
            if (m.mul(r, m.mul(s1, s2)) != s) continue;
            auto re = tm_.payload[s2].rightEntry.find(x.from);
            if (re == tm_.payload[s2].rightEntry.end() ||
                re->second.first != StepDir::RL)
              continue;
            int p1 = re->second.second;
            ZigzagResult z =
                zigzag(tm_.payload[s1], tm_.payload[s2], p1, StepDir::RR);
            if (!z.exit || z.exit->first != StepDir::RR) continue;
            int q1 = z.exit->second;
            if (!tm_.payload[s2].has(StepDir::LR, q1, x.to)) continue;
            SdrtePtr inner = had_all(
                {Sdrte::cauchy(eps_on(slice(f, s1)),
                               step_expr(e, s2, {StepDir::RL, x.from, p1})),
                 Sdrte::cauchy(zigzag_expr(f, s1, fk, s2, p1, StepDir::RR),
                               eps_on(e)),
                 Sdrte::cauchy(eps_on(slice(f, s1)),
                               step_expr(e, s2, {StepDir::LR, q1, x.to}))});
            branches.emplace_back(
                rx_simp(Regex::cat(slice(e, r),
                                   Regex::cat(slice(f, s1), slice(e, s2)))),
                Sdrte::cauchy(eps_on(slice(e, r)), inner));
          }
        }
      }
      break;
    }
  }
  return guarded_sum(std::move(branches));
}

// ---------------------------------------------------------------- full
// extraction

namespace {

nlohmann::json trace_json(const UssTrace& t) {
  nlohmann::json j;
  j["rule"] = t.rule;
  if (!t.detail.empty()) j["detail"] = t.detail;
  for (const UssTrace& c : t.children) j["children"].push_back(trace_json(c));
  return j;
}

}  // namespace

SdrtePtr extract(const TwoWayTransducer& a, std::string* traceJson) {
  a.check();
  if (!is_aperiodic_2dft(a))
    throw std::invalid_argument("extract: machine is not aperiodic");

  StepExprTable table(a);
  const TrMonoid& tm = table.transition();

  Morphism phiSigma;
  phiSigma.alphabet = a.input;
  phiSigma.target = tm.monoid;
  for (Sym x : a.input) phiSigma.letterImage[x] = tm.phi.of_sym(x);
  UssTrace trace;
  auto classes = uss_expressions(phiSigma, traceJson ? &trace : nullptr);

  std::vector<RegexPtr> parts;
  for (auto& [s, e] : classes)
    if (e->kind != RxKind::Empty) parts.push_back(e);
  RegexPtr marked =
      Regex::cat(Regex::letter(kLeftMark), Regex::alt_all(parts));
  RegexPtr dash = Regex::letter(kRightMark);
  int tEl = tm.phi.of_sym(kRightMark);
  int q0 = a.initial;

  // accepted input shapes: cross the marked word left to right, then zigzag
  // off the right endmarker until about to leave in a final state
  std::vector<std::pair<RegexPtr, SdrtePtr>> branches;
  for (int s : table.image(marked)) {
    const StepSet& S = tm.payload[s];
    auto le = S.leftEntry.find(q0);
    if (le == S.leftEntry.end() || le->second.first != StepDir::LR) continue;
    int p = le->second.second;
    ZigzagResult z = zigzag(S, tm.payload[tEl], p, StepDir::LL);
    if (!z.exit || z.exit->first != StepDir::RR) continue;
    if (!a.finals[z.exit->second]) continue;
    SdrtePtr term = Sdrte::had(
        Sdrte::cauchy(table.step_expr(marked, s, {StepDir::LR, q0, p}),
                      eps_on(dash)),
        table.zigzag_expr(marked, s, dash, tEl, p, StepDir::LL));
    branches.emplace_back(rx_simp(Regex::cat(table.slice(marked, s), dash)),
                          term);
  }
  SdrtePtr withMarks = guarded_sum(std::move(branches));

  Alphabet full =
      alphabet_union(a.input, Alphabet{kLeftMark, kRightMark});
  SdrtePtr inner = left_quotient(kLeftMark, withMarks, full);
  SdrtePtr bare = right_quotient(kRightMark, inner, full);
  SdrtePtr result = simplify_sdrte(project(bare, a.input), a.input);

  if (traceJson) {
    nlohmann::json j;
    j["classes"] = trace_json(trace);
    j["stars"] = nlohmann::json::array();
    for (auto& [parser, k] : table.star_widths())
      j["stars"].push_back({{"parser", parser}, {"width", k}});
    *traceJson = j.dump(2);
  }
  return result;
}

}  // namespace sdt
