// compile.cc -- expression-to-pipeline compilation, one small stage per step
#include "sdt/compile.hh"

#include <algorithm>
#include <stdexcept>

namespace sdt {

namespace {

std::string letter_str(Sym a) { return std::string(1, (char)a); }

std::string wrap_tag(const std::string& outer, const TwoWayTransducer& s) {
  return s.tag.empty() ? outer : outer + "(" + s.tag + ")";
}

// verbatim-copy self-loops, skipping the letters a state treats specially
void copy_loop(TwoWayTransducer& A, int q, const Alphabet& letters,
               const Alphabet& except = {}) {
  for (Sym a : letters) {
    if (alphabet_contains(except, a)) continue;
    A.add_rule(q, a, q, +1, letter_str(a));
  }
}

void silent_loop(TwoWayTransducer& A, int q, const Alphabet& letters,
                 int move) {
  for (Sym a : letters) A.add_rule(q, a, q, move, "");
}

// ------------------------------------------------------- leaf stages

TwoWayTransducer make_bot() {
  TwoWayTransducer A;
  A.tag = "bot";
  A.add_state("dead");  // no rules, no finals: rejects everything
  return A;
}

TwoWayTransducer make_const(const std::string& v, const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "const";
  int st = A.add_state("start");
  int go = A.add_state("go", true);
  A.initial = st;
  A.add_rule(st, kLeftMark, go, +1, v);
  silent_loop(A, go, copyable, +1);
  return A;
}

// first pass simulates the guard DFA, second pass returns and re-emits the
// input behind a verdict marker (m1 accepted, m2 rejected)
TwoWayTransducer make_guard_two_pass(const Dfa& g, Sym m1, Sym m2,
                                     const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "guard";
  std::vector<int> sim;
  for (int q = 0; q < g.numStates; ++q)
    sim.push_back(A.add_state("g" + std::to_string(q)));
  int bt = A.add_state("yes");
  int bf = A.add_state("no");
  int cp = A.add_state("copy", true);
  A.initial = sim[g.initial];
  A.add_rule(A.initial, kLeftMark, A.initial, +1, "");
  for (int q = 0; q < g.numStates; ++q) {
    for (Sym a : g.alphabet)
      A.add_rule(sim[q], a, sim[g.step(q, a)], +1, "");
    A.add_rule(sim[q], kRightMark, g.finals[q] ? bt : bf, -1, "");
  }
  silent_loop(A, bt, g.alphabet, -1);
  silent_loop(A, bf, g.alphabet, -1);
  A.add_rule(bt, kLeftMark, cp, +1, letter_str(m1));
  A.add_rule(bf, kLeftMark, cp, +1, letter_str(m2));
  copy_loop(A, cp, copyable, {m1, m2});
  return A;
}

// at the verdict marker act: run a on the rest, the marker standing in for
// a's left endmarker; at any marker in pass: copy the rest verbatim
TwoWayTransducer make_dispatch(const TwoWayTransducer& a, Sym act,
                               const Alphabet& pass,
                               const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = wrap_tag("pick", a);
  int sel = A.add_state("sel");
  int cp = A.add_state("copy", true);
  std::vector<int> emb;
  for (int q = 0; q < a.num_states(); ++q)
    emb.push_back(A.add_state("s." + a.stateNames[q], a.finals[q]));
  A.initial = sel;
  A.add_rule(sel, kLeftMark, sel, +1, "");
  const TwoWayTransducer::Rule* r0 = a.rule(a.initial, kLeftMark);
  if (r0) A.add_rule(sel, act, emb[r0->to], +1, letter_str(act) + r0->out);
  Alphabet marks = alphabet_union(pass, {act});
  for (Sym p : pass) A.add_rule(sel, p, cp, +1, letter_str(p));
  copy_loop(A, cp, copyable, marks);
  for (int q = 0; q < a.num_states(); ++q)
    for (auto& [x, r] : a.delta[q]) {
      if (x == act) continue;  // the verdict marker never reappears inside
      Sym on = x == kLeftMark ? act : x;
      A.add_rule(emb[q], on, emb[r.to], x == kLeftMark ? +1 : r.move, r.out);
    }
  return A;
}

TwoWayTransducer make_erase_leading(const Alphabet& marks,
                                    const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "strip-verdict";
  int d0 = A.add_state("drop");
  int cp = A.add_state("copy", true);
  A.initial = d0;
  A.add_rule(d0, kLeftMark, d0, +1, "");
  for (Sym m : marks) A.add_rule(d0, m, cp, +1, "");
  copy_loop(A, cp, copyable, marks);
  return A;
}

TwoWayTransducer make_erase_marker(Sym m, const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "erase-marker";
  int e = A.add_state("copy", true);
  A.initial = e;
  A.add_rule(e, kLeftMark, e, +1, "");
  A.add_rule(e, m, e, +1, "");
  copy_loop(A, e, copyable, {m});
  return A;
}

TwoWayTransducer make_dup_marker(Sym m, const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "dup";
  int c1 = A.add_state("first");
  int bk = A.add_state("back");
  int c2 = A.add_state("second", true);
  A.initial = c1;
  A.add_rule(c1, kLeftMark, c1, +1, "");
  copy_loop(A, c1, copyable, {m});
  A.add_rule(c1, kRightMark, bk, -1, letter_str(m));
  for (Sym a : copyable)
    if (a != m) A.add_rule(bk, a, bk, -1, "");
  A.add_rule(bk, kLeftMark, c2, +1, "");
  copy_loop(A, c2, copyable, {m});
  return A;
}

// emits m after every prefix accepted by d (including the empty prefix and
// the whole word); accepts everything
TwoWayTransducer make_insert_marks(const Dfa& d, Sym m) {
  TwoWayTransducer A;
  A.tag = "mark-splits";
  std::vector<int> sim;
  for (int q = 0; q < d.numStates; ++q)
    sim.push_back(A.add_state("g" + std::to_string(q), true));
  A.initial = sim[d.initial];
  A.add_rule(A.initial, kLeftMark, A.initial, +1,
             d.finals[d.initial] ? letter_str(m) : "");
  for (int q = 0; q < d.numStates; ++q)
    for (Sym a : d.alphabet) {
      int q2 = d.step(q, a);
      A.add_rule(sim[q], a, sim[q2], +1,
                 letter_str((char)a) + (d.finals[q2] ? letter_str(m) : ""));
    }
  return A;
}

TwoWayTransducer make_reverse(const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "reverse";
  int fwd = A.add_state("fwd");
  int bk = A.add_state("back");
  int fin = A.add_state("done", true);
  A.initial = fwd;
  A.add_rule(fwd, kLeftMark, fwd, +1, "");
  silent_loop(A, fwd, copyable, +1);
  A.add_rule(fwd, kRightMark, bk, -1, "");
  for (Sym a : copyable) A.add_rule(bk, a, bk, -1, letter_str(a));
  A.add_rule(bk, kLeftMark, fin, +1, "");
  silent_loop(A, fin, copyable, +1);
  return A;
}

// runs on the reversed string; keeps an m only when the plain letters read
// so far (markers are transparent) are accepted by d
TwoWayTransducer make_prune_marks(const Dfa& d, Sym m) {
  TwoWayTransducer A;
  A.tag = "prune-splits";
  std::vector<int> sim;
  for (int q = 0; q < d.numStates; ++q)
    sim.push_back(A.add_state("g" + std::to_string(q), true));
  A.initial = sim[d.initial];
  A.add_rule(A.initial, kLeftMark, A.initial, +1, "");
  for (int q = 0; q < d.numStates; ++q) {
    for (Sym a : d.alphabet)
      A.add_rule(sim[q], a, sim[d.step(q, a)], +1, letter_str(a));
    A.add_rule(sim[q], m, sim[q], +1, d.finals[q] ? letter_str(m) : "");
  }
  return A;
}

TwoWayTransducer make_one_mark_guard(Sym m, const Alphabet& copyable) {
  TwoWayTransducer A;
  A.tag = "split-unique";
  int z0 = A.add_state("none");
  int z1 = A.add_state("one", true);
  A.initial = z0;
  A.add_rule(z0, kLeftMark, z0, +1, "");
  copy_loop(A, z0, copyable, {m});
  A.add_rule(z0, m, z1, +1, letter_str(m));
  copy_loop(A, z1, copyable, {m});
  return A;
}

}  // namespace

// ------------------------------------------------- public constructors

TwoWayTransducer make_relativize_left(const TwoWayTransducer& a, Sym m,
                                      const Alphabet& copyable,
                                      bool keepMarker) {
  TwoWayTransducer A;
  A.tag = wrap_tag("left-of-mark", a);
  int cp = A.add_state("copy", true);
  std::vector<int> emb;
  for (int q = 0; q < a.num_states(); ++q)
    emb.push_back(A.add_state("s." + a.stateNames[q]));
  A.initial = emb[a.initial];
  for (int q = 0; q < a.num_states(); ++q) {
    for (auto& [x, r] : a.delta[q]) {
      if (x == m) continue;  // m is reserved: it stands in for a's ⊣ here
      A.add_rule(emb[q], x == kRightMark ? m : x, emb[r.to], r.move, r.out);
    }
    if (a.finals[q])
      A.add_rule(emb[q], m, cp, +1, keepMarker ? letter_str(m) : "");
  }
  copy_loop(A, cp, copyable, {m});
  A.input = alphabet_union(alphabet_union(a.input, copyable), {m});
  A.output = alphabet_union(alphabet_union(a.output, copyable),
                            keepMarker ? Alphabet{m} : Alphabet{});
  return A;
}

TwoWayTransducer make_relativize_right(const TwoWayTransducer& a, Sym m,
                                       const Alphabet& copyable,
                                       bool keepMarker) {
  TwoWayTransducer A;
  A.tag = wrap_tag("right-of-mark", a);
  int sk = A.add_state("skip");
  std::vector<int> emb;
  for (int q = 0; q < a.num_states(); ++q)
    emb.push_back(A.add_state("s." + a.stateNames[q], a.finals[q]));
  A.initial = sk;
  A.add_rule(sk, kLeftMark, sk, +1, "");
  copy_loop(A, sk, copyable, {m});
  const TwoWayTransducer::Rule* r0 = a.rule(a.initial, kLeftMark);
  if (r0)
    A.add_rule(sk, m, emb[r0->to], +1,
               (keepMarker ? letter_str(m) : "") + r0->out);
  for (int q = 0; q < a.num_states(); ++q)
    for (auto& [x, r] : a.delta[q]) {
      if (x == m) continue;  // m is reserved: it stands in for a's ⊢ here
      A.add_rule(emb[q], x == kLeftMark ? m : x, emb[r.to],
                 x == kLeftMark ? +1 : r.move, r.out);
    }
  A.input = alphabet_union(alphabet_union(a.input, copyable), {m});
  A.output = alphabet_union(alphabet_union(a.output, copyable),
                            keepMarker ? Alphabet{m} : Alphabet{});
  return A;
}

TwoWayTransducer make_segmentwise(const TwoWayTransducer& a, Sym hash,
                                  bool keepMarker) {
  TwoWayTransducer A;
  A.tag = wrap_tag("per-segment", a);
  std::string hs = keepMarker ? letter_str(hash) : "";
  int st = A.add_state("start");
  int ex = A.add_state("expect");
  int seek = A.add_state("seek", true);
  // a's states split by travel direction, so the # closing a segment (read
  // heading right) and the # opening it (read heading left) act as a's two
  // endmarkers without clashing
  std::vector<int> embL, embR;
  for (int q = 0; q < a.num_states(); ++q) {
    embL.push_back(A.add_state("l." + a.stateNames[q]));
    embR.push_back(A.add_state("r." + a.stateNames[q]));
  }
  A.initial = st;
  A.add_rule(st, kLeftMark, ex, +1, "");
  A.add_rule(ex, hash, seek, +1, hs);
  std::optional<std::string> epsOut = eval(a, "");
  if (epsOut) A.add_rule(seek, hash, seek, +1, *epsOut + hs);
  const TwoWayTransducer::Rule* r0 = a.rule(a.initial, kLeftMark);
  for (int q = 0; q < a.num_states(); ++q) {
    for (auto& [x, r] : a.delta[q]) {
      if (x == hash) continue;  // # is reserved: it plays both endmarkers
      if (x == kLeftMark) {
        A.add_rule(embL[q], hash, embR[r.to], +1, r.out);
      } else if (x == kRightMark) {
        A.add_rule(embR[q], hash, embL[r.to], -1, r.out);
      } else {
        int to = r.move > 0 ? embR[r.to] : embL[r.to];
        A.add_rule(embL[q], x, to, r.move, r.out);
        A.add_rule(embR[q], x, to, r.move, r.out);
        if (r0 && q == r0->to)  // entering a fresh segment at its first letter
          A.add_rule(seek, x, to, r.move, r0->out + r.out);
      }
    }
    if (a.finals[q]) A.add_rule(embR[q], hash, seek, +1, hs);
  }
  A.input = alphabet_union(a.input, {hash});
  A.output = alphabet_union(a.output, keepMarker ? Alphabet{hash} : Alphabet{});
  return A;
}

TwoWayTransducer make_boundary_marker(const RegexPtr& l, const Alphabet& sigma,
                                      Sym hash) {
  Dfa d = regex_to_dfa(Regex::star(l), sigma);
  TwoWayTransducer A;
  A.tag = "factor-marks";
  std::vector<int> sim;
  for (int q = 0; q < d.numStates; ++q)
    sim.push_back(A.add_state("g" + std::to_string(q), d.finals[q]));
  A.initial = sim[d.initial];
  A.add_rule(A.initial, kLeftMark, A.initial, +1, letter_str(hash));
  for (int q = 0; q < d.numStates; ++q)
    for (Sym a : d.alphabet) {
      int q2 = d.step(q, a);
      // over a prefix code, l* accepts exactly at factor boundaries
      A.add_rule(sim[q], a, sim[q2], +1,
                 letter_str(a) + (d.finals[q2] ? letter_str(hash) : ""));
    }
  A.input = sigma;
  A.output = alphabet_union(sigma, {hash});
  return A;
}

TwoWayTransducer make_kwindow(int k, const Alphabet& sigma, Sym hash) {
  if (k < 1) throw std::invalid_argument("make_kwindow: k must be positive");
  TwoWayTransducer A;
  A.tag = "window(" + std::to_string(k) + ")";
  std::string hs = letter_str(hash);
  // state i in 1..k copies the window's i-th block; -k..-1 rewind to the
  // start of the next window; end has just closed a window
  std::vector<int> fwd(k + 1), bwd(k + 1);
  for (int i = 0; i <= k; ++i) fwd[i] = A.add_state(std::to_string(i));
  for (int i = 1; i <= k; ++i) bwd[i] = A.add_state("-" + std::to_string(i));
  int end = A.add_state("end", true);
  A.initial = fwd[0];
  A.add_rule(fwd[0], kLeftMark, fwd[0], +1, "");
  for (int i = 0; i < k; ++i)
    A.add_rule(fwd[i], hash, fwd[i + 1], +1, i == 0 ? hs : "");
  A.add_rule(fwd[k], hash, end, +1, hs);
  for (int i = 1; i <= k; ++i)
    for (Sym a : sigma) A.add_rule(fwd[i], a, fwd[i], +1, letter_str(a));
  for (Sym a : sigma) A.add_rule(end, a, bwd[k], -1, "");
  A.add_rule(end, hash, bwd[k], -1, "");
  for (int i = k; i >= 2; --i)
    A.add_rule(bwd[i], hash, bwd[i - 1], -1, "");
  A.add_rule(bwd[1], hash, fwd[1], +1, "");
  for (int i = k - 1; i >= 1; --i)
    for (Sym a : sigma) A.add_rule(bwd[i], a, bwd[i], -1, "");
  A.input = A.output = alphabet_union(sigma, {hash});
  return A;
}

TwoWayTransducer make_segment_reverse(const Alphabet& sigma, Sym hash) {
  TwoWayTransducer A;
  A.tag = "reverse-segments";
  std::string hs = letter_str(hash);
  int fwd = A.add_state("fwd");
  int rew = A.add_state("rew");
  int scan = A.add_state("scan");
  int cp = A.add_state("copy");
  int done = A.add_state("done", true);
  A.initial = fwd;
  A.add_rule(fwd, kLeftMark, fwd, +1, "");
  silent_loop(A, fwd, sigma, +1);
  A.add_rule(fwd, hash, fwd, +1, "");
  A.add_rule(fwd, kRightMark, rew, -1, hs);
  silent_loop(A, rew, sigma, -1);
  A.add_rule(rew, hash, scan, -1, "");
  silent_loop(A, scan, sigma, -1);
  A.add_rule(scan, hash, cp, +1, "");
  A.add_rule(scan, kLeftMark, done, +1, "");
  copy_loop(A, cp, sigma);
  A.add_rule(cp, hash, rew, -1, hs);
  silent_loop(A, done, sigma, +1);
  A.add_rule(done, hash, done, +1, "");
  A.input = A.output = alphabet_union(sigma, {hash});
  return A;
}

// --------------------------------------------------------- compilation

namespace {

struct Ctx {
  Alphabet sigma;  // the expression's input letters: all guards live here
  Alphabet all;    // sigma + output letters + every marker
  std::vector<Sym> markers;
  size_t next = 0;

  Sym fresh() {
    if (next >= markers.size())
      throw std::runtime_error("compile: marker pool exhausted");
    return markers[next++];
  }
};

int marker_need(const SdrtePtr& c) {
  switch (c->kind) {
    case SdKind::Bot:
    case SdKind::Const:
      return 0;
    case SdKind::Ite:
      return 2 + marker_need(c->left) + marker_need(c->right);
    case SdKind::Had:
    case SdKind::Cauchy:
      return 1 + marker_need(c->left) + marker_need(c->right);
    case SdKind::Star:
    case SdKind::RStar:
      return 3 + marker_need(c->left);
    default:
      return 0;
  }
}

using Stages = std::vector<TwoWayTransducer>;

Stages rec(const SdrtePtr& c, Ctx& ctx);

// guard verdict m picks this branch; the other verdict passes through
void branch_lift(Stages& out, const Stages& body, Sym m, Sym other, Ctx& ctx) {
  for (const auto& s : body)
    out.push_back(make_dispatch(s, m, {other}, ctx.all));
}

Stages rec(const SdrtePtr& c, Ctx& ctx) {
  switch (c->kind) {
    case SdKind::Bot:
      return {make_bot()};
    case SdKind::Const:
      return {make_const(c->value, ctx.all)};
    case SdKind::Ite: {
      Sym m1 = ctx.fresh(), m2 = ctx.fresh();
      Stages out{make_guard_two_pass(regex_to_dfa(c->lang, ctx.sigma), m1, m2,
                                     ctx.all)};
      branch_lift(out, rec(c->left, ctx), m1, m2, ctx);
      branch_lift(out, rec(c->right, ctx), m2, m1, ctx);
      out.push_back(make_erase_leading({m1, m2}, ctx.all));
      return out;
    }
    case SdKind::Had: {
      Sym m = ctx.fresh();
      Stages out{make_dup_marker(m, ctx.all)};
      for (const auto& s : rec(c->left, ctx))
        out.push_back(make_relativize_left(s, m, ctx.all, true));
      for (const auto& s : rec(c->right, ctx))
        out.push_back(make_relativize_right(s, m, ctx.all, true));
      out.push_back(make_erase_marker(m, ctx.all));
      return out;
    }
    case SdKind::Cauchy: {
      Sym m = ctx.fresh();
      Dfa d1 = domain_automaton(c->left, ctx.sigma);
      Dfa d2r = minimize(dfa_reverse(domain_automaton(c->right, ctx.sigma)));
      Stages out{make_insert_marks(d1, m), make_reverse(ctx.all),
                 make_prune_marks(d2r, m), make_reverse(ctx.all),
                 make_one_mark_guard(m, ctx.all)};
      for (const auto& s : rec(c->left, ctx))
        out.push_back(make_relativize_left(s, m, ctx.all, true));
      for (const auto& s : rec(c->right, ctx))
        out.push_back(make_relativize_right(s, m, ctx.all, true));
      out.push_back(make_erase_marker(m, ctx.all));
      return out;
    }
    case SdKind::Star:
    case SdKind::RStar: {
      Sym h = ctx.fresh(), m1 = ctx.fresh(), m2 = ctx.fresh();
      Dfa below = dfa_power_below(regex_to_dfa(c->lang, ctx.sigma), c->k);
      Stages body{make_boundary_marker(c->lang, ctx.sigma, h),
                  make_kwindow(c->k, ctx.sigma, h)};
      if (c->kind == SdKind::RStar)
        body.push_back(make_segment_reverse(ctx.sigma, h));
      for (const auto& s : rec(c->left, ctx))
        body.push_back(make_segmentwise(s, h, true));
      body.push_back(make_erase_marker(h, ctx.all));
      Stages out{make_guard_two_pass(below, m1, m2, ctx.all)};
      branch_lift(out, {make_const("", ctx.all)}, m1, m2, ctx);
      branch_lift(out, body, m2, m1, ctx);
      out.push_back(make_erase_leading({m1, m2}, ctx.all));
      return out;
    }
    default:
      throw std::invalid_argument("compile: extended node");
  }
}

}  // namespace

Pipeline compile(const SdrtePtr& c) {
  if (!c) throw std::invalid_argument("compile: null expression");
  if (!c->is_core())
    throw std::invalid_argument(
        "compile: extended nodes present; rewrite to core first");
  Ctx ctx;
  ctx.sigma = c->input;
  Alphabet base = alphabet_union(c->input, c->output);
  if (alphabet_contains(base, kLeftMark) ||
      alphabet_contains(base, kRightMark))
    throw std::invalid_argument("compile: letters clash with the endmarkers");
  static const std::string kPool =
      "#$%&@!;:_~^?+=[]{}/.,'`|()*-0123456789"
      "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  int need = marker_need(c);
  for (char p : kPool) {
    if ((int)ctx.markers.size() >= need) break;
    Sym s = (Sym)(unsigned char)p;
    if (!alphabet_contains(base, s)) ctx.markers.push_back(s);
  }
  for (Sym s = 0x80; s <= 0xff && (int)ctx.markers.size() < need; ++s)
    if (!alphabet_contains(base, s)) ctx.markers.push_back(s);
  if ((int)ctx.markers.size() < need)
    throw std::runtime_error("compile: marker pool exhausted");
  Alphabet marks(ctx.markers.begin(), ctx.markers.end());
  std::sort(marks.begin(), marks.end());
  ctx.all = alphabet_union(base, marks);
  Pipeline P;
  P.stages = rec(c, ctx);
  for (auto& st : P.stages) st.input = st.output = ctx.all;
  P.check();
  return P;
}

StageReport assert_stage_aperiodicity(const Pipeline& p) {
  StageReport rep;
  for (int i = 0; i < (int)p.stages.size(); ++i) {
    TrMonoid tm = transition_monoid(p.stages[i]);
    AperiodicityResult a = is_aperiodic(*tm.monoid);
    if (!a.aperiodic) {
      rep.ok = false;
      rep.failures.push_back(
          {i, p.stages[i].tag,
           dump_stepset(p.stages[i], tm.payload[a.witness])});
    }
  }
  return rep;
}

}  // namespace sdt
