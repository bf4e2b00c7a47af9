// regex.cc -- regular expression AST, parser, printer
#include "sdt/regex.hh"

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

namespace sdt {

Alphabet alphabet_from_string(const std::string& chars) {
  std::set<Sym> s;
  for (unsigned char c : chars) s.insert((Sym)c);
  return Alphabet(s.begin(), s.end());
}

std::string alphabet_to_string(const Alphabet& a) {
  std::string out;
  for (Sym s : a) out += (char)s;
  return out;
}

bool alphabet_contains(const Alphabet& a, Sym s) {
  return std::binary_search(a.begin(), a.end(), s);
}

Alphabet alphabet_union(const Alphabet& a, const Alphabet& b) {
  Alphabet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

Alphabet alphabet_minus(const Alphabet& a, const Alphabet& b) {
  Alphabet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// Nodes are hash-consed: structurally equal expressions built through the
// constructors share one node, so equality of (sub)expressions is pointer
// equality and DAG-aware algorithms get maximal sharing.  The intern table
// holds weak references; expired entries are overwritten on collision and
// swept when the table has mostly died.
static RegexPtr mk(RxKind k, Sym sym, RegexPtr l, RegexPtr r) {
  using Key = std::tuple<RxKind, Sym, const Regex*, const Regex*>;
  static std::map<Key, std::weak_ptr<const Regex>> intern;
  static size_t sweepAt = 1024;
  static std::mutex mu;
  Key key{k, sym, l.get(), r.get()};
  std::lock_guard<std::mutex> lk(mu);
  auto it = intern.find(key);
  if (it != intern.end())
    if (auto hit = it->second.lock()) return hit;
  auto e = std::make_shared<Regex>();
  e->kind = k;
  e->sym = sym;
  e->left = std::move(l);
  e->right = std::move(r);
  intern[key] = e;
  if (intern.size() >= sweepAt) {
    for (auto i = intern.begin(); i != intern.end();)
      i = i->second.expired() ? intern.erase(i) : std::next(i);
    sweepAt = std::max<size_t>(1024, intern.size() * 2);
  }
  return e;
}

RegexPtr Regex::empty() {
  static RegexPtr e = mk(RxKind::Empty, 0, nullptr, nullptr);
  return e;
}
RegexPtr Regex::eps() {
  static RegexPtr e = mk(RxKind::Eps, 0, nullptr, nullptr);
  return e;
}
RegexPtr Regex::letter(Sym a) { return mk(RxKind::Letter, a, nullptr, nullptr); }
RegexPtr Regex::alt(RegexPtr l, RegexPtr r) {
  return mk(RxKind::Union, 0, std::move(l), std::move(r));
}
RegexPtr Regex::cat(RegexPtr l, RegexPtr r) {
  return mk(RxKind::Concat, 0, std::move(l), std::move(r));
}
RegexPtr Regex::star(RegexPtr e) {
  return mk(RxKind::Star, 0, std::move(e), nullptr);
}

RegexPtr Regex::alt_all(const std::vector<RegexPtr>& es) {
  if (es.empty()) return empty();
  RegexPtr acc = es[0];
  for (size_t i = 1; i < es.size(); ++i) acc = alt(acc, es[i]);
  return acc;
}

RegexPtr Regex::cat_all(const std::vector<RegexPtr>& es) {
  if (es.empty()) return eps();
  RegexPtr acc = es[0];
  for (size_t i = 1; i < es.size(); ++i) acc = cat(acc, es[i]);
  return acc;
}

RegexPtr Regex::letters(const Alphabet& a) {
  std::vector<RegexPtr> es;
  for (Sym s : a) es.push_back(letter(s));
  return alt_all(es);
}

RegexPtr Regex::word(const std::string& w) {
  std::vector<RegexPtr> es;
  for (unsigned char c : w) es.push_back(letter((Sym)c));
  return cat_all(es);
}

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  const Alphabet* alphabet;  // null: accept any letter

  explicit Parser(const std::string& t, const Alphabet* a)
      : text(t), alphabet(a) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw RegexSyntaxError(msg + " at offset " + std::to_string(pos), pos);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  RegexPtr parse() {
    RegexPtr e = parse_union();
    if (!eof()) fail("unexpected character");
    return e;
  }

  RegexPtr parse_union() {
    RegexPtr e = parse_concat();
    while (!eof() && peek() == '|') {
      ++pos;
      e = Regex::alt(e, parse_concat());
    }
    return e;
  }

  bool at_atom() const {
    if (eof()) return false;
    char c = peek();
    return c != '|' && c != ')' && c != '*';
  }

  RegexPtr parse_concat() {
    if (!at_atom()) {
      // empty concatenation only legal as `()` handled in atom; elsewhere
      // it means a unit like `a||b` -- treat as epsilon
      return Regex::eps();
    }
    RegexPtr e = parse_postfix();
    while (at_atom()) e = Regex::cat(e, parse_postfix());
    return e;
  }

  RegexPtr parse_postfix() {
    RegexPtr e = parse_atom();
    while (!eof() && peek() == '*') {
      ++pos;
      e = Regex::star(e);
    }
    return e;
  }

  RegexPtr parse_atom() {
    if (eof()) fail("unexpected end of input");
    char c = peek();
    if (c == '(') {
      ++pos;
      if (!eof() && peek() == ')') {
        ++pos;
        return Regex::eps();
      }
      RegexPtr e = parse_union();
      if (eof() || peek() != ')') fail("expected ')'");
      ++pos;
      return e;
    }
    if (c == '0') {
      ++pos;
      return Regex::empty();
    }
    if (c == '\\') {
      ++pos;
      if (eof()) fail("dangling escape");
      char esc = text[pos++];
      if (esc == 'x') {
        if (pos + 2 > text.size() || !isxdigit((unsigned char)text[pos]) ||
            !isxdigit((unsigned char)text[pos + 1]))
          fail("\\x expects two hex digits");
        int v = std::stoi(text.substr(pos, 2), nullptr, 16);
        pos += 2;
        return make_letter((char)v);
      }
      static const std::string kEscapable = "#$|()\\0*";
      if (kEscapable.find(esc) == std::string::npos) {
        --pos;
        fail("unknown escape");
      }
      return make_letter(esc);
    }
    ++pos;
    return make_letter(c);
  }

  RegexPtr make_letter(char c) {
    Sym s = (Sym)(unsigned char)c;
    if (alphabet && !alphabet_contains(*alphabet, s)) {
      --pos;
      fail(std::string("letter '") + c + "' outside alphabet");
    }
    return Regex::letter(s);
  }
};

}  // namespace

RegexPtr parse_regex(const std::string& text, const Alphabet& alphabet) {
  Parser p(text, &alphabet);
  return p.parse();
}

RegexPtr parse_regex(const std::string& text) {
  Parser p(text, nullptr);
  return p.parse();
}

// --------------------------------------------------------------- printing

namespace {

struct PrintCapReached {};

// precedence: 0 union, 1 concat, 2 postfix/atom
void print_rec(const RegexPtr& e, int prec, std::string& out,
               size_t cap = SIZE_MAX) {
  if (out.size() >= cap) throw PrintCapReached{};
  auto paren = [&](int inner, auto&& body) {
    if (inner < prec) out += '(';
    body();
    if (inner < prec) out += ')';
  };
  switch (e->kind) {
    case RxKind::Empty:
      out += '0';
      break;
    case RxKind::Eps:
      out += "()";
      break;
    case RxKind::Letter: {
      char c = (char)e->sym;
      static const std::string kEscapable = "#$|()\\0*";
      if (e->sym < 0x20 || e->sym > 0x7e) {
        // non-printable symbols should not normally be printed; render as \xNN
        char buf[8];
        snprintf(buf, sizeof buf, "\\x%02x", (unsigned)e->sym & 0xff);
        out += buf;
      } else if (kEscapable.find(c) != std::string::npos) {
        out += '\\';
        out += c;
      } else {
        out += c;
      }
      break;
    }
    case RxKind::Union:
      paren(0, [&] {
        print_rec(e->left, 0, out, cap);
        out += '|';
        print_rec(e->right, 1, out, cap);
      });
      break;
    case RxKind::Concat:
      paren(1, [&] {
        print_rec(e->left, 1, out, cap);
        print_rec(e->right, 2, out, cap);
      });
      break;
    case RxKind::Star:
      paren(2, [&] { print_rec(e->left, 3, out, cap); });
      out += '*';
      break;
  }
}

}  // namespace

std::string print_regex(const RegexPtr& e) {
  std::string out;
  print_rec(e, 0, out);
  return out;
}

std::string print_regex_capped(const RegexPtr& e, size_t maxLen) {
  std::string out;
  try {
    print_rec(e, 0, out, maxLen);
  } catch (const PrintCapReached&) {
    out.resize(std::min(out.size(), maxLen));
    out += "...";
  }
  return out;
}

// Expressions are shared DAGs, often with far more paths than nodes, so every
// traversal below memoizes per node.

static void collect_letters(const RegexPtr& e, std::set<Sym>& s,
                            std::set<const Regex*>& seen) {
  if (!seen.insert(e.get()).second) return;
  switch (e->kind) {
    case RxKind::Letter:
      s.insert(e->sym);
      break;
    case RxKind::Union:
    case RxKind::Concat:
      collect_letters(e->left, s, seen);
      collect_letters(e->right, s, seen);
      break;
    case RxKind::Star:
      collect_letters(e->left, s, seen);
      break;
    default:
      break;
  }
}

Alphabet regex_letters(const RegexPtr& e) {
  std::set<Sym> s;
  std::set<const Regex*> seen;
  collect_letters(e, s, seen);
  return Alphabet(s.begin(), s.end());
}

static bool nullable_rec(const RegexPtr& e, std::map<const Regex*, bool>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  bool v = false;
  switch (e->kind) {
    case RxKind::Empty:
    case RxKind::Letter:
      v = false;
      break;
    case RxKind::Eps:
    case RxKind::Star:
      v = true;
      break;
    case RxKind::Union:
      v = nullable_rec(e->left, memo) || nullable_rec(e->right, memo);
      break;
    case RxKind::Concat:
      v = nullable_rec(e->left, memo) && nullable_rec(e->right, memo);
      break;
  }
  memo[e.get()] = v;
  return v;
}

bool regex_nullable(const RegexPtr& e) {
  std::map<const Regex*, bool> memo;
  return nullable_rec(e, memo);
}

static RegexPtr simplify_rec(const RegexPtr& e,
                             std::map<const Regex*, RegexPtr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  RegexPtr out = e;
  switch (e->kind) {
    case RxKind::Empty:
    case RxKind::Eps:
    case RxKind::Letter:
      break;
    case RxKind::Union: {
      // flatten, drop Empty, deduplicate (nodes are interned, so structural
      // equality is pointer equality)
      std::vector<RegexPtr> branches;
      std::set<const Regex*> seen;
      std::vector<RegexPtr> work{e};
      std::vector<RegexPtr> flat;
      while (!work.empty()) {
        RegexPtr cur = work.back();
        work.pop_back();
        if (cur->kind == RxKind::Union) {
          work.push_back(cur->right);
          work.push_back(cur->left);
        } else {
          flat.push_back(cur);
        }
      }
      for (auto& b : flat) {
        RegexPtr sb = simplify_rec(b, memo);
        if (sb->kind == RxKind::Empty) continue;
        if (seen.insert(sb.get()).second) branches.push_back(sb);
      }
      out = Regex::alt_all(branches);
      break;
    }
    case RxKind::Concat: {
      RegexPtr l = simplify_rec(e->left, memo), r = simplify_rec(e->right, memo);
      if (l->kind == RxKind::Empty || r->kind == RxKind::Empty)
        out = Regex::empty();
      else if (l->kind == RxKind::Eps)
        out = r;
      else if (r->kind == RxKind::Eps)
        out = l;
      else
        out = (l == e->left && r == e->right) ? e : Regex::cat(l, r);
      break;
    }
    case RxKind::Star: {
      RegexPtr in = simplify_rec(e->left, memo);
      if (in->kind == RxKind::Empty || in->kind == RxKind::Eps)
        out = Regex::eps();
      else if (in->kind == RxKind::Star)
        out = in;
      else
        out = in == e->left ? e : Regex::star(in);
      break;
    }
  }
  memo[e.get()] = out;
  return out;
}

RegexPtr simplify_regex(const RegexPtr& e) {
  std::map<const Regex*, RegexPtr> memo;
  return simplify_rec(e, memo);
}

static RegexPtr subst_rec(const RegexPtr& e,
                          const std::vector<std::pair<Sym, RegexPtr>>& images,
                          std::map<const Regex*, RegexPtr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  RegexPtr out = e;
  switch (e->kind) {
    case RxKind::Empty:
    case RxKind::Eps:
      break;
    case RxKind::Letter:
      for (auto& [s, img] : images)
        if (s == e->sym) {
          out = img;
          break;
        }
      break;
    case RxKind::Union:
    case RxKind::Concat: {
      RegexPtr l = subst_rec(e->left, images, memo);
      RegexPtr r = subst_rec(e->right, images, memo);
      if (l != e->left || r != e->right)
        out = e->kind == RxKind::Union ? Regex::alt(l, r) : Regex::cat(l, r);
      break;
    }
    case RxKind::Star: {
      RegexPtr in = subst_rec(e->left, images, memo);
      if (in != e->left) out = Regex::star(in);
      break;
    }
  }
  memo[e.get()] = out;
  return out;
}

RegexPtr subst_regex(const RegexPtr& e,
                     const std::vector<std::pair<Sym, RegexPtr>>& images) {
  std::map<const Regex*, RegexPtr> memo;
  return subst_rec(e, images, memo);
}

}  // namespace sdt
