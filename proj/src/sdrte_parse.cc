// sdrte_parse.cc -- text syntax for transducer expressions
#include <cctype>
#include <cstdio>

#include "sdt/sdrte.hh"

namespace sdt {

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw SdrteSyntaxError(msg + " at offset " + std::to_string(pos), pos);
  }

  void skip_ws() {
    while (pos < text.size() && isspace((unsigned char)text[pos])) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && isalnum((unsigned char)text[pos])) ++pos;
    if (pos == start) fail("expected an expression keyword");
    return text.substr(start, pos - start);
  }

  // quoted output word with \", \\ and \xNN escapes
  std::string quoted() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '"') fail("expected '\"'");
    ++pos;
    std::string out;
    while (pos < text.size() && text[pos] != '"') {
      char c = text[pos++];
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos >= text.size()) fail("dangling escape in string");
      char esc = text[pos++];
      if (esc == 'x') {
        if (pos + 2 > text.size() || !isxdigit((unsigned char)text[pos]) ||
            !isxdigit((unsigned char)text[pos + 1]))
          fail("\\x expects two hex digits");
        out += (char)std::stoi(text.substr(pos, 2), nullptr, 16);
        pos += 2;
      } else if (esc == '"' || esc == '\\') {
        out += esc;
      } else {
        fail("unknown string escape");
      }
    }
    if (pos >= text.size()) fail("unterminated string");
    ++pos;
    return out;
  }

  // a regex argument: raw text up to the next comma/paren at depth 0
  RegexPtr regex_arg() {
    skip_ws();
    size_t start = pos;
    int depth = 0;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '\\' && pos + 1 < text.size()) {
        pos += 2;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++pos;
    }
    std::string raw = text.substr(start, pos - start);
    while (!raw.empty() && isspace((unsigned char)raw.back())) raw.pop_back();
    try {
      return parse_regex(raw);
    } catch (const RegexSyntaxError& e) {
      throw SdrteSyntaxError(std::string("bad language argument: ") + e.what(),
                             start + e.offset);
    }
  }

  int int_arg() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && isdigit((unsigned char)text[pos])) ++pos;
    if (pos == start) fail("expected an integer");
    return std::stoi(text.substr(start, pos - start));
  }

  Sym char_arg() {
    skip_ws();
    if (pos < text.size() && text[pos] == '"') {
      std::string s = quoted();
      if (s.size() != 1) fail("marker must be a single character");
      return (Sym)(unsigned char)s[0];
    }
    if (pos >= text.size()) fail("expected a marker character");
    return (Sym)(unsigned char)text[pos++];
  }

  SdrtePtr expr() {
    std::string kw = ident();
    if (kw == "bot") return Sdrte::bot();
    if (kw == "rev") return Sdrte::rev();
    if (kw == "out") {
      expect('(');
      std::string v = quoted();
      expect(')');
      return Sdrte::constant(v);
    }
    if (kw == "dup") {
      expect('(');
      Sym m = char_arg();
      expect(')');
      return Sdrte::dup(m);
    }
    if (kw == "ite" || kw == "restrict") {
      expect('(');
      RegexPtr l = regex_arg();
      expect(',');
      SdrtePtr c1 = expr();
      if (kw == "restrict") {
        expect(')');
        return sdrte_restrict(l, c1);
      }
      expect(',');
      SdrtePtr c2 = expr();
      expect(')');
      return Sdrte::ite(l, c1, c2);
    }
    if (kw == "star" || kw == "rstar") {
      expect('(');
      int k = int_arg();
      expect(',');
      RegexPtr l = regex_arg();
      expect(',');
      SdrtePtr c = expr();
      expect(')');
      return kw == "star" ? Sdrte::star(k, l, c) : Sdrte::rstar(k, l, c);
    }
    if (kw == "had" || kw == "cat" || kw == "sum" || kw == "rcat" ||
        kw == "compose") {
      expect('(');
      SdrtePtr c1 = expr();
      expect(',');
      SdrtePtr c2 = expr();
      expect(')');
      if (kw == "had") return Sdrte::had(c1, c2);
      if (kw == "cat") return Sdrte::cauchy(c1, c2);
      if (kw == "sum") return sdrte_sum(c1, c2);
      if (kw == "rcat") return sdrte_rcat(c1, c2);
      return Sdrte::compose(c1, c2);
    }
    fail("unknown expression keyword '" + kw + "'");
  }

  SdrtePtr parse() {
    SdrtePtr c = expr();
    skip_ws();
    if (pos != text.size()) fail("trailing input");
    return c;
  }
};

void quote_to(const std::string& v, std::string& out) {
  out += '"';
  for (char c : v) {
    unsigned char u = (unsigned char)c;
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (u < 0x20 || u > 0x7e) {
      char buf[8];
      snprintf(buf, sizeof buf, "\\x%02x", u);
      out += buf;
    } else {
      out += c;
    }
  }
  out += '"';
}

void print_rec(const SdrtePtr& c, std::string& out) {
  switch (c->kind) {
    case SdKind::Bot:
      out += "bot";
      return;
    case SdKind::Const:
      out += "out(";
      quote_to(c->value, out);
      out += ")";
      return;
    case SdKind::Ite:
      out += "ite(" + print_regex(c->lang) + ", ";
      print_rec(c->left, out);
      out += ", ";
      print_rec(c->right, out);
      out += ")";
      return;
    case SdKind::Had:
    case SdKind::Cauchy:
    case SdKind::Compose:
      out += c->kind == SdKind::Had      ? "had("
             : c->kind == SdKind::Cauchy ? "cat("
                                         : "compose(";
      print_rec(c->left, out);
      out += ", ";
      print_rec(c->right, out);
      out += ")";
      return;
    case SdKind::Star:
    case SdKind::RStar:
      out += (c->kind == SdKind::Star ? "star(" : "rstar(") +
             std::to_string(c->k) + ", " + print_regex(c->lang) + ", ";
      print_rec(c->left, out);
      out += ")";
      return;
    case SdKind::Dup:
      out += "dup(";
      quote_to(std::string(1, (char)c->marker), out);
      out += ")";
      return;
    case SdKind::Rev:
      out += "rev";
      return;
  }
}

}  // namespace

SdrtePtr parse_sdrte(const std::string& text) {
  Parser p(text);
  return p.parse();
}

std::string print_sdrte(const SdrtePtr& c) {
  std::string out;
  print_rec(c, out);
  return out;
}

}  // namespace sdt
