#include "ml5/parse.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace ml5 {

std::string ParseError::message() const {
  std::ostringstream os;
  os << "parse error: ";
  if (!detail.empty()) {
    os << detail;
  } else {
    os << "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) os << (i + 1 == expected.size() ? " or " : ", ");
      os << expected[i];
    }
    os << ", found " << found;
  }
  return os.str();
}

namespace {

struct Token {
  enum class Kind { Ident, Int, Str, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t num = 0;
  Pos pos;
};

struct Failure {
  ParseError error;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End:
      return "end of input";
    case Token::Kind::Str:
      return "string literal";
    case Token::Kind::Int:
      return "integer `" + t.text + "`";
    default:
      return "`" + t.text + "`";
  }
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& what) {
    ParseError e;
    e.pos = {line, col};
    e.detail = what;
    throw Failure{e};
  };
  static const char* const symbols[] = {"=>", "->", ":=", "◯", "⌘", "(", ")", "[", "]", "<", ">", ":", ".",
                                        ",", "=", "|", "*", "+", "!"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.num = std::stoll(t.text);
      } catch (const std::exception&) {
        fail("integer literal out of range");
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      for (;; ++j) {
        if (j >= src.size() || src[j] == '\n') fail("unterminated string literal");
        if (src[j] == '"') break;
        if (src[j] == '\\' && j + 1 < src.size()) {
          ++j;
          switch (src[j]) {
            case 'n':
              s += '\n';
              break;
            case 't':
              s += '\t';
              break;
            default:
              s += src[j];
          }
        } else {
          s += src[j];
        }
      }
      t.kind = Token::Kind::Str;
      t.text = std::move(s);
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* sym : symbols) {
      std::string_view sv(sym);
      if (src.substr(i, sv.size()) == sv) {
        t.kind = Token::Kind::Sym;
        t.text = std::string(sv);
        advance(sv.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) fail(std::string("unexpected character `") + c + "`");
  }
  Token end;
  end.kind = Token::Kind::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "lam", "let", "in", "leta", "unpack", "case", "of", "inl", "inr", "split", "as", "wlam", "hold",
      "sham", "unsham", "pack", "get", "ret", "ref", "print", "fst", "snd", "world", "here", "int",
      "string", "unit", "at", "forall", "exists", "shamrock", "lax", "box", "unbox", "mret", "bind", "mget"};
  return r;
}

class Parser {
 public:
  Parser(std::string_view src, bool core) : toks_(lex(src)), core_(core) {}

  //
  // Tokens
  //

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  bool at_sym(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Sym && t.text == s;
  }

  bool at_kw(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && t.text == s;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    ParseError e;
    e.pos = peek().pos;
    e.expected = std::move(expected);
    e.found = describe(peek());
    throw Failure{e};
  }

  [[noreturn]] void fail_detail(const std::string& detail, Pos p) const {
    ParseError e;
    e.pos = p;
    e.detail = detail;
    throw Failure{e};
  }

  Token expect_sym(const char* s) {
    if (!at_sym(s)) fail({std::string("`") + s + "`"});
    return toks_[pos_++];
  }

  Token expect_kw(const char* s) {
    if (!at_kw(s)) fail({std::string("`") + s + "`"});
    return toks_[pos_++];
  }

  std::string expect_ident(const char* what = "identifier") {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || reserved().count(t.text)) fail({what});
    ++pos_;
    return t.text;
  }

  bool accept_sym(const char* s) {
    if (!at_sym(s)) return false;
    ++pos_;
    return true;
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail({"end of input"});
  }

  //
  // Worlds and types
  //

  World resolve_world(const std::string& name) const {
    for (std::size_t k = 0; k < worlds_.size(); ++k) {
      if (worlds_[k] == name) return World::var(static_cast<int>(k), name);
    }
    return World::site(name);
  }

  World parse_world() { return resolve_world(expect_ident("world name")); }

  void push_world(const std::string& n) { worlds_.insert(worlds_.begin(), n); }
  void pop_world() { worlds_.erase(worlds_.begin()); }

  Type parse_type() {
    if (at_kw("forall") || at_kw("exists")) {
      bool all = at_kw("forall");
      ++pos_;
      std::string w = expect_ident("world variable");
      expect_sym(".");
      push_world(w);
      Type body = parse_type();
      pop_world();
      return all ? Type::forall(body, w) : Type::exists(body, w);
    }
    Type lhs = parse_sum_type();
    if (accept_sym("->")) return Type::arrow(lhs, parse_type());
    return lhs;
  }

  Type parse_sum_type() {
    Type t = parse_prod_type();
    while (accept_sym("+")) t = Type::sum(t, parse_prod_type());
    return t;
  }

  Type parse_prod_type() {
    Type t = parse_at_type();
    while (accept_sym("*")) t = Type::prod(t, parse_at_type());
    return t;
  }

  Type parse_at_type() {
    Type t = parse_prefix_type();
    while (at_kw("at")) {
      ++pos_;
      t = Type::at(t, parse_world());
    }
    return t;
  }

  Type parse_prefix_type() {
    Pos p = peek().pos;
    if (at_kw("ref")) {
      ++pos_;
      return Type::ref(parse_prefix_type());
    }
    if (at_kw("shamrock") || at_sym("⌘")) {
      if (core_) fail_detail("shamrock types do not occur in core programs", p);
      ++pos_;
      return Type::shamrock(parse_prefix_type());
    }
    if (at_kw("lax") || at_sym("◯")) {
      if (!core_) fail_detail("lax types are not part of the surface language", p);
      ++pos_;
      return Type::lax(parse_prefix_type());
    }
    if (at_kw("forall") || at_kw("exists")) return parse_type();
    if (at_kw("int")) {
      ++pos_;
      return Type::int_();
    }
    if (at_kw("string")) {
      ++pos_;
      return Type::string_();
    }
    if (at_kw("unit")) {
      ++pos_;
      return Type::unit();
    }
    if (accept_sym("(")) {
      Type t = parse_type();
      expect_sym(")");
      return t;
    }
    fail({"type"});
  }

  //
  // ML5 terms
  //

  Term parse_term() {
    Pos p = peek().pos;
    if (at_kw("lam")) {
      ++pos_;
      std::string x = expect_ident();
      expect_sym(":");
      Type a = parse_type();
      expect_sym(".");
      return Term::lam(x, a, parse_term(), p);
    }
    if (at_kw("let")) {
      ++pos_;
      std::string x = expect_ident();
      Type ann;
      if (accept_sym(":")) ann = parse_type();
      expect_sym("=");
      Term e1 = parse_term();
      expect_kw("in");
      return Term::let(x, ann, e1, parse_term(), p);
    }
    if (at_kw("leta")) {
      ++pos_;
      std::string x = expect_ident();
      expect_sym("=");
      Term e1 = parse_term();
      expect_kw("in");
      return Term::leta(x, e1, parse_term(), p);
    }
    if (at_kw("unpack")) {
      ++pos_;
      Term e1 = parse_term();
      expect_kw("as");
      std::string w = expect_ident("world variable");
      expect_sym(",");
      std::string x = expect_ident();
      expect_kw("in");
      push_world(w);
      Term body = parse_term();
      pop_world();
      return Term::unpack(w, x, e1, body, p);
    }
    if (at_kw("case")) {
      ++pos_;
      Term scrut = parse_term();
      expect_kw("of");
      expect_kw("inl");
      std::string x = expect_ident();
      expect_sym("=>");
      Term l = parse_term();
      expect_sym("|");
      expect_kw("inr");
      std::string y = expect_ident();
      expect_sym("=>");
      Term r = parse_term();
      if (is_value(scrut)) return Term::vcase(scrut, x, l, y, r, p);
      return Term::case_(scrut, x, l, y, r, p);
    }
    if (at_kw("split")) {
      ++pos_;
      Term v = parse_term();
      expect_kw("as");
      expect_sym("(");
      std::string x = expect_ident();
      expect_sym(",");
      std::string y = expect_ident();
      expect_sym(")");
      expect_kw("in");
      return Term::split(v, x, y, parse_term(), p);
    }
    if (at_kw("wlam")) {
      ++pos_;
      std::string w = expect_ident("world variable");
      expect_sym(".");
      push_world(w);
      Term body = parse_term();
      pop_world();
      return Term::wlam(w, body, p);
    }
    Term lhs = parse_unary();
    if (at_sym(":=")) {
      Pos q = peek().pos;
      ++pos_;
      return Term::assign(lhs, parse_unary(), q);
    }
    return lhs;
  }

  Term parse_unary() {
    Pos p = peek().pos;
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) {
      const std::string& k = t.text;
      if (k == "ret") return (++pos_, Term::ret(parse_unary(), p));
      if (k == "ref") return (++pos_, Term::ref(parse_unary(), p));
      if (k == "print") return (++pos_, Term::print(parse_unary(), p));
      if (k == "fst") return (++pos_, Term::fst(parse_unary(), p));
      if (k == "snd") return (++pos_, Term::snd(parse_unary(), p));
      if (k == "inl") return (++pos_, Term::inl(parse_unary(), p));
      if (k == "inr") return (++pos_, Term::inr(parse_unary(), p));
      if (k == "hold") return (++pos_, Term::hold(parse_unary(), p));
      if (k == "sham") return (++pos_, Term::sham(parse_unary(), p));
      if (k == "unsham") return (++pos_, Term::unsham(parse_unary(), p));
      if (k == "get" || k == "pack") {
        ++pos_;
        expect_sym("[");
        World w = parse_world();
        expect_sym("]");
        Term e = parse_unary();
        return k == "get" ? Term::get(w, e, p) : Term::pack(w, e, p);
      }
    }
    if (accept_sym("!")) return Term::deref(parse_unary(), p);
    return parse_postfix();
  }

  bool at_atom_start() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int || t.kind == Token::Kind::Str) return true;
    if (t.kind == Token::Kind::Sym) return t.text == "(";
    if (t.kind == Token::Kind::Ident) {
      if (reserved().count(t.text)) return false;
      // At the top level `name :` starts the next declaration.
      if (depth_ == 0 && at_sym(":", 1)) return false;
      return true;
    }
    return false;
  }

  Term parse_postfix() {
    Term t = parse_atom();
    for (;;) {
      Pos p = peek().pos;
      if (at_sym("[")) {
        ++pos_;
        std::optional<World> w;
        if (at_kw("here")) {
          ++pos_;
        } else {
          w = parse_world();
        }
        expect_sym("]");
        t = Term::wapp(t, w, p);
      } else if (at_atom_start()) {
        t = Term::app(t, parse_atom(), p);
      } else {
        return t;
      }
    }
  }

  Term parse_atom() {
    const Token& t = peek();
    Pos p = t.pos;
    if (t.kind == Token::Kind::Int) {
      ++pos_;
      return Term::int_lit(t.num, p);
    }
    if (t.kind == Token::Kind::Str) {
      ++pos_;
      return Term::str_lit(t.text, p);
    }
    if (t.kind == Token::Kind::Ident && !reserved().count(t.text)) {
      ++pos_;
      return Term::var(t.text, p);
    }
    if (accept_sym("(")) {
      if (accept_sym(")")) return Term::unit(p);
      ++depth_;
      Term inner = parse_term();
      Term out;
      if (accept_sym(",")) {
        Term second = parse_term();
        out = Term::pair(inner, second, p);
      } else if (accept_sym(":")) {
        Type a = parse_type();
        std::optional<World> w;
        if (accept_sym("[")) {
          w = parse_world();
          expect_sym("]");
        }
        out = Term::anno(inner, a, w, p);
      } else {
        out = inner;
      }
      --depth_;
      expect_sym(")");
      return out;
    }
    fail({"term"});
  }

  SourceProgram parse_program() {
    SourceProgram prog;
    std::set<std::string> names;
    while (peek().kind != Token::Kind::End) {
      if (at_kw("world")) {
        ++pos_;
        prog.worlds.push_back(expect_ident("world name"));
        continue;
      }
      SourceDecl d;
      d.pos = peek().pos;
      d.name = expect_ident("declaration");
      if (!names.insert(d.name).second) fail_detail("duplicate declaration `" + d.name + "`", d.pos);
      expect_sym(":");
      d.type = parse_type();
      expect_sym("[");
      d.world = parse_world();
      expect_sym("]");
      expect_sym("=");
      d.term = parse_term();
      prog.decls.push_back(std::move(d));
    }
    return prog;
  }

  //
  // Core terms
  //

  l5::Term parse_l5() {
    using l5::Term;
    if (at_kw("lam")) {
      ++pos_;
      std::string x = expect_ident();
      expect_sym(":");
      Type a = parse_type();
      expect_sym(".");
      return Term::lam(x, a, parse_l5());
    }
    if (at_kw("let")) {
      ++pos_;
      std::string x = expect_ident();
      expect_sym("=");
      Term t = parse_l5();
      expect_kw("in");
      return Term::let(x, t, parse_l5());
    }
    if (at_kw("case")) {
      ++pos_;
      Term scrut = parse_l5();
      expect_kw("of");
      expect_kw("inl");
      std::string x = expect_ident();
      expect_sym("=>");
      Term l = parse_l5();
      expect_sym("|");
      expect_kw("inr");
      std::string y = expect_ident();
      expect_sym("=>");
      return Term::case_(scrut, x, l, y, parse_l5());
    }
    if (at_kw("unbox")) {
      ++pos_;
      Term t = parse_l5();
      expect_kw("as");
      std::string x = expect_ident();
      expect_kw("in");
      return Term::unbox(t, x, parse_l5());
    }
    if (at_kw("unpack")) {
      ++pos_;
      Term t = parse_l5();
      expect_kw("as");
      std::string w = expect_ident("world variable");
      expect_sym(",");
      std::string x = expect_ident();
      expect_kw("in");
      push_world(w);
      Term body = parse_l5();
      pop_world();
      return Term::unpack(t, w, x, body);
    }
    if (at_kw("bind")) {
      ++pos_;
      std::string x = expect_ident();
      expect_sym(":");
      Type a = parse_type();
      expect_sym("=");
      Term t = parse_l5();
      expect_kw("in");
      return Term::mbind(t, x, a, parse_l5());
    }
    if (at_kw("wlam")) {
      ++pos_;
      std::string w = expect_ident("world variable");
      expect_sym(".");
      push_world(w);
      Term body = parse_l5();
      pop_world();
      return Term::wlam(w, body);
    }
    Term lhs = parse_l5_unary();
    if (accept_sym(":=")) return Term::assign(lhs, parse_l5_unary());
    return lhs;
  }

  l5::Term parse_l5_unary() {
    using l5::Term;
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) {
      const std::string& k = t.text;
      if (k == "mret") return (++pos_, Term::mret(parse_l5_unary()));
      if (k == "ref") return (++pos_, Term::ref(parse_l5_unary()));
      if (k == "print") return (++pos_, Term::print(parse_l5_unary()));
      if (k == "fst") return (++pos_, Term::fst(parse_l5_unary()));
      if (k == "snd") return (++pos_, Term::snd(parse_l5_unary()));
      if (k == "inl") return (++pos_, Term::inl(parse_l5_unary()));
      if (k == "inr") return (++pos_, Term::inr(parse_l5_unary()));
      if (k == "box" || k == "pack") {
        ++pos_;
        expect_sym("[");
        World w = parse_world();
        expect_sym("]");
        Term e = parse_l5_unary();
        return k == "box" ? Term::box(w, e) : Term::pack(w, e);
      }
      if (k == "mget") {
        ++pos_;
        expect_sym("[");
        World w = parse_world();
        expect_sym(":");
        Type a = parse_type();
        expect_sym("]");
        return Term::mget(w, a, parse_l5_unary());
      }
    }
    if (accept_sym("!")) return Term::deref(parse_l5_unary());
    return parse_l5_postfix();
  }

  l5::Term parse_l5_postfix() {
    l5::Term t = parse_l5_atom();
    for (;;) {
      if (accept_sym("[")) {
        World w = parse_world();
        expect_sym("]");
        t = l5::Term::wapp(t, w);
      } else if (at_atom_start()) {
        t = l5::Term::app(t, parse_l5_atom());
      } else {
        return t;
      }
    }
  }

  l5::Term parse_l5_atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      ++pos_;
      return l5::Term::int_lit(t.num);
    }
    if (t.kind == Token::Kind::Str) {
      ++pos_;
      return l5::Term::str_lit(t.text);
    }
    if (t.kind == Token::Kind::Ident && !reserved().count(t.text)) {
      ++pos_;
      return l5::Term::var(t.text);
    }
    if (accept_sym("(")) {
      if (accept_sym(")")) return l5::Term::unit();
      ++depth_;
      l5::Term inner = parse_l5();
      l5::Term out;
      if (accept_sym(",")) {
        out = l5::Term::pair(inner, parse_l5());
      } else if (accept_sym(":")) {
        Type a = parse_type();
        std::optional<World> w;
        if (accept_sym("<")) {
          w = parse_world();
          expect_sym(">");
        }
        out = l5::Term::anno(inner, a, w);
      } else {
        out = inner;
      }
      --depth_;
      expect_sym(")");
      return out;
    }
    fail({"term"});
  }

  l5::Program parse_l5_program() {
    l5::Program prog;
    while (peek().kind != Token::Kind::End) {
      l5::Decl d;
      d.name = expect_ident("declaration");
      expect_sym(":");
      d.type = parse_type();
      d.is_computation = d.type.kind() == TypeKind::Lax;
      expect_sym("<");
      d.world = parse_world();
      expect_sym(">");
      expect_sym("=");
      d.term = parse_l5();
      prog.decls.push_back(std::move(d));
    }
    return prog;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool core_ = false;
  int depth_ = 0;
  std::vector<std::string> worlds_;
};

template <class T, class F>
Result<T, ParseError> guarded(F&& f) {
  try {
    return f();
  } catch (const Failure& failure) {
    return failure.error;
  }
}

}  // namespace

Result<SourceProgram, ParseError> parse_program(std::string_view text) {
  return guarded<SourceProgram>([&] {
    Parser p(text, false);
    return p.parse_program();
  });
}

Result<Type, ParseError> parse_type(std::string_view text) {
  return guarded<Type>([&] {
    Parser p(text, false);
    Type t = p.parse_type();
    p.expect_end();
    return t;
  });
}

Result<Type, ParseError> parse_l5_type(std::string_view text) {
  return guarded<Type>([&] {
    Parser p(text, true);
    Type t = p.parse_type();
    p.expect_end();
    return t;
  });
}

Result<Term, ParseError> parse_term(std::string_view text) {
  return guarded<Term>([&] {
    Parser p(text, false);
    Term t = p.parse_term();
    p.expect_end();
    return t;
  });
}

Result<l5::Program, ParseError> parse_l5_program(std::string_view text) {
  return guarded<l5::Program>([&] {
    Parser p(text, true);
    return p.parse_l5_program();
  });
}

Result<l5::Term, ParseError> parse_l5_term(std::string_view text) {
  return guarded<l5::Term>([&] {
    Parser p(text, true);
    l5::Term t = p.parse_l5();
    p.expect_end();
    return t;
  });
}

bool operator==(const SourceProgram& a, const SourceProgram& b) {
  if (a.worlds != b.worlds || a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i) {
    const auto& x = a.decls[i];
    const auto& y = b.decls[i];
    if (x.name != y.name || x.type != y.type || x.world != y.world || x.term != y.term) return false;
  }
  return true;
}

}  // namespace ml5
