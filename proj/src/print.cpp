#include "ml5/print.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ml5 {

namespace {

void collect_sites(const Type& a, std::set<std::string>& out) {
  if (!a) return;
  if (a.kind() == TypeKind::At && a.world().is_const()) out.insert(a.world().name());
  collect_sites(a.left(), out);
  collect_sites(a.right(), out);
}

void collect_sites(const Term& t, std::set<std::string>& out) {
  if (!t) return;
  if (t.world() && t.world()->is_const()) out.insert(t.world()->name());
  collect_sites(t.type(), out);
  for (int i = 0; i < t.arity(); ++i) collect_sites(t.sub(i), out);
}

void collect_sites(const l5::Term& t, std::set<std::string>& out) {
  if (!t) return;
  if (t.world() && t.world()->is_const()) out.insert(t.world()->name());
  collect_sites(t.type(), out);
  for (int i = 0; i < t.arity(); ++i) collect_sites(t.sub(i), out);
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "lam", "let", "in", "leta", "unpack", "case", "of", "inl", "inr", "split", "as", "wlam", "hold",
      "sham", "unsham", "pack", "get", "ret", "ref", "print", "fst", "snd", "world", "here", "int",
      "string", "unit", "at", "forall", "exists", "shamrock", "lax", "box", "unbox", "mret", "bind", "mget"};
  return k;
}

/// Names for world variables; index 0 of `stack` is the innermost binder.
class Namer {
 public:
  Namer(std::vector<std::string> outer, std::set<std::string> reserved)
      : stack_(std::move(outer)), reserved_(std::move(reserved)) {}

  std::string world(const World& w) const {
    if (w.is_const()) return w.name();
    auto k = static_cast<std::size_t>(w.index());
    if (k < stack_.size()) return stack_[k];
    if (!w.name().empty()) return w.name();
    return "#" + std::to_string(w.index());
  }

  std::string push(const std::string& hint) {
    std::string base = hint.empty() ? "w" : hint;
    std::string name = base;
    for (int i = 1; taken(name); ++i) name = base + std::to_string(i);
    stack_.insert(stack_.begin(), name);
    return name;
  }

  void pop() { stack_.erase(stack_.begin()); }

 private:
  bool taken(const std::string& n) const {
    return reserved_.count(n) || keywords().count(n) || std::find(stack_.begin(), stack_.end(), n) != stack_.end();
  }

  std::vector<std::string> stack_;
  std::set<std::string> reserved_;
};

//
// Types
//

void print_type(std::ostream& os, const Type& a, int prec, Namer& names) {
  auto open = [&](int level) {
    if (prec > level) os << '(';
  };
  auto close = [&](int level) {
    if (prec > level) os << ')';
  };
  switch (a.kind()) {
    case TypeKind::Base:
      switch (a.base_type()) {
        case BaseType::Int:
          os << "int";
          break;
        case BaseType::String:
          os << "string";
          break;
        case BaseType::Unit:
          os << "unit";
          break;
      }
      return;
    case TypeKind::Forall:
    case TypeKind::Exists: {
      open(0);
      std::string n = names.push(a.hint());
      os << (a.kind() == TypeKind::Forall ? "forall " : "exists ") << n << ". ";
      print_type(os, a.body(), 0, names);
      names.pop();
      close(0);
      return;
    }
    case TypeKind::Arrow:
      open(0);
      print_type(os, a.left(), 1, names);
      os << " -> ";
      print_type(os, a.right(), 0, names);
      close(0);
      return;
    case TypeKind::Sum:
      open(1);
      print_type(os, a.left(), 1, names);
      os << " + ";
      print_type(os, a.right(), 2, names);
      close(1);
      return;
    case TypeKind::Prod:
      open(2);
      print_type(os, a.left(), 2, names);
      os << " * ";
      print_type(os, a.right(), 3, names);
      close(2);
      return;
    case TypeKind::At:
      open(3);
      print_type(os, a.left(), 3, names);
      os << " at " << names.world(a.world());
      close(3);
      return;
    case TypeKind::Ref:
    case TypeKind::Shamrock:
    case TypeKind::Lax:
      open(4);
      os << (a.kind() == TypeKind::Ref ? "ref " : a.kind() == TypeKind::Shamrock ? "shamrock " : "◯");
      print_type(os, a.left(), 5, names);
      close(4);
      return;
  }
}

//
// ML5 terms
//
// Levels: 0 open binder forms, 1 assignment, 2 prefix keywords,
// 3 application, 4 atoms.

int level(const Term& t) {
  switch (t.kind()) {
    case TermKind::Lam:
    case TermKind::Let:
    case TermKind::Leta:
    case TermKind::Unpack:
    case TermKind::Case:
    case TermKind::VCase:
    case TermKind::Split:
    case TermKind::WLam:
      return 0;
    case TermKind::Assign:
      return 1;
    case TermKind::Ret:
    case TermKind::Get:
    case TermKind::Ref:
    case TermKind::Deref:
    case TermKind::Print:
    case TermKind::Fst:
    case TermKind::Snd:
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Hold:
    case TermKind::Sham:
    case TermKind::Unsham:
    case TermKind::Pack:
      return 2;
    case TermKind::App:
    case TermKind::WApp:
      return 3;
    default:
      return 4;
  }
}

void print_term(std::ostream& os, const Term& t, int prec, Namer& names) {
  bool parens = level(t) < prec;
  if (parens) os << '(';
  auto prefix = [&](const char* kw) {
    os << kw << ' ';
    print_term(os, t.sub(0), 3, names);
  };
  switch (t.kind()) {
    case TermKind::Var:
      os << t.name();
      break;
    case TermKind::Int:
      os << t.int_value();
      break;
    case TermKind::Str:
      os << quote_string(t.str_value());
      break;
    case TermKind::Unit:
      os << "()";
      break;
    case TermKind::Lam:
      os << "lam " << t.name() << " : ";
      print_type(os, t.type(), 0, names);
      os << ". ";
      print_term(os, t.sub(0), 0, names);
      break;
    case TermKind::App:
      print_term(os, t.sub(0), 3, names);
      os << ' ';
      print_term(os, t.sub(1), 4, names);
      break;
    case TermKind::Pair:
      os << '(';
      print_term(os, t.sub(0), 0, names);
      os << ", ";
      print_term(os, t.sub(1), 0, names);
      os << ')';
      break;
    case TermKind::Fst:
      prefix("fst");
      break;
    case TermKind::Snd:
      prefix("snd");
      break;
    case TermKind::Inl:
      prefix("inl");
      break;
    case TermKind::Inr:
      prefix("inr");
      break;
    case TermKind::Case:
    case TermKind::VCase:
      os << "case ";
      print_term(os, t.sub(0), 1, names);
      os << " of inl " << t.name() << " => ";
      print_term(os, t.sub(1), 1, names);
      os << " | inr " << t.name2() << " => ";
      print_term(os, t.sub(2), 0, names);
      break;
    case TermKind::Split:
      os << "split ";
      print_term(os, t.sub(0), 1, names);
      os << " as (" << t.name() << ", " << t.name2() << ") in ";
      print_term(os, t.sub(1), 0, names);
      break;
    case TermKind::Hold:
      prefix("hold");
      break;
    case TermKind::Leta:
      os << "leta " << t.name() << " = ";
      print_term(os, t.sub(0), 1, names);
      os << " in ";
      print_term(os, t.sub(1), 0, names);
      break;
    case TermKind::WLam: {
      std::string n = names.push(t.name());
      os << "wlam " << n << ". ";
      print_term(os, t.sub(0), 0, names);
      names.pop();
      break;
    }
    case TermKind::WApp:
      print_term(os, t.sub(0), 3, names);
      os << " [" << (t.world() ? names.world(*t.world()) : std::string("here")) << ']';
      break;
    case TermKind::Pack:
      os << "pack[" << names.world(*t.world()) << "] ";
      print_term(os, t.sub(0), 3, names);
      break;
    case TermKind::Unpack: {
      os << "unpack ";
      print_term(os, t.sub(0), 1, names);
      std::string n = names.push(t.name());
      os << " as " << n << ", " << t.name2() << " in ";
      print_term(os, t.sub(1), 0, names);
      names.pop();
      break;
    }
    case TermKind::Sham:
      prefix("sham");
      break;
    case TermKind::Unsham:
      prefix("unsham");
      break;
    case TermKind::Get:
      os << "get[" << names.world(*t.world()) << "] ";
      print_term(os, t.sub(0), 3, names);
      break;
    case TermKind::Ret:
      prefix("ret");
      break;
    case TermKind::Let:
      os << "let " << t.name();
      if (t.type()) {
        os << " : ";
        print_type(os, t.type(), 0, names);
      }
      os << " = ";
      print_term(os, t.sub(0), 1, names);
      os << " in ";
      print_term(os, t.sub(1), 0, names);
      break;
    case TermKind::Ref:
      prefix("ref");
      break;
    case TermKind::Deref:
      os << '!';
      print_term(os, t.sub(0), 3, names);
      break;
    case TermKind::Assign:
      print_term(os, t.sub(0), 2, names);
      os << " := ";
      print_term(os, t.sub(1), 2, names);
      break;
    case TermKind::Print:
      prefix("print");
      break;
    case TermKind::Anno:
      os << '(';
      print_term(os, t.sub(0), 0, names);
      os << " : ";
      print_type(os, t.type(), 0, names);
      if (t.world()) os << " [" << names.world(*t.world()) << ']';
      os << ')';
      break;
  }
  if (parens) os << ')';
}

//
// L5 terms
//

int level(const l5::Term& t) {
  using l5::Kind;
  switch (t.kind()) {
    case Kind::Lam:
    case Kind::Let:
    case Kind::Case:
    case Kind::Unbox:
    case Kind::Unpack:
    case Kind::MBind:
    case Kind::WLam:
      return 0;
    case Kind::Assign:
      return 1;
    case Kind::MRet:
    case Kind::Box:
    case Kind::Pack:
    case Kind::MGet:
    case Kind::Ref:
    case Kind::Deref:
    case Kind::Print:
    case Kind::Fst:
    case Kind::Snd:
    case Kind::Inl:
    case Kind::Inr:
      return 2;
    case Kind::App:
    case Kind::WApp:
      return 3;
    default:
      return 4;
  }
}

void print_l5(std::ostream& os, const l5::Term& t, int prec, Namer& names) {
  using l5::Kind;
  bool parens = level(t) < prec;
  if (parens) os << '(';
  auto prefix = [&](const char* kw) {
    os << kw << ' ';
    print_l5(os, t.sub(0), 3, names);
  };
  switch (t.kind()) {
    case Kind::Var:
      os << t.name();
      break;
    case Kind::Int:
      os << t.int_value();
      break;
    case Kind::Str:
      os << quote_string(t.str_value());
      break;
    case Kind::Unit:
      os << "()";
      break;
    case Kind::Lam:
      os << "lam " << t.name() << " : ";
      print_type(os, t.type(), 0, names);
      os << ". ";
      print_l5(os, t.sub(0), 0, names);
      break;
    case Kind::App:
      print_l5(os, t.sub(0), 3, names);
      os << ' ';
      print_l5(os, t.sub(1), 4, names);
      break;
    case Kind::Pair:
      os << '(';
      print_l5(os, t.sub(0), 0, names);
      os << ", ";
      print_l5(os, t.sub(1), 0, names);
      os << ')';
      break;
    case Kind::Fst:
      prefix("fst");
      break;
    case Kind::Snd:
      prefix("snd");
      break;
    case Kind::Inl:
      prefix("inl");
      break;
    case Kind::Inr:
      prefix("inr");
      break;
    case Kind::Case:
      os << "case ";
      print_l5(os, t.sub(0), 1, names);
      os << " of inl " << t.name() << " => ";
      print_l5(os, t.sub(1), 1, names);
      os << " | inr " << t.name2() << " => ";
      print_l5(os, t.sub(2), 0, names);
      break;
    case Kind::Box:
      os << "box[" << names.world(*t.world()) << "] ";
      print_l5(os, t.sub(0), 3, names);
      break;
    case Kind::Unbox:
      os << "unbox ";
      print_l5(os, t.sub(0), 1, names);
      os << " as " << t.name() << " in ";
      print_l5(os, t.sub(1), 0, names);
      break;
    case Kind::WLam: {
      std::string n = names.push(t.name());
      os << "wlam " << n << ". ";
      print_l5(os, t.sub(0), 0, names);
      names.pop();
      break;
    }
    case Kind::WApp:
      print_l5(os, t.sub(0), 3, names);
      os << " [" << names.world(*t.world()) << ']';
      break;
    case Kind::Pack:
      os << "pack[" << names.world(*t.world()) << "] ";
      print_l5(os, t.sub(0), 3, names);
      break;
    case Kind::Unpack: {
      os << "unpack ";
      print_l5(os, t.sub(0), 1, names);
      std::string n = names.push(t.name());
      os << " as " << n << ", " << t.name2() << " in ";
      print_l5(os, t.sub(1), 0, names);
      names.pop();
      break;
    }
    case Kind::Let:
      os << "let " << t.name() << " = ";
      print_l5(os, t.sub(0), 1, names);
      os << " in ";
      print_l5(os, t.sub(1), 0, names);
      break;
    case Kind::Anno:
      os << '(';
      print_l5(os, t.sub(0), 0, names);
      os << " : ";
      print_type(os, t.type(), 0, names);
      if (t.world()) os << " <" << names.world(*t.world()) << '>';
      os << ')';
      break;
    case Kind::MRet:
      prefix("mret");
      break;
    case Kind::MBind:
      os << "bind " << t.name() << " : ";
      print_type(os, t.type(), 0, names);
      os << " = ";
      print_l5(os, t.sub(0), 1, names);
      os << " in ";
      print_l5(os, t.sub(1), 0, names);
      break;
    case Kind::MGet:
      os << "mget[" << names.world(*t.world()) << " : ";
      print_type(os, t.type(), 0, names);
      os << "] ";
      print_l5(os, t.sub(0), 3, names);
      break;
    case Kind::Ref:
      prefix("ref");
      break;
    case Kind::Deref:
      os << '!';
      print_l5(os, t.sub(0), 3, names);
      break;
    case Kind::Assign:
      print_l5(os, t.sub(0), 2, names);
      os << " := ";
      print_l5(os, t.sub(1), 2, names);
      break;
    case Kind::Print:
      prefix("print");
      break;
    case Kind::Handle:
      os << "#h" << t.int_value() << '@' << t.world()->name();
      break;
  }
  if (parens) os << ')';
}

}  // namespace

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string to_string(const World& w, const std::vector<std::string>& names) {
  Namer n(names, {});
  return n.world(w);
}

std::string to_string(const Type& a, const std::vector<std::string>& names) {
  if (!a) return "<none>";
  std::set<std::string> sites;
  collect_sites(a, sites);
  Namer n(names, sites);
  std::ostringstream os;
  print_type(os, a, 0, n);
  return os.str();
}

std::string to_string(const Term& t, const std::vector<std::string>& names) {
  if (!t) return "<none>";
  std::set<std::string> sites;
  collect_sites(t, sites);
  Namer n(names, sites);
  std::ostringstream os;
  print_term(os, t, 0, n);
  return os.str();
}

std::string to_string(const l5::Term& t, const std::vector<std::string>& names) {
  if (!t) return "<none>";
  std::set<std::string> sites;
  collect_sites(t, sites);
  Namer n(names, sites);
  std::ostringstream os;
  print_l5(os, t, 0, n);
  return os.str();
}

std::string to_string(const SourceProgram& p) {
  std::set<std::string> sites(p.worlds.begin(), p.worlds.end());
  for (const auto& d : p.decls) {
    collect_sites(d.type, sites);
    collect_sites(d.term, sites);
    if (d.world.is_const()) sites.insert(d.world.name());
  }
  std::ostringstream os;
  for (const auto& w : p.worlds) os << "world " << w << '\n';
  for (const auto& d : p.decls) {
    Namer n({}, sites);
    os << d.name << " : ";
    print_type(os, d.type, 0, n);
    os << " [" << n.world(d.world) << "] = ";
    print_term(os, d.term, 0, n);
    os << '\n';
  }
  return os.str();
}

std::string to_string(const l5::Program& p) {
  std::set<std::string> sites;
  for (const auto& d : p.decls) {
    collect_sites(d.type, sites);
    collect_sites(d.term, sites);
    if (d.world.is_const()) sites.insert(d.world.name());
  }
  std::ostringstream os;
  for (const auto& d : p.decls) {
    Namer n({}, sites);
    os << d.name << " : ";
    print_type(os, d.type, 0, n);
    os << " <" << n.world(d.world) << "> = ";
    print_l5(os, d.term, 0, n);
    os << '\n';
  }
  return os.str();
}

}  // namespace ml5
