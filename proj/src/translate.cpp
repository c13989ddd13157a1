#include "ml5/translate.hpp"

#include <stdexcept>
#include <unordered_map>

#include "ml5/print.hpp"

namespace ml5 {

Type trans_type(const Type& a) {
  switch (a.kind()) {
    case TypeKind::Base:
      return a;
    case TypeKind::Arrow:
      return Type::arrow(trans_type(a.left()), Type::lax(trans_type(a.right())));
    case TypeKind::Prod:
      return Type::prod(trans_type(a.left()), trans_type(a.right()));
    case TypeKind::Sum:
      return Type::sum(trans_type(a.left()), trans_type(a.right()));
    case TypeKind::At:
      return Type::at(trans_type(a.left()), a.world());
    case TypeKind::Forall:
      return Type::forall(trans_type(a.body()), a.hint());
    case TypeKind::Exists:
      return Type::exists(trans_type(a.body()), a.hint());
    case TypeKind::Shamrock:
      return Type::forall(Type::at(shift_type(trans_type(a.body()), 1), World::var(0, "w")), "w");
    case TypeKind::Ref:
      return Type::ref(trans_type(a.body()));
    case TypeKind::Lax:
      return Type::lax(trans_type(a.body()));
  }
  return a;
}

Ctx trans_ctx(const Ctx& ctx) {
  Ctx out;
  for (int i = 0; i < ctx.worlds(); ++i) out = out.with_world();
  for (const auto& h : ctx.hyps()) out = out.with_hyp(h.name, trans_type(h.type), h.world);
  return out;
}

namespace {

using TermL = l5::Term;

class Translator {
 public:
  std::string fresh() { return "_t" + std::to_string(counter_++); }

  TermL value(const Derivation& d) {
    const ml5::Term& t = d.root.term;
    const std::string& r = d.rule;
    if (r == "V-Var") return TermL::var(t.name());
    if (r == "V-Int") return TermL::int_lit(t.int_value());
    if (r == "V-Str") return TermL::str_lit(t.str_value());
    if (r == "V-Unit") return TermL::unit();
    if (r == "V-Lam") return TermL::lam(t.name(), trans_type(t.type()), expr(d.premise(0)));
    if (r == "V-Pair") return TermL::pair(value(d.premise(0)), value(d.premise(1)));
    if (r == "V-Inl") return TermL::inl(value(d.premise(0)));
    if (r == "V-Inr") return TermL::inr(value(d.premise(0)));
    if (r == "V-Hold") return TermL::box(d.premise(0).root.world, value(d.premise(0)));
    if (r == "V-WLam") return TermL::wlam(t.name(), value(d.premise(0)));
    if (r == "V-Pack") return TermL::pack(*t.world(), value(d.premise(0)));
    if (r == "V-Sham") return TermL::wlam("w", TermL::box(World::var(0, "w"), value(d.premise(0))));
    if (r == "V-Anno") return TermL::anno(value(d.premise(0)), trans_type(d.root.type), t.world());
    throw std::logic_error("trans_value: unexpected rule " + r);
  }

  /// Translated value usable as an untethered scrutinee at its own world.
  TermL scrutinee(const Derivation& v) {
    TermL t = value(v);
    if (t.kind() == l5::Kind::Var || (t.kind() == l5::Kind::Anno && t.world())) return t;
    return TermL::anno(t, trans_type(v.root.type), v.root.world);
  }

  TermL expr(const Derivation& d) {
    const ml5::Term& t = d.root.term;
    const std::string& r = d.rule;
    auto star = [](const Derivation& p) { return trans_type(p.root.type); };
    if (r == "E-Ret") return TermL::mret(value(d.premise(0)));
    if (r == "E-Let") return TermL::mbind(expr(d.premise(0)), t.name(), star(d.premise(0)), expr(d.premise(1)));
    if (r == "E-App") {
      std::string f = fresh();
      std::string a = fresh();
      return TermL::mbind(expr(d.premise(0)), f, star(d.premise(0)),
                          TermL::mbind(expr(d.premise(1)), a, star(d.premise(1)),
                                       TermL::app(TermL::var(f), TermL::var(a))));
    }
    if (r == "E-Fst" || r == "E-Snd") {
      std::string p = fresh();
      TermL proj = r == "E-Fst" ? TermL::fst(TermL::var(p)) : TermL::snd(TermL::var(p));
      return TermL::mbind(expr(d.premise(0)), p, star(d.premise(0)), TermL::mret(proj));
    }
    if (r == "E-Case") {
      std::string s = fresh();
      return TermL::mbind(expr(d.premise(0)), s, star(d.premise(0)),
                          TermL::case_(TermL::var(s), t.name(), expr(d.premise(1)), t.name2(), expr(d.premise(2))));
    }
    if (r == "E-VCase") {
      return TermL::case_(scrutinee(d.premise(0)), t.name(), expr(d.premise(1)), t.name2(), expr(d.premise(2)));
    }
    if (r == "E-Split") {
      const Derivation& v = d.premise(0);
      std::string p = fresh();
      const World& ws = v.root.world;
      Type prod = star(v);
      return TermL::let(
          p, scrutinee(v),
          TermL::let(t.name(), TermL::anno(TermL::fst(TermL::var(p)), prod.left(), ws),
                     TermL::let(t.name2(), TermL::anno(TermL::snd(TermL::var(p)), prod.right(), ws),
                                expr(d.premise(1)))));
    }
    if (r == "E-Leta") {
      std::string b = fresh();
      return TermL::mbind(expr(d.premise(0)), b, star(d.premise(0)),
                          TermL::unbox(TermL::var(b), t.name(), expr(d.premise(1))));
    }
    if (r == "E-WApp") {
      std::string f = fresh();
      World target = t.world() ? *t.world() : d.root.world;
      return TermL::mbind(expr(d.premise(0)), f, star(d.premise(0)), TermL::mret(TermL::wapp(TermL::var(f), target)));
    }
    if (r == "E-Unpack") {
      std::string p = fresh();
      return TermL::mbind(expr(d.premise(0)), p, star(d.premise(0)),
                          TermL::unpack(TermL::var(p), t.name(), t.name2(), expr(d.premise(1))));
    }
    if (r == "E-Unsham") {
      std::string s = fresh();
      std::string x = fresh();
      return TermL::mbind(expr(d.premise(0)), s, star(d.premise(0)),
                          TermL::unbox(TermL::wapp(TermL::var(s), d.root.world), x, TermL::mret(TermL::var(x))));
    }
    if (r == "E-Get") return TermL::mget(*t.world(), trans_type(d.root.type), expr(d.premise(0)));
    if (r == "E-Ref" || r == "E-Deref" || r == "E-Print") {
      std::string x = fresh();
      TermL op = r == "E-Ref" ? TermL::ref(TermL::var(x)) : r == "E-Deref" ? TermL::deref(TermL::var(x)) : TermL::print(TermL::var(x));
      return TermL::mbind(expr(d.premise(0)), x, star(d.premise(0)), op);
    }
    if (r == "E-Assign") {
      std::string a = fresh();
      std::string b = fresh();
      return TermL::mbind(expr(d.premise(0)), a, star(d.premise(0)),
                          TermL::mbind(expr(d.premise(1)), b, star(d.premise(1)),
                                       TermL::assign(TermL::var(a), TermL::var(b))));
    }
    if (r == "E-Anno") return expr(d.premise(0));
    throw std::logic_error("trans_expr: unexpected rule " + r);
  }

 private:
  int counter_ = 0;
};

}  // namespace

TransResult trans_value(const Derivation& d) {
  Translator tr;
  return {tr.value(d), trans_type(d.root.type), d.root.world};
}

TransResult trans_expr(const Derivation& d) {
  Translator tr;
  return {tr.expr(d), Type::lax(trans_type(d.root.type)), d.root.world};
}

TransResult translate(const Derivation& d) {
  return d.root.kind == JudgementKind::Value ? trans_value(d) : trans_expr(d);
}

l5::Program trans_program(const SourceProgram& p, const std::vector<Derivation>& derivs) {
  l5::Program out;
  for (std::size_t i = 0; i < p.decls.size() && i < derivs.size(); ++i) {
    TransResult r = translate(derivs[i]);
    bool comp = derivs[i].root.kind == JudgementKind::Expr;
    out.decls.push_back(l5::Decl{p.decls[i].name, comp, r.type, r.world, r.term});
  }
  return out;
}

//
// ⌘ elimination
//

Type desugar_type(const Type& a) {
  if (!a) return a;
  switch (a.kind()) {
    case TypeKind::Base:
      return a;
    case TypeKind::Arrow:
      return Type::arrow(desugar_type(a.left()), desugar_type(a.right()));
    case TypeKind::Prod:
      return Type::prod(desugar_type(a.left()), desugar_type(a.right()));
    case TypeKind::Sum:
      return Type::sum(desugar_type(a.left()), desugar_type(a.right()));
    case TypeKind::At:
      return Type::at(desugar_type(a.left()), a.world());
    case TypeKind::Forall:
      return Type::forall(desugar_type(a.body()), a.hint());
    case TypeKind::Exists:
      return Type::exists(desugar_type(a.body()), a.hint());
    case TypeKind::Shamrock:
      return Type::forall(Type::at(shift_type(desugar_type(a.body()), 1), World::var(0, "w")), "w");
    case TypeKind::Ref:
      return Type::ref(desugar_type(a.body()));
    case TypeKind::Lax:
      return Type::lax(desugar_type(a.body()));
  }
  return a;
}

namespace {

template <class F>
ml5::Term rebuild(const ml5::Term& t, F&& f) {
  if (!t) return t;
  ml5::Term node = t;
  if (t.arity() > 0) {
    std::vector<ml5::Term> subs;
    for (int i = 0; i < t.arity(); ++i) subs.push_back(rebuild(t.sub(i), f));
    node = t.with_subs(std::move(subs));
  }
  return f(t, node);
}

void index_derivation(const Derivation& d, std::unordered_map<const void*, const Derivation*>& out) {
  out.emplace(d.root.term.id(), &d);
  for (const auto& p : d.premises) index_derivation(p, out);
}

}  // namespace

ml5::Term desugar_term(const ml5::Term& t) {
  return rebuild(t, [](const ml5::Term&, const ml5::Term& n) -> ml5::Term {
    switch (n.kind()) {
      case TermKind::Lam:
      case TermKind::Anno:
        return n.with_type(desugar_type(n.type()));
      case TermKind::Let:
        return n.type() ? n.with_type(desugar_type(n.type())) : n;
      case TermKind::Sham:
        return ml5::Term::wlam("w", ml5::Term::hold(shift_term_worlds(n.sub(0), 1), n.pos()), n.pos());
      case TermKind::Unsham:
        return ml5::Term::leta("_sh", ml5::Term::wapp(n.sub(0), std::nullopt, n.pos()),
                               ml5::Term::ret(ml5::Term::var("_sh", n.pos()), n.pos()), n.pos());
      default:
        return n;
    }
  });
}

SourceProgram desugar_shamrock(const SourceProgram& p) {
  SourceProgram out = p;
  for (auto& d : out.decls) {
    d.type = desugar_type(d.type);
    d.term = desugar_term(d.term);
  }
  return out;
}

bool uses_shamrock(const SourceProgram& p) {
  bool found = false;
  for (const auto& d : p.decls) {
    if (contains_kind(d.type, TypeKind::Shamrock)) found = true;
    rebuild(d.term, [&](const ml5::Term&, const ml5::Term& n) {
      if (n.kind() == TermKind::Sham || n.kind() == TermKind::Unsham) found = true;
      if ((n.kind() == TermKind::Lam || n.kind() == TermKind::Anno || n.kind() == TermKind::Let) && n.type() &&
          contains_kind(n.type(), TypeKind::Shamrock)) {
        found = true;
      }
      return n;
    });
  }
  return found;
}

//
// Case elaborations
//

Result<ml5::Term, TypeError> elaborate_untethered_case(const ml5::Term& v, const Type& sum, const World& ws,
                                                       const std::string& x, const ml5::Term& left,
                                                       const std::string& y, const ml5::Term& right, const Type& c,
                                                       const World& w) {
  Pos p = v.pos();
  ml5::Term scrut = v;
  if (!(v.kind() == TermKind::Var || (v.kind() == TermKind::Anno && v.world()))) scrut = ml5::Term::anno(v, sum, ws, p);
  if (ws == w) return ml5::Term::case_(ml5::Term::ret(scrut, p), x, left, y, right, p);
  if (!is_mobile(c)) {
    TypeError e;
    e.reason = TypeErrorReason::NotMobile;
    e.location = p;
    e.expected = "mobile type";
    e.found = to_string(c);
    return e;
  }
  return ml5::Term::get(ws,
                        ml5::Term::case_(ml5::Term::ret(scrut, p), x, ml5::Term::get(w, left, left.pos()), y,
                                         ml5::Term::get(w, right, right.pos()), p),
                        p);
}

Result<ml5::Term, TypeError> elaborate_untethered_split(const ml5::Term& v, const Type& prod, const World& ws,
                                                        const std::string& x, const std::string& y,
                                                        const ml5::Term& body, const Type& c, const World& w,
                                                        const std::string& tmp) {
  Pos p = v.pos();
  ml5::Term scrut = v;
  if (!(v.kind() == TermKind::Var || (v.kind() == TermKind::Anno && v.world()))) scrut = ml5::Term::anno(v, prod, ws, p);
  auto project = [&](ml5::Term inner) {
    ml5::Term pv = ml5::Term::ret(ml5::Term::var(tmp, p), p);
    inner = ml5::Term::let(y, prod.right(), ml5::Term::snd(pv, p), std::move(inner), p);
    inner = ml5::Term::let(x, prod.left(), ml5::Term::fst(pv, p), std::move(inner), p);
    return ml5::Term::let(tmp, prod, ml5::Term::ret(scrut, p), std::move(inner), p);
  };
  if (ws == w) return project(body);
  if (!is_mobile(c)) {
    TypeError e;
    e.reason = TypeErrorReason::NotMobile;
    e.location = p;
    e.expected = "mobile type";
    e.found = to_string(c);
    return e;
  }
  return ml5::Term::get(ws, project(ml5::Term::get(w, body, body.pos())), p);
}

Result<SourceProgram, TypeError> elaborate_value_cases(const SourceProgram& p, const std::vector<Derivation>& derivs) {
  std::unordered_map<const void*, const Derivation*> index;
  for (const auto& d : derivs) index_derivation(d, index);
  SourceProgram out = p;
  std::optional<TypeError> err;
  int counter = 0;
  for (auto& decl : out.decls) {
    decl.term = rebuild(decl.term, [&](const ml5::Term& orig, const ml5::Term& n) -> ml5::Term {
      if ((n.kind() != TermKind::VCase && n.kind() != TermKind::Split) || err) return n;
      auto it = index.find(orig.id());
      if (it == index.end()) {
        TypeError e;
        e.reason = TypeErrorReason::TetheringViolation;
        e.location = orig.pos();
        e.found = "value-level case without typing information";
        err = e;
        return n;
      }
      const Derivation& d = *it->second;
      const Derivation& s = d.premise(0);
      auto r = n.kind() == TermKind::VCase
                   ? elaborate_untethered_case(n.sub(0), s.root.type, s.root.world, n.name(), n.sub(1), n.name2(),
                                               n.sub(2), d.root.type, d.root.world)
                   : elaborate_untethered_split(n.sub(0), s.root.type, s.root.world, n.name(), n.name2(), n.sub(1),
                                                d.root.type, d.root.world, "_p" + std::to_string(counter++));
      if (!r) {
        err = r.error();
        return n;
      }
      return r.value();
    });
    if (err) {
      err->decl = decl.name;
      return *err;
    }
  }
  return out;
}

SourceProgram elaborate_tethered_cases(const SourceProgram& p, const std::vector<Derivation>& derivs) {
  std::unordered_map<const void*, const Derivation*> index;
  for (const auto& d : derivs) index_derivation(d, index);
  SourceProgram out = p;
  int counter = 0;
  for (auto& decl : out.decls) {
    decl.term = rebuild(decl.term, [&](const ml5::Term& orig, const ml5::Term& n) -> ml5::Term {
      if (n.kind() != TermKind::Case) return n;
      auto it = index.find(orig.id());
      if (it == index.end()) return n;
      const Type& sum = it->second->premise(0).root.type;
      std::string s = "_s" + std::to_string(counter++);
      Pos pos = n.pos();
      return ml5::Term::let(s, sum, n.sub(0),
                            ml5::Term::vcase(ml5::Term::var(s, pos), n.name(), n.sub(1), n.name2(), n.sub(2), pos), pos);
    });
  }
  return out;
}

}  // namespace ml5
