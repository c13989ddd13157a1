#include "ml5/typecheck.hpp"

#include <algorithm>
#include <set>

#include "ml5/print.hpp"

namespace ml5 {

std::string_view reason_name(TypeErrorReason r) {
  switch (r) {
    case TypeErrorReason::WorldMismatch:
      return "WorldMismatch";
    case TypeErrorReason::NotMobile:
      return "NotMobile";
    case TypeErrorReason::NotAValue:
      return "NotAValue";
    case TypeErrorReason::UnboundVariable:
      return "UnboundVariable";
    case TypeErrorReason::ConnectiveMismatch:
      return "ConnectiveMismatch";
    case TypeErrorReason::TetheringViolation:
      return "TetheringViolation";
  }
  return "?";
}

std::string TypeError::message() const {
  std::string out(reason_name(reason));
  out += ": ";
  if (reason == TypeErrorReason::NotMobile || reason == TypeErrorReason::UnboundVariable || expected.empty()) {
    out += found;
  } else {
    out += "expected " + expected + ", found " + found;
  }
  return out;
}

namespace {

struct Failure {
  TypeError error;
};

std::string kind_word(TermKind k) {
  switch (k) {
    case TermKind::Lam:
      return "lam";
    case TermKind::Pair:
      return "pair";
    case TermKind::Inl:
      return "inl";
    case TermKind::Inr:
      return "inr";
    case TermKind::Hold:
      return "hold";
    case TermKind::WLam:
      return "wlam";
    case TermKind::Pack:
      return "pack";
    case TermKind::Sham:
      return "sham";
    default:
      return "term";
  }
}

class Checker {
 public:
  explicit Checker(const CheckEnv& env) : env_(env), sites_(env.sites.begin(), env.sites.end()) {}

  [[noreturn]] void fail(TypeErrorReason r, const Term& at, std::string expected, std::string found) const {
    TypeError e;
    e.reason = r;
    e.location = at ? at.pos() : Pos{};
    e.expected = std::move(expected);
    e.found = std::move(found);
    throw Failure{e};
  }

  void known_world(const Ctx& ctx, const World& w, const Term& at, int depth = 0) const {
    if (w.is_var()) {
      if (w.index() >= ctx.worlds() + depth) fail(TypeErrorReason::UnboundVariable, at, {}, "world variable " + to_string(w));
    } else if (!sites_.count(w.name())) {
      fail(TypeErrorReason::UnboundVariable, at, {}, "world " + w.name());
    }
  }

  void known_type(const Ctx& ctx, const Type& a, const Term& at) const {
    map_type_worlds(a, [&](const World& w, int depth) {
      known_world(ctx, w, at, depth);
      return w;
    });
  }

  void same_type(const Type& want, const Type& got, const Term& at) const {
    if (want != got) fail(TypeErrorReason::ConnectiveMismatch, at, to_string(want), to_string(got));
  }

  const Type& need(const Type& a, TypeKind k, const char* shape, const Term& at) const {
    if (a.kind() != k) fail(TypeErrorReason::ConnectiveMismatch, at, shape, to_string(a));
    return a;
  }

  static Derivation node(JudgementKind k, const Ctx& ctx, const Term& t, Type a, const World& w, std::string rule,
                         std::vector<Derivation> premises = {}) {
    return Derivation{Judgement{k, ctx, t, std::move(a), w}, std::move(rule), std::move(premises)};
  }

  /// World of a value scrutinee for the untethered eliminations.
  World scrutinee_world(const Ctx& ctx, const Term& v, const World& w) const {
    if (v.kind() == TermKind::Var) {
      const Hyp* h = ctx.lookup(v.name());
      if (!h) fail(TypeErrorReason::UnboundVariable, v, {}, v.name());
      return h->world;
    }
    if (v.kind() == TermKind::Anno && v.world()) return *v.world();
    return w;
  }

  //
  // Values
  //

  Derivation value(const Ctx& ctx, const Term& t, const Type* want, const World& w) const {
    Derivation d = value_rule(ctx, t, want, w);
    if (want) same_type(*want, d.root.type, t);
    return d;
  }

  Derivation value_rule(const Ctx& ctx, const Term& t, const Type* want, const World& w) const {
    const auto V = JudgementKind::Value;
    auto no_synth = [&]() -> Derivation {
      fail(TypeErrorReason::ConnectiveMismatch, t, "a type annotation", "unannotated " + kind_word(t.kind()));
    };
    switch (t.kind()) {
      case TermKind::Var: {
        const Hyp* h = ctx.lookup(t.name());
        if (!h) fail(TypeErrorReason::UnboundVariable, t, {}, t.name());
        if (h->world != w) {
          fail(TypeErrorReason::WorldMismatch, t, to_string(w), to_string(h->world) + " (variable " + t.name() + ")");
        }
        return node(V, ctx, t, h->type, w, "V-Var");
      }
      case TermKind::Int:
        return node(V, ctx, t, Type::int_(), w, "V-Int");
      case TermKind::Str:
        return node(V, ctx, t, Type::string_(), w, "V-Str");
      case TermKind::Unit:
        return node(V, ctx, t, Type::unit(), w, "V-Unit");
      case TermKind::Lam: {
        known_type(ctx, t.type(), t);
        const Type* cod = nullptr;
        if (want) {
          need(*want, TypeKind::Arrow, "function type", t);
          same_type(want->left(), t.type(), t);
          cod = &want->right();
        }
        Derivation body = expr(ctx.with_hyp(t.name(), t.type(), w), t.sub(0), cod, w);
        Type a = Type::arrow(t.type(), body.root.type);
        return node(V, ctx, t, a, w, "V-Lam", {std::move(body)});
      }
      case TermKind::Pair: {
        if (want) need(*want, TypeKind::Prod, "product type", t);
        Derivation l = value(ctx, t.sub(0), want ? &want->left() : nullptr, w);
        Derivation r = value(ctx, t.sub(1), want ? &want->right() : nullptr, w);
        Type a = Type::prod(l.root.type, r.root.type);
        return node(V, ctx, t, a, w, "V-Pair", {std::move(l), std::move(r)});
      }
      case TermKind::Inl:
      case TermKind::Inr: {
        if (!want) return no_synth();
        need(*want, TypeKind::Sum, "sum type", t);
        bool left = t.kind() == TermKind::Inl;
        Derivation v = value(ctx, t.sub(0), left ? &want->left() : &want->right(), w);
        return node(V, ctx, t, *want, w, left ? "V-Inl" : "V-Inr", {std::move(v)});
      }
      case TermKind::Hold: {
        if (want) {
          need(*want, TypeKind::At, "at type", t);
          known_world(ctx, want->world(), t);
          Derivation v = value(ctx, t.sub(0), &want->left(), want->world());
          return node(V, ctx, t, *want, w, "V-Hold", {std::move(v)});
        }
        Derivation v = value(ctx, t.sub(0), nullptr, w);
        Type a = Type::at(v.root.type, w);
        return node(V, ctx, t, a, w, "V-Hold", {std::move(v)});
      }
      case TermKind::WLam: {
        if (!is_value(t.sub(0))) fail(TypeErrorReason::NotAValue, t.sub(0), "value", "expression under wlam");
        if (want) need(*want, TypeKind::Forall, "forall type", t);
        Derivation body = value(ctx.with_world(), t.sub(0), want ? &want->body() : nullptr, shift_world(w, 1));
        Type a = Type::forall(body.root.type, t.name());
        return node(V, ctx, t, a, w, "V-WLam", {std::move(body)});
      }
      case TermKind::Pack: {
        if (!want) return no_synth();
        need(*want, TypeKind::Exists, "exists type", t);
        known_world(ctx, *t.world(), t);
        Type inst = subst_world(want->body(), *t.world());
        Derivation v = value(ctx, t.sub(0), &inst, w);
        return node(V, ctx, t, *want, w, "V-Pack", {std::move(v)});
      }
      case TermKind::Sham: {
        if (want) need(*want, TypeKind::Shamrock, "shamrock type", t);
        Type inner;
        if (want) inner = shift_type(want->body(), 1);
        Derivation v = value(ctx.with_world(), shift_term_worlds(t.sub(0), 1), want ? &inner : nullptr,
                             World::var(0, "w"));
        if (mentions_var(v.root.type, 0)) {
          fail(TypeErrorReason::WorldMismatch, t, "a type independent of the fresh world", to_string(v.root.type));
        }
        Type a = Type::shamrock(shift_type(v.root.type, -1));
        return node(V, ctx, t, a, w, "V-Sham", {std::move(v)});
      }
      case TermKind::Anno: {
        known_type(ctx, t.type(), t);
        if (t.world()) {
          known_world(ctx, *t.world(), t);
          if (*t.world() != w) fail(TypeErrorReason::WorldMismatch, t, to_string(w), to_string(*t.world()));
        }
        Derivation v = value(ctx, t.sub(0), &t.type(), w);
        return node(V, ctx, t, t.type(), w, "V-Anno", {std::move(v)});
      }
      default:
        fail(TypeErrorReason::NotAValue, t, "value", to_string(t));
    }
  }

  //
  // Expressions
  //

  Derivation expr(const Ctx& ctx, const Term& t, const Type* want, const World& w) const {
    Derivation d = expr_rule(ctx, t, want, w);
    if (want) same_type(*want, d.root.type, t);
    return d;
  }

  Derivation expr_rule(const Ctx& ctx, const Term& t, const Type* want, const World& w) const {
    const auto E = JudgementKind::Expr;
    switch (t.kind()) {
      case TermKind::Ret: {
        Derivation v = value(ctx, t.sub(0), want, w);
        Type a = v.root.type;
        return node(E, ctx, t, a, w, "E-Ret", {std::move(v)});
      }
      case TermKind::Let: {
        if (t.type()) known_type(ctx, t.type(), t);
        Derivation e1 = expr(ctx, t.sub(0), t.type() ? &t.type() : nullptr, w);
        Derivation e2 = expr(ctx.with_hyp(t.name(), e1.root.type, w), t.sub(1), want, w);
        Type a = e2.root.type;
        return node(E, ctx, t, a, w, "E-Let", {std::move(e1), std::move(e2)});
      }
      case TermKind::App: {
        Derivation f = expr(ctx, t.sub(0), nullptr, w);
        need(f.root.type, TypeKind::Arrow, "function type", t.sub(0));
        Derivation a = expr(ctx, t.sub(1), &f.root.type.left(), w);
        Type c = f.root.type.right();
        return node(E, ctx, t, c, w, "E-App", {std::move(f), std::move(a)});
      }
      case TermKind::Fst:
      case TermKind::Snd: {
        Derivation p = expr(ctx, t.sub(0), nullptr, w);
        need(p.root.type, TypeKind::Prod, "product type", t.sub(0));
        bool first = t.kind() == TermKind::Fst;
        Type a = first ? p.root.type.left() : p.root.type.right();
        return node(E, ctx, t, a, w, first ? "E-Fst" : "E-Snd", {std::move(p)});
      }
      case TermKind::Case: {
        Derivation s = expr(ctx, t.sub(0), nullptr, w);
        need(s.root.type, TypeKind::Sum, "sum type", t.sub(0));
        Derivation l = expr(ctx.with_hyp(t.name(), s.root.type.left(), w), t.sub(1), want, w);
        Derivation r = expr(ctx.with_hyp(t.name2(), s.root.type.right(), w), t.sub(2), want ? want : &l.root.type, w);
        Type a = l.root.type;
        return node(E, ctx, t, a, w, "E-Case", {std::move(s), std::move(l), std::move(r)});
      }
      case TermKind::VCase: {
        if (env_.mode == Mode::Classic) {
          fail(TypeErrorReason::TetheringViolation, t, "case on an expression scrutinee", "value-level case");
        }
        World ws = scrutinee_world(ctx, t.sub(0), w);
        return value_case(ctx, t, want, w, ws);
      }
      case TermKind::Split: {
        if (env_.mode == Mode::Classic) {
          fail(TypeErrorReason::TetheringViolation, t, "tethered elimination", "value-level split");
        }
        World ws = scrutinee_world(ctx, t.sub(0), w);
        known_world(ctx, ws, t);
        Derivation v = value(ctx, t.sub(0), nullptr, ws);
        need(v.root.type, TypeKind::Prod, "product type", t.sub(0));
        Ctx inner = ctx.with_hyp(t.name(), v.root.type.left(), ws).with_hyp(t.name2(), v.root.type.right(), ws);
        Derivation body = expr(inner, t.sub(1), want, w);
        Type a = body.root.type;
        return node(E, ctx, t, a, w, "E-Split", {std::move(v), std::move(body)});
      }
      case TermKind::Leta: {
        Derivation e1 = expr(ctx, t.sub(0), nullptr, w);
        need(e1.root.type, TypeKind::At, "at type", t.sub(0));
        const Type& at = e1.root.type;
        Derivation e2 = expr(ctx.with_hyp(t.name(), at.left(), at.world()), t.sub(1), want, w);
        Type a = e2.root.type;
        return node(E, ctx, t, a, w, "E-Leta", {std::move(e1), std::move(e2)});
      }
      case TermKind::WApp: {
        Derivation f = expr(ctx, t.sub(0), nullptr, w);
        need(f.root.type, TypeKind::Forall, "forall type", t.sub(0));
        World target = t.world() ? *t.world() : w;
        known_world(ctx, target, t);
        Type a = subst_world(f.root.type.body(), target);
        return node(E, ctx, t, a, w, "E-WApp", {std::move(f)});
      }
      case TermKind::Unpack: {
        Derivation e1 = expr(ctx, t.sub(0), nullptr, w);
        need(e1.root.type, TypeKind::Exists, "exists type", t.sub(0));
        World w1 = shift_world(w, 1);
        Ctx inner = ctx.with_world().with_hyp(t.name2(), e1.root.type.body(), w1);
        Type shifted;
        if (want) shifted = shift_type(*want, 1);
        Derivation e2 = expr(inner, t.sub(1), want ? &shifted : nullptr, w1);
        if (mentions_var(e2.root.type, 0)) {
          fail(TypeErrorReason::WorldMismatch, t.sub(1), "a type not mentioning " + t.name(), to_string(e2.root.type));
        }
        Type a = shift_type(e2.root.type, -1);
        return node(E, ctx, t, a, w, "E-Unpack", {std::move(e1), std::move(e2)});
      }
      case TermKind::Unsham: {
        Derivation e = expr(ctx, t.sub(0), nullptr, w);
        need(e.root.type, TypeKind::Shamrock, "shamrock type", t.sub(0));
        Type a = e.root.type.body();
        return node(E, ctx, t, a, w, "E-Unsham", {std::move(e)});
      }
      case TermKind::Get: {
        known_world(ctx, *t.world(), t);
        Derivation e = expr(ctx, t.sub(0), want, *t.world());
        if (!is_mobile(e.root.type)) fail(TypeErrorReason::NotMobile, t, "mobile type", to_string(e.root.type));
        Type a = e.root.type;
        return node(E, ctx, t, a, w, "E-Get", {std::move(e)});
      }
      case TermKind::Ref: {
        if (want) need(*want, TypeKind::Ref, "ref type", t);
        Derivation e = expr(ctx, t.sub(0), want ? &want->body() : nullptr, w);
        Type a = Type::ref(e.root.type);
        return node(E, ctx, t, a, w, "E-Ref", {std::move(e)});
      }
      case TermKind::Deref: {
        Derivation e = expr(ctx, t.sub(0), nullptr, w);
        need(e.root.type, TypeKind::Ref, "ref type", t.sub(0));
        Type a = e.root.type.body();
        return node(E, ctx, t, a, w, "E-Deref", {std::move(e)});
      }
      case TermKind::Assign: {
        Derivation r = expr(ctx, t.sub(0), nullptr, w);
        need(r.root.type, TypeKind::Ref, "ref type", t.sub(0));
        Derivation e = expr(ctx, t.sub(1), &r.root.type.body(), w);
        return node(E, ctx, t, Type::unit(), w, "E-Assign", {std::move(r), std::move(e)});
      }
      case TermKind::Print: {
        Derivation e = expr(ctx, t.sub(0), nullptr, w);
        need(e.root.type, TypeKind::Base, "base type", t.sub(0));
        return node(E, ctx, t, Type::unit(), w, "E-Print", {std::move(e)});
      }
      case TermKind::Anno: {
        if (is_value(t)) break;
        known_type(ctx, t.type(), t);
        if (t.world()) {
          known_world(ctx, *t.world(), t);
          if (*t.world() != w) fail(TypeErrorReason::WorldMismatch, t, to_string(w), to_string(*t.world()));
        }
        Derivation e = expr(ctx, t.sub(0), &t.type(), w);
        return node(E, ctx, t, t.type(), w, "E-Anno", {std::move(e)});
      }
      default:
        break;
    }
    // A value constructor over non-values: report the offending subterm.
    if (!is_value(t)) return value(ctx, t, want, w);
    fail(TypeErrorReason::ConnectiveMismatch, t, "expression", "value " + to_string(t) + " (use ret)");
  }

  Derivation value_case(const Ctx& ctx, const Term& t, const Type* want, const World& w, const World& ws) const {
    known_world(ctx, ws, t);
    Derivation v = value(ctx, t.sub(0), nullptr, ws);
    need(v.root.type, TypeKind::Sum, "sum type", t.sub(0));
    Derivation l = expr(ctx.with_hyp(t.name(), v.root.type.left(), ws), t.sub(1), want, w);
    Derivation r = expr(ctx.with_hyp(t.name2(), v.root.type.right(), ws), t.sub(2), want ? want : &l.root.type, w);
    Type a = l.root.type;
    return node(JudgementKind::Expr, ctx, t, a, w, "E-VCase", {std::move(v), std::move(l), std::move(r)});
  }

  const CheckEnv& env() const { return env_; }

 private:
  const CheckEnv& env_;
  std::set<std::string> sites_;
};

template <class F>
Checked guarded(F&& f) {
  try {
    return f();
  } catch (const Failure& failure) {
    return failure.error;
  }
}

}  // namespace

Checked check_value(const Ctx& ctx, const Term& v, const Type& a, const World& w, const CheckEnv& env) {
  Checker c(env);
  return guarded([&] { return c.value(ctx, v, &a, w); });
}

Checked check_expr(const Ctx& ctx, const Term& e, const Type& a, const World& w, const CheckEnv& env) {
  Checker c(env);
  return guarded([&] { return c.expr(ctx, e, &a, w); });
}

Checked synth(const Ctx& ctx, const Term& t, const World& w, const CheckEnv& env) {
  Checker c(env);
  return guarded([&] { return is_value(t) ? c.value(ctx, t, nullptr, w) : c.expr(ctx, t, nullptr, w); });
}

Checked check_value_case(const Ctx& ctx, const Term& v, const Type& sum, const World& ws, const std::string& x,
                         const Term& left, const std::string& y, const Term& right, const Type& c, const World& w,
                         const CheckEnv& env) {
  Checker ck(env);
  Term scrut = sum ? Term::anno(v, sum, ws, v.pos()) : v;
  Term t = Term::vcase(scrut, x, left, y, right, v.pos());
  return guarded([&]() -> Derivation {
    if (env.mode == Mode::Classic) {
      ck.fail(TypeErrorReason::TetheringViolation, t, "case on an expression scrutinee", "value-level case");
    }
    if (!is_value(v)) ck.fail(TypeErrorReason::NotAValue, v, "value", to_string(v));
    return ck.value_case(ctx, t, &c, w, ws);
  });
}

std::vector<std::string> program_sites(const SourceProgram& p, const CheckEnv& env) {
  std::vector<std::string> sites = env.sites;
  for (const auto& w : p.worlds) {
    if (std::find(sites.begin(), sites.end(), w) == sites.end()) sites.push_back(w);
  }
  return sites;
}

Ctx program_ctx(const SourceProgram& p, int n) {
  Ctx ctx;
  std::size_t count = n < 0 ? p.decls.size() : std::min(p.decls.size(), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) ctx = ctx.with_hyp(p.decls[i].name, p.decls[i].type, p.decls[i].world);
  return ctx;
}

Result<std::vector<Derivation>, TypeError> check_program(const SourceProgram& p, const CheckEnv& env) {
  CheckEnv full = env;
  full.sites = program_sites(p, env);
  Checker c(full);
  std::vector<Derivation> out;
  Ctx ctx;
  for (const auto& d : p.decls) {
    try {
      if (d.world.is_var()) c.fail(TypeErrorReason::UnboundVariable, d.term, {}, "world variable " + to_string(d.world));
      c.known_world(ctx, d.world, d.term);
      c.known_type(ctx, d.type, d.term);
      out.push_back(is_value(d.term) ? c.value(ctx, d.term, &d.type, d.world) : c.expr(ctx, d.term, &d.type, d.world));
    } catch (const Failure& failure) {
      TypeError e = failure.error;
      e.decl = d.name;
      if (e.location.line == 0) e.location = d.pos;
      return e;
    }
    ctx = ctx.with_hyp(d.name, d.type, d.world);
  }
  return out;
}

}  // namespace ml5
