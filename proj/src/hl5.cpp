#include "ml5/hl5.hpp"

#include <algorithm>
#include <sstream>

#include "ml5/print.hpp"

namespace ml5 {

bool mobile_hl5(const Type& a) { return is_mobile(a); }

Type subst_world_hl5(const Type& body, const World& w) { return subst_world(body, w); }

//
// Kripke interpretation
//

namespace {

SemType interp_closed(const Type& a, const World& w, const std::vector<std::string>& sites) {
  SemType s;
  switch (a.kind()) {
    case TypeKind::Base:
      s.kind = SemType::Kind::Base;
      s.base = a.base_type();
      return s;
    case TypeKind::Arrow:
      s.kind = SemType::Kind::Function;
      s.dom = a.left();
      s.cod = a.right();
      s.world = w;
      return s;
    case TypeKind::Prod:
    case TypeKind::Sum:
      s.kind = a.kind() == TypeKind::Prod ? SemType::Kind::Product : SemType::Kind::Sum;
      s.parts = {interp_closed(a.left(), w, sites), interp_closed(a.right(), w, sites)};
      return s;
    case TypeKind::At:
      return interp_closed(a.left(), a.world(), sites);
    case TypeKind::Forall:
    case TypeKind::Exists:
      s.kind = a.kind() == TypeKind::Forall ? SemType::Kind::Intersection : SemType::Kind::Union;
      s.sites = sites;
      for (const auto& site : sites) s.parts.push_back(interp_closed(subst_world(a.body(), World::site(site)), w, sites));
      return s;
    case TypeKind::Lax:
      s.kind = SemType::Kind::Computation;
      s.cod = a.body();
      s.world = w;
      return s;
    case TypeKind::Ref:
      s.kind = SemType::Kind::RefHandle;
      s.cod = a.body();
      s.world = w;
      return s;
    case TypeKind::Shamrock:
      return interp_closed(Type::forall(Type::at(shift_type(a.body(), 1), World::var(0))), w, sites);
  }
  return s;
}

void print_sem(std::ostream& os, const SemType& s) {
  switch (s.kind) {
    case SemType::Kind::Base:
      os << to_string(Type::base(s.base));
      return;
    case SemType::Kind::Function:
      os << "fn(" << to_string(s.dom) << " -> " << to_string(s.cod) << ")@" << to_string(s.world);
      return;
    case SemType::Kind::Product:
    case SemType::Kind::Sum:
      os << (s.kind == SemType::Kind::Product ? "prod(" : "sum(");
      print_sem(os, s.parts[0]);
      os << ", ";
      print_sem(os, s.parts[1]);
      os << ")";
      return;
    case SemType::Kind::Intersection:
    case SemType::Kind::Union:
      os << (s.kind == SemType::Kind::Intersection ? "all{" : "some{");
      for (std::size_t i = 0; i < s.parts.size(); ++i) {
        if (i) os << ", ";
        os << s.sites[i] << ": ";
        print_sem(os, s.parts[i]);
      }
      os << "}";
      return;
    case SemType::Kind::Computation:
      os << "comp(" << to_string(s.cod) << ")@" << to_string(s.world);
      return;
    case SemType::Kind::RefHandle:
      os << "ref(" << to_string(s.cod) << ")@" << to_string(s.world);
      return;
  }
}

}  // namespace

std::string to_string(const SemType& s) {
  std::ostringstream os;
  print_sem(os, s);
  return os.str();
}

Result<SemType, std::string> interp(const Type& a, const World& w, const std::vector<std::string>& sites) {
  if (!is_closed(a) || w.is_var()) return std::string("interp: open world variable in ") + to_string(a);
  return interp_closed(a, w, sites);
}

//
// L5 typing
//

namespace {

struct Failure {
  L5Error error;
};

class L5Checker {
 public:
  explicit L5Checker(const L5Env& env) : env_(env) {}

  [[noreturn]] void fail(const l5::Term& at, const std::string& msg) const { throw Failure{L5Error{msg, at}}; }

  void known_world(const Ctx& ctx, const World& w, const l5::Term& at, int depth = 0) const {
    if (w.is_var()) {
      if (w.index() >= ctx.worlds() + depth) fail(at, "unbound world variable " + to_string(w));
    } else if (!env_.sites.empty() && std::find(env_.sites.begin(), env_.sites.end(), w.name()) == env_.sites.end()) {
      fail(at, "unknown world " + w.name());
    }
  }

  void known_type(const Ctx& ctx, const Type& a, const l5::Term& at) const {
    if (!a) fail(at, "missing type annotation");
    if (contains_kind(a, TypeKind::Shamrock)) fail(at, "shamrock type in core term");
    map_type_worlds(a, [&](const World& w, int depth) {
      known_world(ctx, w, at, depth);
      return w;
    });
  }

  const Type& need(const Type& a, TypeKind k, const char* shape, const l5::Term& at) const {
    if (a.kind() != k) fail(at, std::string("expected ") + shape + ", found " + to_string(a));
    return a;
  }

  void same(const Type& want, const Type& got, const l5::Term& at) const {
    if (want != got) fail(at, "expected " + to_string(want) + ", found " + to_string(got));
  }

  World scrutinee_world(const Ctx& ctx, const l5::Term& t, const World& w) const {
    if (t.kind() == l5::Kind::Var) {
      const Hyp* h = ctx.lookup(t.name());
      if (!h) fail(t, "unbound variable " + t.name());
      return h->world;
    }
    if (t.kind() == l5::Kind::Anno && t.world()) return *t.world();
    return w;
  }

  Type check(const Ctx& ctx, const l5::Term& t, const Type* want, const World& w) const {
    Type got = rule(ctx, t, want, w);
    if (want) same(*want, got, t);
    return got;
  }

  Type rule(const Ctx& ctx, const l5::Term& t, const Type* want, const World& w) const {
    using l5::Kind;
    auto lax_of = [&](const Type& a) { return Type::lax(a); };
    auto want_lax = [&]() -> const Type* {
      if (!want) return nullptr;
      need(*want, TypeKind::Lax, "computation type", t);
      return &want->body();
    };
    switch (t.kind()) {
      case Kind::Var: {
        const Hyp* h = ctx.lookup(t.name());
        if (!h) fail(t, "unbound variable " + t.name());
        if (h->world != w) fail(t, "variable " + t.name() + " lives at " + to_string(h->world) + ", used at " + to_string(w));
        return h->type;
      }
      case Kind::Int:
        return Type::int_();
      case Kind::Str:
        return Type::string_();
      case Kind::Unit:
        return Type::unit();
      case Kind::Lam: {
        known_type(ctx, t.type(), t);
        const Type* cod = nullptr;
        if (want) {
          need(*want, TypeKind::Arrow, "function type", t);
          same(want->left(), t.type(), t);
          cod = &want->right();
        }
        Type body = check(ctx.with_hyp(t.name(), t.type(), w), t.sub(0), cod, w);
        return Type::arrow(t.type(), body);
      }
      case Kind::App: {
        Type f = check(ctx, t.sub(0), nullptr, w);
        need(f, TypeKind::Arrow, "function type", t.sub(0));
        check(ctx, t.sub(1), &f.left(), w);
        return f.right();
      }
      case Kind::Pair: {
        if (want) need(*want, TypeKind::Prod, "product type", t);
        Type l = check(ctx, t.sub(0), want ? &want->left() : nullptr, w);
        Type r = check(ctx, t.sub(1), want ? &want->right() : nullptr, w);
        return Type::prod(l, r);
      }
      case Kind::Fst:
      case Kind::Snd: {
        Type p = check(ctx, t.sub(0), nullptr, w);
        need(p, TypeKind::Prod, "product type", t.sub(0));
        return t.kind() == Kind::Fst ? p.left() : p.right();
      }
      case Kind::Inl:
      case Kind::Inr: {
        if (!want) fail(t, "cannot synthesize the type of an injection");
        need(*want, TypeKind::Sum, "sum type", t);
        check(ctx, t.sub(0), t.kind() == Kind::Inl ? &want->left() : &want->right(), w);
        return *want;
      }
      case Kind::Case: {
        World ws = scrutinee_world(ctx, t.sub(0), w);
        known_world(ctx, ws, t);
        Type s = check(ctx, t.sub(0), nullptr, ws);
        need(s, TypeKind::Sum, "sum type", t.sub(0));
        Type l = check(ctx.with_hyp(t.name(), s.left(), ws), t.sub(1), want, w);
        check(ctx.with_hyp(t.name2(), s.right(), ws), t.sub(2), &l, w);
        return l;
      }
      case Kind::Box: {
        known_world(ctx, *t.world(), t);
        if (want) {
          need(*want, TypeKind::At, "at type", t);
          if (want->world() != *t.world()) fail(t, "box world " + to_string(*t.world()) + " does not match " + to_string(*want));
        }
        Type a = check(ctx, t.sub(0), want ? &want->left() : nullptr, *t.world());
        return Type::at(a, *t.world());
      }
      case Kind::Unbox: {
        World ws = scrutinee_world(ctx, t.sub(0), w);
        known_world(ctx, ws, t);
        Type s = check(ctx, t.sub(0), nullptr, ws);
        need(s, TypeKind::At, "at type", t.sub(0));
        return check(ctx.with_hyp(t.name(), s.left(), s.world()), t.sub(1), want, w);
      }
      case Kind::WLam: {
        if (want) need(*want, TypeKind::Forall, "forall type", t);
        Type body = check(ctx.with_world(), t.sub(0), want ? &want->body() : nullptr, shift_world(w, 1));
        return Type::forall(body, t.name());
      }
      case Kind::WApp: {
        Type f = check(ctx, t.sub(0), nullptr, w);
        need(f, TypeKind::Forall, "forall type", t.sub(0));
        known_world(ctx, *t.world(), t);
        return subst_world(f.body(), *t.world());
      }
      case Kind::Pack: {
        if (!want) fail(t, "cannot synthesize the type of a package");
        need(*want, TypeKind::Exists, "exists type", t);
        known_world(ctx, *t.world(), t);
        Type inst = subst_world(want->body(), *t.world());
        check(ctx, t.sub(0), &inst, w);
        return *want;
      }
      case Kind::Unpack: {
        World ws = scrutinee_world(ctx, t.sub(0), w);
        known_world(ctx, ws, t);
        Type s = check(ctx, t.sub(0), nullptr, ws);
        need(s, TypeKind::Exists, "exists type", t.sub(0));
        Ctx inner = ctx.with_world().with_hyp(t.name2(), s.body(), shift_world(ws, 1));
        Type shifted;
        if (want) shifted = shift_type(*want, 1);
        Type body = check(inner, t.sub(1), want ? &shifted : nullptr, shift_world(w, 1));
        if (mentions_var(body, 0)) fail(t, "unpacked world escapes in " + to_string(body));
        return shift_type(body, -1);
      }
      case Kind::Let: {
        World ws = scrutinee_world(ctx, t.sub(0), w);
        known_world(ctx, ws, t);
        Type a = check(ctx, t.sub(0), nullptr, ws);
        return check(ctx.with_hyp(t.name(), a, ws), t.sub(1), want, w);
      }
      case Kind::Anno: {
        known_type(ctx, t.type(), t);
        World at = w;
        if (t.world()) {
          known_world(ctx, *t.world(), t);
          at = *t.world();
          if (at != w) fail(t, "annotation world " + to_string(at) + " differs from " + to_string(w));
        }
        return check(ctx, t.sub(0), &t.type(), at);
      }
      case Kind::MRet: {
        const Type* inner = want_lax();
        return lax_of(check(ctx, t.sub(0), inner, w));
      }
      case Kind::MBind: {
        known_type(ctx, t.type(), t);
        Type first = Type::lax(t.type());
        check(ctx, t.sub(0), &first, w);
        if (want) need(*want, TypeKind::Lax, "computation type", t);
        Type rest = check(ctx.with_hyp(t.name(), t.type(), w), t.sub(1), want, w);
        need(rest, TypeKind::Lax, "computation type", t.sub(1));
        return rest;
      }
      case Kind::MGet: {
        known_world(ctx, *t.world(), t);
        known_type(ctx, t.type(), t);
        if (!mobile_hl5(t.type())) fail(t, "NotMobile: " + to_string(t.type()));
        Type comp = Type::lax(t.type());
        check(ctx, t.sub(0), &comp, *t.world());
        return comp;
      }
      case Kind::Ref: {
        const Type* inner = want_lax();
        if (inner) need(*inner, TypeKind::Ref, "ref type", t);
        Type a = check(ctx, t.sub(0), inner ? &inner->body() : nullptr, w);
        return lax_of(Type::ref(a));
      }
      case Kind::Deref: {
        Type r = check(ctx, t.sub(0), nullptr, w);
        need(r, TypeKind::Ref, "ref type", t.sub(0));
        return lax_of(r.body());
      }
      case Kind::Assign: {
        Type r = check(ctx, t.sub(0), nullptr, w);
        need(r, TypeKind::Ref, "ref type", t.sub(0));
        check(ctx, t.sub(1), &r.body(), w);
        return lax_of(Type::unit());
      }
      case Kind::Print: {
        Type a = check(ctx, t.sub(0), nullptr, w);
        need(a, TypeKind::Base, "base type", t.sub(0));
        return lax_of(Type::unit());
      }
      case Kind::Handle:
        fail(t, "heap handle in source term");
    }
    fail(t, "unknown term");
  }

 private:
  const L5Env& env_;
};

}  // namespace

std::optional<L5Error> l5_diagnose(const Ctx& ctx, const l5::Term& t, const Type& b, const World& w,
                                   const L5Env& env) {
  try {
    L5Checker c(env);
    c.known_type(ctx, b, t);
    c.known_world(ctx, w, t);
    c.check(ctx, t, &b, w);
    return std::nullopt;
  } catch (const Failure& f) {
    return f.error;
  }
}

bool l5_check(const Ctx& ctx, const l5::Term& t, const Type& b, const World& w, const L5Env& env) {
  return !l5_diagnose(ctx, t, b, w, env).has_value();
}

Result<Type, L5Error> l5_synth(const Ctx& ctx, const l5::Term& t, const World& w, const L5Env& env) {
  try {
    L5Checker c(env);
    return c.check(ctx, t, nullptr, w);
  } catch (const Failure& f) {
    return f.error;
  }
}

std::optional<L5Error> l5_check_program(const l5::Program& p, const L5Env& env) {
  Ctx ctx;
  for (const auto& d : p.decls) {
    if (d.world.is_var()) return L5Error{"declaration " + d.name + " at a world variable", d.term};
    if (d.is_computation && d.type.kind() != TypeKind::Lax) {
      return L5Error{"computation declaration " + d.name + " needs a ◯ type", d.term};
    }
    if (auto err = l5_diagnose(ctx, d.term, d.type, d.world, env)) {
      err->message = d.name + ": " + err->message;
      return err;
    }
    ctx = ctx.with_hyp(d.name, d.is_computation ? d.type.body() : d.type, d.world);
  }
  return std::nullopt;
}

}  // namespace ml5
