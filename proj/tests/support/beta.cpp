#include "support.hpp"

namespace ml5::test {

namespace {

Term strip(const Term& t) {
  Term s = t;
  while (s.kind() == TermKind::Anno) s = s.sub(0);
  return s;
}

/// Value returned by `ret v` (annotations on either level ignored).
std::optional<Term> returned_value(const Term& e) {
  Term s = strip(e);
  if (s.kind() != TermKind::Ret) return std::nullopt;
  return strip(s.sub(0));
}

Term at_world(const Term& v, const Type& a, const World& w) { return Term::anno(v, a, w); }

/// Replaces the node with identity `target` inside `t`.
Term replace(const Term& t, const void* target, const Term& with, bool& done) {
  if (t.id() == target) {
    done = true;
    return with;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> subs;
  bool changed = false;
  for (int i = 0; i < t.arity(); ++i) {
    subs.push_back(replace(t.sub(i), target, with, done));
    changed = changed || subs.back().id() != t.sub(i).id();
  }
  return changed ? t.with_subs(std::move(subs)) : t;
}

struct Contraction {
  std::string kind;
  Term result;
};

std::optional<Contraction> contract(const Derivation& d) {
  const Term& t = d.root.term;
  const World& w = d.root.world;
  const Type& c = d.root.type;
  auto wrap = [&](Term e) { return Term::anno(std::move(e), c, std::nullopt); };
  switch (t.kind()) {
    case TermKind::App: {
      auto f = returned_value(t.sub(0));
      auto a = returned_value(t.sub(1));
      if (!f || !a || f->kind() != TermKind::Lam) return std::nullopt;
      Term arg = strip(t.sub(1)).sub(0);
      return Contraction{"function", wrap(subst_term(f->sub(0), f->name(), at_world(arg, f->type(), w)))};
    }
    case TermKind::Fst:
    case TermKind::Snd: {
      auto p = returned_value(t.sub(0));
      if (!p || p->kind() != TermKind::Pair) return std::nullopt;
      Term part = p->sub(t.kind() == TermKind::Fst ? 0 : 1);
      return Contraction{"pair", Term::ret(at_world(part, c, w))};
    }
    case TermKind::Case: {
      auto s = returned_value(t.sub(0));
      if (!s || (s->kind() != TermKind::Inl && s->kind() != TermKind::Inr)) return std::nullopt;
      bool left = s->kind() == TermKind::Inl;
      const Type& sum = d.premise(0).root.type;
      Term arg = at_world(s->sub(0), left ? sum.left() : sum.right(), w);
      Term body = left ? subst_term(t.sub(1), t.name(), arg) : subst_term(t.sub(2), t.name2(), arg);
      return Contraction{"sum", wrap(body)};
    }
    case TermKind::VCase: {
      Term s = strip(t.sub(0));
      if (s.kind() != TermKind::Inl && s.kind() != TermKind::Inr) return std::nullopt;
      bool left = s.kind() == TermKind::Inl;
      const Derivation& sv = d.premise(0);
      Term arg = at_world(s.sub(0), left ? sv.root.type.left() : sv.root.type.right(), sv.root.world);
      Term body = left ? subst_term(t.sub(1), t.name(), arg) : subst_term(t.sub(2), t.name2(), arg);
      return Contraction{"sum", wrap(body)};
    }
    case TermKind::Split: {
      Term s = strip(t.sub(0));
      if (s.kind() != TermKind::Pair) return std::nullopt;
      const Derivation& sv = d.premise(0);
      Term body = subst_term(t.sub(1), t.name(), at_world(s.sub(0), sv.root.type.left(), sv.root.world));
      body = subst_term(body, t.name2(), at_world(s.sub(1), sv.root.type.right(), sv.root.world));
      return Contraction{"pair", wrap(body)};
    }
    case TermKind::WApp: {
      auto f = returned_value(t.sub(0));
      if (!f || f->kind() != TermKind::WLam) return std::nullopt;
      World target = t.world() ? *t.world() : w;
      return Contraction{"world-app", Term::ret(at_world(subst_world_term(f->sub(0), target), c, w))};
    }
    case TermKind::Leta: {
      auto h = returned_value(t.sub(0));
      if (!h || h->kind() != TermKind::Hold) return std::nullopt;
      const Type& at = d.premise(0).root.type;
      return Contraction{"at", wrap(subst_term(t.sub(1), t.name(), at_world(h->sub(0), at.left(), at.world())))};
    }
    case TermKind::Unpack: {
      auto p = returned_value(t.sub(0));
      if (!p || p->kind() != TermKind::Pack) return std::nullopt;
      const World& witness = *p->world();
      const Type& ex = d.premise(0).root.type;
      Term body = subst_world_term(t.sub(1), witness);
      body = subst_term(body, t.name2(), at_world(p->sub(0), subst_world(ex.body(), witness), w));
      return Contraction{"exists", wrap(body)};
    }
    case TermKind::Let: {
      auto v = returned_value(t.sub(0));
      if (!v) return std::nullopt;
      Term arg = strip(t.sub(0)).sub(0);
      return Contraction{"let", wrap(subst_term(t.sub(1), t.name(), at_world(arg, d.premise(0).root.type, w)))};
    }
    case TermKind::Unsham: {
      auto s = returned_value(t.sub(0));
      if (!s || s->kind() != TermKind::Sham) return std::nullopt;
      return Contraction{"shamrock", Term::ret(at_world(s->sub(0), c, w))};
    }
    default:
      return std::nullopt;
  }
}

void collect(const Derivation& d, std::vector<const Derivation*>& out) {
  out.push_back(&d);
  for (const auto& p : d.premises) collect(p, out);
}

}  // namespace

std::vector<Redex> beta_redexes(const SourceProgram& p, const std::vector<Derivation>& derivs) {
  std::vector<Redex> out;
  for (std::size_t i = 0; i < p.decls.size() && i < derivs.size(); ++i) {
    std::vector<const Derivation*> nodes;
    collect(derivs[i], nodes);
    for (const Derivation* n : nodes) {
      auto c = contract(*n);
      if (!c) continue;
      bool done = false;
      Term replaced = replace(p.decls[i].term, n->root.term.id(), c->result, done);
      if (!done) continue;  // inside a ⌘ body, which the checker re-indexes
      Redex r;
      r.kind = c->kind;
      r.decl = p.decls[i].name;
      r.contracted = p;
      r.contracted.decls[i].term = replaced;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace ml5::test
