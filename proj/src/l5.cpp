#include "ml5/l5.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace ml5::l5 {

struct Term::Node {
  Kind kind = Kind::Unit;
  std::string name;
  std::string name2;
  std::int64_t num = 0;
  std::string str;
  Type type;
  std::optional<World> world;
  std::vector<Term> subs;
};

Term Term::make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }

Term::Node Term::blank(Kind k, std::vector<Term> subs) {
  Node n;
  n.kind = k;
  n.subs = std::move(subs);
  return n;
}

Term Term::var(std::string x) {
  Node n = blank(Kind::Var);
  n.name = std::move(x);
  return make(std::move(n));
}

Term Term::int_lit(std::int64_t v) {
  Node n = blank(Kind::Int);
  n.num = v;
  return make(std::move(n));
}

Term Term::str_lit(std::string s) {
  Node n = blank(Kind::Str);
  n.str = std::move(s);
  return make(std::move(n));
}

Term Term::unit() { return make(blank(Kind::Unit)); }

Term Term::lam(std::string x, Type dom, Term body) {
  Node n = blank(Kind::Lam, {std::move(body)});
  n.name = std::move(x);
  n.type = std::move(dom);
  return make(std::move(n));
}

Term Term::app(Term f, Term a) { return make(blank(Kind::App, {std::move(f), std::move(a)})); }
Term Term::pair(Term a, Term b) { return make(blank(Kind::Pair, {std::move(a), std::move(b)})); }
Term Term::fst(Term t) { return make(blank(Kind::Fst, {std::move(t)})); }
Term Term::snd(Term t) { return make(blank(Kind::Snd, {std::move(t)})); }
Term Term::inl(Term t) { return make(blank(Kind::Inl, {std::move(t)})); }
Term Term::inr(Term t) { return make(blank(Kind::Inr, {std::move(t)})); }

Term Term::case_(Term scrut, std::string x, Term l, std::string y, Term r) {
  Node n = blank(Kind::Case, {std::move(scrut), std::move(l), std::move(r)});
  n.name = std::move(x);
  n.name2 = std::move(y);
  return make(std::move(n));
}

Term Term::box(World w, Term t) {
  Node n = blank(Kind::Box, {std::move(t)});
  n.world = std::move(w);
  return make(std::move(n));
}

Term Term::unbox(Term t, std::string x, Term body) {
  Node n = blank(Kind::Unbox, {std::move(t), std::move(body)});
  n.name = std::move(x);
  return make(std::move(n));
}

Term Term::wlam(std::string hint, Term body) {
  Node n = blank(Kind::WLam, {std::move(body)});
  n.name = std::move(hint);
  return make(std::move(n));
}

Term Term::wapp(Term t, World w) {
  Node n = blank(Kind::WApp, {std::move(t)});
  n.world = std::move(w);
  return make(std::move(n));
}

Term Term::pack(World w, Term t) {
  Node n = blank(Kind::Pack, {std::move(t)});
  n.world = std::move(w);
  return make(std::move(n));
}

Term Term::unpack(Term t, std::string hint, std::string x, Term body) {
  Node n = blank(Kind::Unpack, {std::move(t), std::move(body)});
  n.name = std::move(hint);
  n.name2 = std::move(x);
  return make(std::move(n));
}

Term Term::let(std::string x, Term t, Term body) {
  Node n = blank(Kind::Let, {std::move(t), std::move(body)});
  n.name = std::move(x);
  return make(std::move(n));
}

Term Term::anno(Term t, Type a, std::optional<World> w) {
  Node n = blank(Kind::Anno, {std::move(t)});
  n.type = std::move(a);
  n.world = std::move(w);
  return make(std::move(n));
}

Term Term::mret(Term t) { return make(blank(Kind::MRet, {std::move(t)})); }

Term Term::mbind(Term t, std::string x, Type a, Term body) {
  Node n = blank(Kind::MBind, {std::move(t), std::move(body)});
  n.name = std::move(x);
  n.type = std::move(a);
  return make(std::move(n));
}

Term Term::mget(World w, Type a, Term t) {
  Node n = blank(Kind::MGet, {std::move(t)});
  n.world = std::move(w);
  n.type = std::move(a);
  return make(std::move(n));
}

Term Term::ref(Term t) { return make(blank(Kind::Ref, {std::move(t)})); }
Term Term::deref(Term t) { return make(blank(Kind::Deref, {std::move(t)})); }
Term Term::assign(Term r, Term t) { return make(blank(Kind::Assign, {std::move(r), std::move(t)})); }
Term Term::print(Term t) { return make(blank(Kind::Print, {std::move(t)})); }

Term Term::handle(std::string site, std::int64_t id) {
  Node n = blank(Kind::Handle);
  n.world = World::site(std::move(site));
  n.num = id;
  return make(std::move(n));
}

namespace {

const std::string& empty_string() {
  static const std::string s;
  return s;
}

const Type& null_type() {
  static const Type t;
  return t;
}

const std::optional<World>& no_world() {
  static const std::optional<World> w;
  return w;
}

const Term& null_term() {
  static const Term t;
  return t;
}

}  // namespace

Kind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_ ? node_->name : empty_string(); }
const std::string& Term::name2() const { return node_ ? node_->name2 : empty_string(); }
std::int64_t Term::int_value() const { return node_->num; }
const std::string& Term::str_value() const { return node_->str; }
const Type& Term::type() const { return node_ ? node_->type : null_type(); }
const std::optional<World>& Term::world() const { return node_ ? node_->world : no_world(); }

const Term& Term::sub(int i) const {
  if (!node_ || i < 0 || static_cast<std::size_t>(i) >= node_->subs.size()) return null_term();
  return node_->subs[static_cast<std::size_t>(i)];
}

int Term::arity() const { return node_ ? static_cast<int>(node_->subs.size()) : 0; }

Term Term::with_subs(std::vector<Term> subs) const {
  Node n = *node_;
  n.subs = std::move(subs);
  return make(std::move(n));
}

Term Term::with_names(std::string n1, std::string n2) const {
  Node n = *node_;
  n.name = std::move(n1);
  n.name2 = std::move(n2);
  return make(std::move(n));
}

Term Term::with_type(Type a) const {
  Node n = *node_;
  n.type = std::move(a);
  return make(std::move(n));
}

Term Term::with_world(std::optional<World> w) const {
  Node n = *node_;
  n.world = std::move(w);
  return make(std::move(n));
}

bool operator==(const Term& x, const Term& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  if (a.kind != b.kind || a.num != b.num || a.str != b.str) return false;
  bool hint_only = a.kind == Kind::WLam;
  if (!hint_only && a.kind != Kind::Unpack && a.name != b.name) return false;
  if (a.name2 != b.name2) return false;
  if (static_cast<bool>(a.type) != static_cast<bool>(b.type)) return false;
  if (a.type && a.type != b.type) return false;
  if (a.world != b.world) return false;
  return a.subs == b.subs;
}

bool is_monadic(Kind k) {
  switch (k) {
    case Kind::MRet:
    case Kind::MBind:
    case Kind::MGet:
    case Kind::Ref:
    case Kind::Deref:
    case Kind::Assign:
    case Kind::Print:
      return true;
    default:
      return false;
  }
}

bool is_value(const Term& t) {
  if (!t) return false;
  if (is_monadic(t.kind())) return true;
  switch (t.kind()) {
    case Kind::Int:
    case Kind::Str:
    case Kind::Unit:
    case Kind::Lam:
    case Kind::WLam:
    case Kind::Handle:
      return true;
    case Kind::Pair:
      return is_value(t.sub(0)) && is_value(t.sub(1));
    case Kind::Inl:
    case Kind::Inr:
    case Kind::Box:
    case Kind::Pack:
      return is_value(t.sub(0));
    default:
      return false;
  }
}

int world_binders_around(Kind k, int child) {
  if (k == Kind::WLam && child == 0) return 1;
  if (k == Kind::Unpack && child == 1) return 1;
  return 0;
}

namespace {

// (field, child) pairs: field 1 is name(), field 2 is name2().
std::vector<std::pair<int, int>> binder_slots(Kind k) {
  switch (k) {
    case Kind::Lam:
      return {{1, 0}};
    case Kind::Case:
      return {{1, 1}, {2, 2}};
    case Kind::Unbox:
    case Kind::Let:
    case Kind::MBind:
      return {{1, 1}};
    case Kind::Unpack:
      return {{2, 1}};
    default:
      return {};
  }
}

template <class F>
Term map_worlds(const Term& t, int depth, const F& f) {
  if (!t) return t;
  std::optional<World> w = t.world();
  if (w) w = f(*w, depth);
  Type ty = t.type();
  if (ty) ty = map_type_worlds(ty, f, depth);
  if (t.arity() == 0 && !t.world() && !t.type()) return t;
  std::vector<Term> subs;
  subs.reserve(static_cast<std::size_t>(t.arity()));
  for (int i = 0; i < t.arity(); ++i) subs.push_back(map_worlds(t.sub(i), depth + world_binders_around(t.kind(), i), f));
  return t.with_subs(std::move(subs)).with_type(ty).with_world(w);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void collect_free(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (!t) return;
  if (t.kind() == Kind::Var) {
    if (!contains(bound, t.name()) && !contains(out, t.name())) out.push_back(t.name());
    return;
  }
  for (int i = 0; i < t.arity(); ++i) {
    auto names = vars_bound_around(t, i);
    bound.insert(bound.end(), names.begin(), names.end());
    collect_free(t.sub(i), bound, out);
    bound.resize(bound.size() - names.size());
  }
}

}  // namespace

std::vector<std::string> vars_bound_around(const Term& t, int child) {
  std::vector<std::string> out;
  for (auto [field, c] : binder_slots(t.kind())) {
    if (c == child) out.push_back(field == 1 ? t.name() : t.name2());
  }
  return out;
}

Term shift_worlds(const Term& t, int by, int cutoff) {
  if (by == 0) return t;
  return map_worlds(t, 0, [&](const World& x, int depth) { return shift_world(x, by, cutoff + depth); });
}

Term subst_world(const Term& t, const World& w) {
  return map_worlds(t, 0, [&](const World& x, int depth) {
    if (!x.is_var()) return x;
    if (x.index() == depth) return shift_world(w, depth);
    if (x.index() > depth) return World::var(x.index() - 1, x.name());
    return x;
  });
}

std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(t, bound, out);
  return out;
}

Term subst(const Term& t, const std::string& x, const Term& v) {
  if (!t) return t;
  if (t.kind() == Kind::Var) return t.name() == x ? v : t;
  auto slots = binder_slots(t.kind());
  Term node = t;
  if (!slots.empty()) {
    auto fv = free_vars(v);
    for (auto [field, child] : slots) {
      const std::string b = field == 1 ? node.name() : node.name2();
      if (b == x || !contains(fv, b)) continue;
      if (!contains(free_vars(node.sub(child)), x)) continue;
      auto avoid = fv;
      auto inner = free_vars(node.sub(child));
      avoid.insert(avoid.end(), inner.begin(), inner.end());
      avoid.push_back(x);
      std::string fresh;
      for (int i = 1;; ++i) {
        fresh = b + "_" + std::to_string(i);
        if (!contains(avoid, fresh)) break;
      }
      std::vector<Term> subs;
      for (int i = 0; i < node.arity(); ++i) {
        subs.push_back(contains(vars_bound_around(node, i), b) ? subst(node.sub(i), b, Term::var(fresh)) : node.sub(i));
      }
      bool n1 = node.name() == b && node.kind() != Kind::Unpack;
      bool n2 = node.name2() == b;
      node = node.with_subs(std::move(subs)).with_names(n1 ? fresh : node.name(), n2 ? fresh : node.name2());
    }
  }
  if (node.arity() == 0) return node;
  std::vector<Term> subs;
  subs.reserve(static_cast<std::size_t>(node.arity()));
  for (int i = 0; i < node.arity(); ++i) {
    if (contains(vars_bound_around(node, i), x)) {
      subs.push_back(node.sub(i));
      continue;
    }
    int wb = world_binders_around(node.kind(), i);
    subs.push_back(subst(node.sub(i), x, wb ? shift_worlds(v, wb) : v));
  }
  return node.with_subs(std::move(subs));
}

namespace {

using Renaming = std::vector<std::pair<std::string, std::string>>;

bool alpha_eq(const Term& a, const Term& b, Renaming& env) {
  if (static_cast<bool>(a) != static_cast<bool>(b)) return false;
  if (!a) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Kind::Var) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      bool l = it->first == a.name();
      bool r = it->second == b.name();
      if (l || r) return l && r;
    }
    return a.name() == b.name();
  }
  if (a.kind() == Kind::Int && a.int_value() != b.int_value()) return false;
  if (a.kind() == Kind::Handle && a.int_value() != b.int_value()) return false;
  if (a.kind() == Kind::Str && a.str_value() != b.str_value()) return false;
  if (static_cast<bool>(a.type()) != static_cast<bool>(b.type())) return false;
  if (a.type() && a.type() != b.type()) return false;
  if (a.world() != b.world()) return false;
  if (a.arity() != b.arity()) return false;
  for (int i = 0; i < a.arity(); ++i) {
    auto la = vars_bound_around(a, i);
    auto lb = vars_bound_around(b, i);
    for (std::size_t k = 0; k < la.size(); ++k) env.emplace_back(la[k], lb[k]);
    bool ok = alpha_eq(a.sub(i), b.sub(i), env);
    env.resize(env.size() - la.size());
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  Renaming env;
  return alpha_eq(a, b, env);
}

Term erase_annotations(const Term& t) {
  if (!t) return t;
  if (t.kind() == Kind::Anno) return erase_annotations(t.sub(0));
  if (t.arity() == 0) return t;
  std::vector<Term> subs;
  for (int i = 0; i < t.arity(); ++i) subs.push_back(erase_annotations(t.sub(i)));
  return t.with_subs(std::move(subs));
}

}  // namespace ml5::l5
