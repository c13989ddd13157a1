#include "ml5/syntax.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace ml5 {

World World::site(std::string name) {
  World w;
  w.kind_ = Kind::Const;
  w.name_ = std::move(name);
  return w;
}

World World::var(int index, std::string hint) {
  World w;
  w.kind_ = Kind::Var;
  w.index_ = index;
  w.name_ = std::move(hint);
  return w;
}

bool operator==(const World& a, const World& b) {
  if (a.kind_ != b.kind_) return false;
  return a.is_const() ? a.name_ == b.name_ : a.index_ == b.index_;
}

World shift_world(const World& w, int by, int cutoff) {
  if (w.is_var() && w.index() >= cutoff) return World::var(w.index() + by, w.name());
  return w;
}

//
// Types
//

struct Type::Node {
  TypeKind kind = TypeKind::Base;
  BaseType base = BaseType::Unit;
  Type a;
  Type b;
  World world;
  std::string hint;
};

namespace {

const Type& null_type() {
  static const Type t;
  return t;
}

}  // namespace

Type Type::base(BaseType b) {
  Node n;
  n.kind = TypeKind::Base;
  n.base = b;
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::arrow(Type dom, Type cod) {
  Node n;
  n.kind = TypeKind::Arrow;
  n.a = std::move(dom);
  n.b = std::move(cod);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::prod(Type a, Type b) {
  Node n;
  n.kind = TypeKind::Prod;
  n.a = std::move(a);
  n.b = std::move(b);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::sum(Type a, Type b) {
  Node n;
  n.kind = TypeKind::Sum;
  n.a = std::move(a);
  n.b = std::move(b);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::at(Type a, World w) {
  Node n;
  n.kind = TypeKind::At;
  n.a = std::move(a);
  n.world = std::move(w);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::forall(Type body, std::string hint) {
  Node n;
  n.kind = TypeKind::Forall;
  n.a = std::move(body);
  n.hint = std::move(hint);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::exists(Type body, std::string hint) {
  Node n;
  n.kind = TypeKind::Exists;
  n.a = std::move(body);
  n.hint = std::move(hint);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::shamrock(Type a) {
  Node n;
  n.kind = TypeKind::Shamrock;
  n.a = std::move(a);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::ref(Type a) {
  Node n;
  n.kind = TypeKind::Ref;
  n.a = std::move(a);
  return Type(std::make_shared<const Node>(std::move(n)));
}

Type Type::lax(Type a) {
  Node n;
  n.kind = TypeKind::Lax;
  n.a = std::move(a);
  return Type(std::make_shared<const Node>(std::move(n)));
}

TypeKind Type::kind() const { return node_->kind; }
BaseType Type::base_type() const { return node_->base; }
const Type& Type::left() const { return node_ ? node_->a : null_type(); }
const Type& Type::right() const { return node_ ? node_->b : null_type(); }
const World& Type::world() const { return node_->world; }
const std::string& Type::hint() const { return node_->hint; }

bool operator==(const Type& x, const Type& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case TypeKind::Base:
      return x.base_type() == y.base_type();
    case TypeKind::Arrow:
    case TypeKind::Prod:
    case TypeKind::Sum:
      return x.left() == y.left() && x.right() == y.right();
    case TypeKind::At:
      return x.world() == y.world() && x.left() == y.left();
    case TypeKind::Forall:
    case TypeKind::Exists:
    case TypeKind::Shamrock:
    case TypeKind::Ref:
    case TypeKind::Lax:
      return x.left() == y.left();
  }
  return false;
}

bool is_mobile(const Type& a) {
  switch (a.kind()) {
    case TypeKind::Base:
    case TypeKind::At:
    case TypeKind::Shamrock:
      return true;
    case TypeKind::Prod:
    case TypeKind::Sum:
      return is_mobile(a.left()) && is_mobile(a.right());
    case TypeKind::Forall:
    case TypeKind::Exists:
      return is_mobile(a.body());
    case TypeKind::Arrow:
    case TypeKind::Ref:
    case TypeKind::Lax:
      return false;
  }
  return false;
}

bool wf_world(int delta, const World& w) { return w.is_const() || (w.index() >= 0 && w.index() < delta); }

bool wf_type(int delta, const Type& a) {
  if (!a) return false;
  switch (a.kind()) {
    case TypeKind::Base:
      return true;
    case TypeKind::Arrow:
    case TypeKind::Prod:
    case TypeKind::Sum:
      return wf_type(delta, a.left()) && wf_type(delta, a.right());
    case TypeKind::At:
      return wf_world(delta, a.world()) && wf_type(delta, a.left());
    case TypeKind::Forall:
    case TypeKind::Exists:
      return wf_type(delta + 1, a.body());
    case TypeKind::Shamrock:
    case TypeKind::Ref:
    case TypeKind::Lax:
      return wf_type(delta, a.left());
  }
  return false;
}

bool contains_kind(const Type& a, TypeKind k) {
  if (!a) return false;
  if (a.kind() == k) return true;
  return contains_kind(a.left(), k) || contains_kind(a.right(), k);
}

bool is_closed(const Type& a) { return wf_type(0, a); }

namespace {

bool mentions_var_at(const Type& a, int index) {
  if (!a) return false;
  switch (a.kind()) {
    case TypeKind::At:
      return (a.world().is_var() && a.world().index() == index) || mentions_var_at(a.left(), index);
    case TypeKind::Forall:
    case TypeKind::Exists:
      return mentions_var_at(a.body(), index + 1);
    default:
      return mentions_var_at(a.left(), index) || mentions_var_at(a.right(), index);
  }
}

template <class F>
Type map_worlds(const Type& a, int depth, const F& f) {
  switch (a.kind()) {
    case TypeKind::Base:
      return a;
    case TypeKind::Arrow:
      return Type::arrow(map_worlds(a.left(), depth, f), map_worlds(a.right(), depth, f));
    case TypeKind::Prod:
      return Type::prod(map_worlds(a.left(), depth, f), map_worlds(a.right(), depth, f));
    case TypeKind::Sum:
      return Type::sum(map_worlds(a.left(), depth, f), map_worlds(a.right(), depth, f));
    case TypeKind::At:
      return Type::at(map_worlds(a.left(), depth, f), f(a.world(), depth));
    case TypeKind::Forall:
      return Type::forall(map_worlds(a.body(), depth + 1, f), a.hint());
    case TypeKind::Exists:
      return Type::exists(map_worlds(a.body(), depth + 1, f), a.hint());
    case TypeKind::Shamrock:
      return Type::shamrock(map_worlds(a.left(), depth, f));
    case TypeKind::Ref:
      return Type::ref(map_worlds(a.left(), depth, f));
    case TypeKind::Lax:
      return Type::lax(map_worlds(a.left(), depth, f));
  }
  return a;
}

// Substitution of `w` (valid at the outer level) for index `k` relative to the
// current depth; indices above k belong to binders outside and drop by one.
World subst_world_at(const World& x, int k, const World& w) {
  if (!x.is_var()) return x;
  if (x.index() == k) return shift_world(w, k);
  if (x.index() > k) return World::var(x.index() - 1, x.name());
  return x;
}

Type subst_type_at(const Type& a, int k, const World& w) {
  return map_worlds(a, 0, [&](const World& x, int depth) { return subst_world_at(x, k + depth, w); });
}

}  // namespace

bool mentions_var(const Type& a, int index) { return mentions_var_at(a, index); }

Type map_type_worlds(const Type& a, const std::function<World(const World&, int)>& f, int depth) {
  if (!a) return a;
  return map_worlds(a, depth, f);
}

Type shift_type(const Type& a, int by, int cutoff) {
  if (!a) return a;
  return map_worlds(a, 0, [&](const World& x, int depth) { return shift_world(x, by, cutoff + depth); });
}

Type subst_world(const Type& body, const World& w) {
  if (!body) return body;
  return subst_type_at(body, 0, w);
}

Type close_type(const Type& a, const std::vector<std::string>& sites) {
  if (!a) return a;
  return map_worlds(a, 0, [&](const World& x, int depth) {
    if (x.is_var() && x.index() >= depth) {
      auto k = static_cast<std::size_t>(x.index() - depth);
      if (k < sites.size()) return World::site(sites[k]);
    }
    return x;
  });
}

//
// Terms
//

struct Term::Node {
  TermKind kind = TermKind::Unit;
  Pos pos;
  std::string name;
  std::string name2;
  std::int64_t num = 0;
  std::string str;
  Type type;
  std::optional<World> world;
  std::vector<Term> subs;
};

Term Term::make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }

#define ML5_NODE(K)   \
  Node n;             \
  n.kind = TermKind::K; \
  n.pos = p

Term Term::var(std::string x, Pos p) {
  ML5_NODE(Var);
  n.name = std::move(x);
  return make(std::move(n));
}

Term Term::int_lit(std::int64_t v, Pos p) {
  ML5_NODE(Int);
  n.num = v;
  return make(std::move(n));
}

Term Term::str_lit(std::string s, Pos p) {
  ML5_NODE(Str);
  n.str = std::move(s);
  return make(std::move(n));
}

Term Term::unit(Pos p) {
  ML5_NODE(Unit);
  return make(std::move(n));
}

Term Term::lam(std::string x, Type dom, Term body, Pos p) {
  ML5_NODE(Lam);
  n.name = std::move(x);
  n.type = std::move(dom);
  n.subs = {std::move(body)};
  return make(std::move(n));
}

Term Term::app(Term f, Term arg, Pos p) {
  ML5_NODE(App);
  n.subs = {std::move(f), std::move(arg)};
  return make(std::move(n));
}

Term Term::pair(Term a, Term b, Pos p) {
  ML5_NODE(Pair);
  n.subs = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Term Term::fst(Term e, Pos p) {
  ML5_NODE(Fst);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::snd(Term e, Pos p) {
  ML5_NODE(Snd);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::inl(Term v, Pos p) {
  ML5_NODE(Inl);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::inr(Term v, Pos p) {
  ML5_NODE(Inr);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::case_(Term scrut, std::string x, Term l, std::string y, Term r, Pos p) {
  ML5_NODE(Case);
  n.name = std::move(x);
  n.name2 = std::move(y);
  n.subs = {std::move(scrut), std::move(l), std::move(r)};
  return make(std::move(n));
}

Term Term::vcase(Term scrut, std::string x, Term l, std::string y, Term r, Pos p) {
  ML5_NODE(VCase);
  n.name = std::move(x);
  n.name2 = std::move(y);
  n.subs = {std::move(scrut), std::move(l), std::move(r)};
  return make(std::move(n));
}

Term Term::split(Term v, std::string x, std::string y, Term body, Pos p) {
  ML5_NODE(Split);
  n.name = std::move(x);
  n.name2 = std::move(y);
  n.subs = {std::move(v), std::move(body)};
  return make(std::move(n));
}

Term Term::hold(Term v, Pos p) {
  ML5_NODE(Hold);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::leta(std::string x, Term e1, Term e2, Pos p) {
  ML5_NODE(Leta);
  n.name = std::move(x);
  n.subs = {std::move(e1), std::move(e2)};
  return make(std::move(n));
}

Term Term::wlam(std::string hint, Term body, Pos p) {
  ML5_NODE(WLam);
  n.name = std::move(hint);
  n.subs = {std::move(body)};
  return make(std::move(n));
}

Term Term::wapp(Term e, std::optional<World> w, Pos p) {
  ML5_NODE(WApp);
  n.world = std::move(w);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::pack(World w, Term v, Pos p) {
  ML5_NODE(Pack);
  n.world = std::move(w);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::unpack(std::string hint, std::string x, Term e1, Term e2, Pos p) {
  ML5_NODE(Unpack);
  n.name = std::move(hint);
  n.name2 = std::move(x);
  n.subs = {std::move(e1), std::move(e2)};
  return make(std::move(n));
}

Term Term::sham(Term v, Pos p) {
  ML5_NODE(Sham);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::unsham(Term e, Pos p) {
  ML5_NODE(Unsham);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::get(World w, Term e, Pos p) {
  ML5_NODE(Get);
  n.world = std::move(w);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::ret(Term v, Pos p) {
  ML5_NODE(Ret);
  n.subs = {std::move(v)};
  return make(std::move(n));
}

Term Term::let(std::string x, Type ann, Term e1, Term e2, Pos p) {
  ML5_NODE(Let);
  n.name = std::move(x);
  n.type = std::move(ann);
  n.subs = {std::move(e1), std::move(e2)};
  return make(std::move(n));
}

Term Term::ref(Term e, Pos p) {
  ML5_NODE(Ref);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::deref(Term e, Pos p) {
  ML5_NODE(Deref);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::assign(Term r, Term e, Pos p) {
  ML5_NODE(Assign);
  n.subs = {std::move(r), std::move(e)};
  return make(std::move(n));
}

Term Term::print(Term e, Pos p) {
  ML5_NODE(Print);
  n.subs = {std::move(e)};
  return make(std::move(n));
}

Term Term::anno(Term t, Type a, std::optional<World> w, Pos p) {
  ML5_NODE(Anno);
  n.type = std::move(a);
  n.world = std::move(w);
  n.subs = {std::move(t)};
  return make(std::move(n));
}

#undef ML5_NODE

namespace {

const std::optional<World>& no_world() {
  static const std::optional<World> w;
  return w;
}

const Term& null_term() {
  static const Term t;
  return t;
}

const std::string& empty_string() {
  static const std::string s;
  return s;
}

}  // namespace

TermKind Term::kind() const { return node_->kind; }
Pos Term::pos() const { return node_ ? node_->pos : Pos{}; }
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

Term Term::with_names(std::string n1, std::string n2) const {
  Node n = *node_;
  n.name = std::move(n1);
  n.name2 = std::move(n2);
  return make(std::move(n));
}

bool operator==(const Term& x, const Term& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  if (a.kind != b.kind || a.num != b.num || a.str != b.str) return false;
  bool hint_only = a.kind == TermKind::WLam || a.kind == TermKind::Unpack;
  if (!hint_only && a.name != b.name) return false;
  if (a.name2 != b.name2) return false;
  if (static_cast<bool>(a.type) != static_cast<bool>(b.type)) return false;
  if (a.type && a.type != b.type) return false;
  if (a.world != b.world) return false;
  return a.subs == b.subs;
}

bool is_value(const Term& t) {
  if (!t) return false;
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Int:
    case TermKind::Str:
    case TermKind::Unit:
    case TermKind::Lam:
      return true;
    case TermKind::Pair:
      return is_value(t.sub(0)) && is_value(t.sub(1));
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Hold:
    case TermKind::WLam:
    case TermKind::Pack:
    case TermKind::Sham:
    case TermKind::Anno:
      return is_value(t.sub(0));
    default:
      return false;
  }
}

int world_binders_around(TermKind k, int child) {
  if (k == TermKind::WLam && child == 0) return 1;
  if (k == TermKind::Unpack && child == 1) return 1;
  return 0;
}

namespace {

// (field, child): field 1 is name(), field 2 is name2().
std::vector<std::pair<int, int>> binder_slots(TermKind k) {
  switch (k) {
    case TermKind::Lam:
      return {{1, 0}};
    case TermKind::Case:
    case TermKind::VCase:
      return {{1, 1}, {2, 2}};
    case TermKind::Split:
      return {{1, 1}, {2, 1}};
    case TermKind::Leta:
    case TermKind::Let:
      return {{1, 1}};
    case TermKind::Unpack:
      return {{2, 1}};
    default:
      return {};
  }
}

template <class F>
Term map_term_worlds(const Term& t, int depth, const F& f) {
  if (!t) return t;
  Term out = t;
  bool changed = false;
  std::optional<World> w = t.world();
  if (w) {
    World nw = f(*w, depth);
    if (nw != *w || nw.name() != w->name()) changed = true;
    w = nw;
  }
  Type ty = t.type();
  if (ty) {
    Type nt = map_worlds(ty, depth, f);
    ty = nt;
    changed = true;
  }
  std::vector<Term> subs;
  subs.reserve(static_cast<std::size_t>(t.arity()));
  for (int i = 0; i < t.arity(); ++i) {
    subs.push_back(map_term_worlds(t.sub(i), depth + world_binders_around(t.kind(), i), f));
  }
  if (!changed && t.arity() == 0) return t;
  return t.with_subs(std::move(subs)).with_type(ty).with_world(w);
}

void collect_free(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (!t) return;
  if (t.kind() == TermKind::Var) {
    if (std::find(bound.begin(), bound.end(), t.name()) == bound.end() &&
        std::find(out.begin(), out.end(), t.name()) == out.end()) {
      out.push_back(t.name());
    }
    return;
  }
  for (int i = 0; i < t.arity(); ++i) {
    auto names = vars_bound_around(t, i);
    bound.insert(bound.end(), names.begin(), names.end());
    collect_free(t.sub(i), bound, out);
    bound.resize(bound.size() - names.size());
  }
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!contains(avoid, candidate)) return candidate;
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

Term shift_term_worlds(const Term& t, int by, int cutoff) {
  if (by == 0) return t;
  return map_term_worlds(t, 0, [&](const World& x, int depth) { return shift_world(x, by, cutoff + depth); });
}

Term subst_world_term(const Term& t, const World& w) {
  return map_term_worlds(t, 0, [&](const World& x, int depth) { return subst_world_at(x, depth, w); });
}

std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(t, bound, out);
  return out;
}

Term subst_term(const Term& t, const std::string& x, const Term& v) {
  if (!t) return t;
  if (t.kind() == TermKind::Var) return t.name() == x ? v : t;
  auto slots = binder_slots(t.kind());
  Term node = t;
  if (!slots.empty()) {
    auto fv = free_vars(v);
    // Rename binders that would capture free variables of v.
    for (auto [field, child] : slots) {
      const std::string& b = field == 1 ? node.name() : node.name2();
      if (b == x || !contains(fv, b)) continue;
      if (!contains(free_vars(node.sub(child)), x)) continue;
      auto avoid = fv;
      auto inner = free_vars(node.sub(child));
      avoid.insert(avoid.end(), inner.begin(), inner.end());
      avoid.push_back(x);
      std::string fresh = fresh_name(b, avoid);
      std::string old = b;
      std::vector<Term> subs;
      for (int i = 0; i < node.arity(); ++i) {
        bool binds_here = false;
        for (auto [f2, c2] : slots) {
          if (c2 == i && (f2 == 1 ? node.name() : node.name2()) == old) binds_here = true;
        }
        subs.push_back(binds_here ? subst_term(node.sub(i), old, Term::var(fresh)) : node.sub(i));
      }
      bool n1 = node.name() == old && node.kind() != TermKind::Unpack;
      bool n2 = node.name2() == old;
      node = node.with_subs(std::move(subs)).with_names(n1 ? fresh : node.name(), n2 ? fresh : node.name2());
    }
  }
  std::vector<Term> subs;
  subs.reserve(static_cast<std::size_t>(node.arity()));
  for (int i = 0; i < node.arity(); ++i) {
    if (contains(vars_bound_around(node, i), x)) {
      subs.push_back(node.sub(i));
      continue;
    }
    int wb = world_binders_around(node.kind(), i);
    subs.push_back(subst_term(node.sub(i), x, wb ? shift_term_worlds(v, wb) : v));
  }
  return node.with_subs(std::move(subs));
}

Ctx Ctx::with_hyp(std::string name, Type a, World w) const {
  Ctx c = *this;
  c.hyps_.push_back(Hyp{std::move(name), std::move(a), std::move(w)});
  return c;
}

Ctx Ctx::with_world() const {
  Ctx c;
  c.worlds_ = worlds_ + 1;
  c.hyps_.reserve(hyps_.size());
  for (const auto& h : hyps_) c.hyps_.push_back(Hyp{h.name, shift_type(h.type, 1), shift_world(h.world, 1)});
  return c;
}

const Hyp* Ctx::lookup(const std::string& name) const {
  for (auto it = hyps_.rbegin(); it != hyps_.rend(); ++it) {
    if (it->name == name) return &*it;
  }
  return nullptr;
}

}  // namespace ml5
