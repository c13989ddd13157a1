#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ml5 {

struct Pos {
  int line = 0;
  int col = 0;
};

/// A world is either a site constant or a bound world variable. Variables
/// are de Bruijn indices: `Var 0` is the innermost enclosing world binder.
class World {
 public:
  enum class Kind { Const, Var };

  World() = default;
  static World site(std::string name);
  static World var(int index, std::string hint = {});

  Kind kind() const { return kind_; }
  bool is_const() const { return kind_ == Kind::Const; }
  bool is_var() const { return kind_ == Kind::Var; }
  /// Site name for constants; binder name hint for variables.
  const std::string& name() const { return name_; }
  int index() const { return index_; }

  friend bool operator==(const World& a, const World& b);
  friend bool operator!=(const World& a, const World& b) { return !(a == b); }

 private:
  Kind kind_ = Kind::Const;
  std::string name_;
  int index_ = 0;
};

World shift_world(const World& w, int by, int cutoff = 0);

enum class BaseType { Int, String, Unit };

enum class TypeKind { Base, Arrow, Prod, Sum, At, Forall, Exists, Shamrock, Ref, Lax };

/// Immutable modal type. Shared between the surface (ML5) and core (HL5)
/// fragments: Shamrock only occurs in ML5 types, Lax only in HL5 types.
class Type {
 public:
  Type() = default;

  static Type base(BaseType b);
  static Type int_() { return base(BaseType::Int); }
  static Type string_() { return base(BaseType::String); }
  static Type unit() { return base(BaseType::Unit); }
  static Type arrow(Type dom, Type cod);
  static Type prod(Type a, Type b);
  static Type sum(Type a, Type b);
  static Type at(Type a, World w);
  static Type forall(Type body, std::string hint = "w");
  static Type exists(Type body, std::string hint = "w");
  static Type shamrock(Type a);
  static Type ref(Type a);
  static Type lax(Type a);

  explicit operator bool() const { return node_ != nullptr; }
  TypeKind kind() const;
  BaseType base_type() const;
  /// Left component of Arrow/Prod/Sum; the operand of At/Shamrock/Ref/Lax;
  /// the body of Forall/Exists.
  const Type& left() const;
  const Type& right() const;
  const Type& body() const { return left(); }
  const World& world() const;
  const std::string& hint() const;

  /// Structural equality; binder hints are ignored.
  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool is_mobile(const Type& a);
bool wf_type(int delta, const Type& a);
bool wf_world(int delta, const World& w);
bool contains_kind(const Type& a, TypeKind k);
bool is_closed(const Type& a);
bool mentions_var(const Type& a, int index);

/// Rebuilds `a`, mapping every world through f(world, binder depth).
Type map_type_worlds(const Type& a, const std::function<World(const World&, int)>& f, int depth = 0);
Type shift_type(const Type& a, int by, int cutoff = 0);
/// Substitutes `w` for the outermost dangling world variable (index 0) of a
/// binder body, lowering the remaining free variables by one.
Type subst_world(const Type& body, const World& w);
/// Replaces every free world variable `Var k` by `Const sites[k]`.
Type close_type(const Type& a, const std::vector<std::string>& sites);

enum class TermKind {
  Var, Int, Str, Unit,
  Lam, App,
  Pair, Fst, Snd,
  Inl, Inr, Case, VCase, Split,
  Hold, Leta,
  WLam, WApp,
  Pack, Unpack,
  Sham, Unsham,
  Get, Ret, Let,
  Ref, Deref, Assign, Print,
  Anno,
};

/// Untyped ML5 surface term. Layout of fields by kind:
///   Lam      name=x type=domain sub0=body
///   App      sub0 sub1            Assign sub0 := sub1
///   Case     sub0=scrutinee (expr) name=x sub1 name2=y sub2
///   VCase    sub0=scrutinee (value) name=x sub1 name2=y sub2
///   Split    sub0=value name=x name2=y sub1=body
///   Leta     name=x sub0 sub1
///   WLam     name=hint sub0=body   WApp sub0 world (none means `here`)
///   Pack     world sub0            Unpack name=hint name2=x sub0 sub1
///   Get      world sub0            Let name=x type(optional) sub0 sub1
///   Anno     sub0 type world(optional)
class Term {
 public:
  Term() = default;

  static Term var(std::string x, Pos p = {});
  static Term int_lit(std::int64_t n, Pos p = {});
  static Term str_lit(std::string s, Pos p = {});
  static Term unit(Pos p = {});
  static Term lam(std::string x, Type dom, Term body, Pos p = {});
  static Term app(Term f, Term arg, Pos p = {});
  static Term pair(Term a, Term b, Pos p = {});
  static Term fst(Term e, Pos p = {});
  static Term snd(Term e, Pos p = {});
  static Term inl(Term v, Pos p = {});
  static Term inr(Term v, Pos p = {});
  static Term case_(Term scrut, std::string x, Term l, std::string y, Term r, Pos p = {});
  static Term vcase(Term scrut, std::string x, Term l, std::string y, Term r, Pos p = {});
  static Term split(Term v, std::string x, std::string y, Term body, Pos p = {});
  static Term hold(Term v, Pos p = {});
  static Term leta(std::string x, Term e1, Term e2, Pos p = {});
  static Term wlam(std::string hint, Term body, Pos p = {});
  static Term wapp(Term e, std::optional<World> w, Pos p = {});
  static Term pack(World w, Term v, Pos p = {});
  static Term unpack(std::string hint, std::string x, Term e1, Term e2, Pos p = {});
  static Term sham(Term v, Pos p = {});
  static Term unsham(Term e, Pos p = {});
  static Term get(World w, Term e, Pos p = {});
  static Term ret(Term v, Pos p = {});
  static Term let(std::string x, Type ann, Term e1, Term e2, Pos p = {});
  static Term ref(Term e, Pos p = {});
  static Term deref(Term e, Pos p = {});
  static Term assign(Term r, Term e, Pos p = {});
  static Term print(Term e, Pos p = {});
  static Term anno(Term t, Type a, std::optional<World> w, Pos p = {});

  explicit operator bool() const { return node_ != nullptr; }
  TermKind kind() const;
  Pos pos() const;
  const std::string& name() const;
  const std::string& name2() const;
  std::int64_t int_value() const;
  const std::string& str_value() const;
  const Type& type() const;
  const std::optional<World>& world() const;
  const Term& sub(int i) const;
  int arity() const;

  /// Node identity, used to address positions inside a term.
  const void* id() const { return node_.get(); }

  /// Rebuilds this node with new children (same kind and fields).
  Term with_subs(std::vector<Term> subs) const;
  Term with_type(Type a) const;
  Term with_world(std::optional<World> w) const;
  Term with_names(std::string n1, std::string n2) const;

  /// Structural equality ignoring positions and world-binder hints.
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Node n);
  std::shared_ptr<const Node> node_;
};

bool is_value(const Term& t);

/// Number of world binders a term introduces around its i-th child.
int world_binders_around(TermKind k, int child);
/// Term variables bound around the i-th child.
std::vector<std::string> vars_bound_around(const Term& t, int child);

Term shift_term_worlds(const Term& t, int by, int cutoff = 0);
Term subst_world_term(const Term& t, const World& w);
std::vector<std::string> free_vars(const Term& t);
/// Capture-avoiding substitution of value `v` for variable `x`.
Term subst_term(const Term& t, const std::string& x, const Term& v);

struct Hyp {
  std::string name;
  Type type;
  World world;
};

/// Typing context: Δ (count of bound world variables) and the ordered
/// hypotheses x : A [w].
class Ctx {
 public:
  Ctx() = default;

  int worlds() const { return worlds_; }
  const std::vector<Hyp>& hyps() const { return hyps_; }

  Ctx with_hyp(std::string name, Type a, World w) const;
  /// Binds a fresh world variable (index 0) and shifts every hypothesis.
  Ctx with_world() const;
  const Hyp* lookup(const std::string& name) const;

 private:
  int worlds_ = 0;
  std::vector<Hyp> hyps_;
};

}  // namespace ml5
