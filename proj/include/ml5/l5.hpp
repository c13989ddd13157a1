#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ml5/syntax.hpp"

namespace ml5::l5 {

enum class Kind {
  Var, Int, Str, Unit,
  Lam, App,
  Pair, Fst, Snd,
  Inl, Inr, Case,
  Box, Unbox,
  WLam, WApp,
  Pack, Unpack,
  Let, Anno,
  // monadic forms; as pure terms these are suspended computations
  MRet, MBind, MGet, Ref, Deref, Assign, Print,
  // runtime-only heap location, produced by the reference evaluator
  Handle,
};

/// Term of the lax core calculus. Field layout by kind:
///   Lam    name=x type=domain sub0=body
///   Case   sub0 name=x sub1 name2=y sub2      (untethered)
///   Box    world sub0                          Unbox  sub0 name=x sub1
///   WLam   name=hint sub0                      WApp   sub0 world
///   Pack   world sub0                          Unpack sub0 name=hint name2=x sub1
///   Let    name=x sub0 sub1                    Anno   sub0 type world(optional)
///   MBind  sub0 name=x type sub1               MGet   world type sub0
///   Handle world=site num=id
class Term {
 public:
  Term() = default;

  static Term var(std::string x);
  static Term int_lit(std::int64_t n);
  static Term str_lit(std::string s);
  static Term unit();
  static Term lam(std::string x, Type dom, Term body);
  static Term app(Term f, Term a);
  static Term pair(Term a, Term b);
  static Term fst(Term t);
  static Term snd(Term t);
  static Term inl(Term t);
  static Term inr(Term t);
  static Term case_(Term scrut, std::string x, Term l, std::string y, Term r);
  static Term box(World w, Term t);
  static Term unbox(Term t, std::string x, Term body);
  static Term wlam(std::string hint, Term body);
  static Term wapp(Term t, World w);
  static Term pack(World w, Term t);
  static Term unpack(Term t, std::string hint, std::string x, Term body);
  static Term let(std::string x, Term t, Term body);
  static Term anno(Term t, Type a, std::optional<World> w);
  static Term mret(Term t);
  static Term mbind(Term t, std::string x, Type a, Term body);
  static Term mget(World w, Type a, Term t);
  static Term ref(Term t);
  static Term deref(Term t);
  static Term assign(Term r, Term t);
  static Term print(Term t);
  static Term handle(std::string site, std::int64_t id);

  explicit operator bool() const { return node_ != nullptr; }
  Kind kind() const;
  const std::string& name() const;
  const std::string& name2() const;
  std::int64_t int_value() const;
  const std::string& str_value() const;
  const Type& type() const;
  const std::optional<World>& world() const;
  const Term& sub(int i) const;
  int arity() const;

  Term with_subs(std::vector<Term> subs) const;
  Term with_names(std::string n1, std::string n2) const;
  Term with_type(Type a) const;
  Term with_world(std::optional<World> w) const;

  /// Structural equality (bound names significant, world hints ignored).
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Node n);
  static Node blank(Kind k, std::vector<Term> subs = {});
  std::shared_ptr<const Node> node_;
};

bool is_monadic(Kind k);
/// Values of the substitution semantics. Monadic forms are values.
bool is_value(const Term& t);

int world_binders_around(Kind k, int child);
std::vector<std::string> vars_bound_around(const Term& t, int child);

Term shift_worlds(const Term& t, int by, int cutoff = 0);
Term subst_world(const Term& t, const World& w);
std::vector<std::string> free_vars(const Term& t);
Term subst(const Term& t, const std::string& x, const Term& v);

/// Equality up to renaming of bound term variables.
bool alpha_equal(const Term& a, const Term& b);
Term erase_annotations(const Term& t);

struct Decl {
  std::string name;
  bool is_computation = false;
  Type type;  // A* for values, ◯A* for computations
  World world;
  Term term;
};

struct Program {
  std::vector<Decl> decls;
};

}  // namespace ml5::l5
