#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ml5/program.hpp"
#include "ml5/result.hpp"
#include "ml5/syntax.hpp"

namespace ml5 {

enum class JudgementKind { Value, Expr };

/// `v :: A [w]` (Value) or `e : A [w]` (Expr).
struct Judgement {
  JudgementKind kind = JudgementKind::Expr;
  Ctx ctx;
  Term term;
  Type type;
  World world;
};

/// Rule tree. Premise order per rule:
///   V-Lam [body]  V-Pair [l, r]  V-Inl/V-Inr/V-Hold/V-Pack/V-Anno [v]
///   V-WLam [body under one more world]  V-Sham [body at the fresh world]
///   E-Ret [v]  E-Let [e1, e2]  E-App [f, a]  E-Fst/E-Snd [e]
///   E-Case [scrutinee, left, right]  E-VCase [scrutinee value, left, right]
///   E-Split [v, body]  E-Leta [e1, e2]  E-WApp [e]  E-Unpack [e1, e2]
///   E-Unsham [e]  E-Get [e]  E-Ref/E-Deref/E-Print/E-Anno [e]  E-Assign [r, e]
/// Leaves: V-Var, V-Int, V-Str, V-Unit.
struct Derivation {
  Judgement root;
  std::string rule;
  std::vector<Derivation> premises;

  const Derivation& premise(int i) const { return premises.at(static_cast<std::size_t>(i)); }
};

enum class TypeErrorReason {
  WorldMismatch,
  NotMobile,
  NotAValue,
  UnboundVariable,
  ConnectiveMismatch,
  TetheringViolation,
};

std::string_view reason_name(TypeErrorReason r);

struct TypeError {
  TypeErrorReason reason = TypeErrorReason::ConnectiveMismatch;
  Pos location;
  std::string expected;
  std::string found;
  std::string decl;

  /// `NotMobile: ref int`, `WorldMismatch: expected client, found server`.
  std::string message() const;
};

struct CheckEnv {
  Mode mode = Mode::Classic;
  /// Site constants that may appear in types and terms.
  std::vector<std::string> sites = {"client", "server"};
};

using Checked = Result<Derivation, TypeError>;

Checked check_value(const Ctx& ctx, const Term& v, const Type& a, const World& w, const CheckEnv& env = {});
Checked check_expr(const Ctx& ctx, const Term& e, const Type& a, const World& w, const CheckEnv& env = {});
/// Synthesizes the type of `t` (value or expression) at `w`.
Checked synth(const Ctx& ctx, const Term& t, const World& w, const CheckEnv& env = {});

/// Untethered value-level case: `v :: sum [ws]`, branches and conclusion
/// at `w`. An empty `sum` synthesizes it from `v`. Revised mode only.
Checked check_value_case(const Ctx& ctx, const Term& v, const Type& sum, const World& ws, const std::string& x,
                         const Term& left, const std::string& y, const Term& right, const Type& c, const World& w,
                         const CheckEnv& env = {});

/// Checks declarations in order; each sees the previous ones as hypotheses.
/// `world` declarations extend the site set.
Result<std::vector<Derivation>, TypeError> check_program(const SourceProgram& p, const CheckEnv& env = {});

/// Program context after the first `n` declarations (all when n < 0).
Ctx program_ctx(const SourceProgram& p, int n = -1);
std::vector<std::string> program_sites(const SourceProgram& p, const CheckEnv& env);

}  // namespace ml5
