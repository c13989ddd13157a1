#pragma once

#include <string>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/program.hpp"
#include "ml5/result.hpp"
#include "ml5/typecheck.hpp"

namespace ml5 {

/// A*: ◯ on function codomains, ⌘A as ∀ω.(A* at ω).
Type trans_type(const Type& a);
Ctx trans_ctx(const Ctx& ctx);

struct TransResult {
  l5::Term term;
  Type type;
  World world;
};

/// `v :: A [w]` to a pure term of A* ⟨w⟩.
TransResult trans_value(const Derivation& d);
/// `e : A [w]` to a computation of ◯A* ⟨w⟩.
TransResult trans_expr(const Derivation& d);
TransResult translate(const Derivation& d);

/// Value declarations become pure declarations, expression declarations
/// computations. `derivs` is the output of check_program.
l5::Program trans_program(const SourceProgram& p, const std::vector<Derivation>& derivs);

/// Replaces ⌘ by ∀ and at: `sham v` becomes `wlam w. hold v`, `unsham e`
/// becomes `leta x = e [here] in ret x`.
Type desugar_type(const Type& a);
Term desugar_term(const Term& t);
SourceProgram desugar_shamrock(const SourceProgram& p);
bool uses_shamrock(const SourceProgram& p);

/// Classic encoding of a value-level case whose scrutinee `v :: sum [ws]`
/// and whose branches conclude `c [w]`: a tethered case at ws whose branches
/// fetch their results from w. Without a get when ws = w.
Result<Term, TypeError> elaborate_untethered_case(const Term& v, const Type& sum, const World& ws, const std::string& x,
                                                  const Term& left, const std::string& y, const Term& right,
                                                  const Type& c, const World& w);

/// The same for `split v as (x, y) in e`, projecting through a let-bound
/// temporary named `tmp`.
Result<Term, TypeError> elaborate_untethered_split(const Term& v, const Type& prod, const World& ws,
                                                   const std::string& x, const std::string& y, const Term& body,
                                                   const Type& c, const World& w, const std::string& tmp);

/// Rewrites every value-level case and split of a checked revised program
/// into its classic encoding.
Result<SourceProgram, TypeError> elaborate_value_cases(const SourceProgram& p, const std::vector<Derivation>& derivs);

/// Rewrites every tethered `case e of ...` into `let s : A + B = e in case s of ...`.
SourceProgram elaborate_tethered_cases(const SourceProgram& p, const std::vector<Derivation>& derivs);

}  // namespace ml5
