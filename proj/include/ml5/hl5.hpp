#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/result.hpp"
#include "ml5/syntax.hpp"

namespace ml5 {

/// Mobility lifted to HL5 types: the ML5 table with ◯A never mobile.
bool mobile_hl5(const Type& a);
Type subst_world_hl5(const Type& body, const World& w);

/// Shape of the runtime values inhabiting a closed HL5 type at a world.
struct SemType {
  enum class Kind {
    Base,          // base
    Function,      // dom, cod, world
    Product,       // parts[0], parts[1]
    Sum,           // parts[0], parts[1]
    Intersection,  // parts[i] for sites[i]
    Union,         // parts[i] for sites[i]
    Computation,   // cod (result), world
    RefHandle,     // cod (cell), world
  };
  Kind kind = Kind::Base;
  BaseType base = BaseType::Unit;
  Type dom;
  Type cod;
  World world;
  std::vector<SemType> parts;
  std::vector<std::string> sites;

  bool operator==(const SemType& o) const = default;
};

std::string to_string(const SemType& s);

/// Kripke interpretation over the finite site set. `At` is a pure world
/// shift: interp(A at w', w) = interp(A, w'). Fails on open types.
Result<SemType, std::string> interp(const Type& a, const World& w, const std::vector<std::string>& sites);

struct L5Env {
  /// Known site constants; empty accepts every constant.
  std::vector<std::string> sites;
};

struct L5Error {
  std::string message;
  l5::Term at;
};

/// Decides Δ; Γ ⊢ t : B ⟨w⟩ (Δ is ctx.worlds()).
bool l5_check(const Ctx& ctx, const l5::Term& t, const Type& b, const World& w, const L5Env& env = {});
std::optional<L5Error> l5_diagnose(const Ctx& ctx, const l5::Term& t, const Type& b, const World& w,
                                   const L5Env& env = {});
Result<Type, L5Error> l5_synth(const Ctx& ctx, const l5::Term& t, const World& w, const L5Env& env = {});

/// Checks every declaration in order. A computation declaration of type ◯A
/// contributes the hypothesis name : A to later declarations.
std::optional<L5Error> l5_check_program(const l5::Program& p, const L5Env& env = {});

}  // namespace ml5
