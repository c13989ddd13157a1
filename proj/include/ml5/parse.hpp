#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/program.hpp"
#include "ml5/result.hpp"

namespace ml5 {

struct ParseError {
  Pos pos;
  std::vector<std::string> expected;
  std::string found;
  std::string detail;

  std::string message() const;
};

/// Parses a `.ml5` source file. Grammar:
///
///   program := { 'world' IDENT | IDENT ':' type '[' world ']' '=' term }
///   type    := int | string | unit | A -> B | A * B | A + B | A at w
///            | forall w. A | exists w. A | shamrock A | ref A
///   term    := lam x : A. e | let x [: A] = e in e | leta x = e in e
///            | case e of inl x => e | inr y => e | split v as (x, y) in e
///            | unpack e as w, x in e | wlam w. v | e := e | unary
///   unary   := ret u | get[w] u | pack[w] u | ref u | !u | print u
///            | fst u | snd u | inl u | inr u | hold u | sham u | unsham u
///            | postfix
///   postfix := atom { atom | '[' w ']' }
///   atom    := x | n | "s" | () | (t) | (t, t) | (t : A) | (t : A [w])
///
/// `case` with a value scrutinee is the value-level (untethered) case. Line
/// comments start with `--`.
Result<SourceProgram, ParseError> parse_program(std::string_view text);
Result<Type, ParseError> parse_type(std::string_view text);
Result<Term, ParseError> parse_term(std::string_view text);

/// Parses the printed form of a translated program (`name : B <w> = t`).
Result<l5::Program, ParseError> parse_l5_program(std::string_view text);
Result<l5::Term, ParseError> parse_l5_term(std::string_view text);
/// HL5 types: `lax A` (or `◯A`) allowed, `shamrock` rejected.
Result<Type, ParseError> parse_l5_type(std::string_view text);

}  // namespace ml5
