#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/program.hpp"
#include "ml5/result.hpp"
#include "ml5/runtime.hpp"
#include "ml5/typecheck.hpp"

namespace ml5 {

enum class ExitCode { Ok = 0, TypeError = 1, ParseError = 2, Internal = 3 };

struct PipelineError {
  ExitCode code = ExitCode::Internal;
  Pos pos;
  std::string message;

  /// `file:line:col: message` (position omitted when unknown).
  std::string render(const std::string& file) const;
};

struct Compiled {
  SourceProgram source;  // after ⌘ elimination in revised mode
  std::vector<Derivation> derivs;
  l5::Program core;
  std::vector<std::string> sites;
};

/// Parses, desugars ⌘ (revised mode) and typechecks.
Result<Compiled, PipelineError> check_source(std::string_view text, const RunConfig& config);
/// check_source plus translation; the translated program is re-checked
/// with l5_check (failure is an internal error).
Result<Compiled, PipelineError> compile(std::string_view text, const RunConfig& config);
Result<Compiled, PipelineError> compile_program(const SourceProgram& p, const RunConfig& config);

struct Execution {
  ValuePtr value;
  Type type;  // HL5 result type at the entry site
  MachineState state;
};

/// Links at the entry site, re-checks the linked term, runs it and checks
/// that the result classifies at the declared type.
Result<Execution, PipelineError> execute(const Compiled& c, const RunConfig& config);

}  // namespace ml5
