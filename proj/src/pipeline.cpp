#include "ml5/pipeline.hpp"

#include "ml5/hl5.hpp"
#include "ml5/parse.hpp"
#include "ml5/print.hpp"
#include "ml5/translate.hpp"

namespace ml5 {

std::string PipelineError::render(const std::string& file) const {
  std::string out = file;
  if (pos.line > 0) out += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col);
  return out + ": " + message;
}

namespace {

CheckEnv env_of(const RunConfig& config) {
  CheckEnv env;
  env.mode = config.mode;
  env.sites = config.sites;
  return env;
}

Result<Compiled, PipelineError> check_parsed(const SourceProgram& parsed, const RunConfig& config) {
  SourceProgram p = config.mode == Mode::Revised ? desugar_shamrock(parsed) : parsed;
  CheckEnv env = env_of(config);
  auto checked = check_program(p, env);
  if (!checked) {
    const TypeError& e = checked.error();
    return PipelineError{ExitCode::TypeError, e.location, e.message()};
  }
  Compiled c;
  c.source = std::move(p);
  c.derivs = checked.value();
  c.sites = program_sites(c.source, env);
  return c;
}

Result<Compiled, PipelineError> translate_checked(Compiled c) {
  c.core = trans_program(c.source, c.derivs);
  if (auto err = l5_check_program(c.core, L5Env{c.sites})) {
    return PipelineError{ExitCode::Internal, {}, "internal: translated program rejected: " + err->message};
  }
  return c;
}

}  // namespace

Result<Compiled, PipelineError> check_source(std::string_view text, const RunConfig& config) {
  auto parsed = parse_program(text);
  if (!parsed) return PipelineError{ExitCode::ParseError, parsed.error().pos, parsed.error().message()};
  return check_parsed(parsed.value(), config);
}

Result<Compiled, PipelineError> compile(std::string_view text, const RunConfig& config) {
  auto c = check_source(text, config);
  if (!c) return c.error();
  return translate_checked(std::move(c).value());
}

Result<Compiled, PipelineError> compile_program(const SourceProgram& p, const RunConfig& config) {
  auto c = check_parsed(p, config);
  if (!c) return c.error();
  return translate_checked(std::move(c).value());
}

Result<Execution, PipelineError> execute(const Compiled& c, const RunConfig& config) {
  auto linked = link_program(c.core, config.entry);
  if (!linked) return PipelineError{ExitCode::TypeError, {}, "run: " + linked.error()};
  const Linked& l = linked.value();
  if (auto err = l5_diagnose(Ctx{}, l.term, l.type, l.world, L5Env{c.sites})) {
    return PipelineError{ExitCode::Internal, {}, "internal: linked program rejected: " + err->message};
  }
  RunConfig machine_config = config;
  machine_config.sites = c.sites;
  auto st = init_machine(machine_config);
  if (!st) return PipelineError{ExitCode::Internal, {}, st.error()};
  Execution ex;
  ex.state = std::move(st).value();
  ex.type = l.type.body();
  auto v = run(l.term, config.entry, ex.state);
  if (!v) return PipelineError{ExitCode::Internal, {}, "internal: runtime fault: " + v.error().message};
  ex.value = v.value();
  if (!classify(ex.value, ex.type, config.entry, c.sites)) {
    return PipelineError{ExitCode::Internal, {},
                         "internal: result " + format_value(ex.value) + " does not classify at " + to_string(ex.type)};
  }
  return ex;
}

}  // namespace ml5
