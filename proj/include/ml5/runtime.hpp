#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/program.hpp"
#include "ml5/result.hpp"
#include "ml5/syntax.hpp"

namespace ml5 {

struct RunConfig {
  std::vector<std::string> sites = {"client", "server"};
  std::string entry = "client";
  Mode mode = Mode::Classic;
};

/// Parses `key = value` lines (`sites = a, b`, `entry = a`,
/// `mode = classic|revised`); `#` and `--` start comments.
Result<RunConfig, std::string> parse_config(std::string_view text);
std::optional<std::string> validate_config(const RunConfig& c);

//
// Runtime values
//

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Env {
  std::string name;
  ValuePtr value;
  std::shared_ptr<const Env> next;
};
using EnvPtr = std::shared_ptr<const Env>;

struct Value {
  enum class Kind { Int, Str, Unit, Closure, Pair, Inl, Inr, Box, WorldFn, Package, Suspension, Handle };
  Kind kind = Kind::Unit;
  std::int64_t num = 0;  // Int, Handle id
  std::string str;       // Str, Closure binder
  /// Closure and Suspension world, Box home, Package witness, Handle site.
  std::string site;
  ValuePtr a;
  ValuePtr b;
  Type type;  // Closure domain
  EnvPtr env;
  std::vector<std::string> worlds;  // world environment, index 0 innermost
  l5::Term body;

  static ValuePtr int_(std::int64_t n);
  static ValuePtr str_(std::string s);
  static ValuePtr unit();
  static ValuePtr pair(ValuePtr a, ValuePtr b);
  static ValuePtr inl(ValuePtr a);
  static ValuePtr inr(ValuePtr a);
  static ValuePtr box(std::string home, ValuePtr a);
  static ValuePtr package(std::string witness, ValuePtr a);
  static ValuePtr handle(std::string site, std::int64_t id);
};

/// Canonical text: `3`, `"s"`, `()`, `(a, b)`, `inl v`, `box@s(v)`,
/// `pack[s](v)`, `<fn>`, `<wfn>`, `<comp>`, `h0@client`.
std::string format_value(const ValuePtr& v);
/// Like format_value but boxes are shown as `box@s` without contents.
std::string summarize_value(const ValuePtr& v);

//
// Machine
//

struct Event {
  enum class Kind { GetRequest, GetReturn, Alloc, Read, Write, Print };
  Kind kind = Kind::Print;
  std::string from;
  std::string to;
  std::string site;
  std::string handle;
  std::string payload;

  bool operator==(const Event& o) const = default;
};

std::string_view event_kind_name(Event::Kind k);
bool is_communication(const Event& e);

using Trace = std::vector<Event>;

/// One JSON object per line: seq, kind and the fields relevant to the kind.
std::string serialize_trace(const Trace& t);

struct MachineState {
  std::vector<std::string> sites;
  std::map<std::string, std::map<std::int64_t, ValuePtr>> heaps;
  std::map<std::string, std::int64_t> next_handle;
  std::map<std::string, std::vector<std::string>> output;
  Trace trace;
  /// Dynamic mget executions, split by whether the target was foreign.
  int foreign_gets = 0;
  int local_gets = 0;
};

Result<MachineState, std::string> init_machine(const RunConfig& config);

struct Fault {
  std::string message;
};

/// Runs a closed computation of type ◯A at `site`.
Result<ValuePtr, Fault> run(const l5::Term& t, const std::string& site, MachineState& st);

/// Deep copy of a mobile value; faults on closures, suspensions and handles.
Result<ValuePtr, Fault> marshal(const ValuePtr& v, const Type& a);

/// Membership of v in interp(A, w) over `sites` (A closed).
bool classify(const ValuePtr& v, const Type& a, const std::string& w, const std::vector<std::string>& sites);

//
// Substitution-based reference semantics
//

struct StepFrame {
  enum class Kind { Bind, Return };
  Kind kind = Kind::Bind;
  std::string var;       // Bind
  l5::Term body;         // Bind
  std::string caller;    // Return
  Type type;             // Return
};

struct StepState {
  std::string world;
  l5::Term control;
  std::vector<StepFrame> stack;
  std::map<std::string, std::map<std::int64_t, l5::Term>> heaps;
  std::map<std::string, std::int64_t> next_handle;
  Trace trace;
  bool done = false;
};

StepState init_step(const l5::Term& t, const std::string& site);
/// One β-step, monadic step or communication step. Returns a fault when
/// stuck; sets `done` once the outermost `mret v` is reached.
std::optional<Fault> step(StepState& st);
/// One pure reduction step of a closed term; nullopt when it is a value or stuck.
std::optional<l5::Term> step_pure(const l5::Term& t);
/// Steps to completion; the final control is `mret v`.
Result<StepState, Fault> run_small(const l5::Term& t, const std::string& site, std::size_t fuel = 1000000);
std::string format_term_value(const l5::Term& v);
std::string summarize_term_value(const l5::Term& v);

//
// Linking
//

struct Linked {
  l5::Term term;
  Type type;  // ◯A
  World world;
};

/// Folds declarations into one computation ending in the last declaration's
/// value. Computations and the last declaration must live at `entry`.
Result<Linked, std::string> link_program(const l5::Program& p, const std::string& entry);

}  // namespace ml5
