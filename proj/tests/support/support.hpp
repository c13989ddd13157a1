#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ml5/pipeline.hpp"
#include "ml5/program.hpp"
#include "ml5/runtime.hpp"
#include "ml5/syntax.hpp"
#include "ml5/typecheck.hpp"

namespace ml5::test {

//
// Corpus
//

struct CorpusFile {
  std::string path;
  std::string name;  // e.g. classic/get_int
  std::string text;
  Mode mode = Mode::Classic;
  // errors/ only, from the `-- expect:` header
  int expect_exit = 0;
  std::string expect_reason;
};

std::vector<CorpusFile> load_corpus(const std::string& subdir);
/// classic/ and revised/ together.
std::vector<CorpusFile> typeable_corpus();
std::string corpus_dir();

RunConfig two_sites(Mode m);
RunConfig three_sites(Mode m);

struct Outcome {
  std::string value;
  Trace trace;
  int foreign_gets = 0;
  int local_gets = 0;
};

/// Compiles and runs; the error string carries the pipeline diagnostic.
Result<Outcome, std::string> run_program(const SourceProgram& p, const RunConfig& config);
Result<Outcome, std::string> run_text(const std::string& text, const RunConfig& config);
/// Same program under the substitution-based evaluator.
Result<Outcome, std::string> run_program_small(const SourceProgram& p, const RunConfig& config);

/// Events other than GetRequest/GetReturn.
Trace effects_only(const Trace& t);

//
// Trace validation
//

/// Replays the trace with an explicit stack of calling worlds and checks
/// get nesting, return-to-caller and locality of effects.
std::optional<std::string> validate_trace(const Trace& t, const std::string& entry);

//
// Random well-typed terms
//

struct GenOptions {
  Mode mode = Mode::Classic;
  std::vector<std::string> sites = {"client", "server"};
  int max_depth = 5;
  int max_type_depth = 2;
};

struct Generated {
  Ctx ctx;
  Term term;
  Type type;
  World world;
  bool is_value = false;
};

class Generator {
 public:
  Generator(std::uint64_t seed, GenOptions opts);

  Type type(int depth, int delta);
  std::optional<Term> value(const Ctx& ctx, const Type& a, const World& w, int depth);
  std::optional<Term> expr(const Ctx& ctx, const Type& a, const World& w, int depth);
  /// A term with its intended judgement under `ctx`; retries internally.
  Generated generate(const Ctx& ctx, bool want_value);
  World world(int delta);

 private:
  bool coin(int percent);
  int pick(int n);
  std::string fresh(const char* base);

  std::mt19937_64 rng_;
  GenOptions opts_;
  int counter_ = 0;
};

/// Whether a term mentions world variable `index` (relative to its root).
bool term_mentions_world(const Term& t, int index);
/// Replaces occurrences of `w` in `a` by a fresh outermost binder variable:
/// subst_world(abstract_world(a, w), w) == a.
Type abstract_world(const Type& a, const World& w);

//
// β-redexes
//

struct Redex {
  std::string kind;  // function, pair, sum, world-app, at, exists, let, shamrock
  std::string decl;
  SourceProgram contracted;
};

/// Every β-redex of a checked program, each contracted on its own.
std::vector<Redex> beta_redexes(const SourceProgram& p, const std::vector<Derivation>& derivs);

//
// Brute-force Kripke oracle
//

/// All first-order values of height <= `height` over {0, ()} with pairs,
/// injections and boxes at `sites`.
std::vector<ValuePtr> enumerate_values(int height, const std::vector<std::string>& sites);
/// First-order types of height <= `height` over int/unit with *, + and at.
std::vector<Type> enumerate_types(int height, const std::vector<std::string>& sites);
/// The inhabitants of interp(A, w) over {0, ()}, built bottom-up from the
/// interpretation clauses.
std::vector<ValuePtr> inhabitants(const Type& a, const std::string& w);

}  // namespace ml5::test
