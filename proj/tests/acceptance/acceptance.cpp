// Acceptance criteria: one PASS/FAIL line per criterion, details below each.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <unordered_set>
#include <sstream>

#include "ml5/hl5.hpp"
#include "ml5/parse.hpp"
#include "ml5/print.hpp"
#include "ml5/translate.hpp"
#include "support.hpp"

using namespace ml5;
using namespace ml5::test;

namespace {

struct Report {
  bool ok = true;
  std::string summary;
  std::vector<std::string> details;

  void fail(std::string msg) {
    ok = false;
    if (details.size() < 20) details.push_back(std::move(msg));
  }
};

RunConfig config_for(const CorpusFile& f) { return two_sites(f.mode); }

SourceProgram parsed(const CorpusFile& f) {
  auto p = parse_program(f.text);
  if (!p) throw std::runtime_error(f.name + ": " + p.error().message());
  return p.value();
}

void walk(const Term& t, const std::function<void(const Term&)>& f) {
  f(t);
  for (int i = 0; i < t.arity(); ++i) walk(t.sub(i), f);
}

int count_kind(const SourceProgram& p, TermKind k) {
  int n = 0;
  for (const auto& d : p.decls) walk(d.term, [&](const Term& t) { n += t.kind() == k; });
  return n;
}

std::string trace_diff(const Trace& a, const Trace& b) {
  return std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " events\n" + serialize_trace(a) + "--\n" +
         serialize_trace(b);
}

int cli_exit(const std::string& args) {
  std::string cmd = std::string(ML5_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

//
// 1. Mobility gate
//

Report mobility_gate() {
  Report r;
  std::string dir = corpus_dir();
  int rejected = cli_exit("check " + dir + "/errors/get_ref_int.ml5");
  int accepted = cli_exit("run " + dir + "/classic/get_int.ml5");
  if (rejected != 1) r.fail("get[server] at ref int: exit " + std::to_string(rejected) + ", expected 1");
  if (accepted != 0) r.fail("get[server] at int: exit " + std::to_string(accepted) + ", expected 0");

  // the same decisions in-process, with the reported reason
  auto bad = check_source("main : ref int [client] = get[server] (ref (ret 0))", RunConfig{});
  if (bad.ok() || bad.error().message.rfind("NotMobile", 0) != 0) r.fail("ref int get not reported as NotMobile");
  auto good = check_source("main : int [client] = get[server] (ret 3)", RunConfig{});
  if (!good.ok()) r.fail("int get rejected: " + good.error().message);
  r.summary = "get at ref int exit " + std::to_string(rejected) + " (NotMobile), get at int exit " +
              std::to_string(accepted);
  return r;
}

//
// 2. Type preservation
//

Report type_preservation(const std::vector<CorpusFile>& corpus) {
  Report r;
  const std::set<std::string> all_rules = {
      "V-Var", "V-Int", "V-Str", "V-Unit", "V-Lam", "V-Pair", "V-Inl", "V-Inr", "V-Hold", "V-WLam", "V-Pack",
      "V-Sham", "V-Anno", "E-Ret", "E-Let", "E-App", "E-Fst", "E-Snd", "E-Case", "E-VCase", "E-Split", "E-Leta",
      "E-WApp", "E-Unpack", "E-Unsham", "E-Get", "E-Ref", "E-Deref", "E-Assign", "E-Print", "E-Anno"};
  std::set<std::string> seen;
  std::function<void(const Derivation&)> rules = [&](const Derivation& d) {
    seen.insert(d.rule);
    for (const auto& p : d.premises) rules(p);
  };
  int programs = 0, decls = 0, classic = 0, revised = 0;
  for (const auto& f : corpus) {
    auto c = compile(f.text, config_for(f));
    if (!c) {
      r.fail(f.name + ": " + c.error().render(f.name));
      continue;
    }
    ++programs;
    (f.mode == Mode::Classic ? classic : revised)++;
    const Compiled& cc = c.value();
    for (std::size_t i = 0; i < cc.derivs.size(); ++i) {
      const Derivation& d = cc.derivs[i];
      rules(d);
      TransResult t = translate(d);
      Ctx ctx = trans_ctx(program_ctx(cc.source, static_cast<int>(i)));
      if (auto err = l5_diagnose(ctx, t.term, t.type, d.root.world, L5Env{cc.sites})) {
        r.fail(f.name + " decl " + cc.source.decls[i].name + ": " + err->message);
      }
      ++decls;
    }
    // the printed translation re-parses and re-checks
    auto reparsed = parse_l5_program(to_string(cc.core));
    if (!reparsed) {
      r.fail(f.name + ": printed L5 does not parse: " + reparsed.error().message());
    } else if (auto err = l5_check_program(reparsed.value(), L5Env{cc.sites})) {
      r.fail(f.name + ": printed L5 rejected: " + err->message);
    }
  }
  std::vector<std::string> missing;
  for (const auto& rule : all_rules)
    if (!seen.count(rule)) missing.push_back(rule);
  if (!missing.empty()) {
    std::string m = "rules not covered by the corpus:";
    for (const auto& x : missing) m += " " + x;
    r.fail(m);
  }
  if (programs < 30) r.fail("only " + std::to_string(programs) + " typeable corpus programs");
  if (classic == 0 || revised == 0) r.fail("corpus does not cover both modes");

  int random_ok = 0, random_total = 0;
  for (Mode mode : {Mode::Classic, Mode::Revised}) {
    GenOptions opts;
    opts.mode = mode;
    Generator gen(mode == Mode::Classic ? 2024 : 2025, opts);
    CheckEnv env{mode, opts.sites};
    Ctx base = Ctx{}
                   .with_hyp("n", Type::int_(), World::site("server"))
                   .with_hyp("k", Type::arrow(Type::int_(), Type::string_()), World::site("client"))
                   .with_hyp("cell", Type::ref(Type::int_()), World::site("client"))
                   .with_hyp("e", Type::sum(Type::unit(), Type::int_()), World::site("server"));
    for (int i = 0; i < 600; ++i) {
      Generated g = gen.generate(base, i % 4 == 0);
      ++random_total;
      auto d = g.is_value ? check_value(g.ctx, g.term, g.type, g.world, env)
                          : check_expr(g.ctx, g.term, g.type, g.world, env);
      if (!d) {
        r.fail("generated term rejected: " + to_string(g.term) + ": " + d.error().message());
        continue;
      }
      TransResult t = translate(d.value());
      if (auto err = l5_diagnose(trans_ctx(g.ctx), t.term, t.type, t.world, L5Env{opts.sites})) {
        r.fail("generated term " + to_string(g.term) + ": " + err->message);
        continue;
      }
      ++random_ok;
    }
  }
  r.summary = std::to_string(programs) + " corpus programs (" + std::to_string(classic) + " classic, " +
              std::to_string(revised) + " revised, " + std::to_string(decls) + " decls, " +
              std::to_string(seen.size()) + "/" + std::to_string(all_rules.size()) + " rules), " +
              std::to_string(random_ok) + "/" + std::to_string(random_total) + " random terms preserved";
  return r;
}

//
// 3. Explicit communication
//

Report explicit_communication(const std::vector<CorpusFile>& corpus) {
  Report r;
  int pure = 0, total_gets = 0;
  for (const auto& f : corpus) {
    auto o = run_text(f.text, config_for(f));
    if (!o) {
      r.fail(f.name + ": " + o.error());
      continue;
    }
    int requests = 0;
    for (const auto& e : o.value().trace) requests += e.kind == Event::Kind::GetRequest;
    total_gets += requests;
    if (requests != o.value().foreign_gets) {
      r.fail(f.name + ": " + std::to_string(requests) + " GetRequest events, " +
             std::to_string(o.value().foreign_gets) + " foreign gets executed");
    }
    if (auto bad = validate_trace(o.value().trace, "client")) r.fail(f.name + ": " + *bad);
    SourceProgram p = parsed(f);
    bool effectful = false;
    for (TermKind k : {TermKind::Get, TermKind::Ref, TermKind::Deref, TermKind::Assign, TermKind::Print})
      effectful = effectful || count_kind(p, k) > 0;
    if (!effectful) {
      ++pure;
      if (!o.value().trace.empty()) r.fail(f.name + ": pure program produced " + serialize_trace(o.value().trace));
    }
  }
  if (pure == 0) r.fail("no pure programs in the corpus");
  r.summary = std::to_string(corpus.size()) + " programs, " + std::to_string(total_gets) + " foreign gets matched, " +
              std::to_string(pure) + " pure programs with empty traces";
  return r;
}

//
// 4. β-soundness
//

Report beta_soundness(const std::vector<CorpusFile>& corpus) {
  Report r;
  std::map<std::string, int> kinds;
  int total = 0;
  for (const auto& f : corpus) {
    RunConfig config = config_for(f);
    auto c = compile(f.text, config);
    if (!c) continue;
    auto base = run_program(c.value().source, config);
    if (!base) {
      r.fail(f.name + ": " + base.error());
      continue;
    }
    for (const auto& rx : beta_redexes(c.value().source, c.value().derivs)) {
      ++total;
      ++kinds[rx.kind];
      auto o = run_program(rx.contracted, config);
      std::string where = f.name + " (" + rx.kind + " redex in " + rx.decl + ")";
      if (!o) {
        r.fail(where + ": " + o.error());
      } else if (o.value().value != base.value().value) {
        r.fail(where + ": value " + o.value().value + " vs " + base.value().value);
      } else if (o.value().trace != base.value().trace) {
        r.fail(where + ": trace " + trace_diff(o.value().trace, base.value().trace));
      }
    }
  }
  std::string ks;
  for (const char* k : {"function", "pair", "sum", "world-app", "at", "exists"}) {
    if (!kinds.count(k)) r.fail(std::string("no ") + k + " redex in the corpus");
  }
  for (const auto& [k, n] : kinds) ks += " " + k + "=" + std::to_string(n);
  r.summary = std::to_string(total) + " redexes contracted (" + ks.substr(ks.empty() ? 0 : 1) + ")";
  return r;
}

//
// 5. ⌘ coherence
//

Report shamrock_coherence(const std::vector<CorpusFile>& corpus) {
  Report r;
  int programs = 0, runs = 0;
  for (const auto& f : corpus) {
    SourceProgram p = parsed(f);
    if (!uses_shamrock(p)) continue;
    ++programs;
    SourceProgram desugared = desugar_shamrock(p);
    for (const RunConfig& base : {two_sites(Mode::Classic), three_sites(Mode::Classic)}) {
      std::string where = f.name + " on " + std::to_string(base.sites.size()) + " sites";
      auto orig = run_program(p, base);
      RunConfig classic_desugared = base;
      auto plain = run_program(desugared, classic_desugared);
      RunConfig revised = base;
      revised.mode = Mode::Revised;
      auto rev = run_program(p, revised);
      if (!orig || !plain || !rev) {
        r.fail(where + ": " + (!orig ? orig.error() : !plain ? plain.error() : rev.error()));
        continue;
      }
      ++runs;
      for (const auto* o : {&plain.value(), &rev.value()}) {
        if (o->value != orig.value().value) r.fail(where + ": value " + o->value + " vs " + orig.value().value);
        if (o->trace != orig.value().trace) r.fail(where + ": trace " + trace_diff(o->trace, orig.value().trace));
      }
    }
  }
  if (programs == 0) r.fail("no ⌘ programs in the corpus");
  r.summary = std::to_string(programs) + " ⌘ programs, " + std::to_string(runs) + " configurations compared";
  return r;
}

//
// 6. Case derivability
//

Report case_derivability(const std::vector<CorpusFile>& corpus) {
  Report r;
  int value_cases = 0, value_splits = 0, excluded = 0, tethered = 0;
  for (const auto& f : corpus) {
    RunConfig config = config_for(f);
    auto c = compile(f.text, config);
    if (!c) continue;
    const Compiled& cc = c.value();
    auto base = run_program(cc.source, config);
    if (!base) continue;

    // (a) revised value-level cases into classic mode via get
    int vcases = count_kind(cc.source, TermKind::VCase);
    int splits = count_kind(cc.source, TermKind::Split);
    if (f.mode == Mode::Revised && vcases + splits > 0) {
      auto elaborated = elaborate_value_cases(cc.source, cc.derivs);
      if (!elaborated) {
        if (elaborated.error().reason == TypeErrorReason::NotMobile) {
          excluded += vcases;
        } else {
          r.fail(f.name + ": elaboration failed: " + elaborated.error().message());
        }
      } else {
        value_cases += vcases;
        value_splits += splits;
        const SourceProgram& ep = elaborated.value();
        auto o = run_program(ep, two_sites(Mode::Classic));
        if (!o) {
          r.fail(f.name + " (a): " + o.error());
        } else {
          bool inserted_get = count_kind(ep, TermKind::Get) > count_kind(cc.source, TermKind::Get);
          if (o.value().value != base.value().value) r.fail(f.name + " (a): value differs");
          if (effects_only(o.value().trace) != effects_only(base.value().trace)) {
            r.fail(f.name + " (a): effects differ " + trace_diff(o.value().trace, base.value().trace));
          }
          if (!inserted_get && o.value().trace != base.value().trace) r.fail(f.name + " (a): trace differs");
          if (auto bad = validate_trace(o.value().trace, "client")) r.fail(f.name + " (a): " + *bad);
        }
      }
    }

    // (b) tethered cases replayed as a bind plus a value-level case
    int cases = count_kind(cc.source, TermKind::Case);
    if (cases > 0) {
      tethered += cases;
      SourceProgram ep = elaborate_tethered_cases(cc.source, cc.derivs);
      auto o = run_program(ep, two_sites(Mode::Revised));
      if (!o) {
        r.fail(f.name + " (b): " + o.error());
      } else {
        if (o.value().value != base.value().value) r.fail(f.name + " (b): value differs");
        if (o.value().trace != base.value().trace) {
          r.fail(f.name + " (b): trace " + trace_diff(o.value().trace, base.value().trace));
        }
      }
    }
  }
  if (value_cases == 0) r.fail("no value-level cases in the corpus");
  if (tethered == 0) r.fail("no tethered cases in the corpus");
  r.summary = "(a) " + std::to_string(value_cases) + " value cases and " + std::to_string(value_splits) +
              " splits elaborated, " + std::to_string(excluded) +
              " with non-mobile conclusion excluded; (b) " + std::to_string(tethered) + " tethered cases replayed";
  return r;
}

//
// 7. Kripke commutation
//

Report kripke_commutation() {
  Report r;
  const std::vector<std::string> sites = {"client", "server"};
  auto values = enumerate_values(3, sites);
  auto types = enumerate_types(2, sites);
  std::vector<std::string> texts;
  for (const auto& v : values) texts.push_back(format_value(v));
  long checks = 0;
  long violations = 0;
  auto violate = [&](const std::string& what) {
    ++violations;
    r.fail(what);
  };
  for (const auto& a : types) {
    for (const auto& w : sites) {
      std::unordered_set<std::string> members;
      for (const auto& v : inhabitants(a, w)) members.insert(format_value(v));
      for (std::size_t i = 0; i < values.size(); ++i) {
        const ValuePtr& v = values[i];
        bool got = classify(v, a, w, sites);
        ++checks;
        if (got != (members.count(texts[i]) > 0)) {
          violate("oracle: classify(" + texts[i] + ", " + to_string(a) + ", " + w + ") = " +
                  (got ? "true" : "false"));
        }
        if (a.kind() == TypeKind::Sum) {
          bool expect = (v->kind == Value::Kind::Inl && classify(v->a, a.left(), w, sites)) ||
                        (v->kind == Value::Kind::Inr && classify(v->a, a.right(), w, sites));
          ++checks;
          if (got != expect) violate("sum commutation: " + format_value(v) + " at " + to_string(a));
        }
        if (a.kind() == TypeKind::At) {
          const std::string& home = a.world().name();
          bool expect = v->kind == Value::Kind::Box && v->site == home && classify(v->a, a.left(), home, sites);
          ++checks;
          if (got != expect) violate("at world-shift: " + format_value(v) + " at " + to_string(a));
          for (const auto& other : sites) {
            ++checks;
            if (classify(v, a, other, sites) != got) violate("at depends on the outer world: " + format_value(v));
          }
        }
      }
    }
  }
  r.summary = std::to_string(values.size()) + " values x " + std::to_string(types.size()) + " types, " +
              std::to_string(checks) + " checks, " + std::to_string(violations) + " violations";
  return r;
}

//
// 8. Determinism and evaluator cross-check
//

Report determinism(const std::vector<CorpusFile>& corpus) {
  Report r;
  int agreed = 0, traces_agreed = 0;
  for (const auto& f : corpus) {
    RunConfig config = config_for(f);
    std::vector<std::string> traces, values;
    for (int i = 0; i < 3; ++i) {
      auto o = run_text(f.text, config);
      if (!o) {
        r.fail(f.name + ": " + o.error());
        break;
      }
      traces.push_back(serialize_trace(o.value().trace));
      values.push_back(o.value().value);
    }
    if (traces.size() != 3) continue;
    if (traces[0] != traces[1] || traces[1] != traces[2] || values[0] != values[1] || values[1] != values[2]) {
      r.fail(f.name + ": runs differ");
    }
    auto c = compile(f.text, config);
    auto small = run_program_small(c.value().source, config);
    if (!small) {
      r.fail(f.name + ": small-step: " + small.error());
      continue;
    }
    if (small.value().value != values[0]) {
      r.fail(f.name + ": evaluators disagree: " + small.value().value + " vs " + values[0]);
    } else {
      ++agreed;
    }
    traces_agreed += serialize_trace(small.value().trace) == traces[0];
  }
  r.summary = std::to_string(corpus.size()) + " programs x 3 runs identical, evaluators agree on " +
              std::to_string(agreed) + " values (" + std::to_string(traces_agreed) + " traces)";
  return r;
}

}  // namespace

int main() {
  auto corpus = typeable_corpus();
  std::vector<std::pair<std::string, std::function<Report()>>> criteria = {
      {"mobility gate", [] { return mobility_gate(); }},
      {"type preservation", [&] { return type_preservation(corpus); }},
      {"explicit communication", [&] { return explicit_communication(corpus); }},
      {"beta soundness", [&] { return beta_soundness(corpus); }},
      {"shamrock elimination coherence", [&] { return shamrock_coherence(corpus); }},
      {"case derivability", [&] { return case_derivability(corpus); }},
      {"Kripke commutation", [] { return kripke_commutation(); }},
      {"determinism and evaluator cross-check", [&] { return determinism(corpus); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Report rep;
    try {
      rep = criteria[i].second();
    } catch (const std::exception& e) {
      rep.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s [%.1fs]\n", rep.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                rep.summary.c_str(), secs);
    for (const auto& d : rep.details) std::printf("    %s\n", d.c_str());
    failed += !rep.ok;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
