#include "ml5/runtime.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ml5/print.hpp"

namespace ml5 {

//
// Configuration
//

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Result<RunConfig, std::string> parse_config(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    for (const char* marker : {"#", "--"}) {
      auto k = line.find(marker);
      if (k != std::string::npos) line.erase(k);
    }
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) return "config line " + std::to_string(n) + ": expected `key = value`";
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "sites") {
      c.sites.clear();
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) {
        std::string s = trim(part);
        if (!s.empty()) c.sites.push_back(s);
      }
    } else if (key == "entry") {
      c.entry = value;
    } else if (key == "mode") {
      if (value == "classic") {
        c.mode = Mode::Classic;
      } else if (value == "revised") {
        c.mode = Mode::Revised;
      } else {
        return "config line " + std::to_string(n) + ": unknown mode `" + value + "`";
      }
    } else {
      return "config line " + std::to_string(n) + ": unknown key `" + key + "`";
    }
  }
  if (auto err = validate_config(c)) return *err;
  return c;
}

std::optional<std::string> validate_config(const RunConfig& c) {
  if (c.sites.empty()) return std::string("configuration declares no sites");
  std::set<std::string> seen;
  for (const auto& s : c.sites) {
    if (!seen.insert(s).second) return "duplicate site `" + s + "`";
  }
  if (!seen.count(c.entry)) return "entry site `" + c.entry + "` is not declared";
  return std::nullopt;
}

//
// Values
//

namespace {

ValuePtr make(Value v) { return std::make_shared<const Value>(std::move(v)); }

}  // namespace

ValuePtr Value::int_(std::int64_t n) {
  Value v;
  v.kind = Kind::Int;
  v.num = n;
  return make(std::move(v));
}

ValuePtr Value::str_(std::string s) {
  Value v;
  v.kind = Kind::Str;
  v.str = std::move(s);
  return make(std::move(v));
}

ValuePtr Value::unit() {
  static const ValuePtr u = make(Value{});
  return u;
}

ValuePtr Value::pair(ValuePtr a, ValuePtr b) {
  Value v;
  v.kind = Kind::Pair;
  v.a = std::move(a);
  v.b = std::move(b);
  return make(std::move(v));
}

ValuePtr Value::inl(ValuePtr a) {
  Value v;
  v.kind = Kind::Inl;
  v.a = std::move(a);
  return make(std::move(v));
}

ValuePtr Value::inr(ValuePtr a) {
  Value v;
  v.kind = Kind::Inr;
  v.a = std::move(a);
  return make(std::move(v));
}

ValuePtr Value::box(std::string home, ValuePtr a) {
  Value v;
  v.kind = Kind::Box;
  v.site = std::move(home);
  v.a = std::move(a);
  return make(std::move(v));
}

ValuePtr Value::package(std::string witness, ValuePtr a) {
  Value v;
  v.kind = Kind::Package;
  v.site = std::move(witness);
  v.a = std::move(a);
  return make(std::move(v));
}

ValuePtr Value::handle(std::string site, std::int64_t id) {
  Value v;
  v.kind = Kind::Handle;
  v.site = std::move(site);
  v.num = id;
  return make(std::move(v));
}

namespace {

void format(std::ostream& os, const ValuePtr& v, bool summary) {
  switch (v->kind) {
    case Value::Kind::Int:
      os << v->num;
      return;
    case Value::Kind::Str:
      os << quote_string(v->str);
      return;
    case Value::Kind::Unit:
      os << "()";
      return;
    case Value::Kind::Pair:
      os << "(";
      format(os, v->a, summary);
      os << ", ";
      format(os, v->b, summary);
      os << ")";
      return;
    case Value::Kind::Inl:
    case Value::Kind::Inr:
      os << (v->kind == Value::Kind::Inl ? "inl " : "inr ");
      format(os, v->a, summary);
      return;
    case Value::Kind::Box:
      os << "box@" << v->site;
      if (!summary) {
        os << "(";
        format(os, v->a, summary);
        os << ")";
      }
      return;
    case Value::Kind::Package:
      os << "pack[" << v->site << "](";
      format(os, v->a, summary);
      os << ")";
      return;
    case Value::Kind::Closure:
      os << "<fn>";
      return;
    case Value::Kind::WorldFn:
      os << "<wfn>";
      return;
    case Value::Kind::Suspension:
      os << "<comp>";
      return;
    case Value::Kind::Handle:
      os << "h" << v->num << "@" << v->site;
      return;
  }
}

}  // namespace

std::string format_value(const ValuePtr& v) {
  std::ostringstream os;
  format(os, v, false);
  return os.str();
}

std::string summarize_value(const ValuePtr& v) {
  std::ostringstream os;
  format(os, v, true);
  return os.str();
}

//
// Trace
//

std::string_view event_kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::GetRequest:
      return "GetRequest";
    case Event::Kind::GetReturn:
      return "GetReturn";
    case Event::Kind::Alloc:
      return "Alloc";
    case Event::Kind::Read:
      return "Read";
    case Event::Kind::Write:
      return "Write";
    case Event::Kind::Print:
      return "Print";
  }
  return "?";
}

bool is_communication(const Event& e) { return e.kind == Event::Kind::GetRequest || e.kind == Event::Kind::GetReturn; }

std::string serialize_trace(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Event& e = t[i];
    nlohmann::ordered_json j;
    j["seq"] = i;
    j["kind"] = std::string(event_kind_name(e.kind));
    if (is_communication(e)) {
      j["from"] = e.from;
      j["to"] = e.to;
    } else {
      j["site"] = e.site;
    }
    if (!e.handle.empty()) j["handle"] = e.handle;
    if (e.kind != Event::Kind::GetRequest) j["payload"] = e.payload;
    out += j.dump();
    out += '\n';
  }
  return out;
}

//
// Machine
//

Result<MachineState, std::string> init_machine(const RunConfig& config) {
  if (config.sites.empty()) return std::string("configuration declares no sites");
  MachineState st;
  st.sites = config.sites;
  for (const auto& s : config.sites) {
    st.heaps[s];
    st.next_handle[s] = 0;
    st.output[s];
  }
  return st;
}

namespace {

struct FaultEx {
  std::string message;
};

[[noreturn]] void fault(const std::string& msg) { throw FaultEx{msg}; }

EnvPtr extend(const EnvPtr& env, const std::string& x, ValuePtr v) {
  return std::make_shared<const Env>(Env{x, std::move(v), env});
}

ValuePtr lookup(const EnvPtr& env, const std::string& x) {
  for (const Env* e = env.get(); e; e = e->next.get()) {
    if (e->name == x) return e->value;
  }
  fault("unbound variable " + x);
}

std::string resolve(const World& w, const std::vector<std::string>& worlds) {
  if (w.is_const()) return w.name();
  auto k = static_cast<std::size_t>(w.index());
  if (k >= worlds.size()) fault("unbound world variable");
  return worlds[k];
}

std::vector<std::string> push_world(const std::vector<std::string>& worlds, const std::string& s) {
  std::vector<std::string> out;
  out.reserve(worlds.size() + 1);
  out.push_back(s);
  out.insert(out.end(), worlds.begin(), worlds.end());
  return out;
}

ValuePtr marshal_value(const ValuePtr& v, const Type& a) {
  auto shape = [&](Value::Kind k) {
    if (v->kind != k) fault("marshal: value " + format_value(v) + " does not have type " + to_string(a));
  };
  switch (a.kind()) {
    case TypeKind::Base:
      switch (a.base_type()) {
        case BaseType::Int:
          shape(Value::Kind::Int);
          return Value::int_(v->num);
        case BaseType::String:
          shape(Value::Kind::Str);
          return Value::str_(v->str);
        case BaseType::Unit:
          shape(Value::Kind::Unit);
          return Value::unit();
      }
      break;
    case TypeKind::Prod:
      shape(Value::Kind::Pair);
      return Value::pair(marshal_value(v->a, a.left()), marshal_value(v->b, a.right()));
    case TypeKind::Sum:
      if (v->kind == Value::Kind::Inl) return Value::inl(marshal_value(v->a, a.left()));
      shape(Value::Kind::Inr);
      return Value::inr(marshal_value(v->a, a.right()));
    case TypeKind::At:
      // The box keeps its home world; its contents stay usable only there.
      shape(Value::Kind::Box);
      return v;
    case TypeKind::Forall:
      shape(Value::Kind::WorldFn);
      return v;
    case TypeKind::Exists:
      shape(Value::Kind::Package);
      return Value::package(v->site, marshal_value(v->a, subst_world(a.body(), World::site(v->site))));
    case TypeKind::Shamrock:
      return marshal_value(v, Type::forall(Type::at(shift_type(a.body(), 1), World::var(0))));
    case TypeKind::Arrow:
    case TypeKind::Ref:
    case TypeKind::Lax:
      fault("invariant violation: marshal reached non-mobile type " + to_string(a));
  }
  fault("marshal: unknown type");
}

class Machine {
 public:
  explicit Machine(MachineState* st) : st_(st) {}

  ValuePtr eval(const l5::Term& t, const EnvPtr& env, const std::vector<std::string>& worlds, const std::string& site) {
    using l5::Kind;
    auto scrutinee_site = [&](const l5::Term& s) {
      if (s.kind() == Kind::Anno && s.world()) return resolve(*s.world(), worlds);
      return site;
    };
    switch (t.kind()) {
      case Kind::Var:
        return lookup(env, t.name());
      case Kind::Int:
        return Value::int_(t.int_value());
      case Kind::Str:
        return Value::str_(t.str_value());
      case Kind::Unit:
        return Value::unit();
      case Kind::Lam: {
        Value v;
        v.kind = Value::Kind::Closure;
        v.str = t.name();
        v.type = close_type(t.type(), worlds);
        v.env = env;
        v.worlds = worlds;
        v.body = t.sub(0);
        v.site = site;
        return make(std::move(v));
      }
      case Kind::App: {
        ValuePtr f = eval(t.sub(0), env, worlds, site);
        ValuePtr a = eval(t.sub(1), env, worlds, site);
        if (f->kind != Value::Kind::Closure) fault("application of non-function " + format_value(f));
        if (f->site != site) fault("function from " + f->site + " applied at " + site);
        return eval(f->body, extend(f->env, f->str, a), f->worlds, f->site);
      }
      case Kind::Pair: {
        ValuePtr a = eval(t.sub(0), env, worlds, site);
        ValuePtr b = eval(t.sub(1), env, worlds, site);
        return Value::pair(a, b);
      }
      case Kind::Fst:
      case Kind::Snd: {
        ValuePtr p = eval(t.sub(0), env, worlds, site);
        if (p->kind != Value::Kind::Pair) fault("projection from non-pair " + format_value(p));
        return t.kind() == Kind::Fst ? p->a : p->b;
      }
      case Kind::Inl:
        return Value::inl(eval(t.sub(0), env, worlds, site));
      case Kind::Inr:
        return Value::inr(eval(t.sub(0), env, worlds, site));
      case Kind::Case: {
        ValuePtr s = eval(t.sub(0), env, worlds, scrutinee_site(t.sub(0)));
        if (s->kind == Value::Kind::Inl) return eval(t.sub(1), extend(env, t.name(), s->a), worlds, site);
        if (s->kind == Value::Kind::Inr) return eval(t.sub(2), extend(env, t.name2(), s->a), worlds, site);
        fault("case on non-sum " + format_value(s));
      }
      case Kind::Box: {
        std::string home = resolve(*t.world(), worlds);
        return Value::box(home, eval(t.sub(0), env, worlds, home));
      }
      case Kind::Unbox: {
        ValuePtr b = eval(t.sub(0), env, worlds, scrutinee_site(t.sub(0)));
        if (b->kind != Value::Kind::Box) fault("unbox of non-box " + format_value(b));
        return eval(t.sub(1), extend(env, t.name(), b->a), worlds, site);
      }
      case Kind::WLam: {
        Value v;
        v.kind = Value::Kind::WorldFn;
        v.env = env;
        v.worlds = worlds;
        v.body = t.sub(0);
        v.site = site;
        return make(std::move(v));
      }
      case Kind::WApp: {
        ValuePtr f = eval(t.sub(0), env, worlds, site);
        if (f->kind != Value::Kind::WorldFn) fault("world application of " + format_value(f));
        return apply_world(f, resolve(*t.world(), worlds), site);
      }
      case Kind::Pack:
        return Value::package(resolve(*t.world(), worlds), eval(t.sub(0), env, worlds, site));
      case Kind::Unpack: {
        ValuePtr p = eval(t.sub(0), env, worlds, scrutinee_site(t.sub(0)));
        if (p->kind != Value::Kind::Package) fault("unpack of non-package " + format_value(p));
        return eval(t.sub(1), extend(env, t.name2(), p->a), push_world(worlds, p->site), site);
      }
      case Kind::Let: {
        ValuePtr v = eval(t.sub(0), env, worlds, scrutinee_site(t.sub(0)));
        return eval(t.sub(1), extend(env, t.name(), v), worlds, site);
      }
      case Kind::Anno:
        return eval(t.sub(0), env, worlds, t.world() ? resolve(*t.world(), worlds) : site);
      case Kind::MRet:
      case Kind::MBind:
      case Kind::MGet:
      case Kind::Ref:
      case Kind::Deref:
      case Kind::Assign:
      case Kind::Print: {
        Value v;
        v.kind = Value::Kind::Suspension;
        v.env = env;
        v.worlds = worlds;
        v.body = t;
        v.site = site;
        return make(std::move(v));
      }
      case Kind::Handle:
        return Value::handle(t.world()->name(), t.int_value());
    }
    fault("unknown term");
  }

  ValuePtr apply_world(const ValuePtr& f, const std::string& target, const std::string& site) {
    return eval(f->body, f->env, push_world(f->worlds, target), site);
  }

  ValuePtr exec(const ValuePtr& c, const std::string& site) {
    using l5::Kind;
    if (c->kind != Value::Kind::Suspension) fault("running non-computation " + format_value(c));
    if (c->site != site) fault("computation from " + c->site + " run at " + site);
    const l5::Term& t = c->body;
    const EnvPtr& env = c->env;
    const auto& worlds = c->worlds;
    switch (t.kind()) {
      case Kind::MRet:
        return eval(t.sub(0), env, worlds, site);
      case Kind::MBind: {
        ValuePtr v = exec(eval(t.sub(0), env, worlds, site), site);
        return exec(eval(t.sub(1), extend(env, t.name(), v), worlds, site), site);
      }
      case Kind::MGet: {
        std::string target = resolve(*t.world(), worlds);
        if (std::find(st_->sites.begin(), st_->sites.end(), target) == st_->sites.end()) {
          fault("get to undeclared site " + target);
        }
        if (target == site) {
          ++st_->local_gets;
          return exec(eval(t.sub(0), env, worlds, site), site);
        }
        ++st_->foreign_gets;
        emit({Event::Kind::GetRequest, site, target, {}, {}, {}});
        ValuePtr v = exec(eval(t.sub(0), env, worlds, target), target);
        ValuePtr m = marshal_value(v, close_type(t.type(), worlds));
        emit({Event::Kind::GetReturn, target, site, {}, {}, summarize_value(m)});
        return m;
      }
      case Kind::Ref: {
        ValuePtr v = eval(t.sub(0), env, worlds, site);
        std::int64_t id = st_->next_handle[site]++;
        st_->heaps[site][id] = v;
        emit({Event::Kind::Alloc, {}, {}, site, "h" + std::to_string(id), format_value(v)});
        return Value::handle(site, id);
      }
      case Kind::Deref: {
        ValuePtr h = handle_at(eval(t.sub(0), env, worlds, site), site);
        ValuePtr v = st_->heaps[site].at(h->num);
        emit({Event::Kind::Read, {}, {}, site, "h" + std::to_string(h->num), format_value(v)});
        return v;
      }
      case Kind::Assign: {
        ValuePtr h = handle_at(eval(t.sub(0), env, worlds, site), site);
        ValuePtr v = eval(t.sub(1), env, worlds, site);
        st_->heaps[site][h->num] = v;
        emit({Event::Kind::Write, {}, {}, site, "h" + std::to_string(h->num), format_value(v)});
        return Value::unit();
      }
      case Kind::Print: {
        ValuePtr v = eval(t.sub(0), env, worlds, site);
        std::string text = v->kind == Value::Kind::Str ? v->str : format_value(v);
        st_->output[site].push_back(text);
        emit({Event::Kind::Print, {}, {}, site, {}, text});
        return Value::unit();
      }
      default:
        fault("running non-computation term");
    }
  }

 private:
  ValuePtr handle_at(const ValuePtr& h, const std::string& site) {
    if (h->kind != Value::Kind::Handle) fault("dereference of non-reference " + format_value(h));
    if (h->site != site) fault("reference " + format_value(h) + " used at " + site);
    if (!st_->heaps[site].count(h->num)) fault("dangling reference " + format_value(h));
    return h;
  }

  void emit(Event e) { st_->trace.push_back(std::move(e)); }

  MachineState* st_;
};

}  // namespace

Result<ValuePtr, Fault> run(const l5::Term& t, const std::string& site, MachineState& st) {
  if (std::find(st.sites.begin(), st.sites.end(), site) == st.sites.end()) {
    return Fault{"entry site " + site + " is not configured"};
  }
  try {
    Machine m(&st);
    return m.exec(m.eval(t, nullptr, {}, site), site);
  } catch (const FaultEx& f) {
    return Fault{f.message};
  } catch (const std::out_of_range& e) {
    return Fault{e.what()};
  }
}

Result<ValuePtr, Fault> marshal(const ValuePtr& v, const Type& a) {
  try {
    return marshal_value(v, a);
  } catch (const FaultEx& f) {
    return Fault{f.message};
  }
}

//
// Classification
//

namespace {

bool classify_in(const ValuePtr& v, const Type& a, const std::string& w, const std::vector<std::string>& sites) {
  switch (a.kind()) {
    case TypeKind::Base:
      switch (a.base_type()) {
        case BaseType::Int:
          return v->kind == Value::Kind::Int;
        case BaseType::String:
          return v->kind == Value::Kind::Str;
        case BaseType::Unit:
          return v->kind == Value::Kind::Unit;
      }
      return false;
    case TypeKind::Arrow:
      return v->kind == Value::Kind::Closure && v->site == w && v->type == a.left();
    case TypeKind::Prod:
      return v->kind == Value::Kind::Pair && classify_in(v->a, a.left(), w, sites) && classify_in(v->b, a.right(), w, sites);
    case TypeKind::Sum:
      if (v->kind == Value::Kind::Inl) return classify_in(v->a, a.left(), w, sites);
      if (v->kind == Value::Kind::Inr) return classify_in(v->a, a.right(), w, sites);
      return false;
    case TypeKind::At:
      return v->kind == Value::Kind::Box && v->site == a.world().name() && classify_in(v->a, a.left(), a.world().name(), sites);
    case TypeKind::Forall: {
      if (v->kind != Value::Kind::WorldFn) return false;
      MachineState scratch;
      scratch.sites = sites;
      Machine m(&scratch);
      for (const auto& s : sites) {
        ValuePtr r;
        try {
          r = m.apply_world(v, s, w);
        } catch (const FaultEx&) {
          return false;
        }
        if (!classify_in(r, subst_world(a.body(), World::site(s)), w, sites)) return false;
      }
      return true;
    }
    case TypeKind::Exists:
      return v->kind == Value::Kind::Package &&
             std::find(sites.begin(), sites.end(), v->site) != sites.end() &&
             classify_in(v->a, subst_world(a.body(), World::site(v->site)), w, sites);
    case TypeKind::Shamrock:
      return classify_in(v, Type::forall(Type::at(shift_type(a.body(), 1), World::var(0))), w, sites);
    case TypeKind::Ref:
      return v->kind == Value::Kind::Handle && v->site == w;
    case TypeKind::Lax:
      return v->kind == Value::Kind::Suspension && v->site == w;
  }
  return false;
}

}  // namespace

bool classify(const ValuePtr& v, const Type& a, const std::string& w, const std::vector<std::string>& sites) {
  if (!v || !a || !is_closed(a)) return false;
  return classify_in(v, a, w, sites);
}

//
// Linking
//

Result<Linked, std::string> link_program(const l5::Program& p, const std::string& entry) {
  World here = World::site(entry);
  if (p.decls.empty()) return Linked{l5::Term::mret(l5::Term::unit()), Type::lax(Type::unit()), here};
  const l5::Decl& last = p.decls.back();
  if (last.world != here) return "last declaration " + last.name + " lives at " + to_string(last.world) + ", not at the entry site " + entry;
  Type result = last.is_computation ? last.type.body() : last.type;
  l5::Term body = l5::Term::mret(l5::Term::var(last.name));
  for (auto it = p.decls.rbegin(); it != p.decls.rend(); ++it) {
    if (it->is_computation) {
      if (it->world != here) {
        return "computation " + it->name + " lives at " + to_string(it->world) + ", not at the entry site " + entry;
      }
      body = l5::Term::mbind(it->term, it->name, it->type.body(), body);
    } else {
      body = l5::Term::let(it->name, l5::Term::anno(it->term, it->type, it->world), body);
    }
  }
  return Linked{body, Type::lax(result), here};
}

}  // namespace ml5
