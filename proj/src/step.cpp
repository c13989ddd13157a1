#include <sstream>

#include "ml5/print.hpp"
#include "ml5/runtime.hpp"

namespace ml5 {

namespace {

using l5::Kind;
using LTerm = l5::Term;

void format_term(std::ostream& os, const LTerm& v, bool summary) {
  switch (v.kind()) {
    case Kind::Int:
      os << v.int_value();
      return;
    case Kind::Str:
      os << quote_string(v.str_value());
      return;
    case Kind::Unit:
      os << "()";
      return;
    case Kind::Pair:
      os << "(";
      format_term(os, v.sub(0), summary);
      os << ", ";
      format_term(os, v.sub(1), summary);
      os << ")";
      return;
    case Kind::Inl:
    case Kind::Inr:
      os << (v.kind() == Kind::Inl ? "inl " : "inr ");
      format_term(os, v.sub(0), summary);
      return;
    case Kind::Box:
      os << "box@" << v.world()->name();
      if (!summary) {
        os << "(";
        format_term(os, v.sub(0), summary);
        os << ")";
      }
      return;
    case Kind::Pack:
      os << "pack[" << v.world()->name() << "](";
      format_term(os, v.sub(0), summary);
      os << ")";
      return;
    case Kind::Lam:
      os << "<fn>";
      return;
    case Kind::WLam:
      os << "<wfn>";
      return;
    case Kind::Handle:
      os << "h" << v.int_value() << "@" << v.world()->name();
      return;
    default:
      os << (l5::is_monadic(v.kind()) ? "<comp>" : "<?>");
      return;
  }
}

/// Rebuilds `t` with child `i` replaced.
LTerm with_child(const LTerm& t, int i, LTerm c) {
  std::vector<LTerm> subs;
  for (int k = 0; k < t.arity(); ++k) subs.push_back(k == i ? std::move(c) : t.sub(k));
  return t.with_subs(std::move(subs));
}

}  // namespace

std::string format_term_value(const LTerm& v) {
  std::ostringstream os;
  format_term(os, v, false);
  return os.str();
}

std::string summarize_term_value(const LTerm& v) {
  std::ostringstream os;
  format_term(os, v, true);
  return os.str();
}

std::optional<LTerm> step_pure(const LTerm& t) {
  if (!t || l5::is_value(t)) return std::nullopt;
  // Reduce the leftmost non-value child first.
  auto congruence = [&](int i) -> std::optional<LTerm> {
    if (auto r = step_pure(t.sub(i))) return with_child(t, i, *r);
    return std::nullopt;
  };
  switch (t.kind()) {
    case Kind::App: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      if (!l5::is_value(t.sub(1))) return congruence(1);
      const LTerm& f = t.sub(0);
      if (f.kind() != Kind::Lam) return std::nullopt;
      return l5::subst(f.sub(0), f.name(), t.sub(1));
    }
    case Kind::Pair:
    case Kind::Inl:
    case Kind::Inr:
    case Kind::Box:
    case Kind::Pack:
      for (int i = 0; i < t.arity(); ++i) {
        if (!l5::is_value(t.sub(i))) return congruence(i);
      }
      return std::nullopt;
    case Kind::Fst:
    case Kind::Snd: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      if (t.sub(0).kind() != Kind::Pair) return std::nullopt;
      return t.sub(0).sub(t.kind() == Kind::Fst ? 0 : 1);
    }
    case Kind::Case: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      const LTerm& s = t.sub(0);
      if (s.kind() == Kind::Inl) return l5::subst(t.sub(1), t.name(), s.sub(0));
      if (s.kind() == Kind::Inr) return l5::subst(t.sub(2), t.name2(), s.sub(0));
      return std::nullopt;
    }
    case Kind::Unbox: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      if (t.sub(0).kind() != Kind::Box) return std::nullopt;
      return l5::subst(t.sub(1), t.name(), t.sub(0).sub(0));
    }
    case Kind::WApp: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      if (t.sub(0).kind() != Kind::WLam) return std::nullopt;
      return l5::subst_world(t.sub(0).sub(0), *t.world());
    }
    case Kind::Unpack: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      const LTerm& p = t.sub(0);
      if (p.kind() != Kind::Pack) return std::nullopt;
      return l5::subst(l5::subst_world(t.sub(1), *p.world()), t.name2(), p.sub(0));
    }
    case Kind::Let: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      return l5::subst(t.sub(1), t.name(), t.sub(0));
    }
    case Kind::Anno: {
      if (!l5::is_value(t.sub(0))) return congruence(0);
      return t.sub(0);
    }
    default:
      return std::nullopt;
  }
}

StepState init_step(const LTerm& t, const std::string& site) {
  StepState st;
  st.world = site;
  st.control = t;
  return st;
}

std::optional<Fault> step(StepState& st) {
  if (st.done) return std::nullopt;
  const LTerm c = st.control;
  if (!l5::is_value(c)) {
    auto r = step_pure(c);
    if (!r) return Fault{"stuck on " + to_string(c)};
    st.control = *r;
    return std::nullopt;
  }
  if (!l5::is_monadic(c.kind())) return Fault{"running non-computation " + format_term_value(c)};
  // Monadic primitives first evaluate their pure operands in place.
  int operands = c.kind() == Kind::Assign ? 2 : (c.kind() == Kind::MBind || c.kind() == Kind::MGet) ? 0 : 1;
  for (int i = 0; i < operands; ++i) {
    if (l5::is_value(c.sub(i))) continue;
    auto r = step_pure(c.sub(i));
    if (!r) return Fault{"stuck on " + to_string(c.sub(i))};
    st.control = with_child(c, i, *r);
    return std::nullopt;
  }
  auto emit = [&](Event e) { st.trace.push_back(std::move(e)); };
  auto handle_here = [&](const LTerm& h) -> std::optional<Fault> {
    if (h.kind() != Kind::Handle) return Fault{"dereference of non-reference " + format_term_value(h)};
    if (h.world()->name() != st.world) return Fault{"reference " + format_term_value(h) + " used at " + st.world};
    if (!st.heaps[st.world].count(h.int_value())) return Fault{"dangling reference"};
    return std::nullopt;
  };
  switch (c.kind()) {
    case Kind::MRet: {
      const LTerm& v = c.sub(0);
      if (st.stack.empty()) {
        st.done = true;
        return std::nullopt;
      }
      StepFrame f = st.stack.back();
      st.stack.pop_back();
      if (f.kind == StepFrame::Kind::Bind) {
        st.control = l5::subst(f.body, f.var, v);
      } else {
        emit({Event::Kind::GetReturn, st.world, f.caller, {}, {}, summarize_term_value(v)});
        st.world = f.caller;
      }
      return std::nullopt;
    }
    case Kind::MBind:
      st.stack.push_back(StepFrame{StepFrame::Kind::Bind, c.name(), c.sub(1), {}, {}});
      st.control = c.sub(0);
      return std::nullopt;
    case Kind::MGet: {
      if (!c.world()->is_const()) return Fault{"get to an unresolved world"};
      const std::string& target = c.world()->name();
      if (target != st.world) {
        emit({Event::Kind::GetRequest, st.world, target, {}, {}, {}});
        st.stack.push_back(StepFrame{StepFrame::Kind::Return, {}, {}, st.world, c.type()});
        st.world = target;
      }
      st.control = c.sub(0);
      return std::nullopt;
    }
    case Kind::Ref: {
      std::int64_t id = st.next_handle[st.world]++;
      st.heaps[st.world][id] = c.sub(0);
      emit({Event::Kind::Alloc, {}, {}, st.world, "h" + std::to_string(id), format_term_value(c.sub(0))});
      st.control = LTerm::mret(LTerm::handle(st.world, id));
      return std::nullopt;
    }
    case Kind::Deref: {
      if (auto f = handle_here(c.sub(0))) return f;
      LTerm v = st.heaps[st.world][c.sub(0).int_value()];
      emit({Event::Kind::Read, {}, {}, st.world, "h" + std::to_string(c.sub(0).int_value()), format_term_value(v)});
      st.control = LTerm::mret(v);
      return std::nullopt;
    }
    case Kind::Assign: {
      if (auto f = handle_here(c.sub(0))) return f;
      st.heaps[st.world][c.sub(0).int_value()] = c.sub(1);
      emit({Event::Kind::Write, {}, {}, st.world, "h" + std::to_string(c.sub(0).int_value()), format_term_value(c.sub(1))});
      st.control = LTerm::mret(LTerm::unit());
      return std::nullopt;
    }
    case Kind::Print: {
      const LTerm& v = c.sub(0);
      std::string text = v.kind() == Kind::Str ? v.str_value() : format_term_value(v);
      emit({Event::Kind::Print, {}, {}, st.world, {}, text});
      st.control = LTerm::mret(LTerm::unit());
      return std::nullopt;
    }
    default:
      return Fault{"unknown computation"};
  }
}

Result<StepState, Fault> run_small(const LTerm& t, const std::string& site, std::size_t fuel) {
  StepState st = init_step(t, site);
  for (std::size_t i = 0; i < fuel && !st.done; ++i) {
    if (auto f = step(st)) return *f;
  }
  if (!st.done) return Fault{"out of fuel"};
  return st;
}

}  // namespace ml5
