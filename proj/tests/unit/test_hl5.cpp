#include <doctest.h>

#include "ml5/hl5.hpp"
#include "ml5/parse.hpp"
#include "ml5/print.hpp"
#include "ml5/runtime.hpp"
#include "support.hpp"

using namespace ml5;
namespace L = ml5::l5;

namespace {

const World client = World::site("client");
const World server = World::site("server");
const Type I = Type::int_();
const std::vector<std::string> sites = {"client", "server"};

SemType interp_ok(const Type& a, const World& w) {
  auto s = interp(a, w, sites);
  REQUIRE_MESSAGE(s.ok(), to_string(a));
  return s.value();
}

ValuePtr eval(const L::Term& computation, const std::string& at = "client") {
  auto st = init_machine(RunConfig{});
  REQUIRE(st.ok());
  MachineState m = st.value();
  auto v = run(computation, at, m);
  REQUIRE_MESSAGE(v.ok(), v.error().message);
  return v.value();
}

}  // namespace

TEST_CASE("l5_check: monadic return and bind") {
  CHECK(l5_check(Ctx{}, L::Term::mret(L::Term::int_lit(3)), Type::lax(I), client));
  CHECK_FALSE(l5_check(Ctx{}, L::Term::mret(L::Term::int_lit(3)), I, client));

  Ctx remote = Ctx{}.with_hyp("c", Type::lax(I), server);
  L::Term bind = L::Term::mbind(L::Term::var("c"), "x", I, L::Term::mret(L::Term::var("x")));
  CHECK_FALSE(l5_check(remote, bind, Type::lax(I), client));
  CHECK(l5_check(remote, bind, Type::lax(I), server));
}

TEST_CASE("l5_check: sum elimination is untethered") {
  Ctx ctx = Ctx{}.with_hyp("s", Type::sum(I, I), server);
  L::Term c = L::Term::case_(L::Term::var("s"), "x", L::Term::int_lit(1), "y", L::Term::int_lit(2));
  CHECK(l5_check(ctx, c, I, client));

  // the branch variables live where the scrutinee does
  L::Term uses = L::Term::case_(L::Term::var("s"), "x", L::Term::var("x"), "y", L::Term::int_lit(2));
  CHECK_FALSE(l5_check(ctx, uses, I, client));
  CHECK(l5_check(ctx, uses, I, server));
  L::Term fetch = L::Term::case_(L::Term::var("s"), "x", L::Term::mget(server, I, L::Term::mret(L::Term::var("x"))),
                                 "y", L::Term::mret(L::Term::int_lit(0)));
  CHECK(l5_check(ctx, fetch, Type::lax(I), client));
}

TEST_CASE("l5_check: other untethered eliminations") {
  Ctx ctx = Ctx{}.with_hyp("b", Type::at(I, server), client);
  // unbox binds the contents at the box's world
  L::Term u = L::Term::unbox(L::Term::var("b"), "n", L::Term::mget(server, I, L::Term::mret(L::Term::var("n"))));
  CHECK(l5_check(ctx, u, Type::lax(I), client));

  Ctx pairs = Ctx{}.with_hyp("p", Type::prod(I, Type::string_()), server);
  CHECK(l5_check(pairs, L::Term::snd(L::Term::var("p")), Type::string_(), server));
}

TEST_CASE("l5_check: mget requires mobility") {
  CHECK(l5_check(Ctx{}, L::Term::mget(server, I, L::Term::mret(L::Term::int_lit(3))), Type::lax(I), client));
  L::Term alloc = L::Term::ref(L::Term::int_lit(0));
  CHECK(l5_check(Ctx{}, alloc, Type::lax(Type::ref(I)), server));
  auto err = l5_diagnose(Ctx{}, L::Term::mget(server, Type::ref(I), alloc), Type::lax(Type::ref(I)), client);
  REQUIRE(err);
  CHECK(err->message.rfind("NotMobile", 0) == 0);
}

TEST_CASE("l5_check rejects surface-only and runtime-only forms") {
  CHECK_FALSE(l5_check(Ctx{}, L::Term::handle("client", 0), Type::ref(I), client));
  Ctx sham = Ctx{}.with_hyp("s", Type::shamrock(I), client);
  CHECK_FALSE(l5_check(sham, L::Term::var("s"), Type::shamrock(I), client));
  CHECK_FALSE(l5_check(Ctx{}, L::Term::mret(L::Term::int_lit(1)), Type::lax(I), World::site("mars"), L5Env{sites}));
  CHECK(l5_check(Ctx{}, L::Term::mret(L::Term::int_lit(1)), Type::lax(I), World::site("mars")));
}

TEST_CASE("l5_synth") {
  auto t = l5_synth(Ctx{}, L::Term::pair(L::Term::int_lit(1), L::Term::str_lit("a")), client);
  REQUIRE(t.ok());
  CHECK(t.value() == Type::prod(I, Type::string_()));
  auto w = l5_synth(Ctx{}, L::Term::wlam("w", L::Term::box(World::var(0), L::Term::int_lit(1))), client);
  REQUIRE(w.ok());
  CHECK(w.value() == Type::forall(Type::at(I, World::var(0))));
}

TEST_CASE("l5_check_program: computations bind their results") {
  auto p = parse_l5_program("c : ◯int <client> = mret 3\nd : ◯int <client> = mret c\n");
  REQUIRE_MESSAGE(p.ok(), p.error().message());
  CHECK_FALSE(l5_check_program(p.value()));
  auto bad = parse_l5_program("c : ◯int <server> = mret 3\nd : int <client> = c\n");
  REQUIRE(bad.ok());
  CHECK(l5_check_program(bad.value()));
}

TEST_CASE("hl5 mobility and world substitution") {
  CHECK_FALSE(mobile_hl5(Type::lax(I)));
  CHECK(mobile_hl5(Type::at(Type::lax(I), server)));
  CHECK_FALSE(mobile_hl5(Type::prod(I, Type::lax(I))));
  CHECK(mobile_hl5(Type::forall(Type::at(Type::arrow(I, Type::lax(I)), World::var(0)))));

  CHECK(subst_world_hl5(Type::lax(Type::at(I, World::var(0))), server) == Type::lax(Type::at(I, server)));
  Type closed = Type::arrow(I, Type::lax(Type::at(I, client)));
  CHECK(subst_world_hl5(closed, server) == closed);
}

TEST_CASE("interp") {
  CHECK(interp_ok(Type::at(I, server), client) == interp_ok(I, server));
  CHECK(interp_ok(I, server).kind == SemType::Kind::Base);
  CHECK(interp_ok(I, server).base == BaseType::Int);

  SemType sum = interp_ok(Type::sum(I, Type::string_()), client);
  CHECK(sum.kind == SemType::Kind::Sum);
  REQUIRE(sum.parts.size() == 2);
  CHECK(sum.parts[0] == interp_ok(I, client));
  CHECK(sum.parts[1] == interp_ok(Type::string_(), client));

  SemType lax = interp_ok(Type::lax(Type::unit()), client);
  CHECK(lax.kind == SemType::Kind::Computation);
  CHECK(lax.cod == Type::unit());
  CHECK(lax.world == client);

  SemType fn = interp_ok(Type::arrow(I, Type::lax(I)), server);
  CHECK(fn.kind == SemType::Kind::Function);
  CHECK(fn.dom == I);
  CHECK(fn.world == server);

  SemType ref = interp_ok(Type::ref(I), server);
  CHECK(ref.kind == SemType::Kind::RefHandle);
  CHECK(ref.world == server);

  SemType all = interp_ok(Type::forall(Type::at(I, World::var(0))), client);
  CHECK(all.kind == SemType::Kind::Intersection);
  CHECK(all.sites == sites);
  REQUIRE(all.parts.size() == 2);
  CHECK(all.parts[1] == interp_ok(Type::at(I, server), client));
  CHECK(interp_ok(Type::exists(I), client).kind == SemType::Kind::Union);

  CHECK_FALSE(interp(Type::at(I, World::var(0)), client, sites).ok());
}

TEST_CASE("interp: at does not depend on the outer world") {
  ml5::test::Generator gen(17, {});
  for (int i = 0; i < 300; ++i) {
    Type a = close_type(gen.type(3, 0), sites);
    for (const World& home : {client, server}) {
      Type at = Type::at(a, home);
      CHECK(interp_ok(at, client) == interp_ok(at, server));
      CHECK(interp_ok(at, client) == interp_ok(a, home));
    }
  }
}

TEST_CASE("classify") {
  CHECK(classify(Value::int_(3), I, "client", sites));
  // world-shift clause by hand: box@server(3) is in interp(int at server, client)
  // because its contents are int-values at server
  ValuePtr b = Value::box("server", Value::int_(3));
  CHECK(b->site == "server");
  CHECK(classify(b->a, I, "server", sites));
  CHECK(classify(b, Type::at(I, server), "client", sites));
  CHECK_FALSE(classify(b, Type::at(I, client), "client", sites));
  CHECK_FALSE(classify(Value::inl(Value::int_(3)), Type::prod(I, I), "client", sites));
  CHECK(classify(Value::handle("server", 0), Type::ref(I), "server", sites));
  CHECK_FALSE(classify(Value::handle("server", 0), Type::ref(I), "client", sites));
  CHECK(classify(Value::package("server", Value::box("server", Value::int_(1))),
                 Type::exists(Type::at(I, World::var(0))), "client", sites));
}

TEST_CASE("classify: forall is the intersection over the configured sites") {
  Type all = Type::forall(Type::at(I, World::var(0)));
  L::Term good = L::Term::wlam("w", L::Term::box(World::var(0), L::Term::int_lit(3)));
  L::Term fixed = L::Term::wlam("w", L::Term::box(client, L::Term::int_lit(3)));
  for (const L::Term& f : {good, fixed}) {
    ValuePtr v = eval(L::Term::mret(f));
    bool every = true;
    for (const auto& s : sites) {
      ValuePtr inst = eval(L::Term::mret(L::Term::wapp(f, World::site(s))));
      every = every && classify(inst, subst_world(all.body(), World::site(s)), "client", sites);
    }
    CHECK(classify(v, all, "client", sites) == every);
  }
  CHECK(classify(eval(L::Term::mret(good)), all, "client", sites));
  CHECK_FALSE(classify(eval(L::Term::mret(fixed)), all, "client", sites));
}

TEST_CASE("classify: closures and suspensions are checked by tag") {
  ValuePtr f = eval(L::Term::mret(L::Term::lam("x", I, L::Term::mret(L::Term::var("x")))), "server");
  CHECK(classify(f, Type::arrow(I, Type::lax(I)), "server", sites));
  CHECK_FALSE(classify(f, Type::arrow(I, Type::lax(I)), "client", sites));
  CHECK_FALSE(classify(f, Type::arrow(Type::string_(), Type::lax(I)), "server", sites));
  ValuePtr c = eval(L::Term::mret(L::Term::mret(L::Term::int_lit(1))));
  CHECK(classify(c, Type::lax(I), "client", sites));
  CHECK_FALSE(classify(c, Type::lax(I), "server", sites));
}
