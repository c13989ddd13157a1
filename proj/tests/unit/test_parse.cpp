#include <doctest.h>

#include "ml5/parse.hpp"
#include "ml5/pipeline.hpp"
#include "ml5/print.hpp"
#include "support.hpp"

using namespace ml5;

TEST_CASE("declarations") {
  auto p = parse_program("main : unit [client] = ret ()");
  REQUIRE(p.ok());
  REQUIRE(p.value().decls.size() == 1);
  const SourceDecl& d = p.value().decls[0];
  CHECK(d.name == "main");
  CHECK(d.type == Type::unit());
  CHECK(d.world == World::site("client"));
  CHECK(d.term == Term::ret(Term::unit()));

  auto q = parse_program("main : ref int [client] = get[server] (ref (ret 0))");
  REQUIRE(q.ok());
  CHECK(q.value().decls[0].term == Term::get(World::site("server"), Term::ref(Term::ret(Term::int_lit(0)))));

  auto bad = parse_program("main : = ");
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().pos.line == 1);
}

TEST_CASE("world declarations and comments") {
  auto p = parse_program("-- a comment\nworld db\nx : int [db] = 3\n");
  REQUIRE(p.ok());
  CHECK(p.value().worlds == std::vector<std::string>{"db"});
  CHECK(p.value().decls[0].world == World::site("db"));
}

TEST_CASE("types") {
  auto t = parse_type("forall w. int at w");
  REQUIRE(t.ok());
  CHECK(t.value() == Type::forall(Type::at(Type::int_(), World::var(0))));

  auto a = parse_type("int -> int -> int");
  REQUIRE(a.ok());
  CHECK(a.value() == Type::arrow(Type::int_(), Type::arrow(Type::int_(), Type::int_())));

  auto p = parse_type("int * string + unit");
  REQUIRE(p.ok());
  CHECK(p.value() == Type::sum(Type::prod(Type::int_(), Type::string_()), Type::unit()));

  auto r = parse_type("ref int at server");
  REQUIRE(r.ok());
  CHECK(r.value() == Type::at(Type::ref(Type::int_()), World::site("server")));

  auto s = parse_type("shamrock shamrock int");
  REQUIRE(s.ok());
  CHECK(s.value() == Type::shamrock(Type::shamrock(Type::int_())));

  CHECK_FALSE(parse_type("int at").ok());
}

TEST_CASE("value-level case parses when the scrutinee is a value") {
  auto v = parse_term("case x of inl a => ret a | inr b => ret 0");
  REQUIRE(v.ok());
  CHECK(v.value().kind() == TermKind::VCase);
  auto e = parse_term("case (ret x) of inl a => ret a | inr b => ret 0");
  REQUIRE(e.ok());
  CHECK(e.value().kind() == TermKind::Case);
}

TEST_CASE("print then parse is the identity on the corpus") {
  for (const auto& f : ml5::test::typeable_corpus()) {
    auto p = parse_program(f.text);
    REQUIRE_MESSAGE(p.ok(), f.name);
    std::string printed = to_string(p.value());
    auto q = parse_program(printed);
    REQUIRE_MESSAGE(q.ok(), f.name << ":\n" << printed);
    CHECK_MESSAGE(q.value() == p.value(), f.name << ":\n" << printed);
  }
}

TEST_CASE("print then parse is the identity on generated terms and types") {
  for (Mode mode : {Mode::Classic, Mode::Revised}) {
    ml5::test::GenOptions opts;
    opts.mode = mode;
    ml5::test::Generator gen(5, opts);
    for (int i = 0; i < 300; ++i) {
      auto g = gen.generate(Ctx{}.with_hyp("x", Type::int_(), World::site("client")), i % 2 == 0);
      std::string text = to_string(g.term);
      auto t = parse_term(text);
      REQUIRE_MESSAGE(t.ok(), text << ": " << t.error().message());
      CHECK_MESSAGE(t.value() == g.term, text);

      std::string ty = to_string(g.type);
      auto a = parse_type(ty);
      REQUIRE_MESSAGE(a.ok(), ty);
      CHECK_MESSAGE(a.value() == g.type, ty);
    }
  }
}

TEST_CASE("translated programs print and re-parse") {
  for (const auto& f : ml5::test::typeable_corpus()) {
    auto c = compile(f.text, ml5::test::two_sites(f.mode));
    REQUIRE_MESSAGE(c.ok(), f.name);
    std::string printed = to_string(c.value().core);
    auto q = parse_l5_program(printed);
    REQUIRE_MESSAGE(q.ok(), f.name << ":\n" << printed << "\n" << q.error().message());
    CHECK_MESSAGE(to_string(q.value()) == printed, f.name);
  }
}
