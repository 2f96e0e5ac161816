#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agentmix/agents.hpp"
#include "oracles.hpp"

using namespace agentmix;
using desk::h;

namespace {

Dist ab(const char* a, const char* b) { return Dist::make({Rational::parse(a), Rational::parse(b)}); }

}  // namespace

TEST_CASE("uniform and constant agents") {
  CHECK(act(*desk::uniform(), h("(o,1) a (o,0)")) == ab("1/2", "1/2"));
  CHECK(act(*desk::Db(), h("(o,0)")) == ab("0", "1"));
  CHECK(act(*desk::Da(), h("(o,-1) b (o,1)")) == ab("1", "0"));
}

TEST_CASE("act rejects histories that do not end in a percept") {
  auto u = desk::uniform();
  CHECK_THROWS_AS(act(*u, History()), Error);
  try {
    act(*u, h("(o,0) a"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongParity);
  }
}

TEST_CASE("table agent uses entries, then its default") {
  auto s = desk::spaces();
  auto t = builtin_agent(s, "table", {{"entries", {{"(o,0)", {{"a", "1"}}}}}});
  CHECK(act(*t, h("(o,0)")) == ab("1", "0"));
  CHECK(act(*t, h("(o,0) a (o,0)")) == ab("1/2", "1/2"));
  auto d = builtin_agent(s, "table", {{"entries", json::object()}, {"default", {{"b", "1"}}}});
  CHECK(act(*d, h("(o,1)")) == ab("0", "1"));
  CHECK(builtin_agent(s, "table", t->descriptor())->descriptor() == t->descriptor());
}

TEST_CASE("greedy agent follows the last reward") {
  auto g = desk::greedy();
  CHECK(act(*g, h("(o,1)")) == ab("0", "1"));
  CHECK(act(*g, h("(o,0)")) == ab("1", "0"));
  CHECK(act(*g, h("(o,1) a (o,-1)")) == ab("1", "0"));
}

TEST_CASE("agent_prob follows the recursion") {
  CHECK(agent_prob(*desk::uniform(), History()) == Rational(1));
  CHECK(agent_prob(*desk::Da(), h("(o,0) b")) == Rational(0));
  CHECK(agent_prob(*desk::uniform(), h("(o,0) a (o,0) b")) == Rational(1, 4));
  CHECK(agent_prob(*desk::uniform(), h("(o,0) a (o,0)")) == Rational(1, 2));
}

TEST_CASE("recursion clauses hold on every history of a random agent") {
  auto s = desk::spaces();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = builtin_agent(s, "random", {{"seed", seed}});
    for (std::size_t len = 1; len <= 8; ++len) {
      for (const History& g : oracle::histories(*s, len)) {
        History parent = g.prefix(len - 1);
        if (g.ends_in_percept()) {
          CHECK(agent_prob(*r, g) == agent_prob(*r, parent));
        } else {
          CHECK(agent_prob(*r, g) == agent_prob(*r, parent) * act(*r, parent)[g.last_action().index]);
          CHECK(agent_prob(*r, g) == oracle::agent_only(*r, g));
        }
      }
    }
  }
}

TEST_CASE("random agents are pure and normalized") {
  auto s = desk::spaces2();
  auto r = builtin_agent(s, "random", {{"seed", 5}, {"denominator", 7}});
  for (const History& g : oracle::histories(*s, 3)) {
    Dist d = act(*r, g);
    CHECK(d.is_normalized());
    CHECK(d == act(*r, g));
    for (const auto& m : d.masses()) CHECK((m * Rational(7)).to_mpq().get_den() == 1);
  }
  auto again = builtin_agent(s, "random", {{"seed", 5}, {"denominator", 7}});
  CHECK(act(*again, h("(p,1) a (o,0)", s)) == act(*r, h("(p,1) a (o,0)", s)));
  CHECK(builtin_agent(s, "random", r->descriptor())->descriptor() == r->descriptor());
}

TEST_CASE("factory errors") {
  auto s = desk::spaces();
  auto code = [&](const std::string& family, const json& params) {
    try {
      builtin_agent(s, family, params);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::UnknownName;
  };
  CHECK(code("oracle", json::object()) == ErrorCode::UnknownFamily);
  CHECK(code("constant", json::object()) == ErrorCode::BadParams);
  CHECK(code("constant", {{"action", "z"}}) == ErrorCode::BadParams);
  CHECK(code("greedy", {{"threshold", "1"}, {"high", "b"}}) == ErrorCode::BadParams);
  CHECK(code("random", {{"seed", "x"}}) == ErrorCode::BadParams);
  CHECK(code("table", {{"entries", {{"(o,0) a", {{"a", "1"}}}}}}) == ErrorCode::BadParams);
}
