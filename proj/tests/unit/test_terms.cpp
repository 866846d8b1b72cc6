#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "metra/error.hpp"
#include "metra/lexer.hpp"
#include "metra/terms.hpp"

using namespace metra;

namespace {

std::vector<std::string> strs(const std::vector<Term>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.str());
  return out;
}

Term random_term(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  if (depth == 0 || coin(rng) == 0) return Term::var(vars[pick(rng)]);
  return Term::apply("sigma", {random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1)});
}

}  // namespace

TEST_CASE("enumerate_terms examples") {
  Signature s{{"sigma", 2}};
  CHECK(strs(enumerate_terms(s, {"x"}, 0)) == std::vector<std::string>{"x"});
  CHECK(strs(enumerate_terms(s, {"x", "y"}, 1)) ==
        std::vector<std::string>{"x", "y", "sigma(x,x)", "sigma(x,y)", "sigma(y,x)", "sigma(y,y)"});
  Signature c{{"c", 0}};
  CHECK(strs(enumerate_terms(c, {}, 2)) == std::vector<std::string>{"c"});
  CHECK(enumerate_terms(s, {"x", "y"}, 3).size() == 1446);
  Limits tight;
  tight.terms = 100;
  CHECK_THROWS_AS(enumerate_terms(s, {"x", "y"}, 3, tight), ResourceError);
}

TEST_CASE("enumeration is monotone in depth and well formed") {
  Signature s{{"sigma", 2}, {"neg", 1}, {"c", 0}};
  for (std::size_t d = 0; d < 3; ++d) {
    auto small = enumerate_terms(s, {"x"}, d), big = enumerate_terms(s, {"x"}, d + 1);
    for (const auto& t : small) CHECK(std::find(big.begin(), big.end(), t) != big.end());
    for (const auto& t : big) {
      CHECK_NOTHROW(check_term(t, s));
      CHECK(t.height() <= d + 1);
    }
    std::set<Term> unique(big.begin(), big.end());
    CHECK(unique.size() == big.size());
  }
}

TEST_CASE("parse_term") {
  Signature s{{"sigma", 2}, {"c", 0}};
  Term t = parse_term(" sigma( x , c ) ", s);
  CHECK(t.str() == "sigma(x,c)");
  CHECK_FALSE(t.args()[1].is_variable());
  CHECK(t.args()[0].is_variable());
  CHECK(t.height() == 1);
  CHECK(t.variables() == std::set<std::string>{"x"});
  try {
    parse_term("sigma(x)", s);
    FAIL("expected a signature error");
  } catch (const SignatureError& e) {
    CHECK(std::string(e.what()).rfind("1:1:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_term("sigma(x,", s), ParseError);
  CHECK_THROWS_AS(parse_term("tau(x)", s), SignatureError);
  TokenStream in("c()");
  CHECK_FALSE(parse_term(in, nullptr).is_variable());
  CHECK(Term::apply("c").str(true) == "c()");
}

TEST_CASE("evaluate") {
  auto a = fx::saturating_sum();
  const SigmaAlgebra& s = a->structure();
  CHECK(evaluate(Term::var("x"), s, {{"x", 1}}) == 1);
  CHECK(evaluate(parse_term("sigma(x,y)", a->signature()), s, {{"x", 1}, {"y", 1}}) == 2);
  CHECK(evaluate(parse_term("sigma(x,x)", a->signature()), s, {{"x", 0}}) == a->apply("sigma", std::vector<std::size_t>{0, 0}));
  CHECK_THROWS_AS(evaluate(Term::var("z"), s, {}), ValuationError);
  CHECK_THROWS_AS(evaluate(Term::var("x"), s, {{"x", 9}}), ValuationError);
  CHECK_THROWS_AS(evaluate(Term::apply("tau", {Term::var("x")}), s, {{"x", 0}}), SignatureError);
  CHECK_THROWS_AS(evaluate(Term::apply("sigma", {Term::var("x")}), s, {{"x", 0}}), SignatureError);
}

TEST_CASE("evaluate is homomorphic on enumerated terms") {
  std::mt19937 rng(2);
  Signature s{{"sigma", 2}};
  auto terms = enumerate_terms(s, {"x", "y"}, 2);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = fx::random_binary_algebra(1 + trial % 4, rng);
    for (std::size_t vx = 0; vx < a->size(); ++vx)
      for (std::size_t vy = 0; vy < a->size(); ++vy) {
        Valuation v{{"x", vx}, {"y", vy}};
        for (const auto& t : terms) {
          if (t.is_variable()) continue;
          std::vector<std::size_t> args{evaluate(t.args()[0], a->structure(), v),
                                        evaluate(t.args()[1], a->structure(), v)};
          CHECK(evaluate(t, a->structure(), v) == a->apply("sigma", args));
        }
      }
  }
}

TEST_CASE("substitution") {
  Signature s{{"sigma", 2}};
  CHECK(substitute(Term::var("x"), {{"x", parse_term("sigma(y,y)", s)}}).str() == "sigma(y,y)");
  CHECK(substitute(parse_term("sigma(x,y)", s), {{"x", Term::var("y")}, {"y", Term::var("x")}}).str() ==
        "sigma(y,x)");
  CHECK_THROWS_AS(substitute(Term::var("x"), {}), ValuationError);
}

TEST_CASE("substitution commutes with evaluation") {
  std::mt19937 rng(99);
  std::vector<std::string> vars{"x", "y", "z"};
  std::uniform_int_distribution<std::size_t> elem(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = fx::random_binary_algebra(4, rng);
    Term t = random_term(rng, vars, 3);
    std::map<std::string, Term> sub;
    for (const auto& v : vars) sub.emplace(v, random_term(rng, vars, 2));
    Valuation val;
    for (const auto& v : vars) val[v] = elem(rng);
    Valuation w;
    for (const auto& v : vars) w[v] = evaluate(sub.at(v), a->structure(), val);
    CHECK(evaluate(substitute(t, sub), a->structure(), val) == evaluate(t, a->structure(), w));
  }
}
