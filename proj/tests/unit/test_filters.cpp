#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "metra/congruence.hpp"
#include "metra/error.hpp"
#include "metra/filters.hpp"

using namespace metra;

namespace {

const std::vector<std::string> kIndex{"1", "2", "3"};

std::vector<ExtRational> random_family(std::size_t n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(0, 12), den(1, 4), pct(0, 9);
  std::vector<ExtRational> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(pct(rng) == 0 ? ExtRational::infinity() : ExtRational(num(rng), den(rng)));
  return out;
}

bool core_contains(const FiniteFilter& big, const FiniteFilter& small) {
  return std::includes(big.core().begin(), big.core().end(), small.core().begin(), small.core().end());
}

}  // namespace

TEST_CASE("filter families") {
  auto whole = validate_filter_family(kIndex, {{0, 1, 2}});
  REQUIRE(whole.verdict.ok);
  CHECK(whole.filter->core() == std::vector<std::size_t>{0, 1, 2});

  auto principal = validate_filter_family(kIndex, {{1}, {0, 1}, {1, 2}, {0, 1, 2}});
  REQUIRE(principal.verdict.ok);
  CHECK(*principal.filter == FiniteFilter::principal(kIndex, 1));
  CHECK(principal.filter->is_ultrafilter());
  CHECK(principal.filter->members().size() == 4);

  CHECK(validate_filter_family(kIndex, {{0}}).verdict.code == "proper");
  CHECK(validate_filter_family(kIndex, {{}, {0, 1, 2}}).verdict.code == "proper");
  auto up = validate_filter_family(kIndex, {{0}, {0, 1, 2}});
  CHECK(up.verdict.code == "upward");
  CHECK(up.verdict.witness == std::vector<std::size_t>{0, 1});
  auto meet = validate_filter_family(kIndex, {{0, 1}, {1, 2}, {0, 1, 2}});
  CHECK(meet.verdict.code == "intersection");
  CHECK(meet.verdict.witness == std::vector<std::size_t>{1});

  CHECK_THROWS_AS(validate_filter_family(kIndex, {{3}}), DomainError);
  Limits tight;
  tight.subsets = 4;
  CHECK_THROWS_AS(validate_filter_family(kIndex, {{0, 1, 2}}, tight), ResourceError);
  CHECK_THROWS_AS(FiniteFilter(kIndex, {}), DomainError);
  CHECK_THROWS_AS(FiniteFilter({"a", "a"}, {0}), DomainError);
}

TEST_CASE("every filter round-trips through its explicit family") {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto idx = fx::labels(n);
    for (const auto& f : all_filters(idx)) {
      auto back = validate_filter_family(idx, f.members());
      REQUIRE(back.verdict.ok);
      CHECK(*back.filter == f);
    }
  }
  CHECK(all_filters(fx::labels(4)).size() == 15);
}

TEST_CASE("limits along filters") {
  std::vector<ExtRational> a{ExtRational(3), ExtRational(1, 2), ExtRational::infinity()};
  for (std::size_t k = 0; k < 3; ++k) {
    auto f = FiniteFilter::principal(kIndex, k);
    CHECK(limsup_along(f, a) == a[k]);
    CHECK(liminf_along(f, a) == a[k]);
  }
  FiniteFilter f(kIndex, {0, 1});
  CHECK(limsup_along(f, a) == ExtRational(3));
  CHECK(liminf_along(f, a) == ExtRational(1, 2));
  std::vector<ExtRational> short_family{ExtRational(1)};
  CHECK_THROWS_AS(limsup_along(f, short_family), ShapeError);
}

TEST_CASE("ultrafilter limits exist") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 5;
    auto family = random_family(n, rng);
    auto u = FiniteFilter::principal(fx::labels(n), static_cast<std::size_t>(trial) % n);
    CHECK(liminf_along(u, family) == limsup_along(u, family));
  }
}

TEST_CASE("finer filters shrink limsup and grow liminf") {
  std::mt19937 rng(5);
  for (std::size_t n = 1; n <= 4; ++n) {
    auto filters = all_filters(fx::labels(n));
    for (int trial = 0; trial < 20; ++trial) {
      auto family = random_family(n, rng);
      for (const auto& f : filters)
        for (const auto& g : filters) {
          if (!core_contains(f, g)) continue;
          CHECK(limsup_along(f, family) >= limsup_along(g, family));
          CHECK(liminf_along(f, family) <= liminf_along(g, family));
        }
    }
  }
}

TEST_CASE("limsup is subadditive") {
  std::mt19937 rng(17);
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& f : all_filters(fx::labels(n)))
      for (int trial = 0; trial < 10; ++trial) {
        auto x = random_family(n, rng), y = random_family(n, rng);
        std::vector<ExtRational> s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(x[i] + y[i]);
        CHECK(limsup_along(f, s) <= limsup_along(f, x) + limsup_along(f, y));
        CHECK(liminf_along(f, s) >= liminf_along(f, x) + liminf_along(f, y));
      }
}

TEST_CASE("restricting a filter") {
  FiniteFilter f(fx::labels(4), {1, 3});
  std::vector<std::size_t> j{1, 2, 3};
  auto r = restrict_filter(f, j);
  CHECK(r.index() == std::vector<std::string>{"1", "2", "3"});
  CHECK(r.core() == std::vector<std::size_t>{0, 2});
  std::vector<std::size_t> bad{0, 1};
  CHECK_THROWS_AS(restrict_filter(f, bad), DomainError);

  std::mt19937 rng(2);
  auto family = random_family(4, rng);
  std::vector<ExtRational> sub{family[1], family[2], family[3]};
  CHECK(limsup_along(r, sub) == limsup_along(f, family));
}

TEST_CASE("reduced products are products over the core") {
  std::mt19937 rng(23);
  for (std::size_t n = 1; n <= 3; ++n)
    for (const auto& f : all_filters(fx::labels(n))) {
      std::vector<AlgebraRef> factors;
      for (std::size_t i = 0; i < n; ++i) factors.push_back(fx::random_binary_algebra(2, rng));
      auto r = reduced_product(factors, f);
      REQUIRE(r.verdict.ok);
      REQUIRE(r.quotient.has_value());
      CHECK(is_congruential(*r.product->algebra, r.theta).ok);
      std::vector<AlgebraRef> core;
      for (std::size_t i : f.core()) core.push_back(factors[i]);
      CHECK(find_isomorphism(*r.quotient->algebra, *product(core).algebra).has_value());
      if (f.is_ultrafilter())
        CHECK(find_isomorphism(*r.quotient->algebra, *factors[f.core().front()]).has_value());
    }
  auto a = fx::saturating_sum();
  CHECK_THROWS_AS(reduced_product({a}, FiniteFilter(kIndex, {0})), ShapeError);
}

TEST_CASE("closed-form entries") {
  CHECK(ClosedForm::parse("1/n") == ClosedForm{ExtRational(), ExtRational(1)});
  CHECK(ClosedForm::parse("3/2/n").rate == ExtRational(3, 2));
  auto f = ClosedForm::parse("1/2 + 3/n");
  CHECK(f.constant == ExtRational(1, 2));
  CHECK(f.at(3) == ExtRational(3, 2));
  CHECK(f.limit() == ExtRational(1, 2));
  CHECK(f.str() == "1/2 + 3/n");
  CHECK(ClosedForm::parse("inf").limit().is_infinite());
  CHECK(ClosedForm::parse("2").str() == "2");
  CHECK_THROWS_AS(ClosedForm::parse("1 + 2"), ParseError);
  CHECK_THROWS_AS(ClosedForm::parse("n"), ParseError);
  CHECK_THROWS_AS(f.at(0), DomainError);
}

TEST_CASE("pointwise limits of metric sequences") {
  constexpr std::int64_t N = 20;
  std::vector<DistMatrix> prefix;
  for (std::int64_t n = 1; n <= N; ++n) {
    DistMatrix m(3);
    m.set_symmetric(0, 1, ExtRational(1, n));
    m.set_symmetric(0, 2, ExtRational(1));
    m.set_symmetric(1, 2, ExtRational(1));
    prefix.push_back(m);
  }
  auto exact = pointwise_limit_exact(prefix);
  CHECK(exact.verdict.code == "divergent");
  CHECK(exact.verdict.witness == std::vector<std::size_t>{0, 1});
  CHECK(pointwise_limit_gap(prefix, ExtRational(1, N * N)).verdict.code == "divergent");
  auto loose = pointwise_limit_gap(prefix, ExtRational(1, N));
  CHECK(loose.verdict.ok);
  CHECK(loose.approximate);

  auto one = ClosedForm::parse("1");
  auto shrinking = ClosedForm::parse("1/n");
  auto zero = ClosedForm::parse("0");
  auto closed = pointwise_limit_closed({{zero, shrinking, one}, {shrinking, zero, one}, {one, one, zero}});
  REQUIRE(closed.verdict.ok);
  CHECK(closed.matrix(0, 1).is_zero());
  auto classes = metric_identification(closed.matrix);
  CHECK(classes.map.num_classes() == 2);
  CHECK(classes.map.class_of[0] == classes.map.class_of[1]);

  std::vector<DistMatrix> constant(3, fx::line_metric(3));
  CHECK(pointwise_limit_exact(constant, 3).verdict.ok);
  CHECK_THROWS_AS(pointwise_limit_exact(constant, 1), DomainError);
  CHECK(pointwise_limit_exact(constant, 4).verdict.code == "divergent");
}

TEST_CASE("a limit of congruential metrics need not be congruential") {
  Signature sig{{"sigma", 1}};
  DistMatrix ones = fx::M({{"0", "1", "1"}, {"1", "0", "1"}, {"1", "1", "0"}});
  auto base = make_algebra(MetricAlgebra(sig, {"a", "b", "c"}, ones, {{"sigma", OpTable{1, {0, 2, 2}}}}));
  auto one = ClosedForm::parse("1");
  auto shrinking = ClosedForm::parse("1/n");
  auto zero = ClosedForm::parse("0");
  std::vector<std::vector<ClosedForm>> forms{{zero, shrinking, one}, {shrinking, zero, one}, {one, one, zero}};
  for (std::int64_t n = 1; n <= 5; ++n) {
    DistMatrix dn(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) dn(i, j) = forms[i][j].at(n);
    CHECK(is_congruential(*base, dn).ok);
  }
  auto limit = pointwise_limit_closed(forms);
  REQUIRE(limit.verdict.ok);
  Verdict v = is_congruential(*base, limit.matrix);
  CHECK(v.code == "compatibility");
  CHECK(v.witness == std::vector<std::size_t>{0, 1});
}
