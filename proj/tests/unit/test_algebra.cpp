#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "metra/algebra.hpp"
#include "metra/congruence.hpp"
#include "metra/error.hpp"

using namespace metra;

namespace {

AlgebraRef max_algebra() {
  return make_algebra(MetricAlgebra(Signature{{"sigma", 2}}, fx::labels(3), fx::line_metric(3),
                                    {{"sigma", fx::binary_table(3, [](auto p, auto q) { return std::max(p, q); })}}));
}

AlgebraRef empty_sig(const DistMatrix& m) { return make_algebra(MetricAlgebra(Signature{}, fx::labels(m.size()), m, {})); }

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("validate_algebra") {
  CHECK(validate_algebra(*fx::saturating_sum()).ok);
  MetricAlgebra bad_table(Signature{{"f", 1}}, fx::labels(2), fx::line_metric(2), {{"f", OpTable{1, {0, 5}}}});
  Verdict v = validate_algebra(bad_table);
  CHECK(v.code == "table");
  CHECK(v.witness == std::vector<std::size_t>{1});
  MetricAlgebra bad_metric(Signature{}, fx::labels(3), fx::M({{"0", "1", "5"}, {"1", "0", "1"}, {"5", "1", "0"}}), {});
  CHECK(validate_algebra(bad_metric).code == "triangle");
  CHECK_THROWS_AS(make_algebra(bad_metric), AxiomError);
  CHECK_THROWS_AS(MetricAlgebra(Signature{}, {}, DistMatrix(0), {}), DomainError);
  CHECK_THROWS_AS(MetricAlgebra(Signature{{"f", 1}}, fx::labels(2), fx::line_metric(2), {}), SignatureError);
  CHECK_THROWS_AS(MetricAlgebra(Signature{{"f", 1}}, fx::labels(2), fx::line_metric(2), {{"f", OpTable{1, {0}}}}),
                  ShapeError);
}

TEST_CASE("homomorphisms and the shrinking metric") {
  auto a = fx::saturating_sum();
  auto b = fx::saturating_sum(1, 2);
  auto id = identity(3);
  CHECK(is_homomorphism(id, *a, *a).ok);
  CHECK(is_homomorphism(id, *a, *b).ok);
  Verdict back = is_homomorphism(id, *b, *a);
  CHECK(back.code == "nonexpansive");
  std::vector<std::size_t> swap{1, 0, 2};
  CHECK(is_homomorphism(swap, *a, *a).code == "operation");
  CHECK_THROWS_AS(is_homomorphism(id, *a, *empty_sig(fx::line_metric(3))), SignatureError);
  CHECK_THROWS_AS(Homomorphism::make(b, a, id), HomomorphismError);
  CHECK(Homomorphism::make(a, b, id).is_surjective());
}

TEST_CASE("quantitative algebras") {
  CHECK(is_quantitative(*empty_sig(fx::line_metric(3))).ok);
  Verdict sum = is_quantitative(*fx::saturating_sum());
  CHECK(sum.code == "quantitative");
  CHECK(sum.witness == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(is_quantitative(*max_algebra()).ok);
  CHECK(is_lipschitz(*fx::saturating_sum(), {{"sigma", ExtRational(2)}}).ok);
  CHECK(is_lipschitz(*fx::saturating_sum(), {}).code == "lipschitz");
}

TEST_CASE("generated subalgebras") {
  auto a = fx::saturating_sum();
  std::vector<std::size_t> all{0, 1, 2}, one{1};
  CHECK(*generate_subalgebra(a, all).algebra == *a);
  auto s = generate_subalgebra(a, one);
  CHECK(s.elements == std::vector<std::size_t>{1, 2});
  CHECK(s.algebra->carrier() == std::vector<std::string>{"1", "2"});
  CHECK(is_isometric_embedding(s.inclusion.map(), s.algebra->space(), a->space()));
  auto e = empty_sig(fx::line_metric(3));
  std::vector<std::size_t> seed{2};
  CHECK(generate_subalgebra(e, seed).algebra->size() == 1);
  std::vector<std::size_t> none;
  CHECK_THROWS_AS(generate_subalgebra(a, none), DomainError);
}

TEST_CASE("products") {
  auto a = fx::saturating_sum();
  auto p1 = product({a});
  CHECK(p1.algebra->size() == 3);
  CHECK(find_isomorphism(*p1.algebra, *a).has_value());
  auto two = empty_sig(fx::line_metric(2));
  auto sq = product({two, two});
  CHECK(sq.algebra->metric() == sup_product({two->space(), two->space()}).dist());
  auto aa = product({a, a});
  for (const auto& pi : aa.projections) CHECK(is_homomorphism(pi.map(), *aa.algebra, *a).ok);
  CHECK_THROWS_AS(product({}), ArityError);
  CHECK_THROWS_AS(product({a, two}), SignatureError);
}

TEST_CASE("kernel and image") {
  auto a = fx::saturating_sum();
  auto b = fx::saturating_sum(1, 2);
  auto id = identity(3);
  CHECK(kernel(Homomorphism::make(a, a, id)).matrix() == a->metric());
  auto e = empty_sig(fx::line_metric(3));
  auto pt = empty_sig(DistMatrix(1));
  auto k = kernel(Homomorphism::make(e, pt, {0, 0, 0}));
  CHECK(k.matrix() == DistMatrix(3));
  auto shrink = Homomorphism::make(a, b, id);
  CHECK(kernel(shrink).matrix() == b->metric());
  CHECK(image(shrink).elements == id);
}

TEST_CASE("quotients") {
  auto a = fx::saturating_sum();
  auto same = quotient(Congruence::metric_of(a));
  CHECK(find_isomorphism(*same.algebra, *a).has_value());
  CHECK(quotient(Congruence::zero(a)).algebra->size() == 1);

  auto g = fx::grid();
  auto q = quotient(Congruence::make(g, fx::grid_coordinate(0)));
  CHECK(q.algebra->size() == 3);
  CHECK(q.algebra->metric() == fx::line_metric(3, 1, 2));
  CHECK(q.algebra->carrier() == std::vector<std::string>{"p00", "p10", "p20"});
  CHECK_THROWS_AS(Congruence::make(g, fx::line_metric(9)), CongruenceError);
}

TEST_CASE("kernel of the projection recovers the congruence") {
  std::mt19937 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto a = fx::random_binary_algebra(1 + trial % 4, rng);
    DistMatrix p = fx::random_pseudometric(a->size(), rng);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) p(i, j) = min(p(i, j), a->d(i, j));
    p = fx::path_close(p);
    if (!is_congruential(*a, p)) continue;
    auto theta = Congruence::make(a, p);
    CHECK(kernel(quotient(theta).projection).matrix() == p);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("saturation") {
  auto a = fx::saturating_sum();
  std::vector<std::size_t> s{1};
  CHECK(saturate(s, Congruence::metric_of(a)) == s);
  CHECK(saturate(s, Congruence::zero(a)) == std::vector<std::size_t>{0, 1, 2});

  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = fx::random_binary_algebra(4, rng);
    std::vector<std::size_t> seed{static_cast<std::size_t>(trial % 4)};
    auto sub = generate_subalgebra(b, seed);
    std::vector<Constraint> c{{static_cast<std::size_t>(trial % 4), static_cast<std::size_t>((trial / 4) % 4), 0}};
    auto theta = generate_congruence(b, c, Mode::metric());
    auto sat = saturate(sub.elements, theta);
    CHECK(generate_subalgebra(b, sat).elements == sat);
  }
}

TEST_CASE("reflexive quotients") {
  auto a = fx::saturating_sum();
  auto id = Homomorphism::make(a, a, identity(3));
  auto r = is_reflexive_quotient(id);
  CHECK(r.verdict.ok);
  CHECK(r.section == identity(3));

  auto shrink = Homomorphism::make(a, fx::saturating_sum(1, 2), identity(3));
  CHECK(is_reflexive_quotient(shrink).verdict.code == "section");

  auto p = product({a, a});
  auto r2 = is_reflexive_quotient(p.projections[0]);
  REQUIRE(r2.verdict.ok);
  for (std::size_t x = 0; x < 3; ++x) CHECK(p.projections[0](r2.section[x]) == x);
  CHECK(is_isometric_embedding(r2.section, a->space(), p.algebra->space()));
  std::vector<std::size_t> diagonal;
  for (std::size_t x = 0; x < 3; ++x) diagonal.push_back(p.codec.encode(std::vector<std::size_t>{x, x}));
  CHECK(is_isometric_embedding(diagonal, a->space(), p.algebra->space()));

  auto e = empty_sig(fx::line_metric(2));
  auto pt = empty_sig(DistMatrix(1));
  auto onto = Homomorphism::make(pt, e, {0});
  CHECK_THROWS_AS(is_reflexive_quotient(onto), DomainError);

  Limits tight;
  tight.sections = 1;
  CHECK_THROWS_AS(is_reflexive_quotient(p.projections[0], tight), ResourceError);
}

TEST_CASE("a subalgebra of a reflexive quotient is a reflexive quotient of a subalgebra") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto b = fx::random_binary_algebra(2 + trial % 2, rng);
    auto c = fx::random_binary_algebra(2, rng);
    auto prod = product({b, c});
    const Homomorphism& p = prod.projections[0];
    if (!is_reflexive_quotient(p).verdict.ok) continue;
    std::vector<std::size_t> seed{static_cast<std::size_t>(trial) % b->size()};
    auto b_sub = generate_subalgebra(b, seed);
    std::vector<std::size_t> preimage;
    for (std::size_t x = 0; x < prod.algebra->size(); ++x)
      if (std::binary_search(b_sub.elements.begin(), b_sub.elements.end(), p(x))) preimage.push_back(x);
    auto a_sub = generate_subalgebra(prod.algebra, preimage);
    REQUIRE(a_sub.elements == preimage);
    std::vector<std::size_t> map;
    for (std::size_t x : preimage)
      map.push_back(static_cast<std::size_t>(
          std::lower_bound(b_sub.elements.begin(), b_sub.elements.end(), p(x)) - b_sub.elements.begin()));
    auto restricted = Homomorphism::make(a_sub.algebra, b_sub.algebra, map);
    CHECK(is_reflexive_quotient(restricted).verdict.ok);
  }
}

TEST_CASE("isomorphism search") {
  auto a = fx::saturating_sum();
  std::vector<std::size_t> perm{2, 0, 1};
  // Relabel a by perm.
  std::map<std::string, OpTable> ops;
  OpTable t{2, std::vector<std::size_t>(9)};
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q) t.values[perm[p] * 3 + perm[q]] = perm[a->apply("sigma", std::vector<std::size_t>{p, q})];
  DistMatrix m(3);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q) m(perm[p], perm[q]) = a->d(p, q);
  auto b = make_algebra(MetricAlgebra(a->signature(), fx::labels(3), m, {{"sigma", t}}));
  auto f = find_isomorphism(*a, *b);
  REQUIRE(f.has_value());
  CHECK(*f == perm);
  CHECK_FALSE(find_isomorphism(*a, *max_algebra()).has_value());
  CHECK_FALSE(find_isomorphism(*a, *fx::saturating_sum(1, 2)).has_value());
}
