#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "metra/error.hpp"
#include "metra/extmetric.hpp"

using namespace metra;
using fx::M;
using fx::R;

namespace {

FiniteMetricSpace points(const std::vector<std::int64_t>& xs) {
  DistMatrix m(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) m(i, j) = ExtRational(xs[i] > xs[j] ? xs[i] - xs[j] : xs[j] - xs[i]);
  return FiniteMetricSpace(fx::labels(xs.size()), m);
}

FiniteMetricSpace space_of(const DistMatrix& m) { return FiniteMetricSpace(fx::labels(m.size()), m); }

// Half the least distortion over every relation that is total on both sides.
ExtRational gh_oracle(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  const std::size_t nx = x.size(), ny = y.size(), cells = nx * ny;
  ExtRational best = ExtRational::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << cells); ++mask) {
    std::vector<bool> lx(nx), ly(ny);
    for (std::size_t c = 0; c < cells; ++c)
      if (mask >> c & 1) lx[c / ny] = ly[c % ny] = true;
    if (std::find(lx.begin(), lx.end(), false) != lx.end() || std::find(ly.begin(), ly.end(), false) != ly.end())
      continue;
    ExtRational dis;
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t e = 0; e < cells; ++e)
        if ((mask >> c & 1) && (mask >> e & 1))
          dis = max(dis, ExtRational::abs_diff(x(c / ny, e / ny), y(c % ny, e % ny)));
    best = min(best, dis);
  }
  return best.divided_by(2);
}

}  // namespace

TEST_CASE("check_pseudometric examples") {
  CHECK(check_pseudometric(M({{"0"}})).ok);
  Verdict tri = check_pseudometric(M({{"0", "1", "5"}, {"1", "0", "1"}, {"5", "1", "0"}}));
  CHECK_FALSE(tri.ok);
  CHECK(tri.code == "triangle");
  CHECK(tri.witness == std::vector<std::size_t>{0, 1, 2});
  Verdict refl = check_pseudometric(M({{"1", "0"}, {"0", "0"}}));
  CHECK(refl.code == "reflexivity");
  CHECK(refl.witness == std::vector<std::size_t>{0});
  CHECK(check_pseudometric(M({{"0", "1"}, {"2", "0"}})).code == "symmetry");
  CHECK_THROWS_AS(check_pseudometric(std::vector<std::vector<ExtRational>>{{0, 1}, {1}}), ShapeError);
  CHECK(check_metric(M({{"0", "0"}, {"0", "0"}})).code == "separation");
  CHECK(check_pseudometric(M({{"0", "inf"}, {"inf", "0"}})).ok);
}

TEST_CASE("metric identification") {
  auto id = metric_identification(M({{"0", "0", "1"}, {"0", "0", "1"}, {"1", "1", "0"}}), {"a", "b", "c"});
  CHECK(id.space.size() == 2);
  CHECK(id.space(0, 1) == 1);
  CHECK(id.space.labels() == std::vector<std::string>{"a", "c"});
  CHECK(id.map.class_of == std::vector<std::size_t>{0, 0, 1});
  CHECK(id.map.classes() == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});

  auto same = metric_identification(fx::line_metric(3));
  CHECK(same.space.dist() == fx::line_metric(3));
  CHECK(metric_identification(DistMatrix(4)).space.size() == 1);
  CHECK_THROWS_AS(metric_identification(M({{"0", "1", "5"}, {"1", "0", "1"}, {"5", "1", "0"}})), AxiomError);
}

TEST_CASE("metric identification yields metrics on random pseudometrics") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    DistMatrix p = fx::random_pseudometric(n, rng);
    REQUIRE(check_pseudometric(p).ok);
    auto id = metric_identification(p);
    CHECK(check_metric(id.space.dist()).ok);
    for (std::size_t a = 0; a < n; ++a) {
      CHECK(id.map.representative[id.map.class_of[a]] <= a);
      CHECK(id.map.class_of[id.map.representative[id.map.class_of[a]]] == id.map.class_of[a]);
      for (std::size_t b = 0; b < n; ++b) CHECK(id.space(id.map.class_of[a], id.map.class_of[b]) == p(a, b));
    }
  }
}

TEST_CASE("supremum product") {
  FiniteMetricSpace two = points({0, 1});
  FiniteMetricSpace sq = sup_product({two, two});
  CHECK(sq.size() == 4);
  CHECK(sq(0, 3) == 1);
  CHECK(sq.labels()[3] == "(1,1)");
  CHECK(sup_product({two}).dist() == two.dist());
  FiniteMetricSpace far = space_of(M({{"0", "inf"}, {"inf", "0"}}));
  CHECK(sup_product({two, far})(0, 1).is_infinite());
  CHECK_THROWS_AS(sup_product({}), ArityError);
}

TEST_CASE("supremum product relational characterization") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto x = space_of(fx::random_metric(2 + trial % 2, rng));
    auto y = space_of(fx::random_metric(2 + trial % 3, rng));
    auto p = sup_product({x, y});
    TupleCodec codec({x.size(), y.size()});
    std::vector<ExtRational> eps(x.dist().cells().begin(), x.dist().cells().end());
    eps.insert(eps.end(), y.dist().cells().begin(), y.dist().cells().end());
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b)
        for (const auto& e : eps) {
          auto da = codec.decode(a), db = codec.decode(b);
          CHECK((p(a, b) <= e) == (x(da[0], db[0]) <= e && y(da[1], db[1]) <= e));
        }
  }
}

TEST_CASE("point-set and Hausdorff distance examples") {
  FiniteMetricSpace x = points({0, 1, 3});
  std::vector<std::size_t> a{0, 1}, b{2}, all{0, 1, 2};
  CHECK(point_set_distance(2, a, x) == 2);
  CHECK(point_set_distance(0, a, x).is_zero());
  CHECK(point_set_distance(1, all, x).is_zero());
  CHECK(hausdorff_distance(a, b, x) == 3);
  CHECK(hausdorff_distance(a, a, x).is_zero());
  std::vector<std::size_t> s0{0}, s2{2};
  CHECK(hausdorff_distance(s0, s2, x) == 3);
  std::vector<std::size_t> empty;
  CHECK_THROWS_AS(point_set_distance(0, empty, x), DomainError);
  CHECK_THROWS_AS(hausdorff_distance(empty, a, x), DomainError);
}

TEST_CASE("Hausdorff distance is a metric on nonempty subsets") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    auto x = space_of(fx::random_metric(1 + trial % 4, rng));
    auto subs = fx::nonempty_subsets(x.size());
    for (const auto& s : subs)
      for (const auto& t : subs) {
        ExtRational st = hausdorff_distance(s, t, x);
        CHECK(st == hausdorff_distance(t, s, x));
        CHECK(st.is_zero() == (s == t));
        for (const auto& u : subs) CHECK(hausdorff_distance(s, u, x) <= st + hausdorff_distance(t, u, x));
      }
  }
}

TEST_CASE("Gromov-Hausdorff examples") {
  FiniteMetricSpace one = points({0}), pair = points({0, 2});
  CHECK(gromov_hausdorff(one, pair) == 1);
  CHECK(gromov_hausdorff(pair, pair).is_zero());
  CHECK(gromov_hausdorff(points({0, 1}), points({5, 6})).is_zero());
  CHECK(gromov_hausdorff(points({0, 1, 3}), points({0, 2, 3})).is_zero());
  CHECK_THROWS_AS(gromov_hausdorff(space_of(M({{"0", "inf"}, {"inf", "0"}})), one), UnsupportedInput);
  CHECK_THROWS_AS(gromov_hausdorff(points({0, 1, 2, 3, 4}), points({0, 1, 2, 3, 4})), ResourceError);
}

TEST_CASE("Gromov-Hausdorff against exhaustive correspondences") {
  std::mt19937 rng(17);
  std::vector<FiniteMetricSpace> spaces;
  for (int i = 0; i < 9; ++i) spaces.push_back(space_of(fx::random_metric(1 + i % 3, rng, 5)));
  for (const auto& x : spaces)
    for (const auto& y : spaces) {
      ExtRational g = gromov_hausdorff(x, y);
      CHECK(g == gh_oracle(x, y));
      CHECK(g == gromov_hausdorff(y, x));
      for (const auto& z : spaces) CHECK(gromov_hausdorff(x, z) <= g + gromov_hausdorff(y, z));
    }
}

TEST_CASE("non-expansive maps and isometric embeddings") {
  FiniteMetricSpace x = points({0, 1}), y = points({0, 2});
  std::vector<std::size_t> id{0, 1}, constant{0, 0};
  CHECK(is_nonexpansive_map(id, x, x));
  CHECK(is_isometric_embedding(id, x, x));
  CHECK(is_nonexpansive_map(constant, x, x));
  CHECK_FALSE(is_isometric_embedding(constant, x, x));
  CHECK_FALSE(is_nonexpansive_map(id, x, y));
  std::vector<std::size_t> partial{0};
  CHECK_THROWS_AS(is_nonexpansive_map(partial, x, y), DomainError);
}
