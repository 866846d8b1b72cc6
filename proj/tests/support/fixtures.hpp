#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "metra/algebra.hpp"
#include "metra/ext_rational.hpp"
#include "metra/extmetric.hpp"

namespace fx {

using metra::AlgebraRef;
using metra::DistMatrix;
using metra::ExtRational;

inline ExtRational R(const std::string& s) { return ExtRational::parse(s); }

inline DistMatrix M(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<ExtRational>> r;
  for (const auto& row : rows) {
    r.emplace_back();
    for (const auto& c : row) r.back().push_back(R(c));
  }
  return DistMatrix::from_rows(r);
}

inline std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

/// |x - y| on {0, ..., n-1}, scaled by num/den.
inline DistMatrix line_metric(std::size_t n, std::int64_t num = 1, std::int64_t den = 1) {
  DistMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = ExtRational(static_cast<std::int64_t>(i > j ? i - j : j - i) * num, den);
  return m;
}

inline metra::OpTable binary_table(std::size_t n, auto fn) {
  metra::OpTable t{2, {}};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) t.values.push_back(fn(p, q));
  return t;
}

/// ({0,1,2}, |x-y|·num/den, sigma(p,q) = min(p+q, 2)).
inline AlgebraRef saturating_sum(std::int64_t num = 1, std::int64_t den = 1) {
  metra::Signature sig{{"sigma", 2}};
  return metra::make_algebra(metra::MetricAlgebra(
      sig, labels(3), line_metric(3, num, den),
      {{"sigma", binary_table(3, [](std::size_t p, std::size_t q) { return std::min<std::size_t>(p + q, 2); })}}));
}

/// Shortest-path closure of a symmetric matrix with zero diagonal.
inline DistMatrix path_close(DistMatrix m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = metra::min(m(i, j), m(i, k) + m(k, j));
  return m;
}

/// Random metric with entries drawn from {1..max} (and inf with probability
/// p_inf/100), made valid by shortest-path closure.
inline DistMatrix random_metric(std::size_t n, std::mt19937& rng, int max = 4, int p_inf = 0) {
  DistMatrix m(n);
  std::uniform_int_distribution<int> val(1, max), pct(0, 99);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      m.set_symmetric(i, j, pct(rng) < p_inf ? ExtRational::infinity() : ExtRational(val(rng)));
  return path_close(m);
}

/// Random pseudometric: random metric on random clusters, pulled back.
inline DistMatrix random_pseudometric(std::size_t n, std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> cluster(n);
  for (auto& c : cluster) c = pick(rng);
  DistMatrix base = random_metric(n, rng);
  DistMatrix p(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = cluster[i] == cluster[j] ? ExtRational() : base(cluster[i], cluster[j]);
  return p;
}

/// Random algebra with one binary operation `sigma`.
inline AlgebraRef random_binary_algebra(std::size_t n, std::mt19937& rng, int max = 3) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  metra::OpTable t{2, {}};
  for (std::size_t i = 0; i < n * n; ++i) t.values.push_back(pick(rng));
  metra::Signature sig{{"sigma", 2}};
  return metra::make_algebra(metra::MetricAlgebra(sig, labels(n), random_metric(n, rng, max), {{"sigma", t}}));
}

/// All nonempty subsets of {0..n-1}, as sorted id lists.
inline std::vector<std::vector<std::size_t>> nonempty_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    out.emplace_back();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) out.back().push_back(i);
  }
  return out;
}


/// {0,1/2,1}^2 with the supremum metric and empty signature. Element 3*i+j is
/// the point (i/2, j/2).
inline AlgebraRef grid() {
  std::vector<std::string> names;
  DistMatrix m(9);
  for (std::size_t p = 0; p < 9; ++p) {
    names.push_back("p" + std::to_string(p / 3) + std::to_string(p % 3));
    for (std::size_t q = 0; q < 9; ++q) {
      auto diff = [](std::size_t a, std::size_t b) { return static_cast<std::int64_t>(a > b ? a - b : b - a); };
      m(p, q) = ExtRational(std::max(diff(p / 3, q / 3), diff(p % 3, q % 3)), 2);
    }
  }
  return metra::make_algebra(metra::MetricAlgebra(metra::Signature{}, names, m, {}));
}

/// Coordinate pseudometric theta_k(p, q) = |p_k - q_k| on the grid.
inline DistMatrix grid_coordinate(std::size_t k) {
  DistMatrix m(9);
  for (std::size_t p = 0; p < 9; ++p)
    for (std::size_t q = 0; q < 9; ++q) {
      std::size_t a = k == 0 ? p / 3 : p % 3, b = k == 0 ? q / 3 : q % 3;
      m(p, q) = ExtRational(static_cast<std::int64_t>(a > b ? a - b : b - a), 2);
    }
  return m;
}

}  // namespace fx
