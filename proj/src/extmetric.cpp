#include "metra/extmetric.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "metra/error.hpp"

namespace metra {

DistMatrix::DistMatrix(std::size_t n, const ExtRational& fill) : n_(n), cells_(n * n, fill) {
  for (std::size_t i = 0; i < n; ++i) cells_[i * n + i] = ExtRational();
}

DistMatrix DistMatrix::discrete(std::size_t n) { return DistMatrix(n, ExtRational::infinity()); }

DistMatrix DistMatrix::from_rows(const std::vector<std::vector<ExtRational>>& rows) {
  DistMatrix m;
  m.n_ = rows.size();
  m.cells_.reserve(m.n_ * m.n_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw ShapeError("matrix row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(rows.size()));
    m.cells_.insert(m.cells_.end(), rows[i].begin(), rows[i].end());
  }
  return m;
}

bool DistMatrix::pointwise_le(const DistMatrix& other) const {
  if (other.n_ != n_) throw ShapeError("matrix size mismatch");
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (other.cells_[k] < cells_[k]) return false;
  return true;
}

Verdict check_pseudometric(const DistMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t x = 0; x < n; ++x)
    if (!m(x, x).is_zero()) return Verdict::fail("reflexivity", "d(x,x) = " + m(x, x).str() + " != 0", {x});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      if (m(x, y) != m(y, x))
        return Verdict::fail("symmetry", "d(x,y) = " + m(x, y).str() + " but d(y,x) = " + m(y, x).str(), {x, y});

  // Only finite legs can witness a triangle violation, so iterate over the
  // finite neighbours of each point.
  std::vector<std::vector<std::size_t>> finite(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (m(x, y).is_finite()) finite[x].push_back(y);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y : finite[x]) {
      for (std::size_t z : finite[y]) {
        if (m(x, z) > m(x, y) + m(y, z))
          return Verdict::fail("triangle",
                               "d(x,z) = " + m(x, z).str() + " > d(x,y) + d(y,z) = " + (m(x, y) + m(y, z)).str(),
                               {x, y, z});
      }
    }
  }
  return Verdict::pass();
}

Verdict check_pseudometric(const std::vector<std::vector<ExtRational>>& rows) {
  return check_pseudometric(DistMatrix::from_rows(rows));
}

Verdict check_metric(const DistMatrix& m) {
  Verdict v = check_pseudometric(m);
  if (!v) return v;
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t y = x + 1; y < m.size(); ++y)
      if (m(x, y).is_zero()) return Verdict::fail("separation", "distinct points at distance 0", {x, y});
  return Verdict::pass();
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, DistMatrix dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  if (labels_.size() != dist_.size())
    throw ShapeError(std::to_string(labels_.size()) + " labels for a " + std::to_string(dist_.size()) + "-point matrix");
  if (Verdict v = check_metric(dist_); !v) throw AxiomError("not a metric: " + v.code + ": " + v.message, v.witness);
}

std::vector<std::vector<std::size_t>> QuotientMap::classes() const {
  std::vector<std::vector<std::size_t>> out(num_classes());
  for (std::size_t x = 0; x < class_of.size(); ++x) out[class_of[x]].push_back(x);
  return out;
}

Identification metric_identification(const DistMatrix& p, const std::vector<std::string>& labels) {
  if (labels.size() != p.size()) throw ShapeError("label count does not match matrix size");
  if (Verdict v = check_pseudometric(p); !v) throw AxiomError("not a pseudometric: " + v.code + ": " + v.message, v.witness);

  const std::size_t n = p.size();
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  QuotientMap q;
  q.class_of.assign(n, kUnassigned);
  for (std::size_t x = 0; x < n; ++x) {
    if (q.class_of[x] != kUnassigned) continue;
    const std::size_t c = q.representative.size();
    q.representative.push_back(x);
    for (std::size_t y = x; y < n; ++y)
      if (p(x, y).is_zero()) q.class_of[y] = c;
  }

  const std::size_t k = q.num_classes();
  DistMatrix d(k);
  std::vector<std::string> class_labels(k);
  for (std::size_t a = 0; a < k; ++a) {
    class_labels[a] = labels[q.representative[a]];
    for (std::size_t b = 0; b < k; ++b) d(a, b) = p(q.representative[a], q.representative[b]);
  }
  return {FiniteMetricSpace(std::move(class_labels), std::move(d)), std::move(q)};
}

Identification metric_identification(const DistMatrix& p) {
  std::vector<std::string> labels(p.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  return metric_identification(p, labels);
}

TupleCodec::TupleCodec(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
  strides_.assign(radices_.size(), 1);
  for (std::size_t i = radices_.size(); i-- > 0;) {
    strides_[i] = count_;
    count_ *= radices_[i];
  }
}

std::size_t TupleCodec::encode(std::span<const std::size_t> digits) const {
  std::size_t code = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) code += digits[i] * strides_[i];
  return code;
}

std::vector<std::size_t> TupleCodec::decode(std::size_t code) const {
  std::vector<std::size_t> out(radices_.size());
  for (std::size_t i = 0; i < radices_.size(); ++i) out[i] = (code / strides_[i]) % radices_[i];
  return out;
}

std::size_t TupleCodec::digit(std::size_t code, std::size_t position) const {
  return (code / strides_[position]) % radices_[position];
}

FiniteMetricSpace sup_product(const std::vector<FiniteMetricSpace>& spaces) {
  if (spaces.empty()) throw ArityError("the empty product of metric spaces is not supported");
  std::vector<std::size_t> radices;
  for (const auto& s : spaces) radices.push_back(s.size());
  TupleCodec codec(radices);
  const std::size_t n = codec.count();

  std::vector<std::string> labels(n);
  DistMatrix d(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto xs = codec.decode(a);
    std::string label = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) label += (i ? "," : "") + spaces[i].labels()[xs[i]];
    labels[a] = label + ")";
    for (std::size_t b = 0; b < n; ++b) {
      ExtRational m;
      for (std::size_t i = 0; i < spaces.size(); ++i) m = max(m, spaces[i](xs[i], codec.digit(b, i)));
      d(a, b) = m;
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

namespace {

void require_subset(std::span<const std::size_t> s, const FiniteMetricSpace& space, const char* what) {
  if (s.empty()) throw DomainError(std::string(what) + " must be nonempty");
  for (std::size_t a : s)
    if (a >= space.size()) throw DomainError(std::string(what) + " contains an element outside the carrier", {a});
}

}  // namespace

ExtRational point_set_distance(std::size_t x, std::span<const std::size_t> subset, const FiniteMetricSpace& space) {
  if (x >= space.size()) throw DomainError("point outside the carrier", {x});
  require_subset(subset, space, "subset");
  ExtRational best = ExtRational::infinity();
  for (std::size_t a : subset) best = min(best, space(x, a));
  return best;
}

ExtRational hausdorff_distance(std::span<const std::size_t> a, std::span<const std::size_t> b,
                               const FiniteMetricSpace& space) {
  require_subset(a, space, "first subset");
  require_subset(b, space, "second subset");
  ExtRational h;
  for (std::size_t x : a) h = max(h, point_set_distance(x, b, space));
  for (std::size_t y : b) h = max(h, point_set_distance(y, a, space));
  return h;
}

ExtRational diameter(const FiniteMetricSpace& space) {
  ExtRational d;
  for (ExtRational v : space.dist().cells()) d = max(d, v);
  return d;
}

ExtRational distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                       std::span<const std::pair<std::size_t, std::size_t>> relation) {
  ExtRational dis;
  for (auto [a, b] : relation)
    for (auto [c, e] : relation) dis = max(dis, ExtRational::abs_diff(x(a, c), y(b, e)));
  return dis;
}

namespace {

// Decides whether some correspondence has all pairwise distortions inside
// `compat`. Pairs are numbered p = x * ny + y.
class CorrespondenceSearch {
 public:
  CorrespondenceSearch(std::size_t nx, std::size_t ny, std::vector<std::uint32_t> compat)
      : nx_(nx), ny_(ny), compat_(std::move(compat)) {}

  bool feasible() { return extend(0, ~std::uint32_t{0}, 0); }

 private:
  std::uint32_t row_mask(std::size_t x) const {
    return ((std::uint32_t{1} << ny_) - 1) << (x * ny_);
  }

  bool extend(std::size_t x, std::uint32_t allowed, std::uint32_t covered) {
    if (x == nx_) return covered == (std::uint32_t{1} << ny_) - 1;

    // Every still-uncovered y needs an allowed pair in the remaining rows.
    std::uint32_t reachable = covered;
    for (std::size_t r = x; r < nx_; ++r) reachable |= (allowed & row_mask(r)) >> (r * ny_);
    if (reachable != (std::uint32_t{1} << ny_) - 1) return false;

    const std::uint32_t options = allowed & row_mask(x);
    // Enumerate nonempty subsets of `options`.
    for (std::uint32_t t = options; t != 0; t = (t - 1) & options) {
      std::uint32_t next = allowed;
      bool clique = true;
      for (std::uint32_t rest = t; rest != 0; rest &= rest - 1) {
        const std::uint32_t p = static_cast<std::uint32_t>(std::countr_zero(rest));
        if ((compat_[p] & t) != t) {
          clique = false;
          break;
        }
        next &= compat_[p];
      }
      if (!clique) continue;
      if (extend(x + 1, next, covered | (t >> (x * ny_)))) return true;
    }
    return false;
  }

  std::size_t nx_;
  std::size_t ny_;
  std::vector<std::uint32_t> compat_;
};

}  // namespace

ExtRational gromov_hausdorff(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const Limits& limits) {
  for (const auto* s : {&x, &y})
    for (const ExtRational& v : s->dist().cells())
      if (v.is_infinite()) throw UnsupportedInput("Gromov-Hausdorff distance requires finite distances");
  const std::size_t nx = x.size(), ny = y.size();
  if (nx == 0 || ny == 0) throw DomainError("Gromov-Hausdorff distance of an empty space");
  const std::size_t pairs = nx * ny;
  if (pairs > limits.correspondences || pairs > 32)
    throw ResourceError("correspondence search over " + std::to_string(pairs) + " pairs exceeds the cap of " +
                            std::to_string(std::min<std::uint64_t>(limits.correspondences, 32)),
                        "|X|*|Y| = " + std::to_string(pairs));

  std::vector<ExtRational> dis(pairs * pairs);
  std::vector<ExtRational> candidates;
  for (std::size_t p = 0; p < pairs; ++p)
    for (std::size_t q = 0; q < pairs; ++q) {
      dis[p * pairs + q] = ExtRational::abs_diff(x(p / ny, q / ny), y(p % ny, q % ny));
      candidates.push_back(dis[p * pairs + q]);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto feasible = [&](const ExtRational& tau) {
    std::vector<std::uint32_t> compat(pairs, 0);
    for (std::size_t p = 0; p < pairs; ++p)
      for (std::size_t q = 0; q < pairs; ++q)
        if (dis[p * pairs + q] <= tau) compat[p] |= std::uint32_t{1} << q;
    return CorrespondenceSearch(nx, ny, std::move(compat)).feasible();
  };

  // The full relation is always a correspondence, so the largest candidate is feasible.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo].divided_by(2);
}

namespace {

void require_total(std::span<const std::size_t> f, const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  if (f.size() != x.size()) throw DomainError("map is not total on the source carrier");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] >= y.size()) throw DomainError("map sends a point outside the target carrier", {i});
}

}  // namespace

bool is_nonexpansive_map(std::span<const std::size_t> f, const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  require_total(f, x, y);
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < x.size(); ++b)
      if (y(f[a], f[b]) > x(a, b)) return false;
  return true;
}

bool is_isometric_embedding(std::span<const std::size_t> f, const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  require_total(f, x, y);
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < x.size(); ++b)
      if (y(f[a], f[b]) != x(a, b)) return false;
  std::vector<std::size_t> sorted(f.begin(), f.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

}  // namespace metra
