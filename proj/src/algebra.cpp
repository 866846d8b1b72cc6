#include "metra/algebra.hpp"

#include <algorithm>
#include <set>

#include "metra/congruence.hpp"
#include "metra/error.hpp"

namespace metra {

namespace {

std::string join_ids(std::span<const std::size_t> ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s;
}

// Calls fn(args) for every tuple over {0..n-1} of the given arity, in table order.
template <class Fn>
void for_each_tuple(std::size_t n, std::size_t arity, Fn&& fn) {
  std::vector<std::size_t> args(arity, 0);
  if (arity > 0 && n == 0) return;
  while (true) {
    if (!fn(std::span<const std::size_t>(args))) return;
    std::size_t k = arity;
    while (k > 0 && ++args[k - 1] == n) args[--k] = 0;
    if (k == 0) return;
  }
}

ExtRational max_arg_distance(const MetricAlgebra& a, std::span<const std::size_t> x, std::span<const std::size_t> y) {
  ExtRational m;
  for (std::size_t k = 0; k < x.size(); ++k) m = max(m, a.d(x[k], y[k]));
  return m;
}

}  // namespace

MetricAlgebra::MetricAlgebra(Signature sig, std::vector<std::string> carrier, DistMatrix metric,
                             std::map<std::string, OpTable> ops)
    : carrier_(std::move(carrier)), metric_(std::move(metric)) {
  if (carrier_.empty()) throw DomainError("empty carrier");
  if (metric_.size() != carrier_.size())
    throw ShapeError("metric is " + std::to_string(metric_.size()) + "x" + std::to_string(metric_.size()) +
                     " but the carrier has " + std::to_string(carrier_.size()) + " elements");
  structure_ = SigmaAlgebra(std::move(sig), carrier_.size(), std::move(ops));
}

std::optional<std::size_t> MetricAlgebra::find(const std::string& label) const {
  auto it = std::find(carrier_.begin(), carrier_.end(), label);
  if (it == carrier_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - carrier_.begin());
}

Verdict validate_algebra(const MetricAlgebra& a) {
  for (const auto& [name, table] : a.structure().ops()) {
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      if (table.values[i] >= a.size()) {
        auto args = a.structure().args_of(i, table.arity);
        return Verdict::fail("table", "'" + name + "(" + join_ids(args) + ")' is outside the carrier", args);
      }
    }
  }
  return check_metric(a.metric());
}

AlgebraRef make_algebra(MetricAlgebra a) {
  Verdict v = validate_algebra(a);
  if (!v) throw AxiomError("invalid algebra: " + v.code + ": " + v.message, v.witness);
  return std::make_shared<const MetricAlgebra>(std::move(a));
}

bool same_algebra(const AlgebraRef& a, const AlgebraRef& b) { return a == b || (a && b && *a == *b); }

Verdict is_homomorphism(std::span<const std::size_t> f, const MetricAlgebra& a, const MetricAlgebra& b) {
  if (a.signature() != b.signature()) throw SignatureError("homomorphism between algebras of different signatures");
  if (f.size() != a.size())
    throw DomainError("map has " + std::to_string(f.size()) + " entries, source has " + std::to_string(a.size()));
  for (std::size_t x = 0; x < f.size(); ++x)
    if (f[x] >= b.size()) throw DomainError("map sends " + std::to_string(x) + " outside the target", {x});

  for (const auto& [name, table] : a.structure().ops()) {
    std::optional<Verdict> bad;
    std::vector<std::size_t> image(table.arity);
    for_each_tuple(a.size(), table.arity, [&](std::span<const std::size_t> args) {
      for (std::size_t k = 0; k < args.size(); ++k) image[k] = f[args[k]];
      if (f[a.apply(name, args)] != b.apply(name, image)) {
        std::vector<std::size_t> w(args.begin(), args.end());
        bad = Verdict::fail("operation", "'" + name + "' is not preserved at (" + join_ids(w) + ")", w);
        return false;
      }
      return true;
    });
    if (bad) return *bad;
  }
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = x + 1; y < a.size(); ++y)
      if (b.d(f[x], f[y]) > a.d(x, y))
        return Verdict::fail("nonexpansive",
                             "d(f " + a.carrier()[x] + ", f " + a.carrier()[y] + ") = " + b.d(f[x], f[y]).str() +
                                 " exceeds " + a.d(x, y).str(),
                             {x, y});
  return Verdict::pass();
}

Verdict is_isomorphism(std::span<const std::size_t> f, const MetricAlgebra& a, const MetricAlgebra& b) {
  Verdict v = is_homomorphism(f, a, b);
  if (!v) return v;
  if (a.size() != b.size()) return Verdict::fail("bijective", "carriers differ in size");
  std::vector<bool> hit(b.size(), false);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (hit[f[x]]) return Verdict::fail("bijective", "map is not injective", {x});
    hit[f[x]] = true;
  }
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = x + 1; y < a.size(); ++y)
      if (b.d(f[x], f[y]) != a.d(x, y)) return Verdict::fail("isometry", "distance not preserved", {x, y});
  return Verdict::pass();
}

Homomorphism Homomorphism::make(AlgebraRef source, AlgebraRef target, std::vector<std::size_t> map) {
  Verdict v = is_homomorphism(map, *source, *target);
  if (!v) throw HomomorphismError("not a homomorphism: " + v.code + ": " + v.message, v.witness);
  return Homomorphism(std::move(source), std::move(target), std::move(map));
}

bool Homomorphism::is_surjective() const {
  std::vector<bool> hit(target_->size(), false);
  for (std::size_t y : map_) hit[y] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });
}

bool Homomorphism::is_injective() const {
  std::set<std::size_t> seen(map_.begin(), map_.end());
  return seen.size() == map_.size();
}

namespace {

Verdict lipschitz_check(const MetricAlgebra& a, const std::map<std::string, ExtRational>& constants,
                        const std::string& code) {
  for (const auto& [name, table] : a.structure().ops()) {
    if (table.arity == 0) continue;
    auto it = constants.find(name);
    const ExtRational k = it == constants.end() ? ExtRational(1) : it->second;
    const std::size_t count = a.structure().tuple_count(table.arity);
    for (std::size_t i = 0; i < count; ++i) {
      auto x = a.structure().args_of(i, table.arity);
      for (std::size_t j = 0; j < count; ++j) {
        auto y = a.structure().args_of(j, table.arity);
        ExtRational bound = k * max_arg_distance(a, x, y);
        if (a.d(table.values[i], table.values[j]) > bound) {
          std::vector<std::size_t> w = x;
          w.insert(w.end(), y.begin(), y.end());
          return Verdict::fail(code,
                               "d(" + name + "(" + join_ids(x) + "), " + name + "(" + join_ids(y) + ")) = " +
                                   a.d(table.values[i], table.values[j]).str() + " exceeds " + bound.str(),
                               std::move(w));
        }
      }
    }
  }
  return Verdict::pass();
}

}  // namespace

Verdict is_quantitative(const MetricAlgebra& a) { return lipschitz_check(a, {}, "quantitative"); }

Verdict is_lipschitz(const MetricAlgebra& a, const std::map<std::string, ExtRational>& constants) {
  return lipschitz_check(a, constants, "lipschitz");
}

namespace {

// Restriction of `a` to the sorted subset `elems`, which must be closed.
MetricAlgebra restrict_algebra(const MetricAlgebra& a, const std::vector<std::size_t>& elems) {
  std::vector<std::size_t> local(a.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < elems.size(); ++i) local[elems[i]] = i;
  std::vector<std::string> labels;
  for (std::size_t e : elems) labels.push_back(a.carrier()[e]);
  DistMatrix m(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) m(i, j) = a.d(elems[i], elems[j]);
  std::map<std::string, OpTable> ops;
  std::vector<std::size_t> parent_args;
  for (const auto& [name, table] : a.structure().ops()) {
    OpTable t{table.arity, {}};
    for_each_tuple(elems.size(), table.arity, [&](std::span<const std::size_t> args) {
      parent_args.assign(args.size(), 0);
      for (std::size_t k = 0; k < args.size(); ++k) parent_args[k] = elems[args[k]];
      t.values.push_back(local[a.apply(name, parent_args)]);
      return true;
    });
    ops.emplace(name, std::move(t));
  }
  return MetricAlgebra(a.signature(), std::move(labels), std::move(m), std::move(ops));
}

}  // namespace

Subalgebra generate_subalgebra(const AlgebraRef& a, std::span<const std::size_t> seed) {
  std::vector<bool> in(a->size(), false);
  for (std::size_t s : seed) {
    if (s >= a->size()) throw DomainError("seed element " + std::to_string(s) + " outside the carrier", {s});
    in[s] = true;
  }
  bool changed = true;
  std::vector<std::size_t> members, args;
  while (changed) {
    changed = false;
    members.clear();
    for (std::size_t x = 0; x < a->size(); ++x)
      if (in[x]) members.push_back(x);
    for (const auto& [name, table] : a->structure().ops()) {
      for_each_tuple(members.size(), table.arity, [&](std::span<const std::size_t> idx) {
        args.assign(idx.size(), 0);
        for (std::size_t k = 0; k < idx.size(); ++k) args[k] = members[idx[k]];
        std::size_t r = a->apply(name, args);
        if (!in[r]) in[r] = changed = true;
        return true;
      });
    }
  }
  std::vector<std::size_t> elems;
  for (std::size_t x = 0; x < a->size(); ++x)
    if (in[x]) elems.push_back(x);
  if (elems.empty()) throw DomainError("generated subalgebra is empty (no seed and no constants)");
  auto sub = std::make_shared<const MetricAlgebra>(restrict_algebra(*a, elems));
  auto inclusion = Homomorphism::make(sub, a, elems);
  return Subalgebra{std::move(sub), std::move(elems), std::move(inclusion)};
}

Product product(const std::vector<AlgebraRef>& factors) {
  if (factors.empty()) throw ArityError("product of an empty list of algebras");
  for (const auto& f : factors)
    if (f->signature() != factors.front()->signature())
      throw SignatureError("product factors have different signatures");
  std::vector<std::size_t> radices;
  std::vector<FiniteMetricSpace> spaces;
  for (const auto& f : factors) {
    radices.push_back(f->size());
    spaces.push_back(f->space());
  }
  TupleCodec codec(radices);
  FiniteMetricSpace space = sup_product(spaces);
  const std::size_t n = codec.count();

  std::vector<std::vector<std::size_t>> coords(n);
  for (std::size_t p = 0; p < n; ++p) coords[p] = codec.decode(p);

  std::map<std::string, OpTable> ops;
  std::vector<std::size_t> component_args, result(factors.size());
  for (const auto& [name, arity] : factors.front()->signature().symbols()) {
    OpTable t{arity, {}};
    for_each_tuple(n, arity, [&](std::span<const std::size_t> args) {
      for (std::size_t i = 0; i < factors.size(); ++i) {
        component_args.assign(arity, 0);
        for (std::size_t k = 0; k < arity; ++k) component_args[k] = coords[args[k]][i];
        result[i] = factors[i]->apply(name, component_args);
      }
      t.values.push_back(codec.encode(result));
      return true;
    });
    ops.emplace(name, std::move(t));
  }
  auto alg = make_algebra(MetricAlgebra(factors.front()->signature(), space.labels(), space.dist(), std::move(ops)));
  std::vector<Homomorphism> projections;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    std::vector<std::size_t> map(n);
    for (std::size_t p = 0; p < n; ++p) map[p] = coords[p][i];
    projections.push_back(Homomorphism::make(alg, factors[i], std::move(map)));
  }
  return Product{std::move(alg), std::move(projections), std::move(codec)};
}

Congruence kernel(const Homomorphism& f) {
  const MetricAlgebra& b = *f.target();
  const std::size_t n = f.source()->size();
  DistMatrix m(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) m(x, y) = b.d(f(x), f(y));
  return Congruence::make(f.source(), std::move(m));
}

Subalgebra image(const Homomorphism& f) {
  std::set<std::size_t> img(f.map().begin(), f.map().end());
  std::vector<std::size_t> seed(img.begin(), img.end());
  return generate_subalgebra(f.target(), seed);
}

Quotient quotient(const Congruence& theta) {
  const MetricAlgebra& a = *theta.base();
  Identification id = metric_identification(theta.matrix(), a.carrier());
  const QuotientMap& q = id.map;
  std::map<std::string, OpTable> ops;
  std::vector<std::size_t> reps;
  for (const auto& [name, table] : a.structure().ops()) {
    OpTable t{table.arity, {}};
    for_each_tuple(q.num_classes(), table.arity, [&](std::span<const std::size_t> classes) {
      reps.assign(classes.size(), 0);
      for (std::size_t k = 0; k < classes.size(); ++k) reps[k] = q.representative[classes[k]];
      t.values.push_back(q.class_of[a.apply(name, reps)]);
      return true;
    });
    ops.emplace(name, std::move(t));
  }
  auto alg = make_algebra(MetricAlgebra(a.signature(), id.space.labels(), id.space.dist(), std::move(ops)));
  auto projection = Homomorphism::make(theta.base(), alg, q.class_of);
  return Quotient{std::move(alg), q, std::move(projection)};
}

std::vector<std::size_t> saturate(std::span<const std::size_t> subset, const Congruence& theta) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < theta.size(); ++a)
    if (std::any_of(subset.begin(), subset.end(), [&](std::size_t s) { return theta(s, a).is_zero(); }))
      out.push_back(a);
  return out;
}

ReflexivityResult is_reflexive_quotient(const Homomorphism& p, const Limits& limits) {
  if (!p.is_surjective()) throw DomainError("reflexivity check needs a surjective homomorphism");
  const MetricAlgebra& a = *p.source();
  const MetricAlgebra& b = *p.target();
  std::vector<std::vector<std::size_t>> fibre(b.size());
  for (std::size_t x = 0; x < a.size(); ++x) fibre[p(x)].push_back(x);

  std::vector<std::size_t> section(b.size());
  std::uint64_t nodes = 0;
  auto search = [&](auto&& self, std::size_t y) -> bool {
    if (y == b.size()) return true;
    for (std::size_t x : fibre[y]) {
      if (++nodes > limits.sections)
        throw ResourceError("reflexive-section search exceeded " + std::to_string(limits.sections) + " nodes",
                            "sections");
      bool fits = true;
      for (std::size_t z = 0; z < y && fits; ++z) fits = a.d(section[z], x) == b.d(z, y);
      if (!fits) continue;
      section[y] = x;
      if (self(self, y + 1)) return true;
    }
    return false;
  };
  if (search(search, 0)) return {Verdict::pass(), section};
  return {Verdict::fail("section", "no section of the quotient map is an isometric embedding"), {}};
}

std::optional<std::vector<std::size_t>> find_isomorphism(const MetricAlgebra& a, const MetricAlgebra& b,
                                                         const Limits& limits) {
  if (a.size() != b.size() || a.signature() != b.signature()) return std::nullopt;
  const std::size_t n = a.size();
  auto profile = [](const MetricAlgebra& m, std::size_t x) {
    std::vector<ExtRational> row;
    for (std::size_t y = 0; y < m.size(); ++y) row.push_back(m.d(x, y));
    std::sort(row.begin(), row.end());
    return row;
  };
  std::vector<std::vector<ExtRational>> pa(n), pb(n);
  for (std::size_t x = 0; x < n; ++x) {
    pa[x] = profile(a, x);
    pb[x] = profile(b, x);
  }

  std::vector<std::size_t> f(n, 0);
  std::vector<bool> used(n, false);
  std::uint64_t nodes = 0;
  std::vector<std::size_t> image;

  // Operation entries whose arguments and result are all assigned (ids <= x)
  // and that involve x.
  auto consistent = [&](std::size_t x) {
    for (const auto& [name, table] : a.structure().ops()) {
      bool ok = true;
      for_each_tuple(x + 1, table.arity, [&](std::span<const std::size_t> args) {
        std::size_t r = a.apply(name, args);
        bool involves = r == x || std::find(args.begin(), args.end(), x) != args.end();
        if (r > x || !involves) return true;
        image.assign(args.size(), 0);
        for (std::size_t k = 0; k < args.size(); ++k) image[k] = f[args[k]];
        ok = b.apply(name, image) == f[r];
        return ok;
      });
      if (!ok) return false;
    }
    return true;
  };

  auto search = [&](auto&& self, std::size_t x) -> bool {
    if (x == n) return true;
    for (std::size_t y = 0; y < n; ++y) {
      if (used[y] || pa[x] != pb[y]) continue;
      if (++nodes > limits.isomorphism_nodes)
        throw ResourceError("isomorphism search exceeded " + std::to_string(limits.isomorphism_nodes) + " nodes",
                            "isomorphism_nodes");
      bool fits = true;
      for (std::size_t z = 0; z < x && fits; ++z) fits = a.d(z, x) == b.d(f[z], y);
      if (!fits) continue;
      f[x] = y;
      used[y] = true;
      if (consistent(x) && self(self, x + 1)) return true;
      used[y] = false;
    }
    return false;
  };
  if (!search(search, 0)) return std::nullopt;
  if (!is_isomorphism(f, a, b)) return std::nullopt;
  return f;
}

}  // namespace metra
