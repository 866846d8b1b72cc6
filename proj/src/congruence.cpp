#include "metra/congruence.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace metra {

namespace {

void require_size(const MetricAlgebra& a, const DistMatrix& m) {
  if (m.size() != a.size())
    throw ShapeError("matrix is " + std::to_string(m.size()) + "x" + std::to_string(m.size()) +
                     " but the carrier has " + std::to_string(a.size()) + " elements");
}

void require_same_base(const Congruence& a, const Congruence& b) {
  if (!same_algebra(a.base(), b.base())) throw ShapeError("congruences live on different algebras");
}

std::optional<std::pair<std::size_t, std::size_t>> first_difference(const DistMatrix& a, const DistMatrix& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a(i, j) != b(i, j)) return std::make_pair(i, j);
  return std::nullopt;
}

}  // namespace

Verdict is_congruential(const MetricAlgebra& a, const DistMatrix& m) {
  require_size(a, m);
  if (Verdict v = check_pseudometric(m); !v) return v;
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (m(x, y) > a.d(x, y))
        return Verdict::fail("containment",
                             "theta(" + a.carrier()[x] + "," + a.carrier()[y] + ") = " + m(x, y).str() +
                                 " exceeds d = " + a.d(x, y).str(),
                             {x, y});

  const SigmaAlgebra& s = a.structure();
  for (const auto& [name, table] : s.ops()) {
    const std::size_t count = s.tuple_count(table.arity);
    for (std::size_t idx = 0; idx < count; ++idx) {
      auto args = s.args_of(idx, table.arity);
      const std::size_t r = table.values[idx];
      for (std::size_t k = 0; k < args.size(); ++k) {
        const std::size_t orig = args[k];
        for (std::size_t b = 0; b < n; ++b) {
          if (b == orig || !m(orig, b).is_zero()) continue;
          args[k] = b;
          const std::size_t r2 = table.values[s.index(args)];
          args[k] = orig;
          if (!m(r, r2).is_zero())
            return Verdict::fail("compatibility",
                                 "theta(" + a.carrier()[orig] + "," + a.carrier()[b] + ") = 0 but '" + name +
                                     "' separates them at argument " + std::to_string(k + 1),
                                 {orig, b});
        }
      }
    }
  }
  return Verdict::pass();
}

Congruence Congruence::make(AlgebraRef base, DistMatrix m) {
  Verdict v = is_congruential(*base, m);
  if (!v) throw CongruenceError("not congruential: " + v.code + ": " + v.message, v.witness);
  return Congruence(std::move(base), std::move(m));
}

Congruence Congruence::metric_of(const AlgebraRef& base) { return Congruence(base, base->metric()); }

Congruence Congruence::zero(const AlgebraRef& base) { return Congruence(base, DistMatrix(base->size())); }

bool operator==(const Congruence& a, const Congruence& b) {
  return a.matrix_ == b.matrix_ && same_algebra(a.base_, b.base_);
}

Mode Mode::lipschitz(std::map<std::string, ExtRational> constants) {
  for (const auto& [name, k] : constants)
    if (k.is_infinite() || k.is_zero())
      throw DomainError("Lipschitz constant for '" + name + "' must be finite and positive");
  return {Kind::Lipschitz, std::move(constants)};
}

ExtRational Mode::constant(const std::string& symbol) const {
  if (kind != Kind::Lipschitz) return 1;
  auto it = constants.find(symbol);
  if (it == constants.end()) throw DomainError("no Lipschitz constant for '" + symbol + "'");
  return it->second;
}

std::string Mode::str() const {
  switch (kind) {
    case Kind::Metric: return "M";
    case Kind::Quantitative: return "Q";
    case Kind::Lipschitz: break;
  }
  std::string s = "LIP(";
  bool first = true;
  for (const auto& [name, k] : constants) {
    s += (first ? "" : ",") + name + "=" + k.str();
    first = false;
  }
  return s + ")";
}

Congruence meet(std::span<const Congruence> thetas) {
  if (thetas.empty()) throw ArityError("meet of an empty list");
  DistMatrix m = thetas.front().matrix();
  for (const Congruence& t : thetas.subspan(1)) {
    require_same_base(thetas.front(), t);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) m(i, j) = max(m(i, j), t(i, j));
  }
  return Congruence::make(thetas.front().base(), std::move(m));
}

DistMatrix compose(const Congruence& t1, const Congruence& t2) {
  require_same_base(t1, t2);
  const std::size_t n = t1.size();
  DistMatrix out(n, ExtRational::infinity());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c) {
      if (t1(a, c).is_infinite()) continue;
      for (std::size_t b = 0; b < n; ++b) out(a, b) = min(out(a, b), t1(a, c) + t2(c, b));
    }
  return out;
}

bool are_permutable(const Congruence& t1, const Congruence& t2) { return compose(t1, t2) == compose(t2, t1); }

namespace {

ClosureProblem problem_for(const MetricAlgebra& a, DistMatrix ceiling) {
  ClosureProblem p{std::move(ceiling), {}};
  std::vector<std::size_t> all(a.size());
  std::iota(all.begin(), all.end(), 0);
  for (const auto& [name, table] : a.structure().ops()) p.ops.push_back({name, table.arity, table.values, all});
  return p;
}

// First tuple pair breaking θ(σa, σb) <= K·max θ(a_k, b_k), if any.
std::optional<std::string> lipschitz_violation(const MetricAlgebra& a, const DistMatrix& theta, const Mode& mode) {
  const SigmaAlgebra& s = a.structure();
  for (const auto& [name, table] : s.ops()) {
    if (table.arity == 0) continue;
    const ExtRational k = mode.constant(name);
    const std::size_t count = s.tuple_count(table.arity);
    for (std::size_t i = 0; i < count; ++i) {
      auto x = s.args_of(i, table.arity);
      for (std::size_t j = i + 1; j < count; ++j) {
        auto y = s.args_of(j, table.arity);
        ExtRational m;
        for (std::size_t q = 0; q < x.size(); ++q) m = max(m, theta(x[q], y[q]));
        if (theta(table.values[i], table.values[j]) > k * m) return name;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ClosureProblem closure_problem(const MetricAlgebra& a) { return problem_for(a, a.metric()); }

JoinResult join_detailed(std::span<const Congruence> thetas, const Mode& mode) {
  if (thetas.empty()) throw ArityError("join of an empty list");
  const Congruence& first = thetas.front();
  for (const Congruence& t : thetas) require_same_base(first, t);
  const MetricAlgebra& a = *first.base();
  if (mode.kind != Mode::Kind::Metric)
    for (const Congruence& t : thetas)
      if (auto sym = lipschitz_violation(a, t.matrix(), mode))
        throw DomainError("join in mode " + mode.str() + ": an argument violates the Lipschitz bound for '" + *sym +
                          "'");

  std::vector<Constraint> bounds;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ExtRational w = first(i, j);
      for (const Congruence& t : thetas) w = min(w, t(i, j));
      if (w < a.d(i, j)) bounds.push_back({i, j, w});
    }
  Limits unlimited;
  unlimited.decreases = UINT64_MAX;
  GeneratedCongruence g = generate_congruence(closure_problem(a), bounds, Mode::metric(), unlimited);
  if (mode.kind != Mode::Kind::Metric && g.forcing_rounds != 0)
    throw std::logic_error("path-formula join was not congruential under the Lipschitz hypothesis");
  return {Congruence::make(first.base(), std::move(g.matrix)), g.forcing_rounds};
}

Congruence join(std::span<const Congruence> thetas, const Mode& mode) {
  return std::move(join_detailed(thetas, mode).join);
}

Congruence restrict(const Congruence& theta, const Subalgebra& sub) {
  if (!same_algebra(sub.inclusion.target(), theta.base()))
    throw ShapeError("subalgebra is not a subalgebra of the congruence's base");
  const std::size_t k = sub.elements.size();
  DistMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = theta(sub.elements[i], sub.elements[j]);
  return Congruence::make(sub.algebra, std::move(m));
}

std::optional<std::pair<std::size_t, std::size_t>> order_violation(const Congruence& rho, const Congruence& theta) {
  require_same_base(rho, theta);
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t j = 0; j < rho.size(); ++j)
      if (rho(i, j) > theta(i, j)) return std::make_pair(i, j);
  return std::nullopt;
}

Congruence quotient_congruence(const Congruence& rho, const Congruence& theta, const Quotient& by_theta) {
  if (auto bad = order_violation(rho, theta))
    throw OrderError("rho(" + std::to_string(bad->first) + "," + std::to_string(bad->second) + ") = " +
                         rho(bad->first, bad->second).str() + " exceeds theta = " +
                         theta(bad->first, bad->second).str(),
                     {bad->first, bad->second});
  const QuotientMap& q = by_theta.classes;
  if (q.class_of.size() != rho.size() || !same_algebra(by_theta.projection.source(), theta.base()))
    throw ShapeError("quotient does not belong to the congruence's base");
  for (std::size_t a = 0; a < rho.size(); ++a)
    for (std::size_t b = 0; b < rho.size(); ++b)
      if ((q.class_of[a] == q.class_of[b]) != theta(a, b).is_zero())
        throw ShapeError("quotient was not built from theta", {a, b});

  const std::size_t k = q.num_classes();
  DistMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = rho(q.representative[i], q.representative[j]);
  for (std::size_t a = 0; a < rho.size(); ++a)
    for (std::size_t b = 0; b < rho.size(); ++b)
      if (m(q.class_of[a], q.class_of[b]) != rho(a, b))
        throw CongruenceError("rho is not constant on theta-classes", {a, b});
  return Congruence::make(by_theta.algebra, std::move(m));
}

Congruence quotient_congruence(const Congruence& rho, const Congruence& theta) {
  return quotient_congruence(rho, theta, quotient(theta));
}

Congruence pull_back(const Congruence& on_quotient, const Quotient& q) {
  if (!same_algebra(on_quotient.base(), q.algebra)) throw ShapeError("congruence is not on this quotient");
  const std::size_t n = q.classes.class_of.size();
  DistMatrix m(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m(a, b) = on_quotient(q.classes.class_of[a], q.classes.class_of[b]);
  return Congruence::make(q.projection.source(), std::move(m));
}

Decomposition decompose_product(const Congruence& t1, const Congruence& t2) {
  require_same_base(t1, t2);
  Decomposition out;
  const MetricAlgebra& a = *t1.base();
  const std::size_t n = a.size();
  auto pair_name = [&](std::size_t x, std::size_t y) { return "(" + a.carrier()[x] + "," + a.carrier()[y] + ")"; };

  std::vector<Congruence> both{t1, t2};
  Congruence m = meet(both);
  if (auto bad = first_difference(m.matrix(), a.metric())) {
    out.verdict = Verdict::fail("meet", "meet differs from the metric at " + pair_name(bad->first, bad->second),
                                {bad->first, bad->second});
    return out;
  }
  Congruence j = join(both);
  if (auto bad = first_difference(j.matrix(), DistMatrix(n))) {
    out.verdict = Verdict::fail("join", "join is nonzero at " + pair_name(bad->first, bad->second),
                                {bad->first, bad->second});
    return out;
  }
  if (auto bad = first_difference(compose(t1, t2), compose(t2, t1))) {
    out.verdict = Verdict::fail("permutable", "compositions differ at " + pair_name(bad->first, bad->second),
                                {bad->first, bad->second});
    return out;
  }
  out.left = quotient(t1);
  out.right = quotient(t2);
  out.product = product({out.left->algebra, out.right->algebra});
  out.map.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t digits[2] = {out.left->classes.class_of[x], out.right->classes.class_of[x]};
    out.map[x] = out.product->codec.encode(digits);
  }
  Verdict iso = is_isomorphism(out.map, a, *out.product->algebra);
  if (!iso) out.verdict = Verdict::fail("isomorphism", "canonical map: " + iso.code + ": " + iso.message, iso.witness);
  return out;
}

namespace {

class Fixpoint {
 public:
  Fixpoint(const ClosureProblem& p, const Mode& mode, const Limits& limits)
      : p_(p), mode_(mode), limits_(limits), theta_(p.ceiling), n_(p.ceiling.size()) {}

  GeneratedCongruence run(std::span<const Constraint> constraints) {
    for (const PartialOp& op : p_.ops) {
      if (op.arity > 0) constants_.push_back(mode_.constant(op.symbol));
      else constants_.push_back(1);
    }
    for (const Constraint& c : constraints) {
      if (c.a >= n_ || c.b >= n_) throw DomainError("constraint outside the carrier", {c.a, c.b});
      if (c.a != c.b) lower(c.a, c.b, c.bound);
    }
    GeneratedCongruence g;
    while (true) {
      close();
      ++g.passes;
      bool changed = mode_.kind == Mode::Kind::Metric ? force_zeros() : lipschitz_round();
      if (!changed) break;
      ++g.forcing_rounds;
    }
    g.matrix = std::move(theta_);
    g.decreases = decreases_;
    return g;
  }

 private:
  void lower(std::size_t i, std::size_t j, const ExtRational& v) {
    if (!(v < theta_(i, j))) return;
    theta_.set_symmetric(i, j, v);
    if (++decreases_ > limits_.decreases)
      throw FixpointCapError("congruence fixpoint exceeded " + std::to_string(limits_.decreases) + " decreases",
                             theta_);
  }

  // Shortest-path closure, one Floyd-Warshall per component of finite entries.
  void close() {
    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (theta_(i, j).is_finite()) parent[find(i)] = find(j);
    std::map<std::size_t, std::vector<std::size_t>> comps;
    for (std::size_t i = 0; i < n_; ++i) comps[find(i)].push_back(i);

    std::vector<ExtRational> local;
    for (const auto& [root, members] : comps) {
      const std::size_t c = members.size();
      if (c < 3) continue;
      local.assign(c * c, ExtRational());
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) local[i * c + j] = theta_(members[i], members[j]);
      for (std::size_t k = 0; k < c; ++k)
        for (std::size_t i = 0; i < c; ++i) {
          const ExtRational ik = local[i * c + k];
          if (ik.is_infinite()) continue;
          for (std::size_t j = 0; j < c; ++j) {
            ExtRational via = ik + local[k * c + j];
            if (via < local[i * c + j]) local[i * c + j] = std::move(via);
          }
        }
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = i + 1; j < c; ++j) lower(members[i], members[j], local[i * c + j]);
    }
  }

  bool force_zeros() {
    bool changed = false;
    std::vector<std::size_t> args;
    for (const PartialOp& op : p_.ops) {
      const std::vector<std::size_t>& dom = op.arg_domain;
      const std::size_t m = dom.size();
      if (op.arity == 0 || m == 0) continue;
      std::vector<std::vector<std::size_t>> zero_mates(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (i != j && theta_(dom[i], dom[j]).is_zero()) zero_mates[i].push_back(j);
      std::vector<std::size_t> stride(op.arity, 1);
      for (std::size_t k = op.arity - 1; k-- > 0;) stride[k] = stride[k + 1] * m;
      for (std::size_t idx = 0; idx < op.values.size(); ++idx) {
        const std::size_t r = op.values[idx];
        if (r == PartialOp::kUndefined) continue;
        for (std::size_t k = 0; k < op.arity; ++k) {
          const std::size_t pos = (idx / stride[k]) % m;
          for (std::size_t other : zero_mates[pos]) {
            const std::size_t r2 = op.values[idx + other * stride[k] - pos * stride[k]];
            if (r2 == PartialOp::kUndefined || theta_(r, r2).is_zero()) continue;
            lower(r, r2, ExtRational());
            changed = true;
          }
        }
      }
    }
    return changed;
  }

  bool lipschitz_round() {
    bool changed = false;
    for (std::size_t o = 0; o < p_.ops.size(); ++o) {
      const PartialOp& op = p_.ops[o];
      const std::vector<std::size_t>& dom = op.arg_domain;
      const std::size_t m = dom.size();
      if (op.arity == 0 || m == 0) continue;
      const std::size_t count = op.values.size();
      std::vector<std::vector<std::size_t>> args(count, std::vector<std::size_t>(op.arity));
      for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t code = idx;
        for (std::size_t k = op.arity; k-- > 0;) {
          args[idx][k] = dom[code % m];
          code /= m;
        }
      }
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t r1 = op.values[i];
        if (r1 == PartialOp::kUndefined) continue;
        for (std::size_t j = i + 1; j < count; ++j) {
          const std::size_t r2 = op.values[j];
          if (r2 == PartialOp::kUndefined || r1 == r2) continue;
          ExtRational bound;
          bool finite = true;
          for (std::size_t k = 0; k < op.arity && finite; ++k) {
            const ExtRational& v = theta_(args[i][k], args[j][k]);
            if (v.is_infinite()) finite = false;
            else if (bound < v) bound = v;
          }
          if (!finite) continue;
          if (mode_.kind == Mode::Kind::Lipschitz) bound = constants_[o] * bound;
          if (bound < theta_(r1, r2)) {
            lower(r1, r2, bound);
            changed = true;
          }
        }
      }
    }
    return changed;
  }

  const ClosureProblem& p_;
  const Mode& mode_;
  const Limits& limits_;
  DistMatrix theta_;
  std::size_t n_;
  std::uint64_t decreases_ = 0;
  std::vector<ExtRational> constants_;
};

}  // namespace

GeneratedCongruence generate_congruence(const ClosureProblem& problem, std::span<const Constraint> constraints,
                                        const Mode& mode, const Limits& limits) {
  for (const PartialOp& op : problem.ops) {
    std::size_t expected = 1;
    for (std::size_t k = 0; k < op.arity; ++k) expected *= op.arg_domain.size();
    if (op.values.size() != expected)
      throw ShapeError("table for '" + op.symbol + "' has " + std::to_string(op.values.size()) + " entries, expected " +
                       std::to_string(expected));
  }
  return Fixpoint(problem, mode, limits).run(constraints);
}

Congruence generate_congruence(const AlgebraRef& a, std::span<const Constraint> constraints, const Mode& mode,
                               const Limits& limits) {
  return Congruence::make(a, generate_congruence(closure_problem(*a), constraints, mode, limits).matrix);
}

}  // namespace metra
