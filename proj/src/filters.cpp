#include "metra/filters.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "metra/congruence.hpp"
#include "metra/error.hpp"
#include "metra/lexer.hpp"

namespace metra {

namespace {

std::uint64_t mask_of(std::span<const std::size_t> ids, std::size_t n) {
  std::uint64_t m = 0;
  for (std::size_t i : ids) {
    if (i >= n) throw DomainError("index " + std::to_string(i) + " outside the index set", {i});
    m |= std::uint64_t{1} << i;
  }
  return m;
}

std::vector<std::size_t> ids_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1) out.push_back(i);
  return out;
}

void require_index_size(std::size_t n) {
  if (n >= 63) throw DomainError("index sets are limited to 62 elements");
}

}  // namespace

FiniteFilter::FiniteFilter(std::vector<std::string> index, std::vector<std::size_t> core)
    : index_(std::move(index)), core_(std::move(core)) {
  if (index_.empty()) throw DomainError("filter on an empty index set");
  require_index_size(index_.size());
  if (std::set<std::string>(index_.begin(), index_.end()).size() != index_.size())
    throw DomainError("duplicate index labels");
  std::sort(core_.begin(), core_.end());
  core_.erase(std::unique(core_.begin(), core_.end()), core_.end());
  if (core_.empty()) throw DomainError("filter core must be nonempty");
  if (core_.back() >= index_.size()) throw DomainError("core element outside the index set", {core_.back()});
}

FiniteFilter FiniteFilter::principal(std::vector<std::string> index, std::size_t k) {
  return FiniteFilter(std::move(index), {k});
}

bool FiniteFilter::contains(std::span<const std::size_t> subset) const {
  const std::uint64_t c = mask_of(core_, size());
  return (mask_of(subset, size()) & c) == c;
}

std::vector<std::vector<std::size_t>> FiniteFilter::members() const {
  const std::uint64_t c = mask_of(core_, size());
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << size()); ++m)
    if ((m & c) == c) out.push_back(ids_of(m, size()));
  return out;
}

std::vector<FiniteFilter> all_filters(const std::vector<std::string>& index) {
  require_index_size(index.size());
  std::vector<FiniteFilter> out;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << index.size()); ++m)
    out.emplace_back(index, ids_of(m, index.size()));
  return out;
}

FilterCheck validate_filter_family(const std::vector<std::string>& index,
                                   const std::vector<std::vector<std::size_t>>& sets, const Limits& limits) {
  const std::size_t n = index.size();
  if (n == 0) throw DomainError("filter on an empty index set");
  require_index_size(n);
  if ((std::uint64_t{1} << n) > limits.subsets)
    throw ResourceError("filter validation would inspect 2^" + std::to_string(n) + " subsets", "subsets");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::set<std::uint64_t> family;
  for (const auto& s : sets) family.insert(mask_of(s, n));

  if (!family.count(full)) return {Verdict::fail("proper", "the index set is not a member", ids_of(full, n)), {}};
  if (family.count(0)) return {Verdict::fail("proper", "the empty set is a member", {}), {}};
  for (std::uint64_t a : family)
    for (std::uint64_t b = 0; b <= full; ++b)
      if ((a & b) == a && !family.count(b))
        return {Verdict::fail("upward", "a superset of a member is missing", ids_of(b, n)), {}};
  for (std::uint64_t a : family)
    for (std::uint64_t b : family)
      if (!family.count(a & b))
        return {Verdict::fail("intersection", "the intersection of two members is missing", ids_of(a & b, n)), {}};
  std::uint64_t core = full;
  for (std::uint64_t a : family) core &= a;
  return {Verdict::pass(), FiniteFilter(index, ids_of(core, n))};
}

namespace {

void require_values(const FiniteFilter& f, std::span<const ExtRational> values) {
  if (values.size() != f.size())
    throw ShapeError("family has " + std::to_string(values.size()) + " values, index set has " +
                     std::to_string(f.size()));
}

}  // namespace

ExtRational limsup_along(const FiniteFilter& f, std::span<const ExtRational> values) {
  require_values(f, values);
  ExtRational r = values[f.core().front()];
  for (std::size_t i : f.core()) r = max(r, values[i]);
  return r;
}

ExtRational liminf_along(const FiniteFilter& f, std::span<const ExtRational> values) {
  require_values(f, values);
  ExtRational r = values[f.core().front()];
  for (std::size_t i : f.core()) r = min(r, values[i]);
  return r;
}

FiniteFilter restrict_filter(const FiniteFilter& f, std::span<const std::size_t> subset) {
  if (!f.contains(subset)) throw DomainError("restriction to a set outside the filter");
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::string> labels;
  for (std::size_t i : sorted) labels.push_back(f.index()[i]);
  std::vector<std::size_t> core;
  for (std::size_t c : f.core())
    core.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), c) - sorted.begin()));
  return FiniteFilter(std::move(labels), std::move(core));
}

ReducedProduct reduced_product(const std::vector<AlgebraRef>& factors, const FiniteFilter& f) {
  if (factors.size() != f.size())
    throw ShapeError(std::to_string(factors.size()) + " factors for an index set of " + std::to_string(f.size()));
  ReducedProduct out;
  out.product = product(factors);
  const MetricAlgebra& p = *out.product->algebra;
  const TupleCodec& codec = out.product->codec;
  const std::size_t n = p.size();
  std::vector<std::vector<std::size_t>> coords(n);
  for (std::size_t x = 0; x < n; ++x) coords[x] = codec.decode(x);
  out.theta = DistMatrix(n);
  std::vector<ExtRational> family(f.size());
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      for (std::size_t i = 0; i < f.size(); ++i) family[i] = factors[i]->d(coords[x][i], coords[y][i]);
      out.theta.set_symmetric(x, y, limsup_along(f, family));
    }
  Verdict v = is_congruential(p, out.theta);
  if (!v) {
    out.verdict = Verdict::fail("congruence", "limsup pseudometric is not congruential: " + v.code + ": " + v.message,
                                v.witness);
    return out;
  }
  out.quotient = quotient(Congruence::make(out.product->algebra, out.theta));
  return out;
}

ClosedForm ClosedForm::parse(std::string_view text) {
  TokenStream in(text);
  ClosedForm f = parse(in);
  if (!in.at_end()) in.fail("trailing input in closed form");
  return f;
}

ClosedForm ClosedForm::parse(TokenStream& in) {
  auto rational = [&] {
    if (in.peek().kind != Token::Kind::Number) in.fail("expected a rational");
    std::string q = in.next().text;
    if (in.is_punct("/") && in.peek(1).kind == Token::Kind::Number) {
      in.next();
      q += "/" + in.next().text;
    }
    try {
      return ExtRational::parse(q);
    } catch (const DomainError& e) {
      in.fail(e.what());
    }
  };
  auto over_n = [&] {
    if (!in.is_punct("/") || !in.is_ident("n", 1)) return false;
    in.next();
    in.next();
    return true;
  };
  ClosedForm f;
  if (in.accept_word("inf")) {
    f.constant = ExtRational::infinity();
  } else {
    ExtRational q = rational();
    if (over_n()) {
      f.rate = q;
    } else {
      f.constant = q;
      if (in.accept("+")) {
        f.rate = rational();
        if (!over_n()) in.fail("expected '/n'");
      }
    }
  }
  return f;
}

ExtRational ClosedForm::at(std::int64_t n) const {
  if (n <= 0) throw DomainError("sequence index must be positive");
  return constant + rate.divided_by(n);
}

std::string ClosedForm::str() const {
  if (rate.is_zero()) return constant.str();
  std::string r = rate.str() + "/n";
  return constant.is_zero() ? r : constant.str() + " + " + r;
}

namespace {

void require_same_shape(const std::vector<DistMatrix>& prefix) {
  if (prefix.empty()) throw DomainError("empty metric sequence");
  for (const auto& m : prefix)
    if (m.size() != prefix.front().size()) throw ShapeError("metric sequence changes carrier size");
}

LimitResult finish(DistMatrix m, bool approximate) {
  LimitResult r{check_pseudometric(m), std::move(m), approximate};
  return r;
}

ExtRational entry_gap(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() && b.is_infinite()) return ExtRational();
  return ExtRational::abs_diff(a, b);
}

}  // namespace

LimitResult pointwise_limit_exact(const std::vector<DistMatrix>& prefix, std::size_t tail) {
  require_same_shape(prefix);
  if (tail < 2) throw DomainError("exact mode needs a tail of at least 2 terms");
  if (prefix.size() < tail)
    return {Verdict::fail("divergent", "prefix shorter than the required constant tail"), prefix.back(), false};
  const DistMatrix& last = prefix.back();
  for (std::size_t k = prefix.size() - tail; k + 1 < prefix.size(); ++k)
    for (std::size_t i = 0; i < last.size(); ++i)
      for (std::size_t j = 0; j < last.size(); ++j)
        if (prefix[k](i, j) != last(i, j))
          return {Verdict::fail("divergent", "entry is not constant over the tail", {i, j}), last, false};
  return finish(last, false);
}

LimitResult pointwise_limit_gap(const std::vector<DistMatrix>& prefix, const ExtRational& gap) {
  require_same_shape(prefix);
  if (prefix.size() < 2)
    return {Verdict::fail("divergent", "gap mode needs at least two terms"), prefix.back(), true};
  const DistMatrix& a = prefix[prefix.size() - 2];
  const DistMatrix& b = prefix.back();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (entry_gap(a(i, j), b(i, j)) > gap)
        return {Verdict::fail("divergent", "last two terms differ by more than the gap", {i, j}), b, true};
  return finish(b, true);
}

LimitResult pointwise_limit_closed(const std::vector<std::vector<ClosedForm>>& forms) {
  const std::size_t n = forms.size();
  DistMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (forms[i].size() != n) throw ShapeError("closed-form matrix is not square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = forms[i][j].limit();
  }
  return finish(std::move(m), false);
}

}  // namespace metra
