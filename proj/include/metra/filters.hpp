#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metra/algebra.hpp"
#include "metra/ext_rational.hpp"
#include "metra/extmetric.hpp"
#include "metra/lexer.hpp"
#include "metra/limits.hpp"
#include "metra/verdict.hpp"

namespace metra {

/// Filter on a finite index set, stored by its core J0: the members are the
/// supersets of J0. Indices are positions in `index()`.
class FiniteFilter {
 public:
  /// Throws DomainError on an empty index set, an empty core, a core element
  /// out of range, or duplicate index labels.
  FiniteFilter(std::vector<std::string> index, std::vector<std::size_t> core);
  static FiniteFilter principal(std::vector<std::string> index, std::size_t k);

  const std::vector<std::string>& index() const noexcept { return index_; }
  std::size_t size() const noexcept { return index_.size(); }
  /// Ascending.
  const std::vector<std::size_t>& core() const noexcept { return core_; }
  bool is_ultrafilter() const noexcept { return core_.size() == 1; }
  /// J is a member iff core ⊆ J.
  bool contains(std::span<const std::size_t> subset) const;
  /// Explicit family, each member ascending, in increasing bitmask order.
  std::vector<std::vector<std::size_t>> members() const;

  friend bool operator==(const FiniteFilter&, const FiniteFilter&) = default;

 private:
  std::vector<std::string> index_;
  std::vector<std::size_t> core_;
};

/// Every filter on the given index set (one per nonempty core), in increasing
/// bitmask order of the core.
std::vector<FiniteFilter> all_filters(const std::vector<std::string>& index);

struct FilterCheck {
  /// Codes: "proper" (I missing or ∅ present), "upward" (witness = a missing
  /// superset), "intersection" (witness = a missing intersection).
  Verdict verdict;
  std::optional<FiniteFilter> filter;
};

/// Checks the filter axioms on an explicit family and recovers the core.
/// Throws DomainError on out-of-range elements and ResourceError when
/// 2^|I| exceeds limits.subsets.
FilterCheck validate_filter_family(const std::vector<std::string>& index,
                                   const std::vector<std::vector<std::size_t>>& sets, const Limits& limits = {});

/// Along a finite filter: max (limsup) and min (liminf) over the core.
/// Throws ShapeError if `values` is not indexed by the filter's index set.
ExtRational limsup_along(const FiniteFilter& f, std::span<const ExtRational> values);
ExtRational liminf_along(const FiniteFilter& f, std::span<const ExtRational> values);

/// F|J for J ∈ F (DomainError otherwise). J ascending, without duplicates.
FiniteFilter restrict_filter(const FiniteFilter& f, std::span<const std::size_t> subset);

struct ReducedProduct {
  /// Fails with code "congruence" (witness from is_congruential) when the
  /// limsup pseudometric is not congruential.
  Verdict verdict;
  std::optional<Product> product;
  /// limsup_{i->F} d_i(x_i, y_i) on the product carrier.
  DistMatrix theta;
  std::optional<Quotient> quotient;
};

/// Quotient of the product by the limsup pseudometric, when it exists.
/// ShapeError if the factor count differs from the index size.
ReducedProduct reduced_product(const std::vector<AlgebraRef>& factors, const FiniteFilter& f);

/// Entry of a metric sequence given in closed form c + r/n (limit c).
struct ClosedForm {
  ExtRational constant;
  ExtRational rate;

  /// Accepts "q", "q/n", "q + r/n" and "inf"; q, r nonnegative rationals.
  static ClosedForm parse(std::string_view text);
  static ClosedForm parse(TokenStream& in);
  ExtRational at(std::int64_t n) const;
  ExtRational limit() const { return constant; }
  std::string str() const;

  friend bool operator==(const ClosedForm&, const ClosedForm&) = default;
};

struct LimitResult {
  /// Codes: "divergent" (witness = entry i,j) or a pseudometric code.
  Verdict verdict;
  DistMatrix matrix;
  /// Set in gap mode: the matrix is the last prefix term, not a limit.
  bool approximate = false;
};

/// Exact mode: the last `tail` matrices of the prefix must agree.
LimitResult pointwise_limit_exact(const std::vector<DistMatrix>& prefix, std::size_t tail = 2);
/// Gap mode: the last two matrices differ by at most `gap` entrywise.
LimitResult pointwise_limit_gap(const std::vector<DistMatrix>& prefix, const ExtRational& gap);
/// Closed-form mode: entrywise limits of c + r/n.
LimitResult pointwise_limit_closed(const std::vector<std::vector<ClosedForm>>& forms);

}  // namespace metra
