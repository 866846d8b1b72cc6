#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metra/extmetric.hpp"
#include "metra/limits.hpp"
#include "metra/terms.hpp"
#include "metra/verdict.hpp"

namespace metra {

/// Finite metric algebra: labelled carrier, distance matrix and total
/// operation tables. Construction checks shapes only; validate_algebra checks
/// table ranges and the metric axioms. Empty carriers are rejected.
class MetricAlgebra {
 public:
  MetricAlgebra(Signature sig, std::vector<std::string> carrier, DistMatrix metric,
                std::map<std::string, OpTable> ops);

  const SigmaAlgebra& structure() const noexcept { return structure_; }
  const Signature& signature() const noexcept { return structure_.signature(); }
  std::size_t size() const noexcept { return carrier_.size(); }
  const std::vector<std::string>& carrier() const noexcept { return carrier_; }
  const DistMatrix& metric() const noexcept { return metric_; }
  const ExtRational& d(std::size_t a, std::size_t b) const { return metric_(a, b); }
  std::size_t apply(const std::string& symbol, std::span<const std::size_t> args) const {
    return structure_.apply(symbol, args);
  }
  std::optional<std::size_t> find(const std::string& label) const;

  /// Metric space view; throws AxiomError if the metric is invalid.
  FiniteMetricSpace space() const { return FiniteMetricSpace(carrier_, metric_); }

  friend bool operator==(const MetricAlgebra&, const MetricAlgebra&) = default;

 private:
  std::vector<std::string> carrier_;
  DistMatrix metric_;
  SigmaAlgebra structure_;
};

using AlgebraRef = std::shared_ptr<const MetricAlgebra>;

/// Validates and wraps. Throws AxiomError with the failing verdict's witness.
AlgebraRef make_algebra(MetricAlgebra a);

/// Same object or structurally equal.
bool same_algebra(const AlgebraRef& a, const AlgebraRef& b);

/// OK iff every table entry lies in the carrier (code "table", witness = the
/// argument tuple) and the metric is valid (codes from check_metric).
Verdict validate_algebra(const MetricAlgebra& a);

/// Σ-homomorphic (code "operation", witness = argument tuple) and
/// non-expansive (code "nonexpansive", witness = pair).
/// Throws SignatureError if the signatures differ and DomainError if f is not
/// a total map into the target.
Verdict is_homomorphism(std::span<const std::size_t> f, const MetricAlgebra& a, const MetricAlgebra& b);

/// Bijective isometric homomorphism.
Verdict is_isomorphism(std::span<const std::size_t> f, const MetricAlgebra& a, const MetricAlgebra& b);

/// A validated homomorphism; `make` throws HomomorphismError otherwise.
class Homomorphism {
 public:
  static Homomorphism make(AlgebraRef source, AlgebraRef target, std::vector<std::size_t> map);

  const AlgebraRef& source() const noexcept { return source_; }
  const AlgebraRef& target() const noexcept { return target_; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }
  std::size_t operator()(std::size_t a) const { return map_[a]; }
  bool is_surjective() const;
  bool is_injective() const;

 private:
  Homomorphism(AlgebraRef s, AlgebraRef t, std::vector<std::size_t> m)
      : source_(std::move(s)), target_(std::move(t)), map_(std::move(m)) {}
  AlgebraRef source_;
  AlgebraRef target_;
  std::vector<std::size_t> map_;
};

/// Every operation is non-expansive for the supremum metric on tuples.
/// Failure code "quantitative", witness = first tuple followed by second.
Verdict is_quantitative(const MetricAlgebra& a);

/// Every operation satisfies d(σa, σb) <= K_σ · max_k d(a_k, b_k); symbols
/// missing from `constants` use K = 1. Failure code "lipschitz".
Verdict is_lipschitz(const MetricAlgebra& a, const std::map<std::string, ExtRational>& constants);

struct Subalgebra {
  AlgebraRef algebra;
  /// Ids in the parent, ascending; element i of `algebra` is elements[i].
  std::vector<std::size_t> elements;
  Homomorphism inclusion;
};

/// Least subset containing `seed` and closed under all operations, with the
/// induced metric. Throws DomainError when the result would be empty.
Subalgebra generate_subalgebra(const AlgebraRef& a, std::span<const std::size_t> seed);

struct Product {
  AlgebraRef algebra;
  std::vector<Homomorphism> projections;
  TupleCodec codec;
};

/// Cartesian product with pointwise operations and the supremum metric.
/// Throws ArityError on an empty list, SignatureError on mismatched signatures.
Product product(const std::vector<AlgebraRef>& factors);

class Congruence;

/// ker(f)(a, b) = d(f a, f b).
Congruence kernel(const Homomorphism& f);

/// Subalgebra of the target generated by the set-image of f.
Subalgebra image(const Homomorphism& f);

struct Quotient {
  AlgebraRef algebra;
  QuotientMap classes;
  Homomorphism projection;
};

/// A/θ with σ([a1..an]) = [σ(a1..an)]; carrier labels are those of the class
/// representatives.
Quotient quotient(const Congruence& theta);

/// {a | ∃ s ∈ S, θ(s, a) = 0}, ascending.
std::vector<std::size_t> saturate(std::span<const std::size_t> subset, const Congruence& theta);

struct ReflexivityResult {
  Verdict verdict;
  /// When reflexive: section[b] is the chosen preimage of b.
  std::vector<std::size_t> section;
};

/// Searches (lexicographically) for a metric-space section s of p with
/// p∘s = id that is an isometric embedding. DomainError if p is not
/// surjective; ResourceError past limits.sections search nodes.
ReflexivityResult is_reflexive_quotient(const Homomorphism& p, const Limits& limits = {});

/// Bijective isometric homomorphism a -> b by backtracking search, if any.
std::optional<std::vector<std::size_t>> find_isomorphism(const MetricAlgebra& a, const MetricAlgebra& b,
                                                         const Limits& limits = {});

}  // namespace metra
