#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metra/algebra.hpp"
#include "metra/error.hpp"
#include "metra/extmetric.hpp"
#include "metra/limits.hpp"
#include "metra/verdict.hpp"

namespace metra {

// Order convention: θ1 ⊑ θ2 iff θ1 >= θ2 pointwise. The metric d^A is the
// ⊑-least congruence and the all-zero matrix the ⊑-greatest. Every function
// below states its comparisons pointwise.

/// OK iff `m` is a pseudometric (codes from check_pseudometric), m <= d^A
/// pointwise (code "containment", witness pair) and its zero-set is preserved
/// by every operation (code "compatibility", witness = the zero pair whose
/// images separate). Throws ShapeError on a size mismatch.
Verdict is_congruential(const MetricAlgebra& a, const DistMatrix& m);

/// Congruential pseudometric on a fixed base algebra.
class Congruence {
 public:
  /// Throws CongruenceError carrying the failing verdict's witness.
  static Congruence make(AlgebraRef base, DistMatrix m);
  static Congruence metric_of(const AlgebraRef& base);
  static Congruence zero(const AlgebraRef& base);

  const AlgebraRef& base() const noexcept { return base_; }
  const DistMatrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return matrix_.size(); }
  const ExtRational& operator()(std::size_t a, std::size_t b) const { return matrix_(a, b); }

  /// Same base algebra and equal matrices.
  friend bool operator==(const Congruence& a, const Congruence& b);

 private:
  Congruence(AlgebraRef base, DistMatrix m) : base_(std::move(base)), matrix_(std::move(m)) {}
  AlgebraRef base_;
  DistMatrix matrix_;
};

/// Operation class used by congruence generation and join:
///   Metric        - zero-set must be a congruence,
///   Quantitative  - θ(σa, σb) <= max_k θ(a_k, b_k),
///   Lipschitz     - θ(σa, σb) <= K_σ · max_k θ(a_k, b_k).
struct Mode {
  enum class Kind { Metric, Quantitative, Lipschitz };
  Kind kind = Kind::Metric;
  std::map<std::string, ExtRational> constants;

  static Mode metric() { return {}; }
  static Mode quantitative() { return {Kind::Quantitative, {}}; }
  /// Throws DomainError unless every constant is finite and positive.
  static Mode lipschitz(std::map<std::string, ExtRational> constants);

  /// K_σ for the Lipschitz-type modes (1 under Quantitative). Throws
  /// DomainError if a Lipschitz constant is missing.
  ExtRational constant(const std::string& symbol) const;
  std::string str() const;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// ⊑-meet: the pointwise maximum.
Congruence meet(std::span<const Congruence> thetas);

/// Min-plus composition (θ1 ∘ θ2)(a, b) = min_c θ1(a, c) + θ2(c, b). Not
/// necessarily symmetric.
DistMatrix compose(const Congruence& t1, const Congruence& t2);

bool are_permutable(const Congruence& t1, const Congruence& t2);

struct JoinResult {
  Congruence join;
  /// Rounds in which the zero-set had to be closed under the operations
  /// after the shortest-path closure. Always 0 under the Lipschitz hypothesis.
  std::size_t forcing_rounds;
};

/// ⊑-join: the pointwise-largest congruence below min_i θ_i. Computed as the
/// shortest-path closure of min_i θ_i, then alternately forcing operation
/// images of zero pairs to 0 and re-closing until the zero-set is a
/// congruence. In Quantitative/Lipschitz mode each θ_i must satisfy the
/// Lipschitz hypothesis (DomainError otherwise) and no forcing round may fire.
JoinResult join_detailed(std::span<const Congruence> thetas, const Mode& mode = {});
Congruence join(std::span<const Congruence> thetas, const Mode& mode = {});

/// θ restricted to a subalgebra of its base.
Congruence restrict(const Congruence& theta, const Subalgebra& sub);

/// First pair (a, b) with rho(a, b) > theta(a, b), if any. rho ⊒ theta holds
/// exactly when this is empty.
std::optional<std::pair<std::size_t, std::size_t>> order_violation(const Congruence& rho, const Congruence& theta);

/// ρ/θ on A/θ: ρ̄([a], [b]) = ρ(a, b). Requires ρ <= θ pointwise (OrderError
/// with the violating pair otherwise). `by_theta` must be quotient(θ).
Congruence quotient_congruence(const Congruence& rho, const Congruence& theta, const Quotient& by_theta);
Congruence quotient_congruence(const Congruence& rho, const Congruence& theta);

/// Congruence on A obtained by pulling back a congruence on A/θ along the
/// projection.
Congruence pull_back(const Congruence& on_quotient, const Quotient& q);

struct Decomposition {
  /// Failure codes: "meet" (θ1 ⋏ θ2 != d), "join" (θ1 ⋎ θ2 != 0),
  /// "permutable", "isomorphism". Witness is a pair of elements.
  Verdict verdict;
  std::optional<Quotient> left;
  std::optional<Quotient> right;
  std::optional<Product> product;
  /// Canonical map a -> ([a]_1, [a]_2) into product->algebra.
  std::vector<std::size_t> map;
};

/// Checks the three product-decomposition conditions and, when they hold,
/// verifies the canonical map onto A/θ1 × A/θ2 is an isomorphism.
Decomposition decompose_product(const Congruence& t1, const Congruence& t2);

/// Bound s =_ε t between carrier elements.
struct Constraint {
  std::size_t a;
  std::size_t b;
  ExtRational bound;
};

/// Operation with possibly undefined entries (a truncated term universe).
struct PartialOp {
  static constexpr std::size_t kUndefined = static_cast<std::size_t>(-1);
  std::string symbol;
  std::size_t arity = 0;
  /// Indexed like OpTable over `arg_domain` elements.
  std::vector<std::size_t> values;
  /// Carrier elements allowed as arguments, ascending.
  std::vector<std::size_t> arg_domain;
};

struct ClosureProblem {
  /// Pointwise upper bound; its size is the carrier size (d^A, or the
  /// discrete metric for a term universe).
  DistMatrix ceiling;
  std::vector<PartialOp> ops;
};

ClosureProblem closure_problem(const MetricAlgebra& a);

struct GeneratedCongruence {
  DistMatrix matrix;
  std::size_t passes = 0;
  std::size_t decreases = 0;
  /// Zero-forcing rounds (Metric mode) after the first closure.
  std::size_t forcing_rounds = 0;
};

/// Raised when the fixpoint exceeds limits.decreases. `bound` is the last
/// closed matrix: every entry is still an upper bound on the true value.
class FixpointCapError : public ResourceError {
 public:
  FixpointCapError(const std::string& what, DistMatrix bound)
      : ResourceError(what, "fixpoint cap"), bound_(std::move(bound)) {}
  const DistMatrix& bound() const noexcept { return bound_; }

 private:
  DistMatrix bound_;
};

/// The pointwise-largest pseudometric below `problem.ceiling` that meets every
/// constraint and the mode's operation rule. Descends from the ceiling.
GeneratedCongruence generate_congruence(const ClosureProblem& problem, std::span<const Constraint> constraints,
                                        const Mode& mode, const Limits& limits = {});

Congruence generate_congruence(const AlgebraRef& a, std::span<const Constraint> constraints, const Mode& mode,
                               const Limits& limits = {});

}  // namespace metra
