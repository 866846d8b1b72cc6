#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "metra/algebra.hpp"
#include "metra/congruence.hpp"
#include "metra/ext_rational.hpp"
#include "metra/extmetric.hpp"
#include "metra/limits.hpp"
#include "metra/terms.hpp"
#include "metra/verdict.hpp"

namespace metra {

/// s =[bound] t
struct MetricEquation {
  Term lhs;
  Term rhs;
  ExtRational bound;

  std::set<std::string> variables() const;
  std::string str() const;
  friend bool operator==(const MetricEquation&, const MetricEquation&) = default;
};

/// p1, ..., pn |- conclusion. With no premises this is a metric equation.
struct MetricImplication {
  std::vector<MetricEquation> premises;
  MetricEquation conclusion;

  bool is_equation() const noexcept { return premises.empty(); }
  /// Every premise relates two variables.
  bool is_basic() const;
  std::set<std::string> variables() const;
  std::string str() const;
  friend bool operator==(const MetricImplication&, const MetricImplication&) = default;
};

MetricEquation parse_equation(TokenStream& in, const Signature& sig);
/// `e`, `|- e` or `p1 , ... , pn |- e`.
MetricImplication parse_implication(TokenStream& in, const Signature& sig);
MetricImplication parse_implication(std::string_view text, const Signature& sig);

/// Expression over distance atoms d(s,t), evaluated exactly over the
/// rationals (negative intermediate values allowed).
struct Expr {
  enum class Op { Const, Atom, Add, Sub, Mul, Max, Min, Neg, Square };
  Op op = Op::Const;
  mpq_class value;
  /// lhs, rhs of an atom.
  std::vector<Term> atom;
  std::vector<Expr> args;

  static Expr constant(mpq_class v);
  static Expr distance(Term s, Term t);
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);

  std::set<std::string> variables() const;
  std::string str() const;
  friend bool operator==(const Expr&, const Expr&) = default;
};

/// lhs REL rhs, i.e. lhs - rhs compared with 0.
struct MetricInequality {
  enum class Relation { Le, Ge, Eq };
  Expr lhs;
  Relation relation = Relation::Le;
  Expr rhs;

  std::set<std::string> variables() const;
  std::string str() const;
  friend bool operator==(const MetricInequality&, const MetricInequality&) = default;
};

/// Grammar: sum (('max'|'min') sum)*; sum: product (('+'|'-') product)*;
/// product: unary ('*' unary)*; unary: '-' unary | primary ('^' '2')?;
/// primary: rational | d(s,t) | max(e,e) | min(e,e) | (e).
Expr parse_expr(TokenStream& in, const Signature& sig);
MetricInequality parse_inequality(TokenStream& in, const Signature& sig);
MetricInequality parse_inequality(std::string_view text, const Signature& sig);

struct Countermodel {
  /// Position in the list of algebras.
  std::size_t algebra = 0;
  Valuation valuation;
};

struct LogicVerdict {
  /// Failure code "countermodel"; witness = valuation values in variable
  /// name order.
  Verdict verdict;
  std::optional<Countermodel> countermodel;
  /// Valuations inspected.
  std::uint64_t valuations = 0;

  explicit operator bool() const noexcept { return verdict.ok; }
};

/// Errors: ValuationError for unbound variables, SignatureError for terms
/// outside the algebra's signature.
bool satisfies_under(const MetricAlgebra& a, const Valuation& v, const MetricEquation& e);
bool satisfies_under(const MetricAlgebra& a, const Valuation& v, const MetricImplication& phi);

/// All valuations in lexicographic order (variables sorted by name, first
/// most significant); the countermodel is the least failing one. Throws
/// ResourceError when |A|^|vars| exceeds limits.valuations.
LogicVerdict satisfies(const MetricAlgebra& a, const MetricImplication& phi, const Limits& limits = {});
LogicVerdict satisfies(const MetricAlgebra& a, const std::vector<MetricImplication>& phis, const Limits& limits = {});

/// delta |=_K e over the listed algebras.
LogicVerdict entails(const std::vector<AlgebraRef>& k, const std::vector<MetricEquation>& delta,
                     const MetricEquation& e, const Limits& limits = {});

/// Throws UnsupportedInput when an atom distance is infinite.
mpq_class evaluate_expr(const MetricAlgebra& a, const Valuation& v, const Expr& e);
bool evaluate_inequality(const MetricAlgebra& a, const Valuation& v, const MetricInequality& q);
LogicVerdict satisfies_inequality(const MetricAlgebra& a, const MetricInequality& q, const Limits& limits = {});

/// Generators, relations between terms over them, class mode and the depth of
/// the term universe.
struct Presentation {
  Signature signature;
  std::vector<std::string> variables;
  std::vector<MetricEquation> relations;
  Mode mode;
  std::size_t depth = 0;

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

/// Depth-bounded free algebra: the term universe with the generated
/// pseudometric, and its metric identification. Operations are partial (an
/// application is defined when the result stays within depth).
struct FreeAlgebra {
  Presentation presentation;
  std::vector<Term> terms;
  DistMatrix distances;
  Identification quotient;
  /// Generator i maps to class unit[i].
  std::vector<std::size_t> unit;
  std::size_t passes = 0;
  std::size_t decreases = 0;

  /// DomainError if `t` is outside the universe.
  std::size_t index_of(const Term& t) const;
  ExtRational distance(const Term& s, const Term& t) const;
};

/// Throws DomainError on duplicate generators, relations using unknown
/// variables or exceeding the depth, and ResourceError from term enumeration
/// or the fixpoint.
FreeAlgebra free_algebra(const Presentation& p, const Limits& limits = {});

/// For a valuation of the generators satisfying the relations in `a`, the
/// evaluation map on terms must factor through the free algebra as a
/// non-expansive map. Codes "relations" (v does not satisfy them) and
/// "nonexpansive" (witness = term indices).
Verdict check_factorization(const FreeAlgebra& f, const MetricAlgebra& a, const Valuation& v);

/// Runs check_factorization for every relation-satisfying valuation of every
/// sample. Samples must belong to the presentation's class (DomainError).
Verdict check_soundness_of_free(const FreeAlgebra& f, const std::vector<AlgebraRef>& samples,
                                const Limits& limits = {});

struct CompactnessResult {
  /// Failure code "exhausted".
  Verdict verdict;
  /// Indices into delta, ascending.
  std::optional<std::vector<std::size_t>> subset;
  std::uint64_t subsets_checked = 0;
};

/// Smallest subset of delta (by size, then lexicographically) entailing
/// lhs =[eps_prime] rhs over k. Requires eps_prime >= e.bound.
CompactnessResult weak_compactness_search(const std::vector<AlgebraRef>& k, const std::vector<MetricEquation>& delta,
                                          const MetricEquation& e, const ExtRational& eps_prime,
                                          const Limits& limits = {});

/// Premise bounds raised by delta, conclusion bound replaced by eps_prime.
MetricImplication relax(const MetricImplication& phi, const ExtRational& delta, const ExtRational& eps_prime);

struct EquicontinuityResult {
  /// Failure code "equicontinuity".
  Verdict verdict;
  std::optional<ExtRational> delta;
};

/// Tries the grid in descending order and returns the first delta for which
/// k satisfies relax(phi, delta, eps_prime). Requires eps_prime > the
/// conclusion bound and a nonempty grid of positive values.
EquicontinuityResult equicontinuity_check(const std::vector<AlgebraRef>& k, const MetricImplication& phi,
                                          const ExtRational& eps_prime, std::vector<ExtRational> grid,
                                          const Limits& limits = {});

/// Codes "congruence-schema" (message names the symbol) and "relaxation"
/// (witness = member index, probe index). A probe is only applied to members
/// whose conclusion bound is below it.
Verdict is_continuous_family(const std::vector<MetricImplication>& family, const Signature& sig,
                             const std::vector<ExtRational>& probes);

/// x1 =[0] y1, ..., xn =[0] yn |- f(x1..xn) =[0] f(y1..yn)
MetricImplication congruence_schema(const std::string& symbol, std::size_t arity);

struct ClosureCheck {
  /// "product", "subalgebra", "quotient" or "reflexive-quotient".
  std::string construction;
  /// Corpus positions of the algebras the construction started from.
  std::vector<std::size_t> sources;
  bool ok = true;
  /// Failure allowed by the theory (non-reflexive quotients of implication
  /// classes).
  bool expected = false;
  std::string note;
};

struct ClosureReport {
  /// Corpus positions satisfying every formula.
  std::vector<std::size_t> members;
  std::vector<ClosureCheck> checks;

  std::size_t unexpected_failures() const;
  std::size_t expected_failures() const;
  bool ok() const { return unexpected_failures() == 0; }
};

/// Closure of the class defined by `e` under products of pairs, one-generator
/// subalgebras and quotients by single-constraint congruences of the corpus
/// members. Quotients are checked for equation-only sets; for basic
/// implications reflexive quotients must preserve satisfaction and failures
/// on the others are recorded as expected.
ClosureReport closure_suite(const std::vector<MetricImplication>& e, const std::vector<AlgebraRef>& corpus,
                            const Limits& limits = {});

}  // namespace metra
