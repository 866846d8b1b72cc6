#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metra/limits.hpp"

namespace metra {

class TokenStream;

/// Finite map from operation symbol to arity.
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<std::pair<const std::string, std::size_t>> symbols);

  /// Throws SignatureError on a duplicate name.
  void add(const std::string& name, std::size_t arity);

  bool contains(const std::string& name) const { return symbols_.count(name) != 0; }
  /// Throws SignatureError for an unknown symbol.
  std::size_t arity(const std::string& name) const;
  const std::map<std::string, std::size_t>& symbols() const noexcept { return symbols_; }
  bool empty() const noexcept { return symbols_.empty(); }
  bool has_constants() const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::map<std::string, std::size_t> symbols_;
};

/// Immutable Σ-term: a variable or a symbol applied to subterms. Copies share
/// structure.
class Term {
 public:
  static Term var(std::string name);
  static Term apply(std::string symbol, std::vector<Term> args = {});

  bool is_variable() const noexcept;
  /// Variable name or operation symbol.
  const std::string& name() const noexcept;
  std::span<const Term> args() const noexcept;
  /// Variables and constants have height 0.
  std::size_t height() const noexcept;
  std::set<std::string> variables() const;

  /// Concrete syntax. With `explicit_constants`, nullary applications print as
  /// `c()` so they can be re-read without a signature.
  std::string str(bool explicit_constants = false) const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Assignment of carrier element ids to variable names.
using Valuation = std::map<std::string, std::size_t>;

/// Throws SignatureError if some application uses an unknown symbol or the
/// wrong number of arguments.
void check_term(const Term& t, const Signature& sig);

/// Parses `name`, `f(t1,...,tn)` or a constant. Under a signature, a bare
/// identifier naming a nullary symbol is a constant and arities are checked
/// (SignatureError, with position). Without one (`sig == nullptr`), bare
/// identifiers are variables and `c()` is a constant.
Term parse_term(TokenStream& in, const Signature* sig);
Term parse_term(std::string_view text, const Signature& sig);

/// All terms of height <= depth over `vars`: the variables (in the given
/// order), then for each symbol in name order the applications to argument
/// tuples drawn lexicographically from the depth-1 list.
/// Throws ResourceError if the result would exceed limits.terms.
std::vector<Term> enumerate_terms(const Signature& sig, const std::vector<std::string>& vars,
                                  std::size_t depth, const Limits& limits = {});

/// Total operation table on an n-element carrier, indexed in mixed radix with
/// the first argument most significant.
struct OpTable {
  std::size_t arity = 0;
  std::vector<std::size_t> values;

  friend bool operator==(const OpTable&, const OpTable&) = default;
};

/// Σ-algebra on the carrier {0, ..., size-1}.
class SigmaAlgebra {
 public:
  SigmaAlgebra() = default;
  /// Checks that every symbol has a table of the right shape (ShapeError /
  /// SignatureError). Entries are not range-checked here.
  SigmaAlgebra(Signature sig, std::size_t size, std::map<std::string, OpTable> ops);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t size() const noexcept { return size_; }
  const std::map<std::string, OpTable>& ops() const noexcept { return ops_; }
  const OpTable& table(const std::string& symbol) const;

  std::size_t index(std::span<const std::size_t> args) const;
  std::vector<std::size_t> args_of(std::size_t index, std::size_t arity) const;
  std::size_t tuple_count(std::size_t arity) const;
  std::size_t apply(const std::string& symbol, std::span<const std::size_t> args) const;

  friend bool operator==(const SigmaAlgebra&, const SigmaAlgebra&) = default;

 private:
  Signature sig_;
  std::size_t size_ = 0;
  std::map<std::string, OpTable> ops_;
};

/// Interpretation of `t` under `v`.
/// Errors: ValuationError for unbound or out-of-range variables,
/// SignatureError for unknown symbols or arity mismatches.
std::size_t evaluate(const Term& t, const SigmaAlgebra& a, const Valuation& v);

/// Simultaneous substitution. Throws ValuationError if a variable of `t` is
/// not mapped.
Term substitute(const Term& t, const std::map<std::string, Term>& s);

}  // namespace metra
