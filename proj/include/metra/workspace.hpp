#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metra/algebra.hpp"
#include "metra/extmetric.hpp"
#include "metra/filters.hpp"
#include "metra/limits.hpp"
#include "metra/logic.hpp"
#include "metra/terms.hpp"

namespace metra {

struct NamedSignature {
  std::string name;
  Signature signature;
  friend bool operator==(const NamedSignature&, const NamedSignature&) = default;
};

struct NamedAlgebra {
  std::string name;
  /// Empty for the empty signature.
  std::string signature;
  AlgebraRef algebra;
  friend bool operator==(const NamedAlgebra& a, const NamedAlgebra& b) {
    return a.name == b.name && a.signature == b.signature && *a.algebra == *b.algebra;
  }
};

struct NamedSpace {
  std::string name;
  FiniteMetricSpace space;
  friend bool operator==(const NamedSpace&, const NamedSpace&) = default;
};

struct NamedCongruence {
  std::string name;
  std::string algebra;
  DistMatrix matrix;
  friend bool operator==(const NamedCongruence&, const NamedCongruence&) = default;
};

/// Carrier map between two declared algebras; validated when used.
struct NamedMap {
  std::string name;
  std::string source;
  std::string target;
  std::vector<std::size_t> images;
  friend bool operator==(const NamedMap&, const NamedMap&) = default;
};

struct NamedFilter {
  std::string name;
  FiniteFilter filter;
  friend bool operator==(const NamedFilter&, const NamedFilter&) = default;
};

struct NamedFormulas {
  std::string name;
  std::string signature;
  std::vector<MetricImplication> implications;
  std::vector<MetricInequality> inequalities;
  friend bool operator==(const NamedFormulas&, const NamedFormulas&) = default;
};

struct NamedPresentation {
  std::string name;
  std::string signature;
  Presentation presentation;
  friend bool operator==(const NamedPresentation&, const NamedPresentation&) = default;
};

/// A parsed command. Arguments are stored by role; `str()` gives the
/// canonical concrete syntax.
struct Command {
  std::string verb;
  std::vector<std::string> names;
  /// Bracketed name lists or braced element sets, in order of appearance.
  std::vector<std::vector<std::string>> lists;
  std::vector<MetricImplication> formulas;
  std::vector<ExtRational> numbers;
  std::vector<std::vector<ClosedForm>> forms;
  /// Signature used for the inline formulas.
  std::string signature;

  std::string str() const;
  friend bool operator==(const Command&, const Command&) = default;
};

struct Workspace {
  std::vector<NamedSignature> signatures;
  std::vector<NamedAlgebra> algebras;
  std::vector<NamedSpace> spaces;
  std::vector<NamedCongruence> congruences;
  std::vector<NamedMap> maps;
  std::vector<NamedFilter> filters;
  std::vector<NamedFormulas> formulas;
  std::vector<NamedPresentation> presentations;
  std::vector<Command> commands;
  Limits limits;

  /// Lookups throw ReferenceError for unknown names. The empty name denotes
  /// the empty signature.
  const Signature& signature(const std::string& name) const;
  const NamedAlgebra& algebra(const std::string& name) const;
  const NamedCongruence& congruence(const std::string& name) const;
  const NamedMap& map(const std::string& name) const;
  const NamedFilter& filter(const std::string& name) const;
  const NamedFormulas& formula_set(const std::string& name) const;
  const NamedPresentation& presentation(const std::string& name) const;
  /// A declared space, or the metric space of a declared algebra.
  FiniteMetricSpace space(const std::string& name) const;

  bool has_algebra(const std::string& name) const;
  bool has_space(const std::string& name) const;

  friend bool operator==(const Workspace&, const Workspace&) = default;
};

/// Parses workspace text. Declarations must precede their uses. `include`
/// paths are resolved against `base_dir`. Errors: ParseError (syntax, with
/// position), ReferenceError (unknown or duplicate names, with position in the
/// message), and the validation errors of the declared objects.
Workspace parse_workspace(std::string_view text, const std::filesystem::path& base_dir = ".");
Workspace load_workspace(const std::filesystem::path& file);

/// Parses one command against an existing workspace.
Command parse_command(std::string_view text, const Workspace& ws);

/// Canonical DSL text; parse_workspace(serialize_workspace(ws)) == ws.
std::string serialize_workspace(const Workspace& ws);

/// Sets limit fields from "key=value,key=value". Throws DomainError on unknown
/// keys or malformed values.
void apply_limit_overrides(Limits& limits, std::string_view spec);

}  // namespace metra
