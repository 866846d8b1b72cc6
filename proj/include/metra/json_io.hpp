#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "metra/algebra.hpp"
#include "metra/extmetric.hpp"
#include "metra/verdict.hpp"
#include "metra/workspace.hpp"

namespace metra {

/// Object keys are kept sorted, so dumps are deterministic.
using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Rationals are canonical strings: "p/q", "n" or "inf".
Json to_json(const ExtRational& x);
ExtRational rational_from_json(const Json& j);

/// Row-major array of rows.
Json to_json(const DistMatrix& m);
DistMatrix matrix_from_json(const Json& j);

/// {"carrier", "metric"} for a labelled matrix.
Json labelled_matrix(const std::vector<std::string>& labels, const DistMatrix& m);

Json to_json(const FiniteMetricSpace& s);
/// {"signature", "carrier", "metric", "operations"}; an operation table is a
/// label for arity 0 and otherwise an array nested once per argument.
Json to_json(const MetricAlgebra& a);
Json to_json(const Verdict& v);
Json to_json(const Limits& l);

/// {"schema": 1, ...} with one array per declaration kind in declaration
/// order; formulas and commands are stored as concrete syntax.
Json workspace_to_json(const Workspace& ws);
/// Inverse of workspace_to_json. Throws DomainError on malformed documents or
/// a schema mismatch, and the usual validation errors.
Workspace workspace_from_json(const Json& j);

}  // namespace metra
