#include "metra/json_io.hpp"

#include <functional>

#include "metra/congruence.hpp"
#include "metra/error.hpp"

namespace metra {

namespace {

std::size_t label_index(const std::vector<std::string>& labels, const std::string& name) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == name) return i;
  throw DomainError("unknown element '" + name + "'");
}

Json table_json(const MetricAlgebra& a, const OpTable& t) {
  const auto& labels = a.carrier();
  if (t.arity == 0) return labels[t.values[0]];
  std::size_t next = 0;
  std::function<Json(std::size_t)> level = [&](std::size_t depth) {
    Json out = Json::array();
    for (std::size_t i = 0; i < labels.size(); ++i)
      out.push_back(depth + 1 == t.arity ? Json(labels[t.values[next++]]) : level(depth + 1));
    return out;
  };
  return level(0);
}

OpTable table_from_json(const Json& j, std::size_t arity, const std::vector<std::string>& labels) {
  OpTable t{arity, {}};
  if (arity == 0) {
    t.values.push_back(label_index(labels, j.get<std::string>()));
    return t;
  }
  std::function<void(const Json&, std::size_t)> level = [&](const Json& node, std::size_t depth) {
    if (!node.is_array() || node.size() != labels.size()) throw DomainError("operation table has the wrong shape");
    for (const auto& child : node) {
      if (depth + 1 == arity)
        t.values.push_back(label_index(labels, child.get<std::string>()));
      else
        level(child, depth + 1);
    }
  };
  level(j, 0);
  return t;
}

Json mode_json(const Mode& m) {
  Json out;
  out["kind"] = m.kind == Mode::Kind::Metric ? "M" : m.kind == Mode::Kind::Quantitative ? "Q" : "LIP";
  Json constants = Json::object();
  for (const auto& [sym, k] : m.constants) constants[sym] = to_json(k);
  out["constants"] = constants;
  return out;
}

Mode mode_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "M") return Mode::metric();
  if (kind == "Q") return Mode::quantitative();
  if (kind != "LIP") throw DomainError("unknown mode '" + kind + "'");
  std::map<std::string, ExtRational> constants;
  for (const auto& [sym, k] : j.at("constants").items()) constants[sym] = rational_from_json(k);
  return Mode::lipschitz(std::move(constants));
}

std::vector<std::string> strings(const Json& j) { return j.get<std::vector<std::string>>(); }

Workspace from_json_unchecked(const Json& j) {
  if (j.at("schema").get<int>() != kSchemaVersion) throw DomainError("unsupported schema version");
  Workspace ws;
  for (const auto& [key, value] : j.at("limits").items()) apply_limit_overrides(ws.limits, key + "=" + std::to_string(value.get<std::uint64_t>()));

  for (const auto& s : j.at("signatures")) {
    NamedSignature ns{s.at("name").get<std::string>(), {}};
    for (const auto& [sym, arity] : s.at("symbols").items()) ns.signature.add(sym, arity.get<std::size_t>());
    ws.signatures.push_back(std::move(ns));
  }
  for (const auto& a : j.at("algebras")) {
    std::string sig_name = a.at("signature").get<std::string>();
    const Signature& sig = ws.signature(sig_name);
    auto carrier = strings(a.at("carrier"));
    std::map<std::string, OpTable> ops;
    for (const auto& [sym, table] : a.at("operations").items()) {
      if (!sig.contains(sym)) throw SignatureError("'" + sym + "' is not in signature '" + sig_name + "'");
      ops.emplace(sym, table_from_json(table, sig.arity(sym), carrier));
    }
    ws.algebras.push_back({a.at("name").get<std::string>(), sig_name,
                           make_algebra(MetricAlgebra(sig, carrier, matrix_from_json(a.at("metric")), ops))});
  }
  for (const auto& s : j.at("spaces"))
    ws.spaces.push_back({s.at("name").get<std::string>(),
                         FiniteMetricSpace(strings(s.at("carrier")), matrix_from_json(s.at("metric")))});
  for (const auto& t : j.at("congruences")) {
    NamedCongruence c{t.at("name").get<std::string>(), t.at("algebra").get<std::string>(),
                      matrix_from_json(t.at("matrix"))};
    Congruence::make(ws.algebra(c.algebra).algebra, c.matrix);
    ws.congruences.push_back(std::move(c));
  }
  for (const auto& m : j.at("maps")) {
    NamedMap nm{m.at("name").get<std::string>(), m.at("source").get<std::string>(), m.at("target").get<std::string>(),
                {}};
    const auto& from = ws.algebra(nm.source).algebra->carrier();
    const auto& to = ws.algebra(nm.target).algebra->carrier();
    const Json& images = m.at("images");
    for (const auto& x : from) nm.images.push_back(label_index(to, images.at(x).get<std::string>()));
    ws.maps.push_back(std::move(nm));
  }
  for (const auto& f : j.at("filters")) {
    auto index = strings(f.at("index"));
    std::vector<std::size_t> core;
    for (const auto& c : strings(f.at("core"))) core.push_back(label_index(index, c));
    ws.filters.push_back({f.at("name").get<std::string>(), FiniteFilter(index, core)});
  }
  for (const auto& e : j.at("axioms")) {
    NamedFormulas nf{e.at("name").get<std::string>(), e.at("signature").get<std::string>(), {}, {}};
    const Signature& sig = ws.signature(nf.signature);
    for (const auto& s : strings(e.at("implications"))) nf.implications.push_back(parse_implication(s, sig));
    for (const auto& s : strings(e.at("inequalities"))) nf.inequalities.push_back(parse_inequality(s, sig));
    ws.formulas.push_back(std::move(nf));
  }
  for (const auto& p : j.at("presentations")) {
    NamedPresentation np{p.at("name").get<std::string>(), p.at("signature").get<std::string>(), {}};
    Presentation& pr = np.presentation;
    pr.signature = ws.signature(np.signature);
    pr.variables = strings(p.at("variables"));
    pr.mode = mode_from_json(p.at("mode"));
    pr.depth = p.at("depth").get<std::size_t>();
    for (const auto& r : strings(p.at("relations"))) {
      TokenStream in(r);
      pr.relations.push_back(parse_equation(in, pr.signature));
      if (!in.at_end()) in.fail("trailing input after relation");
    }
    ws.presentations.push_back(std::move(np));
  }
  for (const auto& c : strings(j.at("commands"))) ws.commands.push_back(parse_command(c, ws));
  return ws;
}

}  // namespace

Json to_json(const ExtRational& x) { return x.str(); }

ExtRational rational_from_json(const Json& j) {
  if (j.is_number_unsigned()) return ExtRational(static_cast<std::int64_t>(j.get<std::uint64_t>()));
  return ExtRational::parse(j.get<std::string>());
}

Json to_json(const DistMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) row.push_back(m(i, k).str());
    out.push_back(row);
  }
  return out;
}

DistMatrix matrix_from_json(const Json& j) {
  std::vector<std::vector<ExtRational>> rows;
  for (const auto& r : j) {
    std::vector<ExtRational> row;
    for (const auto& x : r) row.push_back(rational_from_json(x));
    rows.push_back(std::move(row));
  }
  return DistMatrix::from_rows(rows);
}

Json labelled_matrix(const std::vector<std::string>& labels, const DistMatrix& m) {
  return {{"carrier", labels}, {"metric", to_json(m)}};
}

Json to_json(const FiniteMetricSpace& s) { return labelled_matrix(s.labels(), s.dist()); }

Json to_json(const MetricAlgebra& a) {
  Json out = labelled_matrix(a.carrier(), a.metric());
  Json sig = Json::object();
  for (const auto& [sym, arity] : a.signature().symbols()) sig[sym] = arity;
  out["signature"] = sig;
  Json ops = Json::object();
  for (const auto& [sym, table] : a.structure().ops()) ops[sym] = table_json(a, table);
  out["operations"] = ops;
  return out;
}

Json to_json(const Verdict& v) {
  Json out{{"ok", v.ok}};
  if (!v.ok) {
    out["code"] = v.code;
    out["message"] = v.message;
    out["witness"] = v.witness;
  }
  return out;
}

Json to_json(const Limits& l) {
  return {{"valuations", l.valuations}, {"sections", l.sections},
          {"correspondences", l.correspondences}, {"decreases", l.decreases},
          {"terms", l.terms}, {"isomorphism_nodes", l.isomorphism_nodes},
          {"subsets", l.subsets}};
}

Json workspace_to_json(const Workspace& ws) {
  Json out;
  out["schema"] = kSchemaVersion;
  out["limits"] = to_json(ws.limits);
  out["signatures"] = Json::array();
  for (const auto& s : ws.signatures) {
    Json symbols = Json::object();
    for (const auto& [sym, arity] : s.signature.symbols()) symbols[sym] = arity;
    out["signatures"].push_back({{"name", s.name}, {"symbols", symbols}});
  }
  out["algebras"] = Json::array();
  for (const auto& a : ws.algebras) {
    Json j = to_json(*a.algebra);
    j.erase("signature");
    j["name"] = a.name;
    j["signature"] = a.signature;
    out["algebras"].push_back(j);
  }
  out["spaces"] = Json::array();
  for (const auto& s : ws.spaces) {
    Json j = to_json(s.space);
    j["name"] = s.name;
    out["spaces"].push_back(j);
  }
  out["congruences"] = Json::array();
  for (const auto& t : ws.congruences)
    out["congruences"].push_back({{"name", t.name}, {"algebra", t.algebra}, {"matrix", to_json(t.matrix)}});
  out["maps"] = Json::array();
  for (const auto& m : ws.maps) {
    const auto& from = ws.algebra(m.source).algebra->carrier();
    const auto& to = ws.algebra(m.target).algebra->carrier();
    Json images = Json::object();
    for (std::size_t i = 0; i < from.size(); ++i) images[from[i]] = to[m.images[i]];
    out["maps"].push_back({{"name", m.name}, {"source", m.source}, {"target", m.target}, {"images", images}});
  }
  out["filters"] = Json::array();
  for (const auto& f : ws.filters) {
    std::vector<std::string> core;
    for (std::size_t i : f.filter.core()) core.push_back(f.filter.index()[i]);
    out["filters"].push_back({{"name", f.name}, {"index", f.filter.index()}, {"core", core}});
  }
  out["axioms"] = Json::array();
  for (const auto& e : ws.formulas) {
    std::vector<std::string> imps, ineqs;
    for (const auto& phi : e.implications) imps.push_back(phi.str());
    for (const auto& q : e.inequalities) ineqs.push_back(q.str());
    out["axioms"].push_back(
        {{"name", e.name}, {"signature", e.signature}, {"implications", imps}, {"inequalities", ineqs}});
  }
  out["presentations"] = Json::array();
  for (const auto& p : ws.presentations) {
    std::vector<std::string> rels;
    for (const auto& r : p.presentation.relations) rels.push_back(r.str());
    out["presentations"].push_back({{"name", p.name},
                                    {"signature", p.signature},
                                    {"variables", p.presentation.variables},
                                    {"mode", mode_json(p.presentation.mode)},
                                    {"depth", p.presentation.depth},
                                    {"relations", rels}});
  }
  out["commands"] = Json::array();
  for (const auto& c : ws.commands) out["commands"].push_back(c.str());
  return out;
}

Workspace workspace_from_json(const Json& j) {
  try {
    return from_json_unchecked(j);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed workspace document: ") + e.what());
  }
}

}  // namespace metra
