#include "metra/commands.hpp"

#include <sstream>

#include "metra/congruence.hpp"
#include "metra/error.hpp"

namespace metra {

namespace {

Json map_json(const std::vector<std::string>& from, const std::vector<std::string>& to,
              const std::vector<std::size_t>& f) {
  Json out = Json::object();
  for (std::size_t i = 0; i < f.size(); ++i) out[from[i]] = to[f[i]];
  return out;
}

Json valuation_json(const MetricAlgebra& a, const Valuation& v) {
  Json out = Json::object();
  for (const auto& [x, e] : v) out[x] = a.carrier()[e];
  return out;
}

std::vector<std::size_t> indices(const std::vector<std::string>& labels, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    auto it = std::find(labels.begin(), labels.end(), n);
    if (it == labels.end()) throw DomainError("unknown element '" + n + "'");
    out.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  return out;
}

std::vector<AlgebraRef> algebras(const Workspace& ws, const std::vector<std::string>& names) {
  std::vector<AlgebraRef> out;
  for (const auto& n : names) out.push_back(ws.algebra(n).algebra);
  return out;
}

Congruence congruence(const Workspace& ws, const std::string& name) {
  const auto& t = ws.congruence(name);
  return Congruence::make(ws.algebra(t.algebra).algebra, t.matrix);
}

void set_verdict(CommandResult& r, const Verdict& v, const char* key = "verdict") {
  r.result[key] = to_json(v);
  r.status = v.ok ? "ok" : "fail";
}

/// Finds and re-verifies an isomorphism; the certificate is the map.
void certify_isomorphism(CommandResult& r, const MetricAlgebra& a, const MetricAlgebra& b, const Limits& limits) {
  auto iso = find_isomorphism(a, b, limits);
  if (!iso) {
    set_verdict(r, Verdict::fail("isomorphism", "no isomorphism found"), "certificate");
    r.result["isomorphism"] = nullptr;
    return;
  }
  r.result["isomorphism"] = map_json(a.carrier(), b.carrier(), *iso);
  set_verdict(r, is_isomorphism(*iso, a, b), "certificate");
}

void validate(const Workspace& ws, const std::string& name, CommandResult& r) {
  for (const auto& a : ws.algebras)
    if (a.name == name) {
      r.result["kind"] = "algebra";
      r.result["quantitative"] = is_quantitative(*a.algebra).ok;
      return set_verdict(r, validate_algebra(*a.algebra));
    }
  for (const auto& s : ws.spaces)
    if (s.name == name) {
      r.result["kind"] = "space";
      r.result["diameter"] = to_json(diameter(s.space));
      return set_verdict(r, check_metric(s.space.dist()));
    }
  for (const auto& t : ws.congruences)
    if (t.name == name) {
      r.result["kind"] = "congruence";
      return set_verdict(r, is_congruential(*ws.algebra(t.algebra).algebra, t.matrix));
    }
  for (const auto& m : ws.maps)
    if (m.name == name) {
      r.result["kind"] = "map";
      const auto& src = *ws.algebra(m.source).algebra;
      const auto& dst = *ws.algebra(m.target).algebra;
      Verdict v = is_homomorphism(m.images, src, dst);
      if (v.ok) {
        auto h = Homomorphism::make(ws.algebra(m.source).algebra, ws.algebra(m.target).algebra, m.images);
        r.result["surjective"] = h.is_surjective();
        r.result["injective"] = h.is_injective();
      }
      return set_verdict(r, v);
    }
  for (const auto& f : ws.filters)
    if (f.name == name) {
      r.result["kind"] = "filter";
      r.result["ultrafilter"] = f.filter.is_ultrafilter();
      r.result["members"] = f.filter.members().size();
      return set_verdict(r, Verdict::pass());
    }
  for (const auto& e : ws.formulas)
    if (e.name == name) {
      r.result["kind"] = "axioms";
      bool basic = true, equational = true;
      for (const auto& phi : e.implications) {
        basic = basic && phi.is_basic();
        equational = equational && phi.is_equation();
      }
      r.result["basic"] = basic;
      r.result["equational"] = equational && e.inequalities.empty();
      return set_verdict(r, Verdict::pass());
    }
  for (const auto& p : ws.presentations)
    if (p.name == name) {
      r.result["kind"] = "presentation";
      r.result["mode"] = p.presentation.mode.str();
      return set_verdict(r, Verdict::pass());
    }
  ws.signature(name);
  r.result["kind"] = "signature";
  set_verdict(r, Verdict::pass());
}

void dispatch(const Workspace& ws, const Command& c, CommandResult& r) {
  const Limits& limits = ws.limits;
  const std::string& v = c.verb;
  if (v == "validate") return validate(ws, c.names[0], r);

  if (v == "quotient") {
    auto q = quotient(congruence(ws, c.names[1]));
    const auto& base = ws.algebra(c.names[0]).algebra->carrier();
    r.result["quotient"] = to_json(*q.algebra);
    r.result["projection"] = map_json(base, q.algebra->carrier(), q.projection.map());
    auto refl = is_reflexive_quotient(q.projection, limits);
    r.result["reflexive"] = to_json(refl.verdict);
    if (refl.verdict.ok) r.result["section"] = map_json(q.algebra->carrier(), base, refl.section);
    return set_verdict(r, Verdict::pass());
  }
  if (v == "product") {
    r.result["product"] = to_json(*product(algebras(ws, c.names)).algebra);
    return set_verdict(r, Verdict::pass());
  }
  if (v == "subalgebra") {
    const auto& a = ws.algebra(c.names[0]).algebra;
    auto seed = indices(a->carrier(), c.lists[0]);
    auto sub = generate_subalgebra(a, seed);
    r.result["subalgebra"] = to_json(*sub.algebra);
    return set_verdict(r, Verdict::pass());
  }
  if (v == "kernel") {
    const auto& m = ws.map(c.names[0]);
    auto h = Homomorphism::make(ws.algebra(m.source).algebra, ws.algebra(m.target).algebra, m.images);
    auto k = kernel(h);
    auto img = image(h);
    auto q = quotient(k);
    r.result["kernel"] = labelled_matrix(h.source()->carrier(), k.matrix());
    r.result["image"] = to_json(*img.algebra);
    r.result["quotient"] = to_json(*q.algebra);
    return certify_isomorphism(r, *q.algebra, *img.algebra, limits);
  }
  if (v == "meet" || v == "join" || v == "compose" || v == "permutable") {
    auto t1 = congruence(ws, c.names[0]);
    auto t2 = congruence(ws, c.names[1]);
    const auto& labels = t1.base()->carrier();
    std::vector<Congruence> both{t1, t2};
    if (v == "meet") {
      r.result["meet"] = labelled_matrix(labels, meet(both).matrix());
    } else if (v == "join") {
      auto j = join_detailed(both);
      r.result["join"] = labelled_matrix(labels, j.join.matrix());
      r.result["forcing_rounds"] = j.forcing_rounds;
    } else if (v == "compose") {
      r.result["composition"] = labelled_matrix(labels, compose(t1, t2));
    } else {
      r.result["left"] = labelled_matrix(labels, compose(t1, t2));
      r.result["right"] = labelled_matrix(labels, compose(t2, t1));
      bool p = are_permutable(t1, t2);
      r.result["permutable"] = p;
      return set_verdict(r, p ? Verdict::pass() : Verdict::fail("permutable", "compositions differ"));
    }
    return set_verdict(r, Verdict::pass());
  }
  if (v == "decompose") {
    const auto& a = ws.algebra(c.names[0]).algebra;
    auto d = decompose_product(congruence(ws, c.names[1]), congruence(ws, c.names[2]));
    set_verdict(r, d.verdict);
    if (!d.verdict.ok) return;
    r.result["left"] = to_json(*d.left->algebra);
    r.result["right"] = to_json(*d.right->algebra);
    r.result["product"] = to_json(*d.product->algebra);
    r.result["isomorphism"] = map_json(a->carrier(), d.product->algebra->carrier(), d.map);
    return set_verdict(r, is_isomorphism(d.map, *a, *d.product->algebra), "certificate");
  }
  if (v == "free") {
    auto f = free_algebra(ws.presentation(c.names[0]).presentation, limits);
    Json classes = Json::array();
    for (const auto& members : f.quotient.map.classes()) {
      Json terms = Json::array();
      for (std::size_t t : members) terms.push_back(f.terms[t].str());
      classes.push_back(terms);
    }
    r.result["classes"] = classes;
    r.result["metric"] = to_json(f.quotient.space.dist());
    Json unit = Json::object();
    for (std::size_t i = 0; i < f.unit.size(); ++i) unit[f.presentation.variables[i]] = f.unit[i];
    r.result["generators"] = unit;
    r.result["terms"] = f.terms.size();
    r.result["passes"] = f.passes;
    r.result["decreases"] = f.decreases;
    return set_verdict(r, Verdict::pass());
  }
  if (v == "sat") {
    const auto& a = *ws.algebra(c.names[0]).algebra;
    const auto& e = ws.formula_set(c.names[1]);
    Json items = Json::array();
    bool all = true;
    auto record = [&](const std::string& text, const LogicVerdict& lv) {
      Json item{{"formula", text}, {"verdict", to_json(lv.verdict)}};
      if (lv.countermodel) item["countermodel"] = valuation_json(a, lv.countermodel->valuation);
      items.push_back(item);
      all = all && lv.verdict.ok;
    };
    for (const auto& phi : e.implications) record(phi.str(), satisfies(a, phi, limits));
    for (const auto& q : e.inequalities) record(q.str(), satisfies_inequality(a, q, limits));
    r.result["formulas"] = items;
    return set_verdict(r, all ? Verdict::pass() : Verdict::fail("countermodel", "some formula fails"));
  }
  if (v == "entails") {
    auto k = algebras(ws, c.lists[0]);
    const auto& phi = c.formulas[0];
    auto lv = entails(k, phi.premises, phi.conclusion, limits);
    if (lv.countermodel) {
      const auto& cm = *lv.countermodel;
      r.result["countermodel"] = {{"algebra", c.lists[0][cm.algebra]},
                                  {"valuation", valuation_json(*k[cm.algebra], cm.valuation)}};
    }
    r.result["valuations"] = lv.valuations;
    return set_verdict(r, lv.verdict);
  }
  if (v == "hausdorff") {
    auto space = ws.space(c.names[0]);
    auto a = indices(space.labels(), c.lists[0]);
    auto b = indices(space.labels(), c.lists[1]);
    r.result["distance"] = to_json(hausdorff_distance(a, b, space));
    return set_verdict(r, Verdict::pass());
  }
  if (v == "gh") {
    r.result["distance"] = to_json(gromov_hausdorff(ws.space(c.names[0]), ws.space(c.names[1]), limits));
    return set_verdict(r, Verdict::pass());
  }
  if (v == "redprod") {
    auto factors = algebras(ws, c.lists[0]);
    std::optional<FiniteFilter> filter;
    if (c.names.empty()) {
      std::vector<std::string> index;
      for (std::size_t i = 1; i <= factors.size(); ++i) index.push_back(std::to_string(i));
      auto k = c.numbers[0].to_mpq().get_num().get_ui();
      filter = FiniteFilter::principal(index, k - 1);
    } else {
      filter = ws.filter(c.names[0]).filter;
    }
    auto rp = reduced_product(factors, *filter);
    set_verdict(r, rp.verdict);
    if (!rp.quotient) return;
    r.result["algebra"] = to_json(*rp.quotient->algebra);
    std::vector<std::string> core;
    std::vector<AlgebraRef> core_factors;
    for (std::size_t i : filter->core()) {
      core.push_back(c.lists[0][i]);
      core_factors.push_back(factors[i]);
    }
    r.result["core"] = core;
    AlgebraRef target = core_factors.size() == 1 ? core_factors[0] : product(core_factors).algebra;
    return certify_isomorphism(r, *rp.quotient->algebra, *target, limits);
  }
  if (v == "limitmetric") {
    auto lim = pointwise_limit_closed(c.forms);
    set_verdict(r, lim.verdict);
    if (!lim.verdict.ok) return;
    r.result["limit"] = labelled_matrix(c.lists[0], lim.matrix);
    if (!c.names.empty())
      set_verdict(r, is_congruential(*ws.algebra(c.names[0]).algebra, lim.matrix), "congruential");
    return;
  }
  if (v == "equicont") {
    std::vector<ExtRational> grid(c.numbers.begin() + 1, c.numbers.end());
    auto res = equicontinuity_check(algebras(ws, c.lists[0]), c.formulas[0], c.numbers[0], grid, limits);
    r.result["delta"] = res.delta ? to_json(*res.delta) : Json(nullptr);
    return set_verdict(r, res.verdict);
  }
  if (v == "closure") {
    const auto& e = ws.formula_set(c.names[0]);
    if (!e.inequalities.empty()) throw UnsupportedInput("closure suites take implications only");
    auto report = closure_suite(e.implications, algebras(ws, c.lists[0]), limits);
    std::vector<std::string> members;
    for (std::size_t i : report.members) members.push_back(c.lists[0][i]);
    r.result["members"] = members;
    r.result["checks"] = report.checks.size();
    r.result["unexpected_failures"] = report.unexpected_failures();
    r.result["expected_failures"] = report.expected_failures();
    Json failures = Json::array();
    for (const auto& check : report.checks) {
      if (check.ok) continue;
      std::vector<std::string> sources;
      for (std::size_t i : check.sources) sources.push_back(c.lists[0][i]);
      failures.push_back({{"construction", check.construction},
                          {"sources", sources},
                          {"expected", check.expected},
                          {"note", check.note}});
    }
    r.result["failures"] = failures;
    return set_verdict(r, report.ok() ? Verdict::pass()
                                      : Verdict::fail("closure", "unexpected closure failures"));
  }
  if (v == "weakcompact") {
    const auto& phi = c.formulas[0];
    auto res = weak_compactness_search(algebras(ws, c.lists[0]), phi.premises, phi.conclusion, c.numbers[0], limits);
    if (res.subset) {
      std::vector<std::string> subset;
      for (std::size_t i : *res.subset) subset.push_back(phi.premises[i].str());
      r.result["subset"] = subset;
    }
    r.result["subsets_checked"] = res.subsets_checked;
    return set_verdict(r, res.verdict);
  }
  if (v == "continuous") {
    const auto& e = ws.formula_set(c.names[0]);
    return set_verdict(r, is_continuous_family(e.implications, ws.signature(e.signature), c.numbers));
  }
  throw UnsupportedInput("unknown command '" + v + "'");
}

}  // namespace

Json CommandResult::to_json() const {
  Json out{{"command", command}, {"status", status}};
  if (status == "error") {
    out["error"] = {{"kind", error_kind}, {"message", error_message}, {"witness", error_witness}};
    out["resource_cap"] = resource;
  } else {
    out["result"] = result;
  }
  return out;
}

CommandResult run_command(const Workspace& ws, const Command& c) {
  CommandResult r;
  r.command = c.str();
  try {
    dispatch(ws, c, r);
  } catch (const ResourceError& e) {
    r = CommandResult{r.command, "error", Json::object(), e.kind(), e.what(), {}, true};
    if (!e.detail().empty()) r.error_message += " (" + e.detail() + ")";
  } catch (const Error& e) {
    r = CommandResult{r.command, "error", Json::object(), e.kind(), e.what(), e.witness(), false};
  }
  return r;
}

std::vector<CommandResult> run_all(const Workspace& ws) {
  std::vector<CommandResult> out;
  for (const auto& c : ws.commands) out.push_back(run_command(ws, c));
  return out;
}

Json report_json(const Workspace& ws, const std::vector<CommandResult>& results) {
  Json out{{"schema", kSchemaVersion}, {"limits", to_json(ws.limits)}, {"results", Json::array()}};
  for (const auto& r : results) out["results"].push_back(r.to_json());
  return out;
}

std::string report_text(const Workspace& ws, const std::vector<CommandResult>& results) {
  std::ostringstream out;
  out << "limits:";
  Json limits = to_json(ws.limits);
  for (const auto& [key, value] : limits.items()) out << " " << key << "=" << value.dump();
  out << "\n";
  for (const auto& r : results) {
    out << "[" << r.status << "] " << r.command << "\n";
    if (r.status == "error") {
      out << "  " << r.error_kind << ": " << r.error_message << "\n";
      if (!r.error_witness.empty()) out << "  witness: " << Json(r.error_witness).dump() << "\n";
      continue;
    }
    for (const auto& [key, value] : r.result.items())
      out << "  " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  return out.str();
}

}  // namespace metra
