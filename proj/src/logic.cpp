#include "metra/logic.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "metra/error.hpp"
#include "metra/lexer.hpp"

namespace metra {

// ---------------------------------------------------------------------------
// Formulas

std::set<std::string> MetricEquation::variables() const {
  auto v = lhs.variables();
  auto r = rhs.variables();
  v.insert(r.begin(), r.end());
  return v;
}

std::string MetricEquation::str() const { return lhs.str() + " =[" + bound.str() + "] " + rhs.str(); }

bool MetricImplication::is_basic() const {
  return std::all_of(premises.begin(), premises.end(),
                     [](const MetricEquation& p) { return p.lhs.is_variable() && p.rhs.is_variable(); });
}

std::set<std::string> MetricImplication::variables() const {
  auto v = conclusion.variables();
  for (const auto& p : premises) {
    auto pv = p.variables();
    v.insert(pv.begin(), pv.end());
  }
  return v;
}

std::string MetricImplication::str() const {
  if (premises.empty()) return conclusion.str();
  std::string out;
  for (std::size_t i = 0; i < premises.size(); ++i) out += (i ? ", " : "") + premises[i].str();
  return out + " |- " + conclusion.str();
}

MetricEquation parse_equation(TokenStream& in, const Signature& sig) {
  Term lhs = parse_term(in, &sig);
  in.expect("=");
  in.expect("[");
  ExtRational bound = in.expect_rational();
  in.expect("]");
  Term rhs = parse_term(in, &sig);
  return {lhs, rhs, bound};
}

MetricImplication parse_implication(TokenStream& in, const Signature& sig) {
  if (in.accept("|-")) return {{}, parse_equation(in, sig)};
  MetricEquation first = parse_equation(in, sig);
  if (!in.is_punct(",") && !in.is_punct("|-")) return {{}, first};
  std::vector<MetricEquation> premises{first};
  while (in.accept(",")) premises.push_back(parse_equation(in, sig));
  in.expect("|-");
  return {std::move(premises), parse_equation(in, sig)};
}

MetricImplication parse_implication(std::string_view text, const Signature& sig) {
  TokenStream in(text);
  MetricImplication phi = parse_implication(in, sig);
  if (!in.at_end()) in.fail("trailing input after formula");
  return phi;
}

// ---------------------------------------------------------------------------
// Expressions

Expr Expr::constant(mpq_class v) {
  Expr e;
  e.value = std::move(v);
  e.value.canonicalize();
  return e;
}

Expr Expr::distance(Term s, Term t) {
  Expr e;
  e.op = Op::Atom;
  e.atom = {std::move(s), std::move(t)};
  return e;
}

Expr Expr::unary(Op op, Expr a) {
  if (op != Op::Neg && op != Op::Square) throw DomainError("not a unary expression operator");
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  if (op == Op::Const || op == Op::Atom || op == Op::Neg || op == Op::Square)
    throw DomainError("not a binary expression operator");
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

std::set<std::string> Expr::variables() const {
  std::set<std::string> out;
  for (const auto& t : atom) {
    auto v = t.variables();
    out.insert(v.begin(), v.end());
  }
  for (const auto& a : args) {
    auto v = a.variables();
    out.insert(v.begin(), v.end());
  }
  return out;
}

namespace {

int precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub:
      return 2;
    case Expr::Op::Mul:
      return 3;
    case Expr::Op::Neg:
      return 4;
    case Expr::Op::Square:
      return 5;
    default:
      return 6;
  }
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = e.str();
  int p = precedence(e.op);
  if (e.op == Expr::Op::Const && sgn(e.value) < 0) p = 0;
  return p < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string Expr::str() const {
  switch (op) {
    case Op::Const:
      return value.get_str();
    case Op::Atom:
      return "d(" + atom[0].str() + ", " + atom[1].str() + ")";
    case Op::Add:
      return wrap(args[0], 2) + " + " + wrap(args[1], 3);
    case Op::Sub:
      return wrap(args[0], 2) + " - " + wrap(args[1], 3);
    case Op::Mul:
      return wrap(args[0], 3) + " * " + wrap(args[1], 4);
    case Op::Max:
      return "max(" + args[0].str() + ", " + args[1].str() + ")";
    case Op::Min:
      return "min(" + args[0].str() + ", " + args[1].str() + ")";
    case Op::Neg:
      return "-" + wrap(args[0], 4);
    case Op::Square:
      return wrap(args[0], 6) + "^2";
  }
  return {};
}

std::set<std::string> MetricInequality::variables() const {
  auto v = lhs.variables();
  auto r = rhs.variables();
  v.insert(r.begin(), r.end());
  return v;
}

std::string MetricInequality::str() const {
  const char* rel = relation == Relation::Le ? " <= " : relation == Relation::Ge ? " >= " : " = ";
  return lhs.str() + rel + rhs.str();
}

namespace {

Expr parse_sum(TokenStream& in, const Signature& sig);

Expr parse_primary(TokenStream& in, const Signature& sig) {
  if (in.peek().kind == Token::Kind::Number) {
    ExtRational q = in.expect_rational();
    return Expr::constant(q.to_mpq());
  }
  if (in.is_ident("d") && in.is_punct("(", 1)) {
    in.next();
    in.next();
    Term s = parse_term(in, &sig);
    in.expect(",");
    Term t = parse_term(in, &sig);
    in.expect(")");
    return Expr::distance(std::move(s), std::move(t));
  }
  if ((in.is_ident("max") || in.is_ident("min")) && in.is_punct("(", 1)) {
    Expr::Op op = in.next().text == "max" ? Expr::Op::Max : Expr::Op::Min;
    in.next();
    Expr a = parse_expr(in, sig);
    in.expect(",");
    Expr b = parse_expr(in, sig);
    in.expect(")");
    return Expr::binary(op, std::move(a), std::move(b));
  }
  if (in.accept("(")) {
    Expr e = parse_expr(in, sig);
    in.expect(")");
    return e;
  }
  in.fail("expected a rational, d(s,t), max, min or '('");
}

Expr parse_unary(TokenStream& in, const Signature& sig) {
  if (in.accept("-")) return Expr::unary(Expr::Op::Neg, parse_unary(in, sig));
  Expr e = parse_primary(in, sig);
  if (in.accept("^")) {
    if (in.peek().kind != Token::Kind::Number || in.peek().text != "2") in.fail("only squares (^2) are supported");
    in.next();
    e = Expr::unary(Expr::Op::Square, std::move(e));
  }
  return e;
}

Expr parse_product(TokenStream& in, const Signature& sig) {
  Expr e = parse_unary(in, sig);
  while (in.accept("*")) e = Expr::binary(Expr::Op::Mul, std::move(e), parse_unary(in, sig));
  return e;
}

Expr parse_sum(TokenStream& in, const Signature& sig) {
  Expr e = parse_product(in, sig);
  for (;;) {
    if (in.accept("+"))
      e = Expr::binary(Expr::Op::Add, std::move(e), parse_product(in, sig));
    else if (in.accept("-"))
      e = Expr::binary(Expr::Op::Sub, std::move(e), parse_product(in, sig));
    else
      return e;
  }
}

}  // namespace

Expr parse_expr(TokenStream& in, const Signature& sig) {
  Expr e = parse_sum(in, sig);
  for (;;) {
    if (in.accept_word("max"))
      e = Expr::binary(Expr::Op::Max, std::move(e), parse_sum(in, sig));
    else if (in.accept_word("min"))
      e = Expr::binary(Expr::Op::Min, std::move(e), parse_sum(in, sig));
    else
      return e;
  }
}

MetricInequality parse_inequality(TokenStream& in, const Signature& sig) {
  MetricInequality q;
  q.lhs = parse_expr(in, sig);
  if (in.accept("<="))
    q.relation = MetricInequality::Relation::Le;
  else if (in.accept(">="))
    q.relation = MetricInequality::Relation::Ge;
  else if (in.accept("="))
    q.relation = MetricInequality::Relation::Eq;
  else
    in.fail("expected '<=', '>=' or '='");
  q.rhs = parse_expr(in, sig);
  return q;
}

MetricInequality parse_inequality(std::string_view text, const Signature& sig) {
  TokenStream in(text);
  MetricInequality q = parse_inequality(in, sig);
  if (!in.at_end()) in.fail("trailing input after inequality");
  return q;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

/// Postfix program for a term over numbered variable slots.
class Program {
 public:
  Program(const Term& t, const MetricAlgebra& a, const std::vector<std::string>& vars) : a_(&a) {
    check_term(t, a.signature());
    emit(t, vars);
  }

  std::size_t run(std::span<const std::size_t> slots, std::vector<std::size_t>& stack) const {
    stack.clear();
    const std::size_t n = a_->size();
    for (const Step& s : steps_) {
      if (!s.table) {
        stack.push_back(slots[s.slot]);
        continue;
      }
      std::size_t idx = 0;
      const std::size_t base = stack.size() - s.arity;
      for (std::size_t k = 0; k < s.arity; ++k) idx = idx * n + stack[base + k];
      stack.resize(base);
      stack.push_back(s.table->values[idx]);
    }
    return stack.back();
  }

 private:
  struct Step {
    std::size_t slot = 0;
    const OpTable* table = nullptr;
    std::size_t arity = 0;
  };

  void emit(const Term& t, const std::vector<std::string>& vars) {
    if (t.is_variable()) {
      auto it = std::find(vars.begin(), vars.end(), t.name());
      if (it == vars.end()) throw ValuationError("unbound variable '" + t.name() + "'");
      steps_.push_back({static_cast<std::size_t>(it - vars.begin()), nullptr, 0});
      return;
    }
    for (const Term& arg : t.args()) emit(arg, vars);
    steps_.push_back({0, &a_->structure().table(t.name()), t.args().size()});
  }

  const MetricAlgebra* a_;
  std::vector<Step> steps_;
};

struct CompiledEquation {
  Program lhs;
  Program rhs;
  ExtRational bound;

  CompiledEquation(const MetricEquation& e, const MetricAlgebra& a, const std::vector<std::string>& vars)
      : lhs(e.lhs, a, vars), rhs(e.rhs, a, vars), bound(e.bound) {}

  bool holds(const MetricAlgebra& a, std::span<const std::size_t> slots, std::vector<std::size_t>& stack) const {
    std::size_t x = lhs.run(slots, stack);
    std::size_t y = rhs.run(slots, stack);
    return a.d(x, y) <= bound;
  }
};

struct CompiledImplication {
  std::vector<CompiledEquation> premises;
  CompiledEquation conclusion;

  CompiledImplication(const MetricImplication& phi, const MetricAlgebra& a, const std::vector<std::string>& vars)
      : conclusion(phi.conclusion, a, vars) {
    for (const auto& p : phi.premises) premises.emplace_back(p, a, vars);
  }

  bool holds(const MetricAlgebra& a, std::span<const std::size_t> slots, std::vector<std::size_t>& stack) const {
    for (const auto& p : premises)
      if (!p.holds(a, slots, stack)) return true;
    return conclusion.holds(a, slots, stack);
  }
};

/// Calls fn on every valuation in lexicographic order until it returns false.
/// Returns the number of valuations visited.
template <class F>
std::uint64_t for_each_valuation(std::size_t n, std::size_t vars, const Limits& limits, F&& fn) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < vars; ++i) {
    if (total > limits.valuations / std::max<std::size_t>(n, 1))
      throw ResourceError(std::to_string(n) + "^" + std::to_string(vars) + " valuations exceed the cap of " +
                              std::to_string(limits.valuations),
                          "valuations");
    total *= n;
  }
  std::vector<std::size_t> slots(vars, 0);
  std::uint64_t visited = 0;
  for (std::uint64_t step = 0; step < total; ++step) {
    ++visited;
    if (!fn(std::span<const std::size_t>(slots))) break;
    for (std::size_t k = vars; k-- > 0;) {
      if (++slots[k] < n) break;
      slots[k] = 0;
    }
  }
  return visited;
}

Valuation to_valuation(const std::vector<std::string>& vars, std::span<const std::size_t> slots) {
  Valuation v;
  for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = slots[i];
  return v;
}

std::string describe(const Valuation& v, const MetricAlgebra& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, id] : v) {
    out += (first ? "" : ", ") + name + " -> " + a.carrier()[id];
    first = false;
  }
  return out + "}";
}

std::vector<std::string> sorted_variables(const std::vector<MetricImplication>& phis) {
  std::set<std::string> all;
  for (const auto& phi : phis) {
    auto v = phi.variables();
    all.insert(v.begin(), v.end());
  }
  return {all.begin(), all.end()};
}

}  // namespace

bool satisfies_under(const MetricAlgebra& a, const Valuation& v, const MetricEquation& e) {
  check_term(e.lhs, a.signature());
  check_term(e.rhs, a.signature());
  return a.d(evaluate(e.lhs, a.structure(), v), evaluate(e.rhs, a.structure(), v)) <= e.bound;
}

bool satisfies_under(const MetricAlgebra& a, const Valuation& v, const MetricImplication& phi) {
  for (const auto& p : phi.premises)
    if (!satisfies_under(a, v, p)) return true;
  return satisfies_under(a, v, phi.conclusion);
}

LogicVerdict satisfies(const MetricAlgebra& a, const std::vector<MetricImplication>& phis, const Limits& limits) {
  const auto vars = sorted_variables(phis);
  std::vector<CompiledImplication> compiled;
  for (const auto& phi : phis) compiled.emplace_back(phi, a, vars);
  std::vector<std::size_t> stack;
  LogicVerdict out;
  out.valuations = for_each_valuation(a.size(), vars.size(), limits, [&](std::span<const std::size_t> slots) {
    for (std::size_t i = 0; i < compiled.size(); ++i) {
      if (compiled[i].holds(a, slots, stack)) continue;
      Valuation v = to_valuation(vars, slots);
      out.verdict = Verdict::fail("countermodel", phis[i].str() + " fails under " + describe(v, a),
                                  std::vector<std::size_t>(slots.begin(), slots.end()));
      out.countermodel = Countermodel{0, std::move(v)};
      return false;
    }
    return true;
  });
  return out;
}

LogicVerdict satisfies(const MetricAlgebra& a, const MetricImplication& phi, const Limits& limits) {
  return satisfies(a, std::vector<MetricImplication>{phi}, limits);
}

LogicVerdict entails(const std::vector<AlgebraRef>& k, const std::vector<MetricEquation>& delta,
                     const MetricEquation& e, const Limits& limits) {
  MetricImplication phi{delta, e};
  LogicVerdict out;
  for (std::size_t i = 0; i < k.size(); ++i) {
    LogicVerdict r = satisfies(*k[i], phi, limits);
    out.valuations += r.valuations;
    if (!r) {
      out.verdict = r.verdict;
      out.verdict.message = "algebra " + std::to_string(i) + ": " + out.verdict.message;
      out.countermodel = r.countermodel;
      out.countermodel->algebra = i;
      return out;
    }
  }
  return out;
}

namespace {

template <class Atom>
mpq_class eval_expr(const Expr& e, const Atom& atom) {
  switch (e.op) {
    case Expr::Op::Const:
      return e.value;
    case Expr::Op::Atom: {
      ExtRational d = atom(e.atom[0], e.atom[1]);
      if (d.is_infinite())
        throw UnsupportedInput("infinite distance in atom d(" + e.atom[0].str() + ", " + e.atom[1].str() + ")");
      return d.to_mpq();
    }
    case Expr::Op::Add:
      return eval_expr(e.args[0], atom) + eval_expr(e.args[1], atom);
    case Expr::Op::Sub:
      return eval_expr(e.args[0], atom) - eval_expr(e.args[1], atom);
    case Expr::Op::Mul:
      return eval_expr(e.args[0], atom) * eval_expr(e.args[1], atom);
    case Expr::Op::Max:
      return std::max(eval_expr(e.args[0], atom), eval_expr(e.args[1], atom));
    case Expr::Op::Min:
      return std::min(eval_expr(e.args[0], atom), eval_expr(e.args[1], atom));
    case Expr::Op::Neg:
      return -eval_expr(e.args[0], atom);
    case Expr::Op::Square: {
      mpq_class v = eval_expr(e.args[0], atom);
      return v * v;
    }
  }
  return 0;
}

bool compare(const mpq_class& lhs, MetricInequality::Relation rel, const mpq_class& rhs) {
  switch (rel) {
    case MetricInequality::Relation::Le:
      return lhs <= rhs;
    case MetricInequality::Relation::Ge:
      return lhs >= rhs;
    case MetricInequality::Relation::Eq:
      return lhs == rhs;
  }
  return false;
}

void check_expr_terms(const Expr& e, const Signature& sig) {
  for (const auto& t : e.atom) check_term(t, sig);
  for (const auto& a : e.args) check_expr_terms(a, sig);
}

}  // namespace

mpq_class evaluate_expr(const MetricAlgebra& a, const Valuation& v, const Expr& e) {
  check_expr_terms(e, a.signature());
  return eval_expr(e, [&](const Term& s, const Term& t) {
    return a.d(evaluate(s, a.structure(), v), evaluate(t, a.structure(), v));
  });
}

bool evaluate_inequality(const MetricAlgebra& a, const Valuation& v, const MetricInequality& q) {
  return compare(evaluate_expr(a, v, q.lhs), q.relation, evaluate_expr(a, v, q.rhs));
}

LogicVerdict satisfies_inequality(const MetricAlgebra& a, const MetricInequality& q, const Limits& limits) {
  check_expr_terms(q.lhs, a.signature());
  check_expr_terms(q.rhs, a.signature());
  const auto names = q.variables();
  const std::vector<std::string> vars(names.begin(), names.end());
  std::map<std::pair<const Term*, const Term*>, std::pair<Program, Program>> programs;
  std::vector<std::size_t> stack;
  LogicVerdict out;
  out.valuations = for_each_valuation(a.size(), vars.size(), limits, [&](std::span<const std::size_t> slots) {
    auto atom = [&](const Term& s, const Term& t) {
      auto key = std::make_pair(&s, &t);
      auto it = programs.find(key);
      if (it == programs.end()) it = programs.emplace(key, std::make_pair(Program(s, a, vars), Program(t, a, vars))).first;
      std::size_t x = it->second.first.run(slots, stack);
      std::size_t y = it->second.second.run(slots, stack);
      return a.d(x, y);
    };
    if (compare(eval_expr(q.lhs, atom), q.relation, eval_expr(q.rhs, atom))) return true;
    Valuation v = to_valuation(vars, slots);
    out.verdict = Verdict::fail("countermodel", q.str() + " fails under " + describe(v, a),
                                std::vector<std::size_t>(slots.begin(), slots.end()));
    out.countermodel = Countermodel{0, std::move(v)};
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Free algebras

std::size_t FreeAlgebra::index_of(const Term& t) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == t) return i;
  throw DomainError("term " + t.str() + " is outside the depth-" + std::to_string(presentation.depth) + " universe");
}

ExtRational FreeAlgebra::distance(const Term& s, const Term& t) const { return distances(index_of(s), index_of(t)); }

FreeAlgebra free_algebra(const Presentation& p, const Limits& limits) {
  const std::set<std::string> gens(p.variables.begin(), p.variables.end());
  if (gens.size() != p.variables.size()) throw DomainError("duplicate generator");
  for (const auto& r : p.relations) {
    check_term(r.lhs, p.signature);
    check_term(r.rhs, p.signature);
    for (const auto& v : r.variables())
      if (!gens.count(v)) throw DomainError("relation " + r.str() + " uses unknown generator '" + v + "'");
    if (r.lhs.height() > p.depth || r.rhs.height() > p.depth)
      throw DomainError("relation " + r.str() + " exceeds depth " + std::to_string(p.depth));
  }

  FreeAlgebra f;
  f.presentation = p;
  f.terms = enumerate_terms(p.signature, p.variables, p.depth, limits);
  std::map<Term, std::size_t> index;
  for (std::size_t i = 0; i < f.terms.size(); ++i) index.emplace(f.terms[i], i);

  ClosureProblem problem{DistMatrix::discrete(f.terms.size()), {}};
  std::vector<std::size_t> domain;
  for (std::size_t i = 0; i < f.terms.size(); ++i)
    if (f.terms[i].height() < p.depth) domain.push_back(i);
  for (const auto& [symbol, arity] : p.signature.symbols()) {
    PartialOp op{symbol, arity, {}, domain};
    std::vector<std::size_t> digits(arity, 0);
    std::size_t count = 1;
    for (std::size_t k = 0; k < arity; ++k) count *= domain.size();
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<Term> args;
      for (std::size_t k = 0; k < arity; ++k) args.push_back(f.terms[domain[digits[k]]]);
      auto it = index.find(Term::apply(symbol, std::move(args)));
      op.values.push_back(it == index.end() ? PartialOp::kUndefined : it->second);
      for (std::size_t k = arity; k-- > 0;) {
        if (++digits[k] < domain.size()) break;
        digits[k] = 0;
      }
    }
    problem.ops.push_back(std::move(op));
  }

  std::vector<Constraint> constraints;
  for (const auto& r : p.relations) constraints.push_back({index.at(r.lhs), index.at(r.rhs), r.bound});
  GeneratedCongruence g = generate_congruence(problem, constraints, p.mode, limits);
  f.distances = std::move(g.matrix);
  f.passes = g.passes;
  f.decreases = g.decreases;

  std::vector<std::string> labels;
  for (const auto& t : f.terms) labels.push_back(t.str());
  f.quotient = metric_identification(f.distances, labels);
  for (const auto& v : p.variables) f.unit.push_back(f.quotient.map.class_of[index.at(Term::var(v))]);

  for (const auto& r : p.relations)
    if (!(f.distances(index.at(r.lhs), index.at(r.rhs)) <= r.bound))
      throw std::logic_error("free algebra violates relation " + r.str());
  return f;
}

namespace {

void require_same_signature(const Presentation& p, const MetricAlgebra& a) {
  if (!(a.signature() == p.signature)) throw SignatureError("algebra signature differs from the presentation's");
}

/// Checks the evaluation map for one valuation (given by generator slots).
Verdict factor_check(const FreeAlgebra& f, const MetricAlgebra& a, const std::vector<Program>& programs,
                     const std::vector<CompiledEquation>& relations, std::span<const std::size_t> slots,
                     std::vector<std::size_t>& stack, bool& premises_hold) {
  premises_hold = std::all_of(relations.begin(), relations.end(),
                              [&](const CompiledEquation& r) { return r.holds(a, slots, stack); });
  if (!premises_hold) return Verdict::fail("relations", "valuation does not satisfy the relations");
  std::vector<std::size_t> value(programs.size());
  for (std::size_t i = 0; i < programs.size(); ++i) value[i] = programs[i].run(slots, stack);
  const std::size_t n = f.terms.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const ExtRational& bound = f.distances(i, j);
      if (bound.is_infinite()) continue;
      if (a.d(value[i], value[j]) > bound)
        return Verdict::fail("nonexpansive",
                             "d(" + f.terms[i].str() + ", " + f.terms[j].str() + ") = " + bound.str() +
                                 " in the free algebra but " + a.d(value[i], value[j]).str() + " in the target",
                             {i, j});
    }
  return Verdict::pass();
}

std::vector<Program> compile_terms(const FreeAlgebra& f, const MetricAlgebra& a) {
  std::vector<Program> out;
  out.reserve(f.terms.size());
  for (const auto& t : f.terms) out.emplace_back(t, a, f.presentation.variables);
  return out;
}

std::vector<CompiledEquation> compile_relations(const FreeAlgebra& f, const MetricAlgebra& a) {
  std::vector<CompiledEquation> out;
  for (const auto& r : f.presentation.relations) out.emplace_back(r, a, f.presentation.variables);
  return out;
}

}  // namespace

Verdict check_factorization(const FreeAlgebra& f, const MetricAlgebra& a, const Valuation& v) {
  require_same_signature(f.presentation, a);
  std::vector<std::size_t> slots;
  for (const auto& name : f.presentation.variables) {
    auto it = v.find(name);
    if (it == v.end()) throw ValuationError("generator '" + name + "' is unbound");
    if (it->second >= a.size()) throw ValuationError("generator '" + name + "' maps outside the carrier");
    slots.push_back(it->second);
  }
  std::vector<std::size_t> stack;
  bool premises = false;
  return factor_check(f, a, compile_terms(f, a), compile_relations(f, a), slots, stack, premises);
}

Verdict check_soundness_of_free(const FreeAlgebra& f, const std::vector<AlgebraRef>& samples, const Limits& limits) {
  const Mode& mode = f.presentation.mode;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const MetricAlgebra& a = *samples[s];
    require_same_signature(f.presentation, a);
    Verdict in_class = mode.kind == Mode::Kind::Metric         ? Verdict::pass()
                       : mode.kind == Mode::Kind::Quantitative ? is_quantitative(a)
                                                               : is_lipschitz(a, mode.constants);
    if (!in_class)
      throw DomainError("sample " + std::to_string(s) + " is outside the " + mode.str() + " class: " + in_class.message);
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const MetricAlgebra& a = *samples[s];
    auto programs = compile_terms(f, a);
    auto relations = compile_relations(f, a);
    std::vector<std::size_t> stack;
    Verdict out = Verdict::pass();
    for_each_valuation(a.size(), f.presentation.variables.size(), limits, [&](std::span<const std::size_t> slots) {
      bool premises = false;
      Verdict v = factor_check(f, a, programs, relations, slots, stack, premises);
      if (!premises || v.ok) return true;
      v.message = "sample " + std::to_string(s) + " under " +
                  describe(to_valuation(f.presentation.variables, slots), a) + ": " + v.message;
      out = std::move(v);
      return false;
    });
    if (!out) return out;
  }
  return Verdict::pass();
}

// ---------------------------------------------------------------------------
// Compactness and continuity

CompactnessResult weak_compactness_search(const std::vector<AlgebraRef>& k, const std::vector<MetricEquation>& delta,
                                          const MetricEquation& e, const ExtRational& eps_prime,
                                          const Limits& limits) {
  if (eps_prime < e.bound) throw DomainError("slack " + eps_prime.str() + " is below the bound " + e.bound.str());
  const MetricEquation target{e.lhs, e.rhs, eps_prime};
  CompactnessResult out;
  const std::size_t n = delta.size();
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      if (++out.subsets_checked > limits.subsets)
        throw ResourceError("weak compactness search exceeded " + std::to_string(limits.subsets) + " subsets",
                            "subsets");
      std::vector<MetricEquation> sub;
      for (std::size_t i : pick) sub.push_back(delta[i]);
      if (entails(k, sub, target, limits)) {
        out.subset = pick;
        return out;
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  out.verdict = Verdict::fail("exhausted", target.str() + " is not entailed by the full premise set");
  return out;
}

MetricImplication relax(const MetricImplication& phi, const ExtRational& delta, const ExtRational& eps_prime) {
  MetricImplication out = phi;
  for (auto& p : out.premises) p.bound = p.bound + delta;
  out.conclusion.bound = eps_prime;
  return out;
}

EquicontinuityResult equicontinuity_check(const std::vector<AlgebraRef>& k, const MetricImplication& phi,
                                          const ExtRational& eps_prime, std::vector<ExtRational> grid,
                                          const Limits& limits) {
  if (!(eps_prime > phi.conclusion.bound))
    throw DomainError("eps' = " + eps_prime.str() + " must exceed the conclusion bound " + phi.conclusion.bound.str());
  if (grid.empty()) throw DomainError("empty delta grid");
  for (const auto& d : grid)
    if (d.is_zero()) throw DomainError("delta grid values must be positive");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (const auto& d : grid) {
    MetricImplication relaxed = relax(phi, d, eps_prime);
    if (entails(k, relaxed.premises, relaxed.conclusion, limits)) return {Verdict::pass(), d};
  }
  std::string listed;
  for (std::size_t i = 0; i < grid.size(); ++i) listed += (i ? ", " : "") + grid[i].str();
  return {Verdict::fail("equicontinuity", "no delta in {" + listed + "} works for eps' = " + eps_prime.str()), {}};
}

MetricImplication congruence_schema(const std::string& symbol, std::size_t arity) {
  MetricImplication out{{}, {Term::apply(symbol), Term::apply(symbol), ExtRational()}};
  std::vector<Term> xs, ys;
  for (std::size_t i = 1; i <= arity; ++i) {
    xs.push_back(Term::var("x" + std::to_string(i)));
    ys.push_back(Term::var("y" + std::to_string(i)));
    out.premises.push_back({xs.back(), ys.back(), ExtRational()});
  }
  out.conclusion = {Term::apply(symbol, xs), Term::apply(symbol, ys), ExtRational()};
  return out;
}

namespace {

bool is_schema_for(const MetricImplication& phi, const std::string& symbol, std::size_t arity) {
  const auto& c = phi.conclusion;
  if (!c.bound.is_zero() || c.lhs.is_variable() || c.rhs.is_variable()) return false;
  if (c.lhs.name() != symbol || c.rhs.name() != symbol) return false;
  if (c.lhs.args().size() != arity || c.rhs.args().size() != arity || phi.premises.size() != arity) return false;
  std::set<std::string> seen;
  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < arity; ++i) {
    const Term& u = c.lhs.args()[i];
    const Term& v = c.rhs.args()[i];
    if (!u.is_variable() || !v.is_variable()) return false;
    if (!seen.insert(u.name()).second || !seen.insert(v.name()).second) return false;
    pairs.insert(std::minmax(u.name(), v.name()));
  }
  for (const auto& p : phi.premises) {
    if (!p.bound.is_zero() || !p.lhs.is_variable() || !p.rhs.is_variable()) return false;
    if (!pairs.erase(std::minmax(p.lhs.name(), p.rhs.name()))) return false;
  }
  return pairs.empty();
}

/// psi = relax(phi, delta, eps_prime) for some delta >= 0.
bool is_relaxation(const MetricImplication& psi, const MetricImplication& phi, const ExtRational& eps_prime) {
  if (psi.conclusion.bound != eps_prime || psi.conclusion.lhs != phi.conclusion.lhs ||
      psi.conclusion.rhs != phi.conclusion.rhs || psi.premises.size() != phi.premises.size())
    return false;
  std::optional<ExtRational> delta;
  for (std::size_t i = 0; i < phi.premises.size(); ++i) {
    const auto& a = phi.premises[i];
    const auto& b = psi.premises[i];
    if (a.lhs != b.lhs || a.rhs != b.rhs) return false;
    if (a.bound.is_infinite() || b.bound.is_infinite()) {
      if (a.bound != b.bound) return false;
      continue;
    }
    if (b.bound < a.bound) return false;
    ExtRational d = ExtRational::abs_diff(b.bound, a.bound);
    if (delta && *delta != d) return false;
    delta = d;
  }
  return true;
}

}  // namespace

Verdict is_continuous_family(const std::vector<MetricImplication>& family, const Signature& sig,
                             const std::vector<ExtRational>& probes) {
  for (const auto& [symbol, arity] : sig.symbols()) {
    bool found = std::any_of(family.begin(), family.end(),
                             [&](const MetricImplication& phi) { return is_schema_for(phi, symbol, arity); });
    if (!found)
      return Verdict::fail("congruence-schema", "no congruence schema for '" + symbol + "': expected " +
                                                    congruence_schema(symbol, arity).str());
  }
  for (std::size_t m = 0; m < family.size(); ++m)
    for (std::size_t p = 0; p < probes.size(); ++p) {
      if (!(probes[p] > family[m].conclusion.bound)) continue;
      bool found = std::any_of(family.begin(), family.end(), [&](const MetricImplication& psi) {
        return is_relaxation(psi, family[m], probes[p]);
      });
      if (!found)
        return Verdict::fail("relaxation",
                             "no relaxation of " + family[m].str() + " with conclusion bound " + probes[p].str(),
                             {m, p});
    }
  return Verdict::pass();
}

// ---------------------------------------------------------------------------
// Closure suites

std::size_t ClosureReport::unexpected_failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const ClosureCheck& c) { return !c.ok && !c.expected; }));
}

std::size_t ClosureReport::expected_failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const ClosureCheck& c) { return !c.ok && c.expected; }));
}

ClosureReport closure_suite(const std::vector<MetricImplication>& e, const std::vector<AlgebraRef>& corpus,
                            const Limits& limits) {
  const bool equational = std::all_of(e.begin(), e.end(), [](const auto& phi) { return phi.is_equation(); });
  const bool basic = std::all_of(e.begin(), e.end(), [](const auto& phi) { return phi.is_basic(); });
  ClosureReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (satisfies(*corpus[i], e, limits)) report.members.push_back(i);

  auto record = [&](std::string construction, std::vector<std::size_t> sources, const MetricAlgebra& result,
                    bool expected) {
    LogicVerdict v = satisfies(result, e, limits);
    report.checks.push_back({std::move(construction), std::move(sources), v.verdict.ok, expected, v.verdict.message});
  };

  for (std::size_t x = 0; x < report.members.size(); ++x)
    for (std::size_t y = x; y < report.members.size(); ++y) {
      const auto& a = corpus[report.members[x]];
      const auto& b = corpus[report.members[y]];
      if (!(a->signature() == b->signature())) continue;
      record("product", {report.members[x], report.members[y]}, *product({a, b}).algebra, false);
    }

  for (std::size_t m : report.members) {
    const auto& a = corpus[m];
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t g = 0; g < a->size(); ++g) {
      std::vector<std::size_t> seed{g};
      auto sub = generate_subalgebra(a, seed);
      if (seen.insert(sub.elements).second) record("subalgebra", {m}, *sub.algebra, false);
    }
  }

  if (!equational && !basic) return report;
  for (std::size_t m : report.members) {
    const auto& a = corpus[m];
    std::vector<DistMatrix> seen;
    for (std::size_t x = 0; x < a->size(); ++x)
      for (std::size_t y = x + 1; y < a->size(); ++y) {
        std::vector<ExtRational> bounds{ExtRational()};
        const ExtRational& d = a->d(x, y);
        if (d.is_infinite())
          bounds.push_back(ExtRational(1));
        else
          bounds.push_back(d * ExtRational(1, 2));
        for (const auto& bound : bounds) {
          std::vector<Constraint> c{{x, y, bound}};
          Congruence theta = generate_congruence(a, c, Mode::metric(), limits);
          if (theta.matrix() == a->metric() ||
              std::find(seen.begin(), seen.end(), theta.matrix()) != seen.end())
            continue;
          seen.push_back(theta.matrix());
          Quotient q = quotient(theta);
          if (equational) {
            record("quotient", {m}, *q.algebra, false);
          } else if (is_reflexive_quotient(q.projection, limits).verdict.ok) {
            record("reflexive-quotient", {m}, *q.algebra, false);
          } else {
            record("quotient", {m}, *q.algebra, true);
          }
        }
      }
  }
  return report;
}

}  // namespace metra
