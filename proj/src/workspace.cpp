#include "metra/workspace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "metra/congruence.hpp"
#include "metra/error.hpp"
#include "metra/lexer.hpp"

namespace metra {

namespace {

const std::set<std::string, std::less<>> kVerbs{
    "validate", "quotient", "product", "subalgebra", "kernel",   "meet",        "join",
    "compose",  "permutable", "decompose", "free",   "sat",      "entails",     "hausdorff",
    "gh",       "redprod",  "limitmetric", "equicont", "closure", "weakcompact", "continuous"};

template <class T>
const T* find_named(const std::vector<T>& items, const std::string& name) {
  for (const auto& item : items)
    if (item.name == name) return &item;
  return nullptr;
}

std::string where(const Token& t) { return std::to_string(t.line) + ":" + std::to_string(t.column) + ": "; }

[[noreturn]] void unknown(const Token& t, const std::string& kind, const std::string& name) {
  throw ReferenceError(where(t) + "unknown " + kind + " '" + name + "'");
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? std::string(sep) : "") + items[i];
  return out;
}

std::string matrix_str(const DistMatrix& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.size(); ++j) out += (j ? ", " : "") + m(i, j).str();
    out += "]";
  }
  return out + "]";
}

std::vector<std::string> rationals_str(const std::vector<ExtRational>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.str());
  return out;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Shared grammar pieces.

std::vector<std::string> name_set(TokenStream& in) {
  std::vector<std::string> out;
  in.expect("{");
  if (in.accept("}")) return out;
  do out.push_back(in.expect_name());
  while (in.accept(","));
  in.expect("}");
  return out;
}

std::vector<ExtRational> rational_set(TokenStream& in) {
  std::vector<ExtRational> out;
  in.expect("{");
  if (in.accept("}")) return out;
  do out.push_back(in.expect_rational());
  while (in.accept(","));
  in.expect("}");
  return out;
}

template <class Entry>
std::vector<std::vector<Entry>> rows(TokenStream& in, const std::function<Entry()>& entry) {
  std::vector<std::vector<Entry>> out;
  in.expect("[");
  do {
    in.expect("[");
    std::vector<Entry> row;
    do row.push_back(entry());
    while (in.accept(","));
    in.expect("]");
    out.push_back(std::move(row));
  } while (in.accept(","));
  in.expect("]");
  return out;
}

DistMatrix matrix(TokenStream& in) {
  const Token& start = in.peek();
  auto r = rows<ExtRational>(in, [&] { return in.expect_rational(); });
  for (const auto& row : r)
    if (row.size() != r.size()) in.fail_at(start, "matrix is not square");
  return DistMatrix::from_rows(r);
}

std::size_t element(TokenStream& in, const Token& at, const std::vector<std::string>& labels,
                    const std::string& name) {
  auto it = std::find(labels.begin(), labels.end(), name);
  if (it == labels.end()) in.fail_at(at, "unknown element '" + name + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

bool starts_inequality(const TokenStream& in, const Signature& sig) {
  const Token& t = in.peek();
  if (t.kind == Token::Kind::Number || in.is_punct("(") || in.is_punct("-")) return true;
  if (t.kind != Token::Kind::Ident) return false;
  if (t.text != "d" && t.text != "max" && t.text != "min") return false;
  return in.is_punct("(", 1) && !sig.contains(t.text);
}

class Parser {
 public:
  Parser(Workspace& ws, std::vector<std::filesystem::path>& stack, std::filesystem::path base)
      : ws_(ws), stack_(stack), base_(std::move(base)) {}

  void run(std::string_view text) {
    TokenStream in(text);
    while (!in.at_end()) statement(in);
  }

 private:
  void statement(TokenStream& in) {
    const Token& t = in.peek();
    if (t.kind != Token::Kind::Ident) in.fail("expected a declaration or command");
    if (t.text == "include") return include(in);
    if (t.text == "limits") return limits(in);
    if (t.text == "signature") return signature(in);
    if (t.text == "algebra") return algebra(in);
    if (t.text == "space") return space(in);
    if (t.text == "congruence") return congruence(in);
    if (t.text == "map") return map(in);
    if (t.text == "filter") return filter(in);
    if (t.text == "axioms") return axioms(in);
    if (t.text == "presentation") return presentation(in);
    if (kVerbs.count(t.text)) {
      ws_.commands.push_back(parse_command_from(in));
      in.expect(";");
      return;
    }
    in.fail("unknown statement '" + t.text + "'");
  }

  Command parse_command_from(TokenStream& in);

  std::string fresh_name(TokenStream& in) {
    Token t = in.peek();
    std::string name = in.expect_ident();
    bool taken = find_named(ws_.signatures, name) || find_named(ws_.algebras, name) ||
                 find_named(ws_.spaces, name) || find_named(ws_.congruences, name) ||
                 find_named(ws_.maps, name) || find_named(ws_.filters, name) ||
                 find_named(ws_.formulas, name) || find_named(ws_.presentations, name);
    if (taken) throw ReferenceError(where(t) + "duplicate name '" + name + "'");
    return name;
  }

  std::string over_signature(TokenStream& in) {
    if (!in.accept_word("over")) return "";
    Token t = in.peek();
    std::string name = in.expect_ident();
    if (!find_named(ws_.signatures, name)) unknown(t, "signature", name);
    return name;
  }

  const NamedAlgebra& algebra_ref(TokenStream& in) {
    Token t = in.peek();
    std::string name = in.expect_ident();
    auto* a = find_named(ws_.algebras, name);
    if (!a) unknown(t, "algebra", name);
    return *a;
  }

  void include(TokenStream& in) {
    in.expect_word("include");
    Token t = in.next();
    if (t.kind != Token::Kind::String) in.fail_at(t, "expected a quoted path");
    in.expect(";");
    std::filesystem::path file = base_ / t.text;
    std::error_code ec;
    auto canonical = std::filesystem::weakly_canonical(file, ec);
    if (ec) canonical = file;
    if (std::find(stack_.begin(), stack_.end(), canonical) != stack_.end())
      in.fail_at(t, "include cycle through '" + t.text + "'");
    std::string text;
    try {
      text = read_file(file);
    } catch (const DomainError& e) {
      in.fail_at(t, e.what());
    }
    stack_.push_back(canonical);
    Parser(ws_, stack_, file.parent_path()).run(text);
    stack_.pop_back();
  }

  void limits(TokenStream& in) {
    in.expect_word("limits");
    in.expect("{");
    while (!in.accept("}")) {
      Token key = in.peek();
      std::string name = in.expect_ident();
      in.expect("=");
      Token value = in.next();
      if (value.kind != Token::Kind::Number) in.fail_at(value, "expected a nonnegative integer");
      try {
        apply_limit_overrides(ws_.limits, name + "=" + value.text);
      } catch (const DomainError& e) {
        in.fail_at(key, e.what());
      }
      in.expect(";");
    }
  }

  void signature(TokenStream& in) {
    in.expect_word("signature");
    NamedSignature s{fresh_name(in), {}};
    in.expect("{");
    while (!in.accept("}")) {
      Token t = in.peek();
      std::string sym = in.expect_ident();
      in.expect("/");
      Token n = in.next();
      std::size_t arity = 0;
      if (n.kind != Token::Kind::Number ||
          std::from_chars(n.text.data(), n.text.data() + n.text.size(), arity).ec != std::errc())
        in.fail_at(n, "expected an arity");
      if (s.signature.contains(sym)) in.fail_at(t, "duplicate symbol '" + sym + "'");
      s.signature.add(sym, arity);
      if (!in.accept(";") && !in.accept(",") && !in.is_punct("}")) in.fail("expected ';'");
    }
    ws_.signatures.push_back(std::move(s));
  }

  void algebra(TokenStream& in) {
    Token start = in.peek();
    in.expect_word("algebra");
    std::string name = fresh_name(in);
    std::string sig_name = over_signature(in);
    const Signature& sig = ws_.signature(sig_name);
    std::vector<std::string> carrier;
    std::optional<DistMatrix> metric;
    std::map<std::string, OpTable> ops;
    in.expect("{");
    while (!in.accept("}")) {
      if (in.accept_word("carrier")) {
        do carrier.push_back(in.expect_name());
        while (in.accept(","));
      } else if (in.accept_word("metric")) {
        metric = matrix(in);
      } else if (in.accept_word("op")) {
        Token t = in.peek();
        std::string sym = in.expect_ident();
        if (!sig.contains(sym)) in.fail_at(t, "'" + sym + "' is not in the signature");
        if (ops.count(sym)) in.fail_at(t, "duplicate table for '" + sym + "'");
        in.expect("=");
        in.expect_word("table");
        OpTable table{sig.arity(sym), {}};
        in.expect("{");
        if (!in.is_punct("}")) do {
            Token e = in.peek();
            table.values.push_back(element(in, e, carrier, in.expect_name()));
          } while (in.accept(","));
        in.expect("}");
        std::size_t expected = 1;
        for (std::size_t i = 0; i < table.arity; ++i) expected *= carrier.size();
        if (table.values.size() != expected)
          in.fail_at(t, "table for '" + sym + "' has " + std::to_string(table.values.size()) + " entries, expected " +
                            std::to_string(expected));
        ops.emplace(sym, std::move(table));
      } else {
        in.fail("expected 'carrier', 'metric' or 'op'");
      }
      in.expect(";");
    }
    if (!metric) in.fail_at(start, "algebra '" + name + "' has no metric");
    if (metric->size() != carrier.size()) in.fail_at(start, "metric size does not match the carrier");
    for (const auto& [sym, arity] : sig.symbols())
      if (!ops.count(sym)) in.fail_at(start, "algebra '" + name + "' has no table for '" + sym + "'");
    ws_.algebras.push_back({name, sig_name, make_algebra(MetricAlgebra(sig, carrier, *metric, std::move(ops)))});
  }

  void space(TokenStream& in) {
    Token start = in.peek();
    in.expect_word("space");
    std::string name = fresh_name(in);
    std::vector<std::string> points;
    std::optional<DistMatrix> metric;
    in.expect("{");
    while (!in.accept("}")) {
      if (in.accept_word("points")) {
        do points.push_back(in.expect_name());
        while (in.accept(","));
      } else if (in.accept_word("metric")) {
        metric = matrix(in);
      } else {
        in.fail("expected 'points' or 'metric'");
      }
      in.expect(";");
    }
    if (!metric) in.fail_at(start, "space '" + name + "' has no metric");
    if (metric->size() != points.size()) in.fail_at(start, "metric size does not match the points");
    ws_.spaces.push_back({name, FiniteMetricSpace(points, *metric)});
  }

  void congruence(TokenStream& in) {
    Token start = in.peek();
    in.expect_word("congruence");
    std::string name = fresh_name(in);
    in.expect_word("on");
    const NamedAlgebra& a = algebra_ref(in);
    in.expect("{");
    in.expect_word("matrix");
    DistMatrix m = matrix(in);
    in.expect(";");
    in.expect("}");
    if (m.size() != a.algebra->size()) in.fail_at(start, "matrix size does not match the algebra");
    Congruence::make(a.algebra, m);
    ws_.congruences.push_back({name, a.name, std::move(m)});
  }

  void map(TokenStream& in) {
    in.expect_word("map");
    std::string name = fresh_name(in);
    in.expect_word("from");
    const NamedAlgebra& src = algebra_ref(in);
    in.expect_word("to");
    const NamedAlgebra& dst = algebra_ref(in);
    const auto& from = src.algebra->carrier();
    const auto& to = dst.algebra->carrier();
    std::vector<std::optional<std::size_t>> images(from.size());
    Token open = in.peek();
    in.expect("{");
    while (!in.accept("}")) {
      Token t = in.peek();
      std::size_t x = element(in, t, from, in.expect_name());
      in.expect("->");
      Token u = in.peek();
      std::size_t y = element(in, u, to, in.expect_name());
      if (images[x]) in.fail_at(t, "element '" + from[x] + "' is mapped twice");
      images[x] = y;
      if (!in.accept(";") && !in.accept(",") && !in.is_punct("}")) in.fail("expected ';'");
    }
    NamedMap m{name, src.name, dst.name, {}};
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (!images[i]) in.fail_at(open, "no image for '" + from[i] + "'");
      m.images.push_back(*images[i]);
    }
    ws_.maps.push_back(std::move(m));
  }

  void filter(TokenStream& in) {
    in.expect_word("filter");
    std::string name = fresh_name(in);
    in.expect_word("on");
    std::vector<std::string> index = name_set(in);
    auto positions = [&](const Token& at, const std::vector<std::string>& names) {
      std::vector<std::size_t> out;
      for (const auto& n : names) out.push_back(element(in, at, index, n));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    Token t = in.peek();
    if (in.accept_word("core")) {
      ws_.filters.push_back({name, FiniteFilter(index, positions(t, name_set(in)))});
    } else if (in.accept_word("family")) {
      std::vector<std::vector<std::size_t>> sets;
      in.expect("{");
      do sets.push_back(positions(in.peek(), name_set(in)));
      while (in.accept(","));
      in.expect("}");
      auto check = validate_filter_family(index, sets, ws_.limits);
      if (!check.verdict.ok) in.fail_at(t, "not a filter (" + check.verdict.code + ")");
      ws_.filters.push_back({name, *check.filter});
    } else {
      in.fail("expected 'core' or 'family'");
    }
    in.expect(";");
  }

  void axioms(TokenStream& in) {
    in.expect_word("axioms");
    NamedFormulas f;
    f.name = fresh_name(in);
    f.signature = over_signature(in);
    const Signature& sig = ws_.signature(f.signature);
    in.expect("{");
    while (!in.accept("}")) {
      if (starts_inequality(in, sig))
        f.inequalities.push_back(parse_inequality(in, sig));
      else
        f.implications.push_back(parse_implication(in, sig));
      in.expect(";");
    }
    ws_.formulas.push_back(std::move(f));
  }

  void presentation(TokenStream& in) {
    Token start = in.peek();
    in.expect_word("presentation");
    NamedPresentation p;
    p.name = fresh_name(in);
    p.signature = over_signature(in);
    p.presentation.signature = ws_.signature(p.signature);
    bool has_depth = false;
    in.expect("{");
    while (!in.accept("}")) {
      if (in.accept_word("vars")) {
        do p.presentation.variables.push_back(in.expect_ident());
        while (in.accept(","));
      } else if (in.accept_word("mode")) {
        p.presentation.mode = mode(in);
      } else if (in.accept_word("depth")) {
        Token n = in.next();
        std::size_t depth = 0;
        if (n.kind != Token::Kind::Number ||
            std::from_chars(n.text.data(), n.text.data() + n.text.size(), depth).ec != std::errc())
          in.fail_at(n, "expected a depth");
        p.presentation.depth = depth;
        has_depth = true;
      } else if (in.accept_word("rel")) {
        p.presentation.relations.push_back(parse_equation(in, p.presentation.signature));
      } else {
        in.fail("expected 'vars', 'mode', 'depth' or 'rel'");
      }
      in.expect(";");
    }
    if (!has_depth) in.fail_at(start, "presentation '" + p.name + "' has no depth");
    ws_.presentations.push_back(std::move(p));
  }

  Mode mode(TokenStream& in) {
    Token t = in.peek();
    std::string word = in.expect_ident();
    if (word == "M") return Mode::metric();
    if (word == "Q") return Mode::quantitative();
    if (word != "LIP") in.fail_at(t, "expected 'M', 'Q' or 'LIP'");
    std::map<std::string, ExtRational> constants;
    in.expect("(");
    if (!in.is_punct(")")) do {
        std::string sym = in.expect_ident();
        in.expect("=");
        constants[sym] = in.expect_rational();
      } while (in.accept(","));
    in.expect(")");
    return Mode::lipschitz(std::move(constants));
  }

  Workspace& ws_;
  std::vector<std::filesystem::path>& stack_;
  std::filesystem::path base_;
};

// Commands.

class CommandParser {
 public:
  CommandParser(TokenStream& in, const Workspace& ws) : in_(in), ws_(ws) {}

  Command parse() {
    Token t = in_.peek();
    c_.verb = in_.expect_ident();
    const std::string& v = c_.verb;
    if (!kVerbs.count(v)) in_.fail_at(t, "unknown command '" + v + "'");
    if (v == "validate") {
      Token n = in_.peek();
      std::string name = in_.expect_ident();
      bool known = find_named(ws_.signatures, name) || find_named(ws_.algebras, name) ||
                   find_named(ws_.spaces, name) || find_named(ws_.congruences, name) ||
                   find_named(ws_.maps, name) || find_named(ws_.filters, name) ||
                   find_named(ws_.formulas, name) || find_named(ws_.presentations, name);
      if (!known) unknown(n, "object", name);
      c_.names.push_back(name);
    } else if (v == "quotient") {
      const auto& a = algebra();
      in_.expect_word("by");
      congruence_of(a.name);
    } else if (v == "product") {
      do algebra();
      while (in_.peek().kind == Token::Kind::Ident);
    } else if (v == "subalgebra") {
      const auto& a = algebra();
      in_.expect_word("from");
      elements(a.algebra->carrier());
    } else if (v == "kernel") {
      Token n = in_.peek();
      std::string name = in_.expect_ident();
      if (!find_named(ws_.maps, name)) unknown(n, "map", name);
      c_.names.push_back(name);
    } else if (v == "meet" || v == "join" || v == "compose" || v == "permutable") {
      const auto& first = congruence_of("");
      congruence_of(first.algebra);
    } else if (v == "decompose") {
      const auto& a = algebra();
      in_.expect_word("by");
      congruence_of(a.name);
      congruence_of(a.name);
    } else if (v == "free") {
      Token n = in_.peek();
      std::string name = in_.expect_ident();
      if (!find_named(ws_.presentations, name)) unknown(n, "presentation", name);
      c_.names.push_back(name);
    } else if (v == "sat") {
      algebra();
      formula_set();
    } else if (v == "entails") {
      algebra_list();
      c_.formulas.push_back(parse_implication(in_, ws_.signature(c_.signature)));
    } else if (v == "hausdorff") {
      Token n = in_.peek();
      std::string name = in_.expect_ident();
      if (!ws_.has_space(name)) unknown(n, "space", name);
      c_.names.push_back(name);
      auto labels = ws_.space(name).labels();
      elements(labels);
      elements(labels);
    } else if (v == "gh") {
      for (int i = 0; i < 2; ++i) {
        Token n = in_.peek();
        std::string name = in_.expect_ident();
        if (!ws_.has_space(name)) unknown(n, "space", name);
        c_.names.push_back(name);
      }
    } else if (v == "redprod") {
      algebra_list();
      in_.expect_word("by");
      if (in_.is_ident("principal") && in_.is_punct("(", 1)) {
        in_.next();
        in_.next();
        Token k = in_.peek();
        ExtRational pos = in_.expect_rational();
        if (pos.is_infinite() || pos.is_zero() || pos.to_mpq().get_den() != 1 ||
            pos > ExtRational(static_cast<std::int64_t>(c_.lists[0].size())))
          in_.fail_at(k, "principal index must be between 1 and the number of factors");
        c_.numbers.push_back(pos);
        in_.expect(")");
      } else {
        Token n = in_.peek();
        std::string name = in_.expect_ident();
        auto* f = find_named(ws_.filters, name);
        if (!f) unknown(n, "filter", name);
        if (f->filter.size() != c_.lists[0].size())
          in_.fail_at(n, "filter index size does not match the number of factors");
        c_.names.push_back(name);
      }
    } else if (v == "limitmetric") {
      Token start = in_.peek();
      c_.lists.push_back(name_set(in_));
      c_.forms = rows<ClosedForm>(in_, [&] { return ClosedForm::parse(in_); });
      for (const auto& row : c_.forms)
        if (row.size() != c_.lists[0].size()) in_.fail_at(start, "matrix size does not match the points");
      if (c_.forms.size() != c_.lists[0].size()) in_.fail_at(start, "matrix size does not match the points");
      if (in_.accept_word("against")) {
        const auto& a = algebra();
        if (a.algebra->size() != c_.lists[0].size()) in_.fail_at(start, "points do not match the algebra");
      }
    } else if (v == "equicont") {
      algebra_list();
      in_.expect("(");
      c_.formulas.push_back(parse_implication(in_, ws_.signature(c_.signature)));
      in_.expect(")");
      c_.numbers.push_back(in_.expect_rational());
      in_.expect_word("grid");
      for (auto& g : rational_set(in_)) c_.numbers.push_back(g);
    } else if (v == "closure") {
      const auto& e = formula_set();
      Token l = in_.peek();
      algebra_list();
      if (c_.signature != e.signature) in_.fail_at(l, "algebras and formulas use different signatures");
    } else if (v == "weakcompact") {
      algebra_list();
      c_.formulas.push_back(parse_implication(in_, ws_.signature(c_.signature)));
      in_.expect_word("within");
      c_.numbers.push_back(in_.expect_rational());
    } else if (v == "continuous") {
      formula_set();
      in_.expect_word("probes");
      c_.numbers = rational_set(in_);
    }
    return std::move(c_);
  }

 private:
  const NamedAlgebra& algebra() {
    Token n = in_.peek();
    std::string name = in_.expect_ident();
    auto* a = find_named(ws_.algebras, name);
    if (!a) unknown(n, "algebra", name);
    c_.names.push_back(name);
    return *a;
  }

  const NamedCongruence& congruence_of(const std::string& algebra) {
    Token n = in_.peek();
    std::string name = in_.expect_ident();
    auto* t = find_named(ws_.congruences, name);
    if (!t) unknown(n, "congruence", name);
    if (!algebra.empty() && t->algebra != algebra)
      throw ReferenceError(where(n) + "congruence '" + name + "' is not on algebra '" + algebra + "'");
    c_.names.push_back(name);
    return *t;
  }

  const NamedFormulas& formula_set() {
    Token n = in_.peek();
    std::string name = in_.expect_ident();
    auto* f = find_named(ws_.formulas, name);
    if (!f) unknown(n, "axioms", name);
    c_.names.push_back(name);
    return *f;
  }

  void algebra_list() {
    in_.expect("[");
    std::vector<std::string> names;
    do {
      Token n = in_.peek();
      std::string name = in_.expect_ident();
      auto* a = find_named(ws_.algebras, name);
      if (!a) unknown(n, "algebra", name);
      if (!names.empty() && a->signature != c_.signature)
        in_.fail_at(n, "algebra '" + name + "' has a different signature");
      c_.signature = a->signature;
      names.push_back(name);
    } while (in_.accept(","));
    in_.expect("]");
    c_.lists.push_back(std::move(names));
  }

  void elements(const std::vector<std::string>& labels) {
    Token start = in_.peek();
    auto names = name_set(in_);
    for (const auto& n : names) element(in_, start, labels, n);
    c_.lists.push_back(std::move(names));
  }

  TokenStream& in_;
  const Workspace& ws_;
  Command c_;
};

Command Parser::parse_command_from(TokenStream& in) { return CommandParser(in, ws_).parse(); }

}  // namespace

std::string Command::str() const {
  auto set = [](const std::vector<std::string>& xs) { return "{" + join(xs) + "}"; };
  auto list = [](const std::vector<std::string>& xs) { return "[" + join(xs) + "]"; };
  const std::string& v = verb;
  if (v == "quotient") return v + " " + names[0] + " by " + names[1];
  if (v == "subalgebra") return v + " " + names[0] + " from " + set(lists[0]);
  if (v == "decompose") return v + " " + names[0] + " by " + names[1] + " " + names[2];
  if (v == "entails") return v + " " + list(lists[0]) + " " + formulas[0].str();
  if (v == "hausdorff") return v + " " + names[0] + " " + set(lists[0]) + " " + set(lists[1]);
  if (v == "redprod") {
    std::string by = names.empty() ? "principal(" + numbers[0].str() + ")" : names[0];
    return v + " " + list(lists[0]) + " by " + by;
  }
  if (v == "limitmetric") {
    std::string out = v + " " + set(lists[0]) + " [";
    for (std::size_t i = 0; i < forms.size(); ++i) {
      std::vector<std::string> row;
      for (const auto& f : forms[i]) row.push_back(f.str());
      out += (i ? ", [" : "[") + join(row) + "]";
    }
    out += "]";
    if (!names.empty()) out += " against " + names[0];
    return out;
  }
  if (v == "equicont") {
    std::vector<ExtRational> grid(numbers.begin() + 1, numbers.end());
    return v + " " + list(lists[0]) + " (" + formulas[0].str() + ") " + numbers[0].str() + " grid " +
           set(rationals_str(grid));
  }
  if (v == "closure") return v + " " + names[0] + " " + list(lists[0]);
  if (v == "weakcompact")
    return v + " " + list(lists[0]) + " " + formulas[0].str() + " within " + numbers[0].str();
  if (v == "continuous") return v + " " + names[0] + " probes " + set(rationals_str(numbers));
  return v + " " + join(names, " ");
}

const Signature& Workspace::signature(const std::string& name) const {
  static const Signature kEmpty;
  if (name.empty()) return kEmpty;
  if (auto* s = find_named(signatures, name)) return s->signature;
  throw ReferenceError("unknown signature '" + name + "'");
}

const NamedAlgebra& Workspace::algebra(const std::string& name) const {
  if (auto* a = find_named(algebras, name)) return *a;
  throw ReferenceError("unknown algebra '" + name + "'");
}

const NamedCongruence& Workspace::congruence(const std::string& name) const {
  if (auto* t = find_named(congruences, name)) return *t;
  throw ReferenceError("unknown congruence '" + name + "'");
}

const NamedMap& Workspace::map(const std::string& name) const {
  if (auto* m = find_named(maps, name)) return *m;
  throw ReferenceError("unknown map '" + name + "'");
}

const NamedFilter& Workspace::filter(const std::string& name) const {
  if (auto* f = find_named(filters, name)) return *f;
  throw ReferenceError("unknown filter '" + name + "'");
}

const NamedFormulas& Workspace::formula_set(const std::string& name) const {
  if (auto* f = find_named(formulas, name)) return *f;
  throw ReferenceError("unknown axioms '" + name + "'");
}

const NamedPresentation& Workspace::presentation(const std::string& name) const {
  if (auto* p = find_named(presentations, name)) return *p;
  throw ReferenceError("unknown presentation '" + name + "'");
}

FiniteMetricSpace Workspace::space(const std::string& name) const {
  if (auto* s = find_named(spaces, name)) return s->space;
  if (auto* a = find_named(algebras, name)) return a->algebra->space();
  throw ReferenceError("unknown space '" + name + "'");
}

bool Workspace::has_algebra(const std::string& name) const { return find_named(algebras, name) != nullptr; }

bool Workspace::has_space(const std::string& name) const {
  return find_named(spaces, name) != nullptr || has_algebra(name);
}

Workspace parse_workspace(std::string_view text, const std::filesystem::path& base_dir) {
  Workspace ws;
  std::vector<std::filesystem::path> stack;
  Parser(ws, stack, base_dir).run(text);
  return ws;
}

Workspace load_workspace(const std::filesystem::path& file) {
  std::string text = read_file(file);
  Workspace ws;
  std::error_code ec;
  auto canonical = std::filesystem::weakly_canonical(file, ec);
  std::vector<std::filesystem::path> stack{ec ? file : canonical};
  Parser(ws, stack, file.parent_path()).run(text);
  return ws;
}

Command parse_command(std::string_view text, const Workspace& ws) {
  TokenStream in(text);
  Command c = CommandParser(in, ws).parse();
  in.accept(";");
  if (!in.at_end()) in.fail("trailing input after command");
  return c;
}

std::string serialize_workspace(const Workspace& ws) {
  std::ostringstream out;
  if (!(ws.limits == Limits{})) {
    const Limits& l = ws.limits;
    out << "limits {\n"
        << "  valuations = " << l.valuations << ";\n"
        << "  sections = " << l.sections << ";\n"
        << "  correspondences = " << l.correspondences << ";\n"
        << "  decreases = " << l.decreases << ";\n"
        << "  terms = " << l.terms << ";\n"
        << "  isomorphism_nodes = " << l.isomorphism_nodes << ";\n"
        << "  subsets = " << l.subsets << ";\n"
        << "}\n\n";
  }
  auto over = [](const std::string& sig) { return sig.empty() ? std::string() : " over " + sig; };
  for (const auto& s : ws.signatures) {
    out << "signature " << s.name << " {";
    for (const auto& [sym, arity] : s.signature.symbols()) out << " " << sym << "/" << arity << ";";
    out << " }\n";
  }
  for (const auto& a : ws.algebras) {
    const MetricAlgebra& alg = *a.algebra;
    out << "algebra " << a.name << over(a.signature) << " {\n";
    out << "  carrier " << join(alg.carrier()) << ";\n";
    out << "  metric " << matrix_str(alg.metric()) << ";\n";
    for (const auto& [sym, table] : alg.structure().ops()) {
      std::vector<std::string> values;
      for (std::size_t x : table.values) values.push_back(alg.carrier()[x]);
      out << "  op " << sym << " = table {" << join(values) << "};\n";
    }
    out << "}\n";
  }
  for (const auto& s : ws.spaces)
    out << "space " << s.name << " { points " << join(s.space.labels()) << "; metric " << matrix_str(s.space.dist())
        << "; }\n";
  for (const auto& t : ws.congruences)
    out << "congruence " << t.name << " on " << t.algebra << " { matrix " << matrix_str(t.matrix) << "; }\n";
  for (const auto& m : ws.maps) {
    const auto& from = ws.algebra(m.source).algebra->carrier();
    const auto& to = ws.algebra(m.target).algebra->carrier();
    out << "map " << m.name << " from " << m.source << " to " << m.target << " {";
    for (std::size_t i = 0; i < m.images.size(); ++i) out << " " << from[i] << " -> " << to[m.images[i]] << ";";
    out << " }\n";
  }
  for (const auto& f : ws.filters) {
    std::vector<std::string> core;
    for (std::size_t i : f.filter.core()) core.push_back(f.filter.index()[i]);
    out << "filter " << f.name << " on {" << join(f.filter.index()) << "} core {" << join(core) << "};\n";
  }
  for (const auto& f : ws.formulas) {
    out << "axioms " << f.name << over(f.signature) << " {\n";
    for (const auto& phi : f.implications) out << "  " << phi.str() << ";\n";
    for (const auto& q : f.inequalities) out << "  " << q.str() << ";\n";
    out << "}\n";
  }
  for (const auto& p : ws.presentations) {
    const Presentation& pr = p.presentation;
    out << "presentation " << p.name << over(p.signature) << " {\n";
    if (!pr.variables.empty()) out << "  vars " << join(pr.variables) << ";\n";
    out << "  mode " << pr.mode.str() << ";\n";
    out << "  depth " << pr.depth << ";\n";
    for (const auto& r : pr.relations) out << "  rel " << r.str() << ";\n";
    out << "}\n";
  }
  if (!ws.commands.empty()) out << "\n";
  for (const auto& c : ws.commands) out << c.str() << ";\n";
  return out.str();
}

void apply_limit_overrides(Limits& limits, std::string_view spec) {
  std::map<std::string, std::uint64_t Limits::*, std::less<>> fields{
      {"valuations", &Limits::valuations},
      {"sections", &Limits::sections},
      {"correspondences", &Limits::correspondences},
      {"decreases", &Limits::decreases},
      {"terms", &Limits::terms},
      {"isomorphism_nodes", &Limits::isomorphism_nodes},
      {"subsets", &Limits::subsets}};
  while (!spec.empty()) {
    auto comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view() : spec.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw DomainError("expected key=value in limits, got '" + std::string(item) + "'");
    auto key = item.substr(0, eq);
    auto value = item.substr(eq + 1);
    auto it = fields.find(key);
    if (it == fields.end()) throw DomainError("unknown limit '" + std::string(key) + "'");
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw DomainError("limit '" + std::string(key) + "' needs a nonnegative integer");
    limits.*(it->second) = n;
  }
}

}  // namespace metra
