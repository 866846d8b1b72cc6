#include "metra/terms.hpp"

#include <algorithm>
#include <limits>

#include "metra/error.hpp"
#include "metra/lexer.hpp"

namespace metra {

Signature::Signature(std::initializer_list<std::pair<const std::string, std::size_t>> symbols) {
  for (const auto& [name, arity] : symbols) add(name, arity);
}

void Signature::add(const std::string& name, std::size_t arity) {
  if (!symbols_.emplace(name, arity).second) throw SignatureError("duplicate symbol '" + name + "'");
}

std::size_t Signature::arity(const std::string& name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) throw SignatureError("unknown symbol '" + name + "'");
  return it->second;
}

bool Signature::has_constants() const {
  return std::any_of(symbols_.begin(), symbols_.end(), [](const auto& kv) { return kv.second == 0; });
}

struct Term::Node {
  bool variable;
  std::string name;
  std::vector<Term> args;
  std::size_t height;
};

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{true, std::move(name), {}, 0}));
}

Term Term::apply(std::string symbol, std::vector<Term> args) {
  std::size_t h = 0;
  for (const Term& a : args) h = std::max(h, a.height() + 1);
  return Term(std::make_shared<const Node>(Node{false, std::move(symbol), std::move(args), h}));
}

bool Term::is_variable() const noexcept { return node_->variable; }
const std::string& Term::name() const noexcept { return node_->name; }
std::span<const Term> Term::args() const noexcept { return node_->args; }
std::size_t Term::height() const noexcept { return node_->height; }

std::set<std::string> Term::variables() const {
  std::set<std::string> out;
  std::vector<const Term*> stack{this};
  while (!stack.empty()) {
    const Term* t = stack.back();
    stack.pop_back();
    if (t->is_variable())
      out.insert(t->name());
    else
      for (const Term& a : t->args()) stack.push_back(&a);
  }
  return out;
}

std::string Term::str(bool explicit_constants) const {
  if (is_variable()) return name();
  if (args().empty()) return explicit_constants ? name() + "()" : name();
  std::string s = name() + "(";
  for (std::size_t i = 0; i < args().size(); ++i) s += (i ? "," : "") + args()[i].str(explicit_constants);
  return s + ")";
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == std::strong_ordering::equal; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.is_variable() != b.is_variable())
    return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  if (auto c = a.args().size() <=> b.args().size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (auto c = a.args()[i] <=> b.args()[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

void check_term(const Term& t, const Signature& sig) {
  if (t.is_variable()) return;
  const std::size_t expected = sig.arity(t.name());
  if (expected != t.args().size())
    throw SignatureError("'" + t.name() + "' expects " + std::to_string(expected) + " argument(s), got " +
                         std::to_string(t.args().size()));
  for (const Term& a : t.args()) check_term(a, sig);
}

Term parse_term(TokenStream& in, const Signature* sig) {
  const Token head = in.peek();
  std::string name = in.expect_ident();
  if (in.accept("(")) {
    std::vector<Term> args;
    if (!in.is_punct(")")) {
      do {
        args.push_back(parse_term(in, sig));
      } while (in.accept(","));
    }
    in.expect(")");
    if (sig != nullptr) {
      if (!sig->contains(name))
        throw SignatureError(std::to_string(head.line) + ":" + std::to_string(head.column) + ": unknown symbol '" +
                             name + "'");
      if (sig->arity(name) != args.size())
        throw SignatureError(std::to_string(head.line) + ":" + std::to_string(head.column) + ": '" + name +
                             "' expects " + std::to_string(sig->arity(name)) + " argument(s), got " +
                             std::to_string(args.size()));
    }
    return Term::apply(std::move(name), std::move(args));
  }
  if (sig != nullptr && sig->contains(name)) {
    if (sig->arity(name) != 0)
      throw SignatureError(std::to_string(head.line) + ":" + std::to_string(head.column) + ": '" + name +
                           "' expects " + std::to_string(sig->arity(name)) + " argument(s), got 0");
    return Term::apply(std::move(name));
  }
  return Term::var(std::move(name));
}

Term parse_term(std::string_view text, const Signature& sig) {
  TokenStream in(text);
  Term t = parse_term(in, &sig);
  if (!in.at_end()) in.fail("trailing input after term");
  return t;
}

namespace {

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) return std::numeric_limits<std::size_t>::max();
    r *= base;
  }
  return r;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

}  // namespace

std::vector<Term> enumerate_terms(const Signature& sig, const std::vector<std::string>& vars, std::size_t depth,
                                  const Limits& limits) {
  // Size bound first so the cap fires before any allocation.
  std::size_t count = vars.size();
  for (const auto& [name, arity] : sig.symbols())
    if (arity == 0) count = saturating_add(count, 1);
  for (std::size_t level = 1; level <= depth; ++level) {
    std::size_t next = vars.size();
    for (const auto& [name, arity] : sig.symbols()) next = saturating_add(next, saturating_pow(count, arity));
    count = next;
  }
  if (count > limits.terms)
    throw ResourceError("term enumeration would produce " + std::to_string(count) + " terms, cap is " +
                            std::to_string(limits.terms),
                        "count bound " + std::to_string(count));

  std::vector<Term> current;
  for (const auto& v : vars) current.push_back(Term::var(v));
  for (const auto& [name, arity] : sig.symbols())
    if (arity == 0) current.push_back(Term::apply(name));

  for (std::size_t level = 1; level <= depth; ++level) {
    std::vector<Term> next;
    for (const auto& v : vars) next.push_back(Term::var(v));
    for (const auto& [name, arity] : sig.symbols()) {
      if (arity == 0) {
        next.push_back(Term::apply(name));
        continue;
      }
      if (current.empty()) continue;
      std::vector<std::size_t> digits(arity, 0);
      while (true) {
        std::vector<Term> args;
        args.reserve(arity);
        for (std::size_t d : digits) args.push_back(current[d]);
        next.push_back(Term::apply(name, std::move(args)));
        std::size_t k = arity;
        while (k > 0 && ++digits[k - 1] == current.size()) digits[--k] = 0;
        if (k == 0) break;
      }
    }
    current = std::move(next);
  }
  return current;
}

SigmaAlgebra::SigmaAlgebra(Signature sig, std::size_t size, std::map<std::string, OpTable> ops)
    : sig_(std::move(sig)), size_(size), ops_(std::move(ops)) {
  for (const auto& [name, arity] : sig_.symbols()) {
    auto it = ops_.find(name);
    if (it == ops_.end()) throw SignatureError("no table for symbol '" + name + "'");
    if (it->second.arity != arity)
      throw SignatureError("table for '" + name + "' has arity " + std::to_string(it->second.arity) + ", expected " +
                           std::to_string(arity));
    if (it->second.values.size() != tuple_count(arity))
      throw ShapeError("table for '" + name + "' has " + std::to_string(it->second.values.size()) +
                       " entries, expected " + std::to_string(tuple_count(arity)));
  }
  for (const auto& [name, table] : ops_)
    if (!sig_.contains(name)) throw SignatureError("table for symbol '" + name + "' outside the signature");
}

const OpTable& SigmaAlgebra::table(const std::string& symbol) const {
  auto it = ops_.find(symbol);
  if (it == ops_.end()) throw SignatureError("unknown symbol '" + symbol + "'");
  return it->second;
}

std::size_t SigmaAlgebra::tuple_count(std::size_t arity) const { return saturating_pow(size_, arity); }

std::size_t SigmaAlgebra::index(std::span<const std::size_t> args) const {
  std::size_t code = 0;
  for (std::size_t a : args) code = code * size_ + a;
  return code;
}

std::vector<std::size_t> SigmaAlgebra::args_of(std::size_t index, std::size_t arity) const {
  std::vector<std::size_t> out(arity);
  for (std::size_t i = arity; i-- > 0;) {
    out[i] = index % size_;
    index /= size_;
  }
  return out;
}

std::size_t SigmaAlgebra::apply(const std::string& symbol, std::span<const std::size_t> args) const {
  const OpTable& t = table(symbol);
  if (t.arity != args.size())
    throw SignatureError("'" + symbol + "' expects " + std::to_string(t.arity) + " argument(s), got " +
                         std::to_string(args.size()));
  return t.values[index(args)];
}

std::size_t evaluate(const Term& t, const SigmaAlgebra& a, const Valuation& v) {
  if (t.is_variable()) {
    auto it = v.find(t.name());
    if (it == v.end()) throw ValuationError("unbound variable '" + t.name() + "'");
    if (it->second >= a.size()) throw ValuationError("variable '" + t.name() + "' mapped outside the carrier");
    return it->second;
  }
  std::vector<std::size_t> args;
  args.reserve(t.args().size());
  for (const Term& s : t.args()) args.push_back(evaluate(s, a, v));
  return a.apply(t.name(), args);
}

Term substitute(const Term& t, const std::map<std::string, Term>& s) {
  if (t.is_variable()) {
    auto it = s.find(t.name());
    if (it == s.end()) throw ValuationError("substitution does not bind '" + t.name() + "'");
    return it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(substitute(a, s));
  return Term::apply(t.name(), std::move(args));
}

}  // namespace metra
