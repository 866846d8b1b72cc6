#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace metra {

/// Base of every error raised by the library. `kind()` is a stable short tag
/// that the CLI copies into its JSON output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what,
        std::vector<std::size_t> witness = {})
      : std::runtime_error(what), kind_(std::move(kind)), witness_(std::move(witness)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }

 private:
  std::string kind_;
  std::vector<std::size_t> witness_;
};

#define METRA_DEFINE_ERROR(Name, tag)                                        \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what, std::vector<std::size_t> w = {}) \
        : Error(tag, what, std::move(w)) {}                                  \
  };

METRA_DEFINE_ERROR(ShapeError, "shape")
METRA_DEFINE_ERROR(DomainError, "domain")
METRA_DEFINE_ERROR(ArityError, "arity")
METRA_DEFINE_ERROR(AxiomError, "axiom")
METRA_DEFINE_ERROR(SignatureError, "signature")
METRA_DEFINE_ERROR(ValuationError, "valuation")
METRA_DEFINE_ERROR(CongruenceError, "congruence")
METRA_DEFINE_ERROR(OrderError, "order")
METRA_DEFINE_ERROR(HomomorphismError, "homomorphism")
METRA_DEFINE_ERROR(UnsupportedInput, "unsupported-input")
METRA_DEFINE_ERROR(ReferenceError, "reference")

#undef METRA_DEFINE_ERROR

/// A search or fixpoint exceeded its configured cap. Never a silent
/// approximation: the caller decides what to do with `detail`.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::string detail = {})
      : Error("resource", what), detail_(std::move(detail)) {}
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("parse", format(what, line, column)), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }
  std::size_t line_;
  std::size_t column_;
};

}  // namespace metra
