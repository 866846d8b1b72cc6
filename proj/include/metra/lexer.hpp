#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "metra/ext_rational.hpp"

namespace metra {

struct Token {
  enum class Kind { Ident, Number, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Tokenizer shared by the term, formula and workspace grammars.
/// Comments run from `#` or `//` to end of line. Multi-character punctuation:
/// `|-`, `->`, `<=`, `>=`.
class TokenStream {
 public:
  explicit TokenStream(std::string_view source);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_ident(std::string_view word, std::size_t ahead = 0) const;
  bool accept(std::string_view p);
  bool accept_word(std::string_view word);
  void expect(std::string_view p);
  void expect_word(std::string_view word);
  std::string expect_ident();
  /// Identifier or number (element names may be numerals).
  std::string expect_name();
  /// `inf`, `n` or `n/m`.
  ExtRational expect_rational();
  /// Possibly negative rational literal, returned as text "p/q".
  std::string expect_signed_rational_text();

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace metra
