#include "metra/lexer.hpp"

#include <cctype>

#include "metra/error.hpp"

namespace metra {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

}  // namespace

TokenStream::TokenStream(std::string_view src) {
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw ParseError("unterminated string literal", line, col);
      t.kind = Token::Kind::String;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
    } else {
      static constexpr std::string_view kTwo[] = {"|-", "->", "<=", ">="};
      t.kind = Token::Kind::Punct;
      for (auto two : kTwo) {
        if (src.substr(i, 2) == two) {
          t.text = std::string(two);
          break;
        }
      }
      if (t.text.empty()) {
        static constexpr std::string_view kOne = "{}[](),;=:+-*/^<>|";
        if (kOne.find(c) == std::string_view::npos)
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    tokens_.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  tokens_.push_back(end);
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Punct && t.text == p;
}

bool TokenStream::is_ident(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Ident && t.text == word;
}

bool TokenStream::accept(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

bool TokenStream::accept_word(std::string_view word) {
  if (!is_ident(word)) return false;
  next();
  return true;
}

void TokenStream::expect(std::string_view p) {
  if (!accept(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()));
}

void TokenStream::expect_word(std::string_view word) {
  if (!accept_word(word)) fail("expected '" + std::string(word) + "' but found " + describe(peek()));
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Token::Kind::Ident) fail("expected identifier but found " + describe(peek()));
  return next().text;
}

std::string TokenStream::expect_name() {
  if (peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::Number)
    fail("expected name but found " + describe(peek()));
  return next().text;
}

ExtRational TokenStream::expect_rational() {
  if (accept_word("inf")) return ExtRational::infinity();
  if (peek().kind != Token::Kind::Number) fail("expected rational or 'inf' but found " + describe(peek()));
  std::string text = next().text;
  if (is_punct("/") && peek(1).kind == Token::Kind::Number) {
    next();
    text += "/" + next().text;
  }
  try {
    return ExtRational::parse(text);
  } catch (const DomainError& e) {
    fail(e.what());
  }
}

std::string TokenStream::expect_signed_rational_text() {
  std::string sign = accept("-") ? "-" : "";
  if (peek().kind != Token::Kind::Number) fail("expected rational but found " + describe(peek()));
  std::string text = next().text;
  if (is_punct("/") && peek(1).kind == Token::Kind::Number) {
    next();
    std::string den = next().text;
    if (den.find_first_not_of('0') == std::string::npos) fail("zero denominator");
    text += "/" + den;
  }
  return sign + text;
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& t, const std::string& message) const {
  throw ParseError(message, t.line, t.column);
}

}  // namespace metra
