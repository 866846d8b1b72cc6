#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace metra {

/// Exact value in [0, inf]: a nonnegative rational or infinity.
///
/// Values whose numerator and denominator fit in 64 bits are kept inline and
/// combined with 128-bit intermediates; anything larger is promoted to a GMP
/// rational. No operation ever rounds.
class ExtRational {
 public:
  ExtRational() noexcept : num_(0), den_(1) {}
  ExtRational(std::int64_t value);  // NOLINT(google-explicit-constructor)
  ExtRational(std::int64_t num, std::int64_t den);
  explicit ExtRational(const mpq_class& q);

  static ExtRational infinity() noexcept {
    ExtRational r;
    r.den_ = 0;
    return r;
  }

  /// Accepts "inf", "n" and "p/q" (surrounding whitespace ignored).
  static ExtRational parse(std::string_view text);

  bool is_infinite() const noexcept { return den_ == 0; }
  bool is_finite() const noexcept { return den_ != 0; }
  bool is_zero() const noexcept { return den_ > 0 && num_ == 0; }

  /// Throws DomainError on infinity.
  mpq_class to_mpq() const;

  /// Canonical text: "inf", "3", "1/2".
  std::string str() const;

  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);
  ExtRational& operator+=(const ExtRational& b) { return *this = *this + b; }

  /// Multiplication with the convention 0 * inf = 0.
  friend ExtRational operator*(const ExtRational& a, const ExtRational& b);

  /// |a - b|; if exactly one side is infinite the result is infinite.
  /// Both infinite is a DomainError (the difference is undefined).
  static ExtRational abs_diff(const ExtRational& a, const ExtRational& b);

  /// Division by a positive integer.
  ExtRational divided_by(std::int64_t k) const;

  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  static constexpr std::int64_t kBig = -1;

  bool is_big() const noexcept { return den_ == kBig; }
  static ExtRational from_i128(__int128 num, __int128 den);
  static ExtRational from_mpq(mpq_class q);

  // den_ > 0: inline num_/den_.  den_ == 0: infinity.  den_ == kBig: big_.
  std::int64_t num_;
  std::int64_t den_;
  std::shared_ptr<const mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const ExtRational& x);

inline const ExtRational& min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }
inline const ExtRational& max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }

}  // namespace metra
