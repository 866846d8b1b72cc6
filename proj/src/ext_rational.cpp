#include "metra/ext_rational.hpp"

#include <cctype>
#include <limits>
#include <ostream>

#include "metra/error.hpp"

namespace metra {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(i128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

mpq_class to_gmp(i128 v) {
  // Split into two 64-bit halves; GMP has no native 128-bit constructor.
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(u >> 64));
  mpz_class lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
  mpz_class r = (hi << 64) + lo;
  if (neg) r = -r;
  return mpq_class(r);
}

}  // namespace

ExtRational::ExtRational(std::int64_t value) : num_(value), den_(1) {
  if (value < 0) throw DomainError("negative distance " + std::to_string(value));
}

ExtRational::ExtRational(std::int64_t num, std::int64_t den) : num_(0), den_(1) {
  if (den == 0) throw DomainError("zero denominator");
  *this = from_i128(num, den);
}

ExtRational::ExtRational(const mpq_class& q) : num_(0), den_(1) { *this = from_mpq(q); }

ExtRational ExtRational::from_i128(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num < 0) throw DomainError("negative distance");
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (fits64(num) && fits64(den)) {
    ExtRational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  return from_mpq(to_gmp(num) / to_gmp(den));
}

ExtRational ExtRational::from_mpq(mpq_class q) {
  q.canonicalize();
  if (sgn(q) < 0) throw DomainError("negative distance " + q.get_str());
  ExtRational r;
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
    r.num_ = q.get_num().get_si();
    r.den_ = q.get_den().get_si();
    return r;
  }
  r.den_ = kBig;
  r.big_ = std::make_shared<const mpq_class>(std::move(q));
  return r;
}

ExtRational ExtRational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text == "inf") return infinity();
  if (text.empty()) throw DomainError("empty rational literal");
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/'))
      throw DomainError("malformed rational literal '" + std::string(text) + "'");
  }
  mpq_class q;
  if (q.set_str(std::string(text), 10) != 0) throw DomainError("malformed rational literal '" + std::string(text) + "'");
  if (q.get_den() == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  return ExtRational(q);
}

mpq_class ExtRational::to_mpq() const {
  if (is_infinite()) throw DomainError("infinite distance has no rational value");
  if (is_big()) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

std::string ExtRational::str() const {
  if (is_infinite()) return "inf";
  if (is_big()) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtRational::infinity();
  if (a.is_big() || b.is_big()) return ExtRational::from_mpq(a.to_mpq() + b.to_mpq());
  if (a.den_ == b.den_) {
    std::int64_t s;
    if (!__builtin_add_overflow(a.num_, b.num_, &s)) {
      if (a.den_ == 1) {
        ExtRational r;
        r.num_ = s;
        return r;
      }
      return ExtRational::from_i128(s, a.den_);
    }
  }
  __int128 num = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
  __int128 den = static_cast<__int128>(a.den_) * b.den_;
  return ExtRational::from_i128(num, den);
}

ExtRational operator*(const ExtRational& a, const ExtRational& b) {
  if (a.is_zero() || b.is_zero()) return ExtRational();
  if (a.is_infinite() || b.is_infinite()) return ExtRational::infinity();
  if (a.is_big() || b.is_big()) return ExtRational::from_mpq(a.to_mpq() * b.to_mpq());
  return ExtRational::from_i128(static_cast<__int128>(a.num_) * b.num_,
                                static_cast<__int128>(a.den_) * b.den_);
}

ExtRational ExtRational::abs_diff(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() && b.is_infinite()) throw DomainError("difference of two infinite distances");
  if (a.is_infinite() || b.is_infinite()) return infinity();
  mpq_class d = a.to_mpq() - b.to_mpq();
  return from_mpq(abs(d));
}

ExtRational ExtRational::divided_by(std::int64_t k) const {
  if (k <= 0) throw DomainError("division by a non-positive integer");
  if (is_infinite()) return *this;
  if (is_big()) return from_mpq(*big_ / mpq_class(mpz_class(static_cast<long>(k))));
  return from_i128(num_, static_cast<__int128>(den_) * k);
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (a.is_big() || b.is_big()) {
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less
               : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::ostream& operator<<(std::ostream& os, const ExtRational& x) { return os << x.str(); }

}  // namespace metra
