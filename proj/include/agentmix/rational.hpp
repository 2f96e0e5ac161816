#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>

namespace agentmix {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Every probability, reward and value in the library is one.
///
/// Values whose numerator and denominator fit in 63 bits are held inline
/// and combined with 128-bit intermediates; anything larger moves to GMP.
/// The representation is canonical (a value is inline whenever it fits), so
/// equality never has to compare across the two forms.
class Rational {
 public:
  Rational() = default;

  template <std::integral I>
  Rational(I value) {  // NOLINT(implicit)
    if constexpr (std::is_unsigned_v<I> && sizeof(I) >= sizeof(std::int64_t)) {
      if (value > static_cast<I>(kMax)) {
        set_big(mpq_class(mpz_class(std::to_string(value), 10)));
        return;
      }
    }
    if constexpr (std::is_signed_v<I> && sizeof(I) >= sizeof(std::int64_t)) {
      if (value < -kMax) {
        set_big(mpq_class(mpz_class(std::to_string(value), 10)));
        return;
      }
    }
    n_ = static_cast<std::int64_t>(value);
  }

  Rational(long num, long den);

  Rational(const Rational& o) : n_(o.n_), d_(o.d_), big_(o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr) {}
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) {
      n_ = o.n_;
      d_ = o.d_;
      big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  /// Parses "p/q", "p", with an optional leading sign on p ("+1", "-1/3").
  static Rational parse(std::string_view text);

  /// "p" for integers, "p/q" otherwise.
  std::string str() const;

  /// Decimal rendering rounded half away from zero to `places` digits. Only
  /// for human-facing output.
  std::string decimal(int places = 6) const;

  double to_double() const;

  int sign() const {
    if (big_) return sgn(*big_);
    return (n_ > 0) - (n_ < 0);
  }
  bool is_zero() const { return !big_ && n_ == 0; }
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  /// this^n for n >= 0.
  Rational pow(std::size_t n) const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o);
  /// Throws Error(DivisionByZero) on a zero divisor.
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const {
    Rational r;
    if (big_) {
      r.set_big(-*big_);
    } else {
      r.n_ = -n_;
      r.d_ = d_;
    }
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // canonical forms differ
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c;
    if (!a.big_ && !b.big_) {
      __int128 l = static_cast<__int128>(a.n_) * b.d_;
      __int128 r = static_cast<__int128>(b.n_) * a.d_;
      c = (l > r) - (l < r);
    } else {
      c = cmp(a.to_mpq(), b.to_mpq());
    }
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// The value as a GMP rational.
  mpq_class to_mpq() const;

 private:
  static constexpr std::int64_t kMax = INT64_MAX;

  void set_big(mpq_class q);
  void set_wide(__int128 n, __int128 d);  // d > 0, already reduced

  std::int64_t n_ = 0;
  std::int64_t d_ = 1;
  std::unique_ptr<mpq_class> big_;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace agentmix
