#include "agentmix/rational.hpp"

#include <cctype>
#include <climits>
#include <numeric>

#include "agentmix/error.hpp"

namespace agentmix {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

using u128 = unsigned __int128;

u128 uabs(__int128 v) { return v < 0 ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v); }

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

mpz_class mpz_from(__int128 v) {
  u128 m = uabs(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(m >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(m)));
  mpz_class r = (hi << 64) + lo;
  return v < 0 ? mpz_class(-r) : r;
}

}  // namespace

Rational::Rational(long num, long den) {
  if (den == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator");
  __int128 n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  u128 g = gcd128(uabs(n), static_cast<u128>(d));
  if (g > 1) {
    n /= static_cast<__int128>(g);
    d /= static_cast<__int128>(g);
  }
  set_wide(n, d);
}

void Rational::set_big(mpq_class q) {
  if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_slong_p(q.get_den_mpz_t())) {
    long n = mpz_get_si(q.get_num_mpz_t());
    if (n != LONG_MIN) {
      n_ = n;
      d_ = mpz_get_si(q.get_den_mpz_t());
      big_.reset();
      return;
    }
  }
  if (big_) {
    *big_ = std::move(q);
  } else {
    big_ = std::make_unique<mpq_class>(std::move(q));
  }
  n_ = 0;
  d_ = 1;
}

void Rational::set_wide(__int128 n, __int128 d) {
  if (n >= -kMax && n <= kMax && d <= kMax) {
    n_ = static_cast<std::int64_t>(n);
    d_ = static_cast<std::int64_t>(d);
    big_.reset();
    return;
  }
  mpq_class q(mpz_from(n), mpz_from(d));
  set_big(std::move(q));
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(n_)), mpz_class(static_cast<long>(d_)));
}

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view num = s;
  std::string_view den = "1";
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  if (!all_digits(num) || !all_digits(den))
    throw Error(ErrorCode::BadRational, "malformed rational '" + std::string(text) + "'");
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator in '" + std::string(text) + "'");
  mpq_class q(negative ? mpz_class(-n) : n, d);
  q.canonicalize();
  Rational r;
  r.set_big(std::move(q));
  return r;
}

std::string Rational::str() const {
  if (!big_) return d_ == 1 ? std::to_string(n_) : std::to_string(n_) + "/" + std::to_string(d_);
  if (big_->get_den() == 1) return big_->get_num().get_str();
  return big_->get_num().get_str() + "/" + big_->get_den().get_str();
}

std::string Rational::decimal(int places) const {
  const mpq_class q = to_mpq();
  mpz_class scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  mpz_class num = ::abs(q.get_num()) * scale * 2 + q.get_den();
  mpz_class den = q.get_den() * 2;
  mpz_class scaled = num / den;
  std::string digits = scaled.get_str();
  if (static_cast<int>(digits.size()) <= places)
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  std::string out;
  if (sign() < 0 && scaled != 0) out.push_back('-');
  out += digits.substr(0, digits.size() - places);
  if (places > 0) out += "." + digits.substr(digits.size() - places);
  return out;
}

double Rational::to_double() const {
  if (!big_) return static_cast<double>(n_) / static_cast<double>(d_);
  return big_->get_d();
}

Rational Rational::pow(std::size_t n) const {
  Rational result(1);
  for (std::size_t i = 0; i < n; ++i) result *= *this;
  return result;
}

Rational& Rational::operator+=(const Rational& o) {
  if (big_ || o.big_) {
    set_big(to_mpq() + o.to_mpq());
    return *this;
  }
  if (o.n_ == 0) return *this;
  if (n_ == 0) {
    n_ = o.n_;
    d_ = o.d_;
    return *this;
  }
  const std::uint64_t g1 = gcd64(static_cast<std::uint64_t>(d_), static_cast<std::uint64_t>(o.d_));
  if (g1 == 1) {
    __int128 n = static_cast<__int128>(n_) * o.d_ + static_cast<__int128>(o.n_) * d_;
    __int128 d = static_cast<__int128>(d_) * o.d_;
    set_wide(n, d);
    return *this;
  }
  const std::int64_t ad = d_ / static_cast<std::int64_t>(g1);
  const std::int64_t bd = o.d_ / static_cast<std::int64_t>(g1);
  __int128 t = static_cast<__int128>(n_) * bd + static_cast<__int128>(o.n_) * ad;
  if (t == 0) {
    n_ = 0;
    d_ = 1;
    return *this;
  }
  const std::uint64_t g2 = static_cast<std::uint64_t>(gcd128(uabs(t), g1));
  set_wide(t / static_cast<__int128>(g2), static_cast<__int128>(ad) * (o.d_ / static_cast<std::int64_t>(g2)));
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  if (big_ || o.big_) {
    set_big(to_mpq() * o.to_mpq());
    return *this;
  }
  if (n_ == 0) return *this;
  if (o.n_ == 0) {
    n_ = 0;
    d_ = 1;
    return *this;
  }
  const auto g1 = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(n_ < 0 ? -n_ : n_),
                                                  static_cast<std::uint64_t>(o.d_)));
  const auto g2 = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(o.n_ < 0 ? -o.n_ : o.n_),
                                                  static_cast<std::uint64_t>(d_)));
  __int128 n = static_cast<__int128>(n_ / g1) * (o.n_ / g2);
  __int128 d = static_cast<__int128>(d_ / g2) * (o.d_ / g1);
  set_wide(n, d);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero");
  if (big_ || o.big_) {
    set_big(to_mpq() / o.to_mpq());
    return *this;
  }
  Rational inv;
  inv.n_ = o.n_ < 0 ? -o.d_ : o.d_;
  inv.d_ = o.n_ < 0 ? -o.n_ : o.n_;
  return *this *= inv;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::BadRational: return "BadRational";
    case ErrorCode::AlternationViolation: return "AlternationViolation";
    case ErrorCode::SymbolOutOfSpace: return "SymbolOutOfSpace";
    case ErrorCode::RewardsNotNegationClosed: return "RewardsNotNegationClosed";
    case ErrorCode::BadSpaces: return "BadSpaces";
    case ErrorCode::WrongParity: return "WrongParity";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NoTailBound: return "NoTailBound";
    case ErrorCode::NoFiniteHorizon: return "NoFiniteHorizon";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::CarrierMismatch: return "CarrierMismatch";
    case ErrorCode::NotStronglyWellBehaved: return "NotStronglyWellBehaved";
    case ErrorCode::NotFiniteHorizon: return "NotFiniteHorizon";
    case ErrorCode::SiteDeterministic: return "SiteDeterministic";
    case ErrorCode::SiteUnreachable: return "SiteUnreachable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownName: return "UnknownName";
  }
  return "Unknown";
}

}  // namespace agentmix
