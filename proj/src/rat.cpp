#include "restake/rat.hpp"

#include <cctype>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "restake/errors.hpp"

namespace restake {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw InputError("not a valid number: '" + std::string(text) + "'");
}

}  // namespace

Rat::Rat(long num, long den) {
  if (den == 0) throw InputError("zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw InputError("division by zero");
  q_ /= o.q_;
  return *this;
}

Rat Rat::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_number(text);

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
    if (s.empty()) bad_number(text);
  }

  mpq_class value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_number(text);
    mpz_class n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    value = mpq_class(n) / mpq_class(d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) bad_number(text);
    if (!whole.empty() && !all_digits(whole)) bad_number(text);
    if (!frac.empty() && !all_digits(frac)) bad_number(text);
    mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
    mpz_class scale = 1;
    mpz_class f = 0;
    if (!frac.empty()) {
      f = mpz_class(std::string(frac), 10);
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    }
    value = mpq_class(w * scale + f) / mpq_class(scale);
  } else {
    if (!all_digits(s)) bad_number(text);
    value = mpq_class(mpz_class(std::string(s), 10));
  }
  if (negative) value = -value;
  return Rat(std::move(value));
}

std::string Rat::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rat::decimal() const {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", q_.get_d());
  return buf;
}

long Rat::floor_div(const Rat& a, const Rat& b) {
  if (!b.is_positive()) throw InputError("floor_div requires a positive divisor");
  mpq_class q = a.q_ / b.q_;
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  if (!r.fits_slong_p()) throw CapacityError("quotient too large");
  return r.get_si();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

std::size_t Rat::hash() const {
  auto mix = [](std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  };
  std::size_t h = static_cast<std::size_t>(sgn(q_)) + 0x51ed270b;
  const mpz_srcptr num = q_.get_num().get_mpz_t();
  const mpz_srcptr den = q_.get_den().get_mpz_t();
  for (std::size_t i = 0; i < mpz_size(num); ++i) h = mix(h, mpz_getlimbn(num, i));
  for (std::size_t i = 0; i < mpz_size(den); ++i) h = mix(h, mpz_getlimbn(den, i));
  return h;
}

}  // namespace restake
