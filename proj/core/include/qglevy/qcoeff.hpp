// Exact scalars for the symbolic layer: rational functions in the formal
// deformation parameter q, with Gaussian-rational (complex) coefficients.
// All arithmetic is exact; numerics enter only when a value is specialized
// at a rational q0 and converted to double.

#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qglevy {

using Rat = mpq_class;

struct QCoeffError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact complex number with rational real and imaginary parts.
struct CRat {
  Rat re, im;

  CRat() : re(0), im(0) {}
  CRat(long v) : re(v), im(0) {}  // NOLINT implicit by design
  CRat(const Rat& r) : re(r), im(0) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static CRat i_unit() { return CRat(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  CRat conj() const { return CRat(re, -im); }

  CRat operator-() const { return CRat(-re, -im); }
  CRat& operator+=(const CRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRat& operator-=(const CRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend CRat operator+(CRat a, const CRat& b) { return a += b; }
  friend CRat operator-(CRat a, const CRat& b) { return a -= b; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return CRat(Rat(a.re * b.re - a.im * b.im), Rat(a.re * b.im + a.im * b.re));
  }
  friend CRat operator/(const CRat& a, const CRat& b) {
    Rat n = b.re * b.re + b.im * b.im;
    if (n == 0) throw QCoeffError("CRat: division by zero");
    return CRat(Rat((a.re * b.re + a.im * b.im) / n),
                Rat((a.im * b.re - a.re * b.im) / n));
  }
  friend bool operator==(const CRat& a, const CRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

  std::complex<double> to_complex() const {
    return {re.get_d(), im.get_d()};
  }
  std::string str() const;
};

// Dense polynomial in q over CRat; coefficient k is the coefficient of q^k.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(CRat c) {
    if (!c.is_zero()) c_.push_back(std::move(c));
  }
  static QPoly monomial(const CRat& c, int deg);

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 if zero
  const CRat& coeff(int k) const;
  CRat lead() const { return c_.empty() ? CRat() : c_.back(); }
  bool is_one() const {
    return c_.size() == 1 && c_[0] == CRat(1);
  }

  QPoly operator-() const;
  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend bool operator==(const QPoly& a, const QPoly& b) {
    return a.c_ == b.c_;
  }

  // Euclidean division; throws on zero divisor.
  static void divrem(const QPoly& a, const QPoly& b, QPoly& quo, QPoly& rem);

  QPoly conj() const;            // conjugates coefficients, q stays real
  CRat eval(const Rat& q0) const;  // exact specialization
  std::string str() const;       // parseable by the element parser

 private:
  void trim();
  std::vector<CRat> c_;
};

QPoly poly_gcd(QPoly a, QPoly b);  // monic gcd

// Rational function num/den in q, normalized: gcd cancelled, den monic,
// zero stored as 0/1. The carrier for all AlgElt coefficients.
class QCoeff {
 public:
  QCoeff() : num_(), den_(QPoly(CRat(1))) {}
  QCoeff(long v) : QCoeff(CRat(v)) {}  // NOLINT implicit by design
  QCoeff(const Rat& r) : QCoeff(CRat(r)) {}
  QCoeff(const CRat& c) : num_(QPoly(c)), den_(QPoly(CRat(1))) {}
  QCoeff(QPoly num, QPoly den);

  static QCoeff q_power(long m);  // q^m, m may be negative
  static QCoeff i_unit() { return QCoeff(CRat::i_unit()); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  const QPoly& num() const { return num_; }
  const QPoly& den() const { return den_; }

  QCoeff operator-() const;
  QCoeff conj() const;
  QCoeff& operator+=(const QCoeff& o);
  QCoeff& operator-=(const QCoeff& o);
  QCoeff& operator*=(const QCoeff& o);
  QCoeff& operator/=(const QCoeff& o);
  friend QCoeff operator+(QCoeff a, const QCoeff& b) { return a += b; }
  friend QCoeff operator-(QCoeff a, const QCoeff& b) { return a -= b; }
  friend QCoeff operator*(QCoeff a, const QCoeff& b) { return a *= b; }
  friend QCoeff operator/(QCoeff a, const QCoeff& b) { return a /= b; }
  friend bool operator==(const QCoeff& a, const QCoeff& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const QCoeff& a, const QCoeff& b) {
    return !(a == b);
  }

  // Exact value at a rational q0; throws if the denominator vanishes there.
  CRat eval(const Rat& q0) const;
  std::complex<double> eval_d(const Rat& q0) const {
    return eval(q0).to_complex();
  }

  std::string str() const;

 private:
  void normalize();
  QPoly num_, den_;
};

Rat parse_rat(const std::string& s);  // "3", "-1/2"

}  // namespace qglevy
